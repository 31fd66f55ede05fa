use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn polyclone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyclone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = polyclone(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn pol_on_oit_lists_the_two_projections() {
    let o = polyclone(&["pol", "--structure", &data("oit.str"), "--arity", "2", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let listed: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(listed, ["π^2_1  0 0 1 1", "π^2_2  0 1 0 1"]);

    let v = json(&["pol", "--structure", &data("oit.str"), "--arity", "2"]);
    assert_eq!(v["schema"], "polyclone/pol/v1");
    assert_eq!(v["count"], 2);
    assert_eq!(v["operations"][0]["projection"], 1);
    assert_eq!(v["operations"][1]["projection"], 2);
}

#[test]
fn cyclic_betweenness_is_unsat_with_exit_zero() {
    let o = polyclone(&["betw", "solve", "--instance", &data("cyc.btw")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "UNSAT\n");
    let v = json(&["betw", "solve", "--instance", &data("cyc.btw")]);
    assert_eq!(v["result"], "UNSAT");
}

#[test]
fn betweenness_witness_order() {
    let v = json(&["betw", "solve", "--instance", &data("two.btw"), "--verify"]);
    assert_eq!(v["result"], "SAT");
    assert_eq!(v["order"], serde_json::json!(["a", "b", "d", "c"]));
}

#[test]
fn k4_in_three_colouring_is_unsat() {
    let o = polyclone(&["solve", "--structure", &data("neq3.str"), "--sentence", &data("k4.pp")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "UNSAT\n");
}

#[test]
fn triangle_is_sat_with_witness() {
    let v = json(&[
        "solve",
        "--structure",
        &data("neq3.str"),
        "--sentence",
        &data("triangle.pp"),
        "--verify",
    ]);
    assert_eq!(v["result"], "SAT");
    assert_eq!(v["witness"], serde_json::json!({ "x": 0, "y": 1, "z": 2 }));
}

#[test]
fn ppdef_both_verdicts() {
    let v = json(&[
        "ppdef",
        "--structure",
        &data("oit.str"),
        "--relation",
        &data("swap.rel"),
        "--verify",
    ]);
    assert_eq!(v["definable"], true);
    assert!(v["formula"].as_str().unwrap().contains("OIT"));

    let v = json(&[
        "ppdef",
        "--structure",
        &data("neq3.str"),
        "--relation",
        &data("zero.rel"),
        "--verify",
    ]);
    assert_eq!(v["definable"], false);
    assert_eq!(v["witness"]["chosen"], serde_json::json!([[0]]));
    assert_ne!(v["witness"]["image"], serde_json::json!([0]));
}

#[test]
fn interpretation_verdicts() {
    let args = |i: &str| {
        vec![
            "interpret".to_string(),
            "verify".into(),
            "--host".into(),
            data("set2.str"),
            "--target".into(),
            data("pairs.str"),
            "--interp".into(),
            data(i),
            "--verify".into(),
        ]
    };
    let good = args("pairs.int");
    let v = json(&good.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(v["valid"], true);
    let bad = args("pairs_bad.int");
    let v = json(&bad.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(v["valid"], false);
    assert_eq!(v["counterexample"]["kind"], "atom");
    assert_eq!(v["counterexample"]["symbol"], "M");
}

#[test]
fn reduce_translates_coordinates() {
    let o = polyclone(&[
        "reduce",
        "--interp",
        &data("pairs.int"),
        "--sentence",
        &data("pairs_path.pp"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "(exists (u@1 u@2 v@1 v@2 w@1 w@2) (and (= u@2 v@1) (= v@2 w@1) (= w@2 u@1)))\n"
    );
}

#[test]
fn hardness_certificate_and_obstruction() {
    let v = json(&[
        "hardness",
        "--structure",
        &data("oit.str"),
        "--max-arity",
        "3",
        "--max-power",
        "1",
        "--verify",
    ]);
    assert_eq!(v["hard"], true);
    assert_eq!(v["verdict"], "hard: projection clone at K=3; certificate n=1");
    assert_eq!(v["certificate"]["power"], 1);

    let v = json(&["hardness", "--structure", &data("set2.str")]);
    assert_eq!(v["hard"], false);
    assert!(v["verdict"].as_str().unwrap().contains("constants present"));
    assert!(v["constant_obstruction"].is_object());
}

#[test]
fn hardness_report_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("polyclone-report-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.txt");
    let o = polyclone(&[
        "hardness",
        "--structure",
        &data("oit.str"),
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn betweenness_classification() {
    let v = json(&["betw", "classify", "--sample", &data("min.sample"), "--verify"]);
    assert_eq!(v["classification"]["kind"], "unclassifiable");
    assert_eq!(v["violation"]["values"], serde_json::json!(["0", "1", "0"]));

    let v = json(&[
        "betw",
        "classify",
        "--expr",
        &data("first.expr"),
        "--arity",
        "2",
        "--radius",
        "1",
    ]);
    assert_eq!(
        v["classification"],
        serde_json::json!({ "kind": "classified", "d": 1, "direction": "increasing" })
    );
    assert!(v["violation"].is_null());
}

#[test]
fn falsifier_outcomes() {
    let v = json(&["betw", "falsify", "--expr", &data("sum.expr"), "--verify"]);
    assert_eq!(v["result"], "trace");
    assert_eq!(v["violation"]["values"], serde_json::json!(["0", "0", "1"]));

    let v = json(&["betw", "falsify", "--expr", &data("diff.expr"), "--verify"]);
    assert_eq!(v["result"], "precondition_failed");
    assert_eq!(
        v["violation"]["args"],
        serde_json::json!([["0", "0"], ["1", "1"], ["2", "2"]])
    );

    let o = polyclone(&["betw", "falsify", "--expr", &data("first.expr"), "--arity", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn algebra_commands() {
    let v = json(&["algebra", "hsp", "--a", &data("xor.alg"), "--b", &data("and.alg")]);
    assert_eq!(v["result"], "not_member");
    assert_eq!(v["n_max"], 4);

    let v = json(&[
        "algebra",
        "nathom",
        "--a",
        &data("xor.alg"),
        "--b",
        &data("and.alg"),
        "--verify",
    ]);
    assert_eq!(v["result"], "fails");

    let v = json(&[
        "algebra",
        "hsp",
        "--a",
        &data("and.alg"),
        "--b",
        &data("and.alg"),
        "--verify",
    ]);
    assert_eq!(v["result"], "member");
    assert_eq!(v["certificate"]["power"], 1);
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(polyclone(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        polyclone(&["pol", "--structure", &data("oit.str")]).status.code(),
        Some(2)
    );
    // input
    assert_eq!(
        polyclone(&["pol", "--structure", &data("missing.str"), "--arity", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        polyclone(&["pol", "--structure", &data("k4.pp"), "--arity", "1"])
            .status
            .code(),
        Some(2)
    );
    // budget
    let o = polyclone(&["pol", "--structure", &data("neq3.str"), "--arity", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget exceeded"));
    let o = polyclone(&[
        "pol",
        "--structure",
        &data("oit.str"),
        "--arity",
        "3",
        "--max-candidates",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = polyclone(&[
        "pol",
        "--structure",
        &data("neq3.str"),
        "--arity",
        "3",
        "--max-candidates",
        "2^43",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_independent_of_jobs() {
    let runs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|j| {
            polyclone(&[
                "pol",
                "--structure",
                &data("neq3.str"),
                "--arity",
                "2",
                "--jobs",
                j,
                "--json",
            ])
            .stdout
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let runs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|j| polyclone(&["hardness", "--structure", &data("oit.str"), "--jobs", j]).stdout)
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn json_outputs_match_schema_files() {
    let schemas: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "schemas"].iter().collect();
    let cases: Vec<Vec<String>> = vec![
        vec![
            "solve".into(),
            "--structure".into(),
            data("neq3.str"),
            "--sentence".into(),
            data("k4.pp"),
        ],
        vec![
            "pol".into(),
            "--structure".into(),
            data("oit.str"),
            "--arity".into(),
            "1".into(),
        ],
        vec![
            "ppdef".into(),
            "--structure".into(),
            data("neq3.str"),
            "--relation".into(),
            data("zero.rel"),
        ],
        vec![
            "reduce".into(),
            "--interp".into(),
            data("pairs.int"),
            "--sentence".into(),
            data("pairs_path.pp"),
        ],
        vec!["hardness".into(), "--structure".into(), data("oit.str")],
        vec!["betw".into(), "solve".into(), "--instance".into(), data("two.btw")],
        vec!["betw".into(), "classify".into(), "--sample".into(), data("min.sample")],
        vec!["betw".into(), "falsify".into(), "--expr".into(), data("sum.expr")],
        vec![
            "algebra".into(),
            "hsp".into(),
            "--a".into(),
            data("xor.alg"),
            "--b".into(),
            data("and.alg"),
        ],
        vec![
            "algebra".into(),
            "nathom".into(),
            "--a".into(),
            data("xor.alg"),
            "--b".into(),
            data("and.alg"),
        ],
    ];
    for args in cases {
        let v = json(&args.iter().map(String::as_str).collect::<Vec<_>>());
        let id = v["schema"].as_str().unwrap();
        let file = schemas.join(format!("{}.v1.json", id.split('/').nth(1).unwrap()));
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
        assert_eq!(schema["$id"], id);
        for key in schema["required"].as_array().unwrap() {
            assert!(v.get(key.as_str().unwrap()).is_some(), "{id} lacks {key}");
        }
    }
}
