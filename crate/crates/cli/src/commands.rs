use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use polyclone::algebra::{
    birkhoff_bound, hsp_fin_member, natural_homomorphism_with_depth, AlgebraSpec, HspResult, NatHom,
};
use polyclone::betweenness::{
    check_partial_polymorphism, classify, find_witnesses, run_falsifier, solve_betweenness, BetwInstance, BetwSolution,
    BetwViolation, Classification, Direction, FalsifierOutcome, PolymorphismCheck,
};
use polyclone::clone::{is_polymorphism, polymorphisms, OperationTable};
use polyclone::hardness::{hardness_report, ProjectionCloneVerdict, QuotientSearch};
use polyclone::interpret::{translate_sentence, verify_interpretation, Counterexample, Interpretation, Verification};
use polyclone::ppdef::{construct_pp_definition, free_names, is_pp_definable, Definability};
use polyclone::structure::{
    defined_relation, eval_formula, solve_pp_sentence, FiniteStructure, Formula, Relation, SolveResult,
};
use polyclone::tuple::Tuples;
use polyclone::{Error, Rational, RationalExpr, RationalSample};

use crate::Global;

pub const DEFAULT_MAX_ARITY: usize = 3;
pub const DEFAULT_MAX_POWER: usize = 2;

/// What a completed command prints.
pub struct Report {
    pub text: String,
    pub json: Value,
}

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn unverified(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: format!("witness failed re-verification: {}", message.into()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_budget() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

type Outcome = Result<Report, Failure>;

fn schema(name: &str) -> String {
    format!("polyclone/{name}/v1")
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> polyclone::Result<T>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::unverified(what()))
    }
}

fn tuple_text(t: &[usize]) -> String {
    format!("({})", t.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

fn rationals(v: &[Rational]) -> Value {
    Value::from(v.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn rational_text(v: &[Rational]) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn table_json(f: &OperationTable) -> Value {
    json!({ "arity": f.arity(), "values": f.values(), "projection": f.as_projection() })
}

fn table_name(f: &OperationTable) -> String {
    match f.as_projection() {
        Some(i) => format!("π^{}_{}", f.arity(), i),
        None => "f".into(),
    }
}

pub fn solve(g: &Global, structure: &Path, sentence: &Path) -> Outcome {
    let s = load(structure, FiniteStructure::parse)?;
    let f = load(sentence, Formula::parse)?;
    let result = solve_pp_sentence(&s, &f)?;
    match &result {
        SolveResult::Sat(a) if g.verify => {
            let body = match &f {
                Formula::Exists(_, body) => body.as_ref(),
                other => other,
            };
            check(eval_formula(&s, body, a)?, || {
                format!("assignment {a:?} does not satisfy the sentence")
            })?;
        }
        _ => {}
    }
    Ok(match result {
        SolveResult::Sat(a) => {
            let mut text = "SAT\n".to_string();
            for (v, x) in &a {
                let _ = writeln!(text, "{v} = {x}");
            }
            Report {
                text,
                json: json!({ "schema": schema("solve"), "result": "SAT", "witness": a }),
            }
        }
        SolveResult::Unsat => Report {
            text: "UNSAT\n".into(),
            json: json!({ "schema": schema("solve"), "result": "UNSAT", "witness": null }),
        },
    })
}

pub fn pol(g: &Global, structure: &Path, arity: usize) -> Outcome {
    let s = load(structure, FiniteStructure::parse)?;
    if arity == 0 {
        return Err(Failure::input("arity must be positive"));
    }
    let ops = polymorphisms(&s, arity, &g.budget())?;
    if g.verify {
        for f in &ops {
            check(is_polymorphism(f, &s), || format!("{f} is not a polymorphism"))?;
        }
    }
    let mut text = format!("{} polymorphisms of arity {arity} on {}\n", ops.len(), s.name());
    for f in &ops {
        let _ = writeln!(text, "{}  {f}", table_name(f));
    }
    let json = json!({
        "schema": schema("pol"),
        "structure": s.name(),
        "arity": arity,
        "count": ops.len(),
        "operations": ops.iter().map(table_json).collect::<Vec<_>>(),
    });
    Ok(Report { text, json })
}

pub fn ppdef(g: &Global, structure: &Path, relation: &Path) -> Outcome {
    let s = load(structure, FiniteStructure::parse)?;
    let (symbol, r) = load(relation, |t| Relation::parse(t, s.domain_size()))?;
    let budget = g.budget();
    match is_pp_definable(&s, &r, &budget)? {
        Definability::Definable => {
            let f = construct_pp_definition(&s, &r, &budget)?;
            if g.verify {
                let defined = defined_relation(&s, &f, &free_names(r.arity()))?;
                check(defined == r, || format!("{f} defines a different relation"))?;
            }
            Ok(Report {
                text: format!("definable: {symbol}\n{f}\n"),
                json: json!({
                    "schema": schema("ppdef"),
                    "relation": symbol,
                    "definable": true,
                    "formula": f.to_string(),
                    "witness": null,
                }),
            })
        }
        Definability::NotDefinable(w) => {
            if g.verify {
                check(w.recheck(&s, &r), || "the separating operation does not recheck".into())?;
            }
            let chosen: Vec<String> = w.violation.chosen.iter().map(|t| tuple_text(t)).collect();
            let text = format!(
                "not definable: {symbol}\npolymorphism (arity {}): {}\nmaps {} to {}, outside {symbol}\n",
                w.operation.arity(),
                w.operation,
                chosen.join(" "),
                tuple_text(&w.violation.image)
            );
            Ok(Report {
                text,
                json: json!({
                    "schema": schema("ppdef"),
                    "relation": symbol,
                    "definable": false,
                    "formula": null,
                    "witness": {
                        "operation": table_json(&w.operation),
                        "chosen": w.violation.chosen,
                        "image": w.violation.image,
                    },
                }),
            })
        }
    }
}

fn counterexample_json(c: &Counterexample) -> Value {
    match c {
        Counterexample::Atom {
            symbol,
            tuples,
            target_holds,
            host_holds,
        } => json!({
            "kind": "atom",
            "symbol": symbol,
            "tuples": tuples,
            "target_holds": target_holds,
            "host_holds": host_holds,
        }),
        Counterexample::MapUndefined(t) => json!({ "kind": "map_undefined", "tuple": t }),
        Counterexample::OutsideDomain(t) => json!({ "kind": "outside_domain", "tuple": t }),
        Counterexample::NotSurjective(e) => json!({ "kind": "not_surjective", "element": e }),
    }
}

pub fn interpret_verify(g: &Global, host: &Path, target: &Path, interp: &Path) -> Outcome {
    let h = load(host, FiniteStructure::parse)?;
    let t = load(target, FiniteStructure::parse)?;
    let i = load(interp, Interpretation::parse)?;
    let v = verify_interpretation(&h, &t, &i, &g.budget())?;
    Ok(match v {
        Verification::Valid => Report {
            text: format!("valid: interpretation of {} in {} (d={})\n", t.name(), h.name(), i.dim),
            json: json!({ "schema": schema("interpret-verify"), "valid": true, "counterexample": null }),
        },
        Verification::Invalid(c) => {
            if g.verify {
                check(c.recheck(&h, &t, &i)?, || {
                    format!("counterexample `{c}` does not recheck")
                })?;
            }
            Report {
                text: format!("invalid: {c}\n"),
                json: json!({
                    "schema": schema("interpret-verify"),
                    "valid": false,
                    "counterexample": counterexample_json(&c),
                }),
            }
        }
    })
}

pub fn reduce(_g: &Global, interp: &Path, sentence: &Path) -> Outcome {
    let i = load(interp, Interpretation::parse)?;
    let f = load(sentence, Formula::parse)?;
    let out = translate_sentence(&i, &f)?;
    Ok(Report {
        text: format!("{out}\n"),
        json: json!({ "schema": schema("reduce"), "dimension": i.dim, "sentence": out.to_string() }),
    })
}

pub fn hardness(g: &Global, structure: &Path, report_path: Option<&Path>) -> Outcome {
    let s = load(structure, FiniteStructure::parse)?;
    let k = g.max_arity.unwrap_or(DEFAULT_MAX_ARITY);
    let n = g.max_power.unwrap_or(DEFAULT_MAX_POWER);
    let budget = g.budget();
    let report = hardness_report(&s, k, n, &budget)?;
    let mut text = report.to_string();
    if g.verify {
        if let QuotientSearch::Certificate(c) = &report.search {
            let log = c.verify(&s, &budget).map_err(Failure::unverified)?;
            text.push_str("verified:\n");
            for line in log {
                let _ = writeln!(text, "  {line}");
            }
        }
    }
    if let Some(p) = report_path {
        fs::write(p, &text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
    }
    let projection_clone = match &report.projection_clone {
        ProjectionCloneVerdict::Yes => json!({ "holds": true, "witness": null }),
        ProjectionCloneVerdict::No(f) => json!({ "holds": false, "witness": table_json(f) }),
    };
    let (certificate, obstruction) = match &report.search {
        QuotientSearch::Certificate(c) => (
            json!({
                "power": c.power,
                "generators": c.generators,
                "subuniverse": c.subuniverse,
                "class": c.class,
                "induced": c.induced.iter().map(|(f, p)| json!({
                    "operation": table_json(f),
                    "projection": { "arity": p.arity, "index": p.index },
                })).collect::<Vec<_>>(),
            }),
            Value::Null,
        ),
        QuotientSearch::Exhausted { obstruction, .. } => (Value::Null, json!(obstruction.as_ref().map(table_json))),
    };
    let json = json!({
        "schema": schema("hardness"),
        "structure": s.name(),
        "max_arity": k,
        "max_power": n,
        "hard": report.is_hard(),
        "verdict": report.verdict(),
        "projection_clone": projection_clone,
        "certificate": certificate,
        "constant_obstruction": obstruction,
    });
    Ok(Report { text, json })
}

pub fn betw_solve(g: &Global, instance: &Path) -> Outcome {
    let inst = load(instance, BetwInstance::parse)?;
    Ok(match solve_betweenness(&inst) {
        BetwSolution::Sat(order) => {
            if g.verify {
                check(inst.satisfied_by(&order), || "order violates a constraint".into())?;
            }
            let names = inst.names(&order);
            Report {
                text: format!("SAT\norder: {}\n", names.join(" < ")),
                json: json!({ "schema": schema("betw-solve"), "result": "SAT", "order": names }),
            }
        }
        BetwSolution::Unsat => Report {
            text: "UNSAT\n".into(),
            json: json!({ "schema": schema("betw-solve"), "result": "UNSAT", "order": null }),
        },
    })
}

fn grid(k: usize, r: usize) -> impl Iterator<Item = Vec<Rational>> {
    Tuples::new(2 * r + 1, k).map(move |t| {
        t.iter()
            .map(|&v| Rational::from_integer((v as i64 - r as i64).into()))
            .collect()
    })
}

fn expr_arity(f: &RationalExpr, arity: Option<usize>) -> Result<usize, Failure> {
    let k = arity.unwrap_or_else(|| f.arity());
    if k == 0 {
        return Err(Failure::input("expression has no variables; pass --arity"));
    }
    if k < f.arity() {
        return Err(Failure::input(format!(
            "expression uses x{} but arity is {k}",
            f.arity()
        )));
    }
    Ok(k)
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Increasing => "increasing",
        Direction::Decreasing => "decreasing",
    }
}

fn violation_json(v: &BetwViolation<Rational>) -> Value {
    json!({
        "args": v.args.iter().map(|a| rationals(a)).collect::<Vec<_>>(),
        "values": rationals(&v.values),
    })
}

pub fn betw_classify(
    g: &Global,
    sample: Option<&Path>,
    expr: Option<&Path>,
    arity: Option<usize>,
    radius: usize,
) -> Outcome {
    let fs: RationalSample = match (sample, expr) {
        (Some(p), _) => load(p, RationalSample::parse)?,
        (None, Some(p)) => {
            let f = load(p, RationalExpr::parse)?;
            let k = expr_arity(&f, arity)?;
            RationalSample::from_expr(&f, k, grid(k, radius))?
        }
        (None, None) => return Err(Failure::input("pass --sample or --expr")),
    };
    let k = fs.arity();
    let class = classify(&fs);
    let poly = check_partial_polymorphism(&fs);
    if g.verify {
        if let Classification::Unclassifiable(ws) = &class {
            for w in ws {
                check(w.recheck(), || format!("clause witness for d={} does not recheck", w.d))?;
            }
        }
        if let PolymorphismCheck::Violation(v) = &poly {
            check(v.recheck(), || "Betw violation does not recheck".into())?;
        }
    }
    let mut text = String::new();
    let class_json = match &class {
        Classification::Classified((d, dir)) => {
            let _ = writeln!(text, "classified: d={d} {} ↦ π^{k}_{d}", direction_name(*dir));
            json!({ "kind": "classified", "d": d, "direction": direction_name(*dir) })
        }
        Classification::Ambiguous(cs) => {
            let list: Vec<String> = cs
                .iter()
                .map(|(d, dir)| format!("d={d} {}", direction_name(*dir)))
                .collect();
            let _ = writeln!(text, "ambiguous: {}", list.join(", "));
            json!({
                "kind": "ambiguous",
                "candidates": cs.iter().map(|(d, dir)| json!({ "d": d, "direction": direction_name(*dir) })).collect::<Vec<_>>(),
            })
        }
        Classification::Unclassifiable(ws) => {
            let _ = writeln!(text, "unclassifiable");
            for w in ws {
                let _ = writeln!(
                    text,
                    "  d={} {}: f{} = {}, f{} = {}",
                    w.d,
                    direction_name(w.direction),
                    rational_text(&w.x),
                    w.fx,
                    rational_text(&w.y),
                    w.fy
                );
            }
            json!({
                "kind": "unclassifiable",
                "witnesses": ws.iter().map(|w| json!({
                    "d": w.d,
                    "direction": direction_name(w.direction),
                    "x": rationals(&w.x),
                    "y": rationals(&w.y),
                    "fx": w.fx.to_string(),
                    "fy": w.fy.to_string(),
                })).collect::<Vec<_>>(),
            })
        }
    };
    let poly_json = match &poly {
        PolymorphismCheck::Consistent => {
            let _ = writeln!(text, "sample is consistent with preserving Betw");
            Value::Null
        }
        PolymorphismCheck::Violation(v) => {
            let _ = writeln!(text, "{v}");
            violation_json(v)
        }
    };
    let json = json!({
        "schema": schema("betw-classify"),
        "arity": k,
        "rows": fs.len(),
        "classification": class_json,
        "violation": poly_json,
    });
    Ok(Report { text, json })
}

pub fn betw_falsify(g: &Global, expr: &Path, arity: Option<usize>, radius: usize) -> Outcome {
    let f = load(expr, RationalExpr::parse)?;
    let k = expr_arity(&f, arity)?;
    let witnesses = find_witnesses(&f, k, radius)?;
    Ok(match run_falsifier(&f, k, &witnesses)? {
        FalsifierOutcome::Trace(trace) => {
            if g.verify {
                check(trace.verify(&f)?, || "falsifier trace does not verify".into())?;
            }
            let steps: Vec<Value> = trace
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "d": s.d,
                        "x": rationals(&s.x),
                        "y": rationals(&s.y),
                        "t": rationals(&s.t),
                        "next": rationals(&s.next),
                    })
                })
                .collect();
            let o = &trace.observation;
            let json = json!({
                "schema": schema("betw-falsify"),
                "result": "trace",
                "increasing": trace.increasing,
                "chain": trace.chain.iter().map(|c| rationals(c)).collect::<Vec<_>>(),
                "steps": steps,
                "conclusion": format!("{:?}", trace.conclusion),
                "observation": {
                    "a": rationals(&o.a), "a2": rationals(&o.a2),
                    "b": rationals(&o.b), "b2": rationals(&o.b2),
                    "low": rationals(&o.low), "high": rationals(&o.high),
                },
                "violation": violation_json(&trace.violation),
            });
            Report {
                text: format!("{trace}\n"),
                json,
            }
        }
        FalsifierOutcome::PreconditionFailed(v) => {
            if g.verify {
                check(v.recheck() && v.certify(&f)?, || {
                    "diagonal violation does not recheck".into()
                })?;
            }
            Report {
                text: format!("precondition failed: f(0,...,0) = f(1,...,1)\n{v}\n"),
                json: json!({
                    "schema": schema("betw-falsify"),
                    "result": "precondition_failed",
                    "violation": violation_json(&v),
                }),
            }
        }
    })
}

pub fn algebra_hsp(g: &Global, a: &Path, b: &Path) -> Outcome {
    let a_alg = load(a, AlgebraSpec::parse)?;
    let b_alg = load(b, AlgebraSpec::parse)?;
    let bound = birkhoff_bound(&a_alg, &b_alg);
    let n_max = g
        .max_power
        .or(bound)
        .ok_or_else(|| Failure::input("Birkhoff bound overflows; pass --max-power"))?;
    let result = hsp_fin_member(&a_alg, &b_alg, n_max, &g.budget())?;
    let exact = bound.is_some_and(|bd| n_max >= bd);
    Ok(match result {
        HspResult::Certificate(c) => {
            let mut text = format!(
                "member: {} is in HSP^fin({}) at power {}\n",
                b_alg.name(),
                a_alg.name(),
                c.power
            );
            if g.verify {
                let log = c.verify(&a_alg, &b_alg).map_err(Failure::unverified)?;
                for line in log {
                    let _ = writeln!(text, "  {line}");
                }
            }
            for (t, v) in &c.map {
                let _ = writeln!(text, "{} -> {v}", tuple_text(t));
            }
            let map: Vec<Value> = c.map.iter().map(|(t, v)| json!([t, v])).collect();
            Report {
                text,
                json: json!({
                    "schema": schema("algebra-hsp"),
                    "result": "member",
                    "n_max": n_max,
                    "certificate": { "power": c.power, "generators": c.generators, "map": map },
                }),
            }
        }
        HspResult::NotMember => Report {
            text: format!("not a member (exhaustive at n = {n_max})\n"),
            json: json!({ "schema": schema("algebra-hsp"), "result": "not_member", "n_max": n_max, "certificate": null }),
        },
        HspResult::Exhausted(n) => Report {
            text: format!(
                "inconclusive up to power {n}{}\n",
                if exact { "" } else { " (below the Birkhoff bound)" }
            ),
            json: json!({ "schema": schema("algebra-hsp"), "result": "exhausted", "n_max": n, "certificate": null }),
        },
    })
}

pub fn algebra_nathom(g: &Global, a: &Path, b: &Path, depth: usize) -> Outcome {
    let a_alg = load(a, AlgebraSpec::parse)?;
    let b_alg = load(b, AlgebraSpec::parse)?;
    Ok(
        match natural_homomorphism_with_depth(&a_alg, &b_alg, depth, &g.budget())? {
            NatHom::Exists => Report {
                text: "exists\n".into(),
                json: json!({ "schema": schema("algebra-nathom"), "result": "exists", "equation": null }),
            },
            NatHom::Fails { s, t, vars } => {
                if g.verify {
                    let same_a = s.table(&a_alg, vars)? == t.table(&a_alg, vars)?;
                    let same_b = s.table(&b_alg, vars)? == t.table(&b_alg, vars)?;
                    check(same_a && !same_b, || {
                        format!("{s} = {t} does not separate the algebras")
                    })?;
                }
                Report {
                    text: format!(
                        "fails: {s} = {t} holds in {} but not in {}\n",
                        a_alg.name(),
                        b_alg.name()
                    ),
                    json: json!({
                        "schema": schema("algebra-nathom"),
                        "result": "fails",
                        "equation": { "lhs": s.to_string(), "rhs": t.to_string(), "vars": vars },
                    }),
                }
            }
            NatHom::Inconclusive(d) => Report {
                text: format!("inconclusive at term depth {d}\n"),
                json: json!({ "schema": schema("algebra-nathom"), "result": "inconclusive", "depth": d, "equation": null }),
            },
        },
    )
}
