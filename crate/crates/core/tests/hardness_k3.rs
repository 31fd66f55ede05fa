use polyclone::hardness::{hardness_report, QuotientSearch};
use polyclone::structure::FiniteStructure;
use polyclone::tuple::Tuples;
use polyclone::Budget;

#[test]
fn three_coloring_certificate_at_arity_four() {
    let s = FiniteStructure::new("k3", 3)
        .unwrap()
        .with_relation("N", 2, Tuples::new(3, 2).filter(|t| t[0] != t[1]))
        .unwrap();
    let budget = Budget::default().with_candidate_bits(f64::INFINITY);
    let r = hardness_report(&s, 4, 2, &budget).unwrap();
    assert_eq!(r.verdict(), "hard: certificate at (K=4, N=2)");
    let QuotientSearch::Certificate(c) = &r.search else {
        panic!()
    };
    // 6k polymorphisms of each arity k
    assert_eq!(c.induced.len(), 6 + 12 + 18 + 24);
    assert_eq!(c.generators, vec![vec![0, 0], vec![0, 1]]);
    let log = c.verify(&s, &budget).unwrap();
    assert!(log.iter().any(|l| l.starts_with("arity 4: 24")));
}
