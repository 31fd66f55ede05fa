use polyclone::betweenness::{
    brute_force_betweenness, check_partial_polymorphism, classify, consistent_candidates, find_witnesses, parse_scalar,
    run_falsifier, solve_betweenness, BetwInstance, Classification, Direction, Expr, FalsifierOutcome, FunctionSample,
    PolymorphismCheck,
};
use polyclone::{Rational, RationalExpr};
use proptest::prelude::*;

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn instance(n: usize, cs: &[(usize, usize, usize)]) -> BetwInstance {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut inst = BetwInstance::new(names).unwrap();
    for &(a, b, c) in cs {
        inst.push([a % n, b % n, c % n]).unwrap();
    }
    inst
}

/// `a·x_d + b`, or `a·x_d + min(x_d, c)` with the sign of `a` fixing the
/// direction: strictly monotone in `x_d` either way.
fn monotone(d: usize, a: i64, b: i64, kinked: bool) -> (RationalExpr, Direction) {
    let x = Expr::Var(d);
    let scaled = Expr::Mul(vec![Expr::Const(q(a)), x.clone()]);
    let body = if kinked {
        let kink = Expr::Min(vec![x, Expr::Const(q(b))]);
        Expr::Add(vec![scaled, if a > 0 { kink } else { Expr::Neg(Box::new(kink)) }])
    } else {
        Expr::Add(vec![scaled, Expr::Const(q(b))])
    };
    let dir = if a > 0 {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    (body, dir)
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-3i64..=-1, 1i64..=3]
}

fn grid(k: usize, r: i64) -> Vec<Vec<Rational>> {
    let side = (2 * r + 1) as usize;
    polyclone::tuple::Tuples::new(side, k)
        .map(|t| t.iter().map(|&v| q(v as i64 - r)).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_matches_enumeration(n in 1usize..=6, cs in prop::collection::vec((0usize..6, 0usize..6, 0usize..6), 0..8)) {
        let inst = instance(n, &cs);
        let got = solve_betweenness(&inst);
        prop_assert_eq!(got.is_sat(), brute_force_betweenness(&inst).is_sat());
        if let polyclone::betweenness::BetwSolution::Sat(o) = got {
            prop_assert!(inst.satisfied_by(&o));
        }
    }

    #[test]
    fn canonical_rationals(p in -50i64..50, den in 1i64..20, m in prop_oneof![-5i64..=-1, 1i64..=5]) {
        let a: Rational = parse_scalar(&format!("{p}/{den}")).unwrap();
        let b: Rational = parse_scalar(&format!("{}/{}", p * m, den * m)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(*a.denom() > 0.into());
        prop_assert_eq!(parse_scalar::<Rational>(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn supersets_only_lose_candidates(
        k in 1usize..=3,
        pts in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..10),
        extra in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..6),
        which in 0usize..4,
    ) {
        let f: RationalExpr = Expr::parse(["(+ x1 (* 2 x1))", "(min x1 1)", "(- x1)", "(max x1 (- x1))"][which]).unwrap();
        let pts: Vec<Vec<Rational>> = pts.iter().map(|p| p[..k].iter().map(|&v| q(v)).collect()).collect();
        let extra: Vec<Vec<Rational>> = extra.iter().map(|p| p[..k].iter().map(|&v| q(v)).collect()).collect();
        let small = FunctionSample::from_expr(&f, k, pts.clone()).unwrap();
        let big = FunctionSample::from_expr(&f, k, pts.into_iter().chain(extra)).unwrap();
        let before = consistent_candidates(&small);
        for c in consistent_candidates(&big) {
            prop_assert!(before.contains(&c));
        }
    }

    #[test]
    fn monotone_in_one_coordinate_is_classified(k in 1usize..=4, d in 0usize..4, a in nonzero(), b in -3i64..=3, kinked: bool) {
        let d = d % k;
        let (f, dir) = monotone(d, a, b, kinked);
        let r = if k <= 3 { 2 } else { 1 };
        let s = FunctionSample::from_expr(&f, k, grid(k, r)).unwrap();
        prop_assert_eq!(classify(&s), Classification::Classified((d + 1, dir)));
        if k <= 3 {
            let small = FunctionSample::from_expr(&f, k, grid(k, 1)).unwrap();
            prop_assert_eq!(check_partial_polymorphism(&small), PolymorphismCheck::Consistent);
        }
    }

    #[test]
    fn classification_respects_composition(
        k in 1usize..=3, m in 1usize..=3,
        outer in (0usize..3, nonzero(), -2i64..=2, any::<bool>()),
        inner in prop::collection::vec((0usize..3, nonzero(), -2i64..=2, any::<bool>()), 3),
    ) {
        let (f, fdir) = monotone(outer.0 % k, outer.1, outer.2, outer.3);
        let gs: Vec<(RationalExpr, Direction)> = inner[..k]
            .iter()
            .map(|&(e, a, b, kk)| monotone(e % m, a, b, kk))
            .collect();
        let composite = f.compose(&gs.iter().map(|g| g.0.clone()).collect::<Vec<_>>()).unwrap();
        let s = FunctionSample::from_expr(&composite, m, grid(m, 2)).unwrap();
        // the projection composed: coordinate of g_d, direction multiplied
        let d = outer.0 % k;
        let expected = (inner[d].0 % m + 1, fdir.then(gs[d].1));
        prop_assert_eq!(classify(&s), Classification::Classified(expected));
    }

    #[test]
    fn falsifier_certificates_reverify(coefs in prop::collection::vec(-2i64..=2, 2), shape in 0usize..4) {
        let lin = format!("(+ (* {} x1) (* {} x2))", coefs[0], coefs[1]);
        let text = match shape {
            0 => lin,
            1 => format!("(min x1 {lin})"),
            2 => format!("(max x2 {lin})"),
            _ => format!("(- (min x1 x2) {lin})"),
        };
        let f: RationalExpr = Expr::parse(&text).unwrap();
        let w = find_witnesses(&f, 2, 2).unwrap();
        match run_falsifier(&f, 2, &w) {
            Ok(FalsifierOutcome::Trace(t)) => prop_assert!(t.verify(&f).unwrap(), "{}\n{}", text, t),
            Ok(FalsifierOutcome::PreconditionFailed(v)) => prop_assert!(v.recheck() && v.certify(&f).unwrap()),
            Err(polyclone::Error::NotApplicable(_)) => {
                // some clause survives on the grid: f is monotone in that coordinate there
                let s = FunctionSample::from_expr(&f, 2, grid(2, 2)).unwrap();
                prop_assert!(!consistent_candidates(&s).is_empty());
            }
            Err(e) => prop_assert!(false, "{}: {}", text, e),
        }
    }
}
