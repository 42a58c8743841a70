use std::collections::HashMap;

use hzeta_core::exactalg::*;
use num_traits::Zero;
use proptest::prelude::*;

fn rf(s: &str) -> RatFunc {
    parse_rf(s).unwrap()
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

#[test]
fn parse_and_arithmetic() {
    assert_eq!(rf("(q^2-1)/(q-1)"), rf("q+1"));
    assert_eq!(rf("q^-2*q^3"), rf("q"));
    assert_eq!(rf("-q^2"), rf("0-q*q"));
    assert_eq!(rf("1/(1-q^-1)"), rf("q/(q-1)"));
    assert!(parse_rf("q^x").is_err());
    assert!(parse_rf("(q").is_err());
    assert!(parse_rf("1/0").is_err());
    assert!(parse_rf("").is_err());
}

#[test]
fn display_roundtrips() {
    for s in ["(1-t)/(1-q*t)", "q^-1*t/(1-q^3*t^2)^2", "1/2*x - 3/4*y^2", "(1-q^-1)^3*t*(1-q^3*t^3)/((1-q^-2)*(1-q*t))"] {
        let r = rf(s);
        let back = parse_rf(&r.to_string()).unwrap();
        assert_eq!(r, back, "{s} -> {r}");
    }
}

#[test]
fn factored_denominators_merge() {
    let a = rf("1/(1-q*t)");
    let b = rf("1/(q*t-1)");
    let sum = &a + &b;
    assert!(sum.is_zero());
    let c = &rf("1/(1-t)") - &rf("t/(1-t)");
    assert_eq!(c.reduce().to_poly(), Some(MultiPoly::one()));
}

#[test]
fn reduce_cancels_factors() {
    let r = rf("(1-q^2*t^2)/((1-q*t)*(1+q*t))").reduce();
    assert!(r.is_polynomial());
    assert!(r.num().is_one());
}

#[test]
fn div_exact_and_failure() {
    let p = parse_poly("x^3 - y^3").unwrap();
    let d = parse_poly("x - y").unwrap();
    assert_eq!(p.div_exact(&d).unwrap(), parse_poly("x^2 + x*y + y^2").unwrap());
    assert!(p.div_exact(&parse_poly("x + y").unwrap()).is_none());
}

#[test]
fn series_of_local_factor() {
    // (1-t)/(1-qt) = 1 + (q-1)t + (q^2-q)t^2 + (q^3-q^2)t^3 + ...
    let s = rf_series(&rf("(1-t)/(1-q*t)"), t_var(), 3).unwrap();
    let want = ["1", "q-1", "q^2-q", "q^3-q^2"];
    for (k, w) in want.iter().enumerate() {
        assert_eq!(s.coeffs[k], rf(w), "coefficient {k}");
    }
}

#[test]
fn series_rejects_nonunit() {
    assert!(matches!(rf_series(&rf("1/t"), t_var(), 2), Err(AlgError::NonUnitDenominator(_))));
    assert!(matches!(rf_series(&rf("1/(t-t^2)"), t_var(), 2), Err(AlgError::NonUnitDenominator(_))));
}

#[test]
fn series_with_q_inverse_in_denominator() {
    let s = rf_series(&rf("t/(1-q^-2)"), t_var(), 2).unwrap();
    assert_eq!(s.coeffs[1], rf("q^2/(q^2-1)"));
}

#[test]
fn substitution_keeps_equality() {
    let f = rf("a*b*c*(1-a*b)/((1-a*b*c)*(1-a)*(1-b))");
    let mut m = HashMap::new();
    m.insert(Var::new("a"), rf("q^3*t^3"));
    m.insert(Var::new("b"), rf("q^-2"));
    m.insert(Var::new("c"), rf("t^-1"));
    let g = f.substitute_many(&m).unwrap();
    let direct = rf("q*t^2*(1-q*t^3)/((1-q*t^2)*(1-q^3*t^3)*(1-q^-2))");
    assert_eq!(g, direct);
}

#[test]
fn numeric_evaluation() {
    let mut pt = HashMap::new();
    pt.insert(q_var(), q(2, 1));
    pt.insert(t_var(), q(1, 3));
    assert_eq!(rf("(1-t)/(1-q*t)").eval(&pt), Some(q(2, 1)));
    assert_eq!(rf("1/(1-3*t)").eval(&pt), None);
}

#[test]
fn cyclo_expand_and_display() {
    let c = CycloProduct::from_factors(CycloUnit::one(), [(0, 1, 1), (1, 1, -1), (2, 2, 1), (3, 2, -1)]).unwrap();
    assert_eq!(c.expand(), rf("(1-t)*(1-q^2*t^2)/((1-q*t)*(1-q^3*t^2))"));
    assert_eq!(c.to_string(), "(1 - t)*(1 - q^2*t^2) / ((1 - q*t)*(1 - q^3*t^2))");
    let json = serde_json::to_string(&c).unwrap();
    let back: CycloProduct = serde_json::from_str(&json).unwrap();
    assert_eq!(back, c);
    assert!(c.mul(&c.inv().unwrap()).factors.is_empty());
}

#[test]
fn topological_limit_of_small_cases() {
    let c = CycloProduct::from_factors(CycloUnit::one(), [(0, 1, 1), (1, 1, -1)]).unwrap();
    assert_eq!(eps_topological(&c).unwrap(), rf("s/(s-1)"));
    let bad = CycloProduct::from_factors(CycloUnit::one(), [(0, 1, 1)]).unwrap();
    assert_eq!(eps_topological(&bad), Err(AlgError::OrderMismatch(1)));
}

#[test]
fn eps_expansion_leading_term() {
    let c = CycloProduct::from_factors(CycloUnit::one(), [(0, 1, 1), (1, 1, -1), (2, 2, 1), (3, 2, -1)]).unwrap();
    let e = eps_expand(&c.expand(), 4).unwrap();
    assert_eq!(e.valuation, 0);
    assert_eq!(e.coeffs[0], eps_topological(&c).unwrap());
    let z = eps_expand(&RatFunc::zero(), 3);
    assert!(matches!(z, Err(AlgError::InsufficientOrder(3))));
}

#[test]
fn eps_expansion_of_pole() {
    // 1/(1-q) = -1/eps + ...
    let e = eps_expand(&rf("1/(1-q)"), 3).unwrap();
    assert_eq!(e.valuation, -1);
    assert_eq!(e.coeffs[0], rf("-1"));
    // 1/(1 - q) = -1/((1+eps) - 1)... exactly -1/eps, so higher terms vanish
    assert!(e.coeffs[1].is_zero());
}

fn small_poly() -> impl Strategy<Value = MultiPoly> {
    let vars = ["x", "y", "z"];
    prop::collection::vec((-3i64..=3, 0u32..3, 0u32..3, 0u32..2), 0..5).prop_map(move |terms| {
        MultiPoly::from_terms(terms.into_iter().map(|(c, a, b, d)| {
            (Monomial::from_pairs([(Var::new(vars[0]), a), (Var::new(vars[1]), b), (Var::new(vars[2]), d)]), Q::from_integer(c.into()))
        }))
    })
}

fn nonzero_poly() -> impl Strategy<Value = MultiPoly> {
    small_poly().prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn exact_division_inverts_product(a in small_poly(), b in nonzero_poly()) {
        let prod = &a * &b;
        prop_assert_eq!(prod.div_exact(&b), Some(a));
    }

    #[test]
    fn field_axioms(a in small_poly(), b in nonzero_poly(), c in nonzero_poly()) {
        let fa = RatFunc::new(a.clone(), &c).unwrap();
        let fb = RatFunc::new(c.clone(), &b).unwrap();
        let prod = &fa * &fb;
        prop_assert_eq!(prod, RatFunc::new(a.clone(), &b).unwrap());
        let s = &fa + &fb;
        prop_assert_eq!(&s - &fb, fa.clone());
        if !a.is_zero() {
            prop_assert!(( &fa * &fa.inv().unwrap() ) == RatFunc::one());
        }
    }

    #[test]
    fn display_parse_roundtrip(a in small_poly(), b in nonzero_poly()) {
        let f = RatFunc::new(a, &b).unwrap();
        prop_assert_eq!(parse_rf(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn series_times_denominator_is_numerator(a in 0i64..4, b in 1u64..3, c in 0i64..4, d in 1u64..3) {
        let f = rf(&format!("(1-q^{c}*t^{d})/(1-q^{a}*t^{b})"));
        let s = rf_series(&f, t_var(), 6).unwrap();
        let den = TSeries::from_poly(&parse_poly(&format!("1-q^{a}*t^{b}")).unwrap(), t_var(), 6);
        let num = TSeries::from_poly(&parse_poly(&format!("1-q^{c}*t^{d}")).unwrap(), t_var(), 6);
        prop_assert!(s.mul(&den).agrees_with(&num));
    }

    #[test]
    fn topological_matches_eps_leading(f in prop::collection::vec((-3i64..4, 0u64..4, -2i64..3), 1..4)) {
        let mut c = CycloProduct::one();
        for (a, b, e) in f {
            if a != 0 || b != 0 {
                c.push(a, b, e).unwrap();
            }
        }
        let ord = c.order();
        if ord != 0 {
            // balance with 1 - t
            c.push(0, 1, -ord).unwrap();
        }
        let e = eps_expand(&c.expand(), 8).unwrap();
        prop_assert_eq!(e.valuation, 0);
        prop_assert_eq!(e.coeffs[0].clone(), eps_topological(&c).unwrap());
    }
}

#[test]
fn constants_behave() {
    assert!(RatFunc::int(0).is_zero());
    assert_eq!(RatFunc::int(6).as_constant(), Some(Q::from_integer(6.into())));
    assert!(Q::zero().is_zero());
}
