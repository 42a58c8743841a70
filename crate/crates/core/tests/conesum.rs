use std::collections::BTreeMap;

use hzeta_core::conesum::*;
use hzeta_core::exactalg::*;
use proptest::prelude::*;

fn spec(name: &str) -> ConeSpec {
    lemma_corpus().into_iter().find(|s| s.name == name).unwrap()
}

fn v(s: &str) -> Var {
    Var::new(s)
}

fn lf(s: &str) -> LinForm {
    LinForm::parse(s).unwrap()
}

fn rf(s: &str) -> RatFunc {
    parse_rf(s).unwrap()
}

#[test]
fn corpus_resolves_to_recorded_closed_forms() {
    for s in lemma_corpus() {
        let (r, sp) = s.resolve_specialized().unwrap();
        if let Some(e) = s.expected().unwrap() {
            assert!(rf_equal(&r, &e), "{}", s.name);
        }
        if let Some(e) = s.specialized_expected().unwrap() {
            assert!(rf_equal(sp.as_ref().unwrap(), &e), "{} specialized", s.name);
        }
    }
}

#[test]
fn corpus_matches_enumeration() {
    for s in lemma_corpus() {
        let sum = s.to_cone_sum().unwrap();
        let r = resolve(&sum).unwrap();
        assert!(series_agrees(&sum, &r, &Truncation::TotalDegree(9), 1 << 24).unwrap(), "{}", s.name);
    }
}

#[test]
fn printed_identity_four_is_refuted_by_enumeration() {
    let s = spec("min-3d");
    let sum = s.to_cone_sum().unwrap();
    let printed = s.printed().unwrap().unwrap();
    let trunc = Truncation::TotalDegree(6);
    assert!(!series_agrees(&sum, &printed, &trunc, 1 << 24).unwrap());
    // the first disagreement is the c-free monomial a^2*b*d^3, which no point with Z >= 1 can produce
    let gap = &truncated_expansion(&printed, &trunc).unwrap() - &enumerate_series(&sum, &trunc, 1 << 24).unwrap();
    assert_eq!(gap, parse_poly("a^2*b*d^3").unwrap());
    assert!(s.reading.is_some());
}

#[test]
fn appendix_readings_differ_from_printed() {
    for name in ["min-3d", "variant-J2"] {
        let s = spec(name);
        let (_, sp) = s.resolve_specialized().unwrap();
        let printed = s.specialized_printed().unwrap().unwrap();
        assert!(!rf_equal(sp.as_ref().unwrap(), &printed), "{name}");
        assert!(s.specialized_reading.is_some());
    }
}

#[test]
fn single_geometric_sum() {
    let sum = ConeSum::new(vec![ConeTerm::new([(v("X"), 1)]).with_power(v("a"), lf("X"))]);
    assert_eq!(resolve(&sum).unwrap(), rf("a/(1-a)"));
}

#[test]
fn finite_sum_with_upper_bound() {
    // sum over 1 <= X <= Y of a^X b^Y
    let term = ConeTerm::new([(v("X"), 1), (v("Y"), 1)]).with_power(v("a"), lf("X")).with_power(v("b"), lf("Y")).with_constraint(lf("Y - X"));
    let r = resolve(&ConeSum::new(vec![term])).unwrap();
    assert_eq!(r, rf("a*b/((1-b)*(1-a*b))"));
}

#[test]
fn min_of_two_matches_hand_split() {
    // sum over N^2 of a^X b^Y c^min(X,Y)
    let term =
        ConeTerm::new([(v("X"), 1), (v("Y"), 1)]).with_power(v("a"), lf("X")).with_power(v("b"), lf("Y")).with_min(v("c"), 1, vec![lf("X"), lf("Y")]);
    let r = resolve(&ConeSum::new(vec![term])).unwrap();
    let hand = rf("a*b*c/(1-a*b*c) * (1 + a/(1-a) + b/(1-b))");
    assert_eq!(r, hand);
}

#[test]
fn min_argument_order_is_irrelevant() {
    let s = spec("variant-J2");
    let base = derive_variant(&s).unwrap();
    let mut s2 = s.clone();
    for t in s2.terms.iter_mut() {
        for m in t.mins.iter_mut() {
            m.args.reverse();
        }
        t.mins.reverse();
    }
    assert_eq!(derive_variant(&s2).unwrap(), base);
}

#[test]
fn empty_sum_is_zero() {
    assert!(resolve(&ConeSum::new(vec![])).unwrap().is_zero());
}

#[test]
fn infeasible_term_is_zero() {
    let term = ConeTerm::new([(v("X"), 1)]).with_power(v("a"), lf("X")).with_constraint(lf("-X"));
    assert!(resolve(&ConeSum::new(vec![term])).unwrap().is_zero());
}

#[test]
fn divergent_ratio_is_rejected() {
    let term = ConeTerm::new([(v("X"), 1)]).with_power(v("a"), lf("X")).with_power(v("b"), lf("-2*X"));
    let err = resolve(&ConeSum::new(vec![term])).unwrap_err();
    assert!(matches!(err, ConeError::Divergent(_)), "{err}");
}

#[test]
fn qt_grading_sums_in_t_first() {
    // q^X t^X: positive in t, so it converges under the qt grading even though q grows
    let term = ConeTerm::new([(v("X"), 1)]).with_power(v("q"), lf("X")).with_power(v("t"), lf("X"));
    let sum = ConeSum::new(vec![term]).with_grading(Grading::qt());
    assert_eq!(resolve(&sum).unwrap(), rf("q*t/(1-q*t)"));
    let term = ConeTerm::new([(v("X"), 1)]).with_power(v("q"), lf("X"));
    let sum = ConeSum::new(vec![term]).with_grading(Grading::qt());
    assert!(matches!(resolve(&sum), Err(ConeError::Divergent(_))));
}

#[test]
fn non_unimodular_constraint_is_unsupported() {
    let term = ConeTerm::new([(v("X"), 1), (v("Y"), 1)]).with_power(v("a"), lf("X")).with_power(v("b"), lf("Y")).with_constraint(lf("2*X - 3*Y"));
    let err = resolve(&ConeSum::new(vec![term])).unwrap_err();
    assert!(matches!(err, ConeError::UnsupportedCone(_)), "{err}");
}

#[test]
fn unbounded_index_variable_is_invalid() {
    let term = ConeTerm::new([(v("X"), 1)]).with_power(v("a"), lf("X + Y"));
    assert!(matches!(resolve(&ConeSum::new(vec![term])), Err(ConeError::InvalidTerm(_))));
}

#[test]
fn enumeration_respects_budget() {
    let s = spec("min-3d");
    let err = enumerate_series(&s.to_cone_sum().unwrap(), &Truncation::TotalDegree(40), 1000).unwrap_err();
    assert!(matches!(err, ConeError::CapTooLarge(n) if n > 1000));
}

#[test]
fn per_variable_truncation() {
    let s = spec("min-x2y");
    let sum = s.to_cone_sum().unwrap();
    let caps: BTreeMap<Var, u64> = [(v("a"), 4), (v("b"), 3), (v("c"), 4)].into_iter().collect();
    let trunc = Truncation::PerVariable(caps);
    let r = resolve(&sum).unwrap();
    assert_eq!(enumerate_series(&sum, &trunc, 1 << 20).unwrap(), truncated_expansion(&r, &trunc).unwrap());
}

#[test]
fn spec_roundtrips_through_json() {
    for s in lemma_corpus() {
        let js = serde_json::to_string(&s).unwrap();
        let back: ConeSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(derive_variant(&back).unwrap(), derive_variant(&s).unwrap());
    }
}

/// `cx*X + cy*Y + k` with `cx` in {0, 1}, so every difference of two such
/// forms stays unimodular in `X`.
fn arb_form() -> impl Strategy<Value = LinForm> {
    (0i64..2, 0i64..4, 0i64..2).prop_map(|(cx, cy, k)| LinForm::from_parts([(Var::new("X"), cx), (Var::new("Y"), cy)], k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Random two-variable sums with a minimum agree with direct enumeration.
    #[test]
    fn resolve_agrees_with_enumeration(
        ea in arb_form(),
        eb in arb_form(),
        args in proptest::collection::vec(arb_form(), 1..4),
        mult in 1i64..3,
        lx in 0i64..2,
        ly in 0i64..2,
    ) {
        let (x, y) = (v("X"), v("Y"));
        // keep every ratio of positive degree
        let ea = ea.add(&LinForm::var(x));
        let eb = eb.add(&LinForm::var(y));
        let term = ConeTerm::new([(x, lx), (y, ly)])
            .with_power(v("a"), ea)
            .with_power(v("b"), eb)
            .with_min(v("c"), mult, args);
        let sum = ConeSum::new(vec![term]);
        let r = resolve(&sum).unwrap();
        prop_assert!(series_agrees(&sum, &r, &Truncation::TotalDegree(7), 1 << 20).unwrap());
    }
}
