use std::collections::BTreeMap;

use hzeta_core::catalog::{
    abscissa, abscissa_of, closed_local, conjectured_local, conjectured_topological, dirichlet_coeffs, expansion_identity, multiplicativity_failures,
    pole_order, topological, CatalogError, FieldSpec, GlobalZeta, Source,
};
use hzeta_core::exactalg::{parse_rf, rf_equal, Q};
use num_bigint::BigInt;
use proptest::prelude::*;

#[test]
fn closed_forms_agree_with_the_product() {
    for n in 1..=3 {
        assert!(rf_equal(&closed_local(n).unwrap().expand(), &conjectured_local(n).expand()), "n = {n}");
    }
    let n3 = parse_rf("(1-t)*(1-q^2*t^2)*(1-q^4*t^3)/((1-q*t)*(1-q^3*t^2)*(1-q^5*t^3))").unwrap();
    assert!(rf_equal(&closed_local(3).unwrap().expand(), &n3));
    assert_eq!(closed_local(4), Err(CatalogError::OutOfRange(4)));
    assert_eq!(conjectured_local(4).source, Source::Conjectured);
}

#[test]
fn fifth_factor() {
    let f = conjectured_local(5).form;
    assert_eq!(f.factors.get(&(8, 5)), Some(&1));
    assert_eq!(f.factors.get(&(9, 5)), Some(&-1));
}

#[test]
fn subset_expansion_holds() {
    for n in 1..=6 {
        assert!(expansion_identity(n).unwrap(), "n = {n}");
    }
    assert!(matches!(expansion_identity(40), Err(CatalogError::SizeLimit { .. })));
}

#[test]
fn abscissa_is_two() {
    for n in 1..=20 {
        assert_eq!(abscissa(n), Q::from_integer(2.into()), "n = {n}");
    }
    // every (1 - q^(2i-1) t^i) reaches it, so the pole at 2 has order n
    let (two, at) = abscissa_of(&conjectured_local(7).form).unwrap();
    assert_eq!(at, (1..=7).map(|i| (2 * i - 1, i as u64)).collect::<Vec<_>>());
    for n in 1..=6 {
        assert_eq!(pole_order(&conjectured_local(n).form, &two), n as i64);
    }
}

#[test]
fn topological_limits() {
    let shown = ["s/(s-1)", "2*s/(2*s-3)", "2*s*(3*s-4)/((2*s-3)*(3*s-5))"];
    for (n, s) in shown.iter().enumerate() {
        assert!(rf_equal(&topological(n + 1).unwrap(), &parse_rf(s).unwrap()));
    }
    for n in 1..=6 {
        assert!(rf_equal(&topological(n).unwrap(), &conjectured_topological(n)));
    }
}

#[test]
fn totient() {
    let r = dirichlet_coeffs(&GlobalZeta::rational(1), 12).unwrap();
    let phi: Vec<BigInt> = [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4].iter().map(|&x| BigInt::from(x)).collect();
    assert_eq!(r, phi);
}

#[test]
fn dirichlet_multiplicative() {
    for n in 1..=3 {
        let r = dirichlet_coeffs(&GlobalZeta::rational(n), 100).unwrap();
        assert_eq!(r[0], BigInt::from(1));
        assert!(multiplicativity_failures(&r).is_empty());
    }
    // r_2 for n = 2 is the t-coefficient at q = 2
    assert_eq!(dirichlet_coeffs(&GlobalZeta::rational(2), 2).unwrap()[1], BigInt::from(1));
}

#[test]
fn splitting_data() {
    // Gaussian integers: 2 ramified, 5 split, 3 inert
    let mut m = BTreeMap::new();
    m.insert(2, vec![(2, 1)]);
    m.insert(3, vec![(9, 1)]);
    m.insert(5, vec![(5, 2)]);
    let g = GlobalZeta { n: 1, field: FieldSpec::Splitting(m) };
    let r = dirichlet_coeffs(&g, 6).unwrap();
    // local factor at 5 is ((1-t)/(1-5t))^2: r_5 = 2 * 4
    assert_eq!(r[4], BigInt::from(8));
    assert_eq!(r[2], BigInt::from(0));
    assert_eq!(dirichlet_coeffs(&g, 7), Err(CatalogError::InsufficientFieldData(7)));
}

proptest! {
    #[test]
    fn local_series_are_counts(n in 1usize..=6, q in prop::sample::select(vec![2u64, 3, 4, 5])) {
        let s = conjectured_local(n).series_at(q, 6).unwrap();
        prop_assert_eq!(&s[0], &Q::from_integer(1.into()));
        for c in &s {
            prop_assert!(c.is_integer() && *c >= Q::from_integer(0.into()));
        }
    }

    #[test]
    fn topological_is_multiplicative(a in 1usize..=4, b in 1usize..=4) {
        let prod = conjectured_local(a).form.mul(&conjectured_local(b).form);
        let lhs = hzeta_core::exactalg::eps_topological(&prod).unwrap();
        let rhs = &topological(a).unwrap() * &topological(b).unwrap();
        prop_assert!(rf_equal(&lhs, &rhs));
    }
}
