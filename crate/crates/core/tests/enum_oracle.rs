use hzeta_core::catalog::{closed_local, conjectured_local};
use hzeta_core::enum_oracle::{
    adjudicate_appendix, cache_path, compare, evaluate, evaluate_cached, stability_check, EnumConfig, EnumError, Strategy, Verdict,
};
use hzeta_core::exactalg::Q;
use hzeta_core::padic::builtin_script;

fn ints(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_integer(x.into())).collect()
}

#[test]
fn n1_at_two() {
    let r = evaluate(&EnumConfig::new(1, 2, 3)).unwrap();
    assert_eq!(r.coeffs, ints(&[1, 1, 2, 4]));
}

#[test]
fn matches_closed_forms() {
    for (n, p, d) in [(1, 2, 3), (1, 3, 3), (2, 2, 4), (2, 3, 3), (3, 2, 4)] {
        let cfg = EnumConfig::new(n, p, d);
        let r = evaluate(&cfg).unwrap();
        let cmp = compare(&r, &closed_local(n).unwrap().expand()).unwrap();
        assert!(cmp.all_match(), "{}", cmp.table());
        assert!(r.counts_are_integral());
    }
}

#[test]
fn stable_one_level_up() {
    for (n, p, d) in [(1, 3, 3), (2, 2, 3), (2, 3, 2)] {
        assert!(stability_check(&EnumConfig::new(n, p, d)).unwrap());
    }
}

#[test]
fn strategies_agree() {
    for (n, p, d) in [(1, 2, 4), (2, 2, 3), (2, 3, 2), (3, 2, 2)] {
        let base = evaluate(&EnumConfig::new(n, p, d)).unwrap();
        for s in [Strategy::Minors, Strategy::BruteForce] {
            let other = evaluate(&EnumConfig::new(n, p, d).with_strategy(s)).unwrap();
            assert_eq!(base.coeffs, other.coeffs, "{s:?} at n = {n}, p = {p}");
        }
    }
}

#[test]
fn minors_need_few_fallbacks_at_depth() {
    let r = evaluate(&EnumConfig::new(2, 2, 4).with_level(6).with_strategy(Strategy::Minors)).unwrap();
    // only y with a capped minor valuation fall back
    assert!(r.fallbacks < (r.points / 4) as u64, "{} of {}", r.fallbacks, r.points);
}

#[test]
fn deterministic_across_thread_counts() {
    let cfg = EnumConfig::new(3, 2, 4);
    let runs: Vec<_> =
        [1, 2, 5].iter().map(|&k| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap().install(|| evaluate(&cfg).unwrap())).collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn rejects_bad_configs() {
    assert_eq!(evaluate(&EnumConfig::new(1, 2, 3).with_level(3)), Err(EnumError::Unstable { level: 3, degree: 3 }));
    assert!(matches!(evaluate(&EnumConfig::new(3, 2, 8)), Err(EnumError::BudgetExceeded { .. })));
    assert_eq!(evaluate(&EnumConfig::new(1, 4, 2)), Err(EnumError::NotPrime(4)));
    assert!(matches!(evaluate(&EnumConfig::new(1, 2, 2).with_budget(4)), Err(EnumError::BudgetExceeded { points: 8, budget: 4 })));
}

#[test]
fn conjecture_at_n4() {
    let r = evaluate(&EnumConfig::new(4, 2, 3)).unwrap();
    let cmp = compare(&r, &conjectured_local(4).expand()).unwrap();
    assert!(cmp.all_match(), "{}", cmp.table());
}

#[test]
fn cache_roundtrip() {
    let dir = std::env::temp_dir().join(format!("hzeta-cache-test-{}", std::process::id()));
    let cfg = EnumConfig::new(2, 3, 2);
    let a = evaluate_cached(&cfg, Some(&dir)).unwrap();
    assert!(cache_path(&dir, &cfg).exists());
    let b = evaluate_cached(&cfg, Some(&dir)).unwrap();
    assert_eq!(a, b);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn appendix_adjudication() {
    let report = builtin_script("n3").unwrap().run().unwrap();
    let verdicts = adjudicate_appendix(&report, 3, 2, 4, 1 << 26).unwrap();
    assert_eq!(verdicts.len(), 2);
    let z = verdicts.iter().find(|v| v.region == "Z322a").unwrap();
    assert_eq!(z.verdict, Verdict::Indistinguishable);
    let j = verdicts.iter().find(|v| v.region == "J2").unwrap();
    assert_eq!(j.verdict, Verdict::BeyondDepth);
    assert!(j.first_difference.unwrap() > 4);
}
