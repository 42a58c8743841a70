use hzeta_core::exactalg::*;
use hzeta_core::heis::*;

fn p(s: &str) -> MultiPoly {
    parse_poly(s).unwrap()
}

fn set(src: &[&str]) -> Vec<MultiPoly> {
    let mut v: Vec<MultiPoly> = src.iter().map(|s| p(s)).collect();
    v.sort();
    v
}

#[test]
fn hankel_block_shapes() {
    let m = build_matrices(1).unwrap();
    assert_eq!(m.q, vec![vec![p("Y1")]]);
    assert_eq!(m.r, vec![vec![p("0"), p("Y1")], vec![p("-Y1"), p("0")]]);
    let m = build_matrices(2).unwrap();
    assert_eq!(m.q, vec![vec![p("Y1"), p("Y2")], vec![p("Y2"), p("0")]]);
    let m = build_matrices(3).unwrap();
    assert_eq!(m.q[0], vec![p("Y1"), p("Y2"), p("Y3")]);
    assert_eq!(m.q[1], vec![p("Y2"), p("Y3"), p("0")]);
    assert_eq!(m.q[2], vec![p("Y3"), p("0"), p("0")]);
    for n in 1..=6 {
        assert!(build_matrices(n).unwrap().is_antisymmetric());
    }
    assert_eq!(build_matrices(0).unwrap_err(), HeisError::ZeroRank);
}

#[test]
fn minor_family_for_three() {
    let fam = minor_family(3).unwrap();
    assert_eq!(fam.f[0], set(&["1"]));
    assert_eq!(fam.f[1], set(&["Y1^2", "Y2^2", "Y3^2"]));
    assert_eq!(fam.f[2], set(&["Y3^4", "Y2^2*Y3^2", "(Y1*Y3 - Y2^2)^2"]));
    assert_eq!(fam.f[3], set(&["Y3^6"]));
    assert!(fam.squares_check());
}

#[test]
fn top_minor_is_power_of_last_variable() {
    for n in 1..=6 {
        let fam = minor_family(n).unwrap();
        assert_eq!(fam.f[n], vec![p(&format!("Y{n}^{}", 2 * n))], "n = {n}");
        assert!(fam.squares_check());
    }
    assert!(matches!(minor_family(7), Err(HeisError::SizeLimit { n: 7, .. })));
}

#[test]
fn determinants_agree_with_pfaffians() {
    for n in 1..=3 {
        let m = build_matrices(n).unwrap();
        let det_q = det_bareiss(&m.q);
        let det_r = det_bareiss(&m.r);
        assert_eq!(det_r, det_q.pow(2));
        assert_eq!(det_q.pow(2), p(&format!("Y{n}^{}", 2 * n)));
        let fam = minor_family(n).unwrap();
        // every principal minor, computed as a determinant, lies in the family
        for mask in 1u32..(1 << (2 * n)) {
            let k = mask.count_ones() as usize;
            let d = det_bareiss(&m.principal(mask));
            if k % 2 == 1 {
                assert!(d.is_zero());
            } else if !d.is_zero() {
                assert!(fam.f[k / 2].contains(&d), "n = {n}, mask = {mask:b}");
            }
        }
    }
}

fn valuation(x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    let mut x = x;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v.min(cap)
}

#[test]
fn full_and_reduced_listings_have_equal_norms() {
    for n in 1..=3 {
        let fam = minor_family(n).unwrap();
        let full = fam.compiled();
        let reduced_polys = reduced_listing(n).unwrap();
        let vars = y_vars(n);
        let reduced: Vec<Vec<IntPoly>> = reduced_polys.iter().map(|l| l.iter().map(|q| IntPoly::compile(q, &vars).unwrap()).collect()).collect();
        for prime in [2u64, 3] {
            for level in 1..=4u32 {
                if prime == 3 && level == 4 && n == 3 {
                    continue;
                }
                let m = prime.pow(level);
                let mut point = vec![0u64; n];
                loop {
                    for j in 0..=n {
                        let a = full[j].iter().map(|f| valuation(f.eval_mod(&point, m), prime, level)).min().unwrap();
                        let b = reduced[j].iter().map(|f| valuation(f.eval_mod(&point, m), prime, level)).min().unwrap();
                        assert_eq!(a, b, "n={n} p={prime} N={level} j={j} {point:?}");
                    }
                    let mut i = 0;
                    while i < n {
                        point[i] += 1;
                        if point[i] < m {
                            break;
                        }
                        point[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
    }
}

#[test]
fn squared_and_root_forms_agree_pointwise() {
    let sq = build_integral(3, IntegrandForm::Squared).unwrap();
    let rt = build_integral(3, IntegrandForm::Root).unwrap();
    assert_eq!(sq.factors.len(), rt.factors.len());
    let vars: Vec<Var> = sq.variables.iter().map(|(v, _)| *v).collect();
    let m = 2u64.pow(8);
    for u in [2u64, 4, 8, 12] {
        for y in [[1u64, 0, 0], [3, 2, 4], [1, 2, 4], [5, 6, 8], [7, 4, 2], [2, 1, 6]] {
            let point: Vec<u64> = std::iter::once(u).chain(y).collect();
            let vals = |i: &PadicIntegral| -> Vec<Q> {
                i.factors
                    .iter()
                    .map(|f| {
                        let v = f.polys().iter().map(|h| valuation(IntPoly::compile(h, &vars).unwrap().eval_mod(&point, m), 2, 8)).min().unwrap();
                        q_int(v as i64)
                    })
                    .collect()
            };
            // only compare points where no valuation reaches the cap
            let vs = vals(&sq);
            if vs.iter().any(|v| *v >= q_int(8)) {
                continue;
            }
            assert_eq!(sq.qt_exponents(&vs), rt.qt_exponents(&vals(&rt)), "{point:?}");
        }
    }
}

#[test]
fn integral_shape() {
    let i = build_integral(3, IntegrandForm::Root).unwrap();
    assert_eq!(i.factors[0], Factor::Abs { poly: p("u"), exp: SExp::ints(-4, 3) });
    assert_eq!(i.domain(Var::new("u")), Some(Domain::Ideal));
    assert_eq!(i.groups, vec![y_vars(3)]);
    let abc = i.abc_notation().unwrap();
    assert!(abc.contains("A := ‖"), "{abc}");
    let a_line = abc.lines().next().unwrap();
    for g in ["z^2", "y*z", "x*z"] {
        assert!(a_line.contains(g), "{a_line}");
    }
    assert!(a_line.ends_with("^(s)"), "{a_line}");
    let c_line = abc.lines().nth(2).unwrap();
    assert!(c_line.contains("z^3") && c_line.ends_with("^(-s)"), "{c_line}");
    let one = build_integral(1, IntegrandForm::Root).unwrap();
    assert_eq!(one.factors[0], Factor::Abs { poly: p("u"), exp: SExp::ints(-2, 1) });
    // the zeta assembly rule
    let a = i.assembly.as_ref().unwrap();
    assert_eq!(a.apply(&RatFunc::zero()), RatFunc::one());
}

#[test]
fn integral_roundtrips_through_json() {
    let i = build_integral(2, IntegrandForm::Squared).unwrap();
    let js = serde_json::to_string(&i).unwrap();
    let back: PadicIntegral = serde_json::from_str(&js).unwrap();
    assert_eq!(back, i);
}
