//! Exact truncated evaluation of the local zeta function by enumerating
//! residue classes modulo `p^N`.
//!
//! For `u` of valuation `k` and `y` in `W_n(Z_p)` the integrand is
//! `q^(k(n+1)) t^b` with `b = sum_j max(0, k - e_j)`, where `e_1 <= ... <= e_n`
//! are the elementary divisor valuations of the Hankel block `Q(y)`. The
//! minimum valuation of the `j`-th Pfaffian set is `e_1 + ... + e_j`, which
//! is what the norm ratios measure. Since `y` has a unit coordinate,
//! `e_1 = 0` and so `b >= k`; with `N >= D + 1` every class of `y` mod `p^N`
//! and every `k < N` is evaluated exactly and every `k >= N` lies beyond the
//! degree cap. The output is therefore exact, not an approximation.

mod adjudicate;
mod snf;

pub use adjudicate::{adjudicate_appendix, Adjudication, Verdict};

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exactalg::{q_var, rf_series, t_var, AlgError, RatFunc, Q};
use crate::heis::{minor_family, y_vars, HeisError, IntPoly};

use snf::{elementary_divisors, Modulus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumError {
    #[error("{points} points exceed the budget of {budget}")]
    BudgetExceeded { points: u128, budget: u128 },
    #[error("level {level} does not determine degree {degree}; use a level of at least {}", degree + 1)]
    Unstable { level: u32, degree: usize },
    #[error("non-integral exponent: {0}")]
    NonIntegralExponent(String),
    #[error("minor valuations disagree with the Smith form: {0}")]
    Inconsistent(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Heis(#[from] HeisError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// How residue classes are visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Classes of `y` only; the sum over `v(u)` is taken in closed form.
    #[default]
    ValuationClasses,
    /// As above, but with exponents computed from the principal minors on the
    /// half-integer lattice, checked against the Smith form.
    Minors,
    /// Classes of `(u, y)` together.
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnumConfig {
    pub n: usize,
    pub p: u64,
    pub level: u32,
    pub degree_cap: usize,
    pub point_budget: u128,
    #[serde(default)]
    pub strategy: Strategy,
}

pub const DEFAULT_BUDGET: u128 = 1 << 26;

impl EnumConfig {
    /// Level `D + 1`, the smallest that determines degree `D`.
    pub fn new(n: usize, p: u64, degree_cap: usize) -> EnumConfig {
        EnumConfig { n, p, level: degree_cap as u32 + 1, degree_cap, point_budget: DEFAULT_BUDGET, strategy: Strategy::default() }
    }

    pub fn with_level(mut self, level: u32) -> EnumConfig {
        self.level = level;
        self
    }

    pub fn with_strategy(mut self, s: Strategy) -> EnumConfig {
        self.strategy = s;
        self
    }

    pub fn with_budget(mut self, b: u128) -> EnumConfig {
        self.point_budget = b;
        self
    }

    /// Residue points visited by the configured strategy.
    pub fn points(&self) -> u128 {
        let per = (self.p as u128).pow(self.level);
        let y = per.pow(self.n as u32);
        match self.strategy {
            Strategy::BruteForce => y * per / self.p as u128,
            _ => y,
        }
    }

    fn validate(&self) -> Result<(), EnumError> {
        if self.n == 0 || self.level == 0 {
            return Err(EnumError::Config("n and the level must be positive".into()));
        }
        if self.p < 2 || (2..self.p).take_while(|d| d * d <= self.p).any(|d| self.p.is_multiple_of(d)) {
            return Err(EnumError::NotPrime(self.p));
        }
        if (self.level as usize) <= self.degree_cap {
            return Err(EnumError::Unstable { level: self.level, degree: self.degree_cap });
        }
        if (self.p as f64).powi(self.level as i32) >= 2f64.powi(62) {
            return Err(EnumError::Config("modulus too large".into()));
        }
        let pts = self.points();
        if pts > self.point_budget {
            return Err(EnumError::BudgetExceeded { points: pts, budget: self.point_budget });
        }
        Ok(())
    }
}

/// Per-degree sums of integer weights, merged by exact addition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StratumAccumulator {
    pub sums: Vec<u128>,
    /// Points whose exponents could not be read off the capped minors.
    pub fallbacks: u64,
    pub instability_flag: bool,
}

impl StratumAccumulator {
    fn new(d: usize) -> StratumAccumulator {
        StratumAccumulator { sums: vec![0; d + 1], fallbacks: 0, instability_flag: false }
    }

    fn merge(mut self, o: StratumAccumulator) -> StratumAccumulator {
        for (a, b) in self.sums.iter_mut().zip(o.sums) {
            *a += b;
        }
        self.fallbacks += o.fallbacks;
        self.instability_flag |= o.instability_flag;
        self
    }
}

/// Coefficients of the zeta series at `q = p`, degrees `0..=D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumResult {
    pub config: EnumConfig,
    #[serde(with = "q_strings")]
    pub coeffs: Vec<Q>,
    pub points: u128,
    /// Points handled by the Smith-form fallback under [`Strategy::Minors`].
    pub fallbacks: u64,
}

mod q_strings {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::exactalg::{parse_rational, Q};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

impl EnumResult {
    /// All coefficients are non-negative integers.
    pub fn counts_are_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer() && *c >= Q::zero())
    }
}

fn hankel(y: &[u64]) -> Vec<Vec<u64>> {
    let n = y.len();
    (0..n).map(|i| (0..n).map(|j| if i + j < n { y[i + j] } else { 0 }).collect()).collect()
}

fn decode(mut idx: u64, m: u64, out: &mut [u64]) {
    for slot in out.iter_mut() {
        *slot = idx % m;
        idx /= m;
    }
}

/// `b = sum_j max(0, k - e_j)`.
fn t_exponent(e: &[u32], k: u32) -> usize {
    e.iter().map(|&ej| k.saturating_sub(ej) as usize).sum()
}

struct MinorData {
    /// `F_j` for `j = 1..=n`, compiled.
    families: Vec<Vec<IntPoly>>,
}

/// Doubled exponents from capped minor valuations, or `None` when a cap hides
/// a minimum that matters.
fn minors_exponents(md: &Modulus, data: &MinorData, y: &[u64], n: usize) -> Result<Option<Vec<u32>>, EnumError> {
    let mut doubled = Vec::with_capacity(n + 1);
    doubled.push(0u32);
    for fam in &data.families {
        let v = fam.iter().map(|f| md.val(f.eval_mod(y, md.m))).min().unwrap_or(md.level);
        if v >= md.level {
            return Ok(None);
        }
        doubled.push(v);
    }
    for (j, d) in doubled.iter().enumerate() {
        if d % 2 != 0 {
            return Err(EnumError::NonIntegralExponent(format!("odd minor valuation {d} for j = {j} at {y:?}")));
        }
    }
    let e: Vec<u32> = doubled.windows(2).map(|w| (w[1] - w[0]) / 2).collect();
    Ok(Some(e))
}

/// The integrand exponent in the squared form, `2nk - sum_j (min(D_j, D_{j-1} + 2k) - D_{j-1})`, halved.
fn squared_form_exponent(e: &[u32], k: u32) -> Result<usize, EnumError> {
    let n = e.len() as i64;
    let mut d_prev = 0i64;
    let mut twice = 2 * n * k as i64;
    for &ej in e {
        let d = d_prev + 2 * ej as i64;
        twice -= d.min(d_prev + 2 * k as i64) - d_prev;
        d_prev = d;
    }
    if twice % 2 != 0 || twice < 0 {
        return Err(EnumError::NonIntegralExponent(format!("2b = {twice}")));
    }
    Ok((twice / 2) as usize)
}

pub fn evaluate(cfg: &EnumConfig) -> Result<EnumResult, EnumError> {
    cfg.validate()?;
    let (n, d) = (cfg.n, cfg.degree_cap);
    let md = Modulus::new(cfg.p, cfg.level);
    let per = md.m;
    let y_total = per.checked_pow(n as u32).ok_or_else(|| EnumError::Config("too many classes".into()))?;
    let minors = match cfg.strategy {
        Strategy::Minors => {
            let fam = minor_family(n)?;
            let vars = y_vars(n);
            let families = fam.f[1..].iter().map(|l| l.iter().map(|g| IntPoly::compile(g, &vars).expect("integer minors")).collect()).collect();
            Some(MinorData { families })
        }
        _ => None,
    };
    let pn = (cfg.p as u128).pow(n as u32);
    let np1 = (cfg.p as u128).pow(n as u32 + 1);
    let acc = (0..y_total)
        .into_par_iter()
        .fold(
            || (StratumAccumulator::new(d), vec![0u64; n]),
            |(mut acc, mut y), idx| {
                decode(idx, per, &mut y);
                if y.iter().all(|c| c % cfg.p == 0) {
                    return (acc, y);
                }
                let e = elementary_divisors(hankel(&y), &md);
                match cfg.strategy {
                    Strategy::ValuationClasses => {
                        let mut w = 1u128;
                        for k in 1..cfg.level {
                            w *= pn;
                            let b = t_exponent(&e, k);
                            if b <= d {
                                acc.sums[b] += w;
                            }
                        }
                    }
                    Strategy::Minors => {
                        let data = minors.as_ref().expect("compiled minors");
                        let from_minors = match minors_exponents(&md, data, &y, n) {
                            Ok(Some(em)) => {
                                if em != e {
                                    acc.instability_flag = true;
                                }
                                em
                            }
                            Ok(None) => {
                                acc.fallbacks += 1;
                                e.clone()
                            }
                            Err(_) => {
                                acc.instability_flag = true;
                                e.clone()
                            }
                        };
                        let mut w = 1u128;
                        for k in 1..cfg.level {
                            w *= pn;
                            match squared_form_exponent(&from_minors, k) {
                                Ok(b) if b <= d => acc.sums[b] += w,
                                Ok(_) => {}
                                Err(_) => acc.instability_flag = true,
                            }
                        }
                    }
                    Strategy::BruteForce => {
                        // u runs over the multiples of p below p^N; u = 0 has v(u) >= N
                        for u in (cfg.p..per).step_by(cfg.p as usize) {
                            let k = md.val(u);
                            let b = t_exponent(&e, k);
                            if b <= d {
                                acc.sums[b] += np1.pow(k);
                            }
                        }
                    }
                }
                (acc, y)
            },
        )
        .map(|(a, _)| a)
        .reduce(|| StratumAccumulator::new(d), StratumAccumulator::merge);
    if acc.instability_flag {
        return Err(EnumError::Inconsistent(format!("n = {n}, p = {}, N = {}", cfg.p, cfg.level)));
    }
    let p = BigInt::from(cfg.p);
    let denom = match cfg.strategy {
        // Z = p^(-N(n+1)) sum, zeta = 1 + Z p / (p - 1)
        Strategy::BruteForce => Q::new(p.pow(cfg.level * (n as u32 + 1)) * (&p - 1), p.clone()),
        // the (1 - p^-1) of the u-measure cancels the assembly prefactor
        _ => Q::from_integer(p.pow(cfg.level * n as u32)),
    };
    let coeffs = acc
        .sums
        .iter()
        .enumerate()
        .map(|(deg, s)| {
            let c = Q::from_integer(BigInt::from(*s)) / &denom;
            if deg == 0 {
                c + Q::one()
            } else {
                c
            }
        })
        .collect();
    Ok(EnumResult { config: cfg.clone(), coeffs, points: cfg.points(), fallbacks: acc.fallbacks })
}

/// Evaluates at levels `N` and `N + 1` and compares coefficients up to `D`.
pub fn stability_check(cfg: &EnumConfig) -> Result<bool, EnumError> {
    let a = evaluate(cfg)?;
    let b = evaluate(&cfg.clone().with_level(cfg.level + 1).with_budget(cfg.point_budget.max(cfg.clone().with_level(cfg.level + 1).points())))?;
    Ok(a.coeffs == b.coeffs)
}

/// Series coefficients of a closed form in `q, t` at `q = p`, degrees `0..=d`.
pub fn series_at_prime(f: &RatFunc, p: u64, d: usize) -> Result<Vec<Q>, EnumError> {
    let g = f.substitute(q_var(), &RatFunc::int(p as i64))?;
    let s = rf_series(&g, t_var(), d + 1)?;
    (0..=d).map(|k| s.coeff(k).as_constant().ok_or_else(|| EnumError::Config(format!("coefficient of t^{k} is not constant")))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesComparison {
    pub n: usize,
    pub p: u64,
    pub degree_cap: usize,
    #[serde(with = "q_strings")]
    pub enumerated: Vec<Q>,
    #[serde(with = "q_strings")]
    pub predicted: Vec<Q>,
    pub matches: Vec<bool>,
}

impl SeriesComparison {
    pub fn all_match(&self) -> bool {
        self.matches.iter().all(|m| *m)
    }

    pub fn table(&self) -> String {
        let mut out = format!("n = {}, p = {}\n{:>4}  {:>16}  {:>16}\n", self.n, self.p, "deg", "enumerated", "predicted");
        for (k, ((a, b), m)) in self.enumerated.iter().zip(&self.predicted).zip(&self.matches).enumerate() {
            out.push_str(&format!("{k:>4}  {a:>16}  {b:>16}  {}\n", if *m { "ok" } else { "MISMATCH" }));
        }
        out
    }
}

/// Compares an enumeration against the series of a closed form at `q = p`.
pub fn compare(result: &EnumResult, closed: &RatFunc) -> Result<SeriesComparison, EnumError> {
    let cfg = &result.config;
    let predicted = series_at_prime(closed, cfg.p, cfg.degree_cap)?;
    let matches = result.coeffs.iter().zip(&predicted).map(|(a, b)| a == b).collect();
    Ok(SeriesComparison { n: cfg.n, p: cfg.p, degree_cap: cfg.degree_cap, enumerated: result.coeffs.clone(), predicted, matches })
}

/// Enumerates at `n` and compares with the conjectured product.
pub fn conjecture_probe(n: usize, p: u64, d: usize, budget: u128) -> Result<SeriesComparison, EnumError> {
    let r = evaluate(&EnumConfig::new(n, p, d).with_budget(budget))?;
    compare(&r, &crate::catalog::conjectured_local(n).expand())
}

/// Environment variable naming the result cache directory.
pub const CACHE_ENV: &str = "ZETA_CACHE_DIR";

pub fn cache_key(cfg: &EnumConfig) -> String {
    let key = format!("enum-v1 n={} p={} N={} D={} {:?}", cfg.n, cfg.p, cfg.level, cfg.degree_cap, cfg.strategy);
    hex::encode(Sha256::digest(key.as_bytes()))
}

pub fn cache_path(dir: &Path, cfg: &EnumConfig) -> PathBuf {
    dir.join(format!("enum-{}.json", cache_key(cfg)))
}

/// [`evaluate`] with a content-addressed result cache in `dir`, or in
/// `$ZETA_CACHE_DIR` when `dir` is `None`. Without either, no caching.
pub fn evaluate_cached(cfg: &EnumConfig, dir: Option<&Path>) -> Result<EnumResult, EnumError> {
    let env_dir = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let Some(dir) = dir.map(Path::to_path_buf).or(env_dir) else {
        return evaluate(cfg);
    };
    let path = cache_path(&dir, cfg);
    if let Ok(src) = std::fs::read_to_string(&path) {
        let hit: EnumResult = serde_json::from_str(&src).map_err(|e| EnumError::Cache(format!("{}: {e}", path.display())))?;
        if hit.config.n == cfg.n && hit.config.p == cfg.p && hit.config.level == cfg.level && hit.config.degree_cap == cfg.degree_cap {
            return Ok(hit);
        }
    }
    let r = evaluate(cfg)?;
    std::fs::create_dir_all(&dir).map_err(|e| EnumError::Cache(e.to_string()))?;
    let js = serde_json::to_string_pretty(&r).map_err(|e| EnumError::Cache(e.to_string()))?;
    std::fs::write(&path, js).map_err(|e| EnumError::Cache(format!("{}: {e}", path.display())))?;
    Ok(r)
}
