//! Deciding between a printed region value and the derived one by comparing
//! the zeta functions they induce.

use serde::Serialize;

use crate::exactalg::{q_var, rf_series, t_var, RatFunc, Var};
use crate::padic::{CheckStatus, DerivationReport};

use super::{evaluate, series_at_prime, EnumConfig, EnumError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// The enumeration agrees with the derived value and not the printed one.
    Derived,
    /// The enumeration agrees with the printed value and not the derived one.
    Printed,
    /// Both readings give the same series at `q = p`.
    Indistinguishable,
    /// The readings first differ beyond the enumerated depth.
    BeyondDepth,
}

#[derive(Clone, Debug, Serialize)]
pub struct Adjudication {
    pub region: String,
    pub p: u64,
    pub degree_cap: usize,
    /// First `t`-degree where the two zeta functions differ as functions of `q`.
    pub first_difference: Option<usize>,
    /// The same at `q = p`.
    pub first_difference_at_p: Option<usize>,
    pub verdict: Verdict,
}

fn first_difference(a: &RatFunc, b: &RatFunc, cap: usize) -> Result<Option<usize>, EnumError> {
    let d = (a - b).reduce();
    if d.is_zero() {
        return Ok(None);
    }
    let s = rf_series(&d, t_var(), cap + 1)?;
    Ok((0..=cap).find(|&k| !s.coeff(k).is_zero()))
}

/// For every check whose printed value differs from the derived one, swaps
/// the printed value into the zeta function and compares both versions with
/// an enumeration at `p` up to degree `d`.
pub fn adjudicate_appendix(report: &DerivationReport, n: usize, p: u64, d: usize, budget: u128) -> Result<Vec<Adjudication>, EnumError> {
    let zeta = report.zeta.as_ref().ok_or_else(|| EnumError::Config(format!("{} has no zeta value", report.script)))?;
    let prefactor = crate::heis::ZetaAssembly::standard().prefactor;
    let differing: Vec<_> = report.checks.iter().filter(|c| c.status == CheckStatus::PrintedDiffers).collect();
    if differing.is_empty() {
        return Ok(Vec::new());
    }
    let enumerated = evaluate(&EnumConfig::new(n, p, d).with_budget(budget))?.coeffs;
    let derived_series = series_at_prime(zeta, p, d)?;
    let mut out = Vec::new();
    for c in differing {
        let printed = c.printed.as_ref().expect("printed value present");
        let row =
            report.regions.iter().find(|r| r.name == c.name).ok_or_else(|| EnumError::Config(format!("check {} does not name a region", c.name)))?;
        let delta = &(&(&prefactor * &row.weight) * &(printed - &c.derived));
        let alt = (zeta + delta).reduce();
        // generous cap: the readings can differ far out
        let first = first_difference(zeta, &alt, 4 * d.max(8))?;
        let alt_at_p = at_prime(&alt, p)?;
        let alt_series = series_at_prime(&alt_at_p, p, d)?;
        let at_p = (0..=d).find(|&k| alt_series[k] != derived_series[k]);
        let verdict = match at_p {
            Some(_) if enumerated == derived_series => Verdict::Derived,
            Some(_) if enumerated == alt_series => Verdict::Printed,
            Some(k) => return Err(EnumError::Inconsistent(format!("neither reading of {} matches at degree {k}", c.name))),
            None if (&at_prime(zeta, p)? - &alt_at_p).reduce().is_zero() => Verdict::Indistinguishable,
            None => Verdict::BeyondDepth,
        };
        out.push(Adjudication { region: c.name.clone(), p, degree_cap: d, first_difference: first, first_difference_at_p: at_p, verdict });
    }
    Ok(out)
}

/// A printed value may name the residue characteristic `p` next to `q`; at a
/// prime field both are the prime.
fn at_prime(f: &RatFunc, p: u64) -> Result<RatFunc, EnumError> {
    let v = RatFunc::int(p as i64);
    Ok(f.substitute(Var::new("p"), &v)?.substitute(q_var(), &v)?.reduce())
}
