use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactalg::{parse_rf, rf_equal, RatFunc, Var, Q};
use crate::heis::{build_integral, letter_names, IntegrandForm, PadicIntegral};

use super::monomial::{monomialize, region_measure};
use super::region::RegionIntegral;
use super::steps::{is_split, rewrite, split, Step};
use super::PadicError;

/// A tree of regions produced by applying steps to a root integral.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub root: String,
    pub regions: BTreeMap<String, RegionIntegral>,
    pub children: BTreeMap<String, Vec<String>>,
    parent: BTreeMap<String, String>,
    /// Region names in creation order.
    pub order: Vec<String>,
}

impl Derivation {
    pub fn new(root: &str, integral: PadicIntegral) -> Result<Derivation, PadicError> {
        let r = RegionIntegral::root(root, integral)?;
        Ok(Derivation {
            root: root.to_string(),
            regions: [(root.to_string(), r)].into_iter().collect(),
            children: BTreeMap::new(),
            parent: BTreeMap::new(),
            order: vec![root.to_string()],
        })
    }

    pub fn region(&self, name: &str) -> Result<&RegionIntegral, PadicError> {
        self.regions.get(name).ok_or_else(|| PadicError::UnknownRegion(name.to_string()))
    }

    pub fn apply(&mut self, step: &Step) -> Result<(), PadicError> {
        let name = step.region();
        let r = self.region(name)?;
        if self.children.contains_key(name) {
            return Err(PadicError::InapplicableStep(format!("{step}: {name} has already been split")));
        }
        if is_split(step) {
            let kids = split(r, step)?;
            let names: Vec<String> = kids.iter().map(|k| k.name.clone()).collect();
            if names[0] == names[1] {
                return Err(PadicError::InapplicableStep(format!("{step}: children need distinct names")));
            }
            for k in kids {
                if self.regions.contains_key(&k.name) {
                    return Err(PadicError::InapplicableStep(format!("{step}: region {} exists", k.name)));
                }
                self.parent.insert(k.name.clone(), name.to_string());
                self.order.push(k.name.clone());
                self.regions.insert(k.name.clone(), k);
            }
            self.children.insert(name.to_string(), names);
        } else {
            let new = rewrite(r, step)?;
            self.regions.insert(name.to_string(), new);
        }
        Ok(())
    }

    pub fn leaves(&self) -> Vec<&str> {
        self.order.iter().filter(|n| !self.children.contains_key(*n)).map(|s| s.as_str()).collect()
    }

    /// Product of the multiplicities from the root down to `name`.
    pub fn weight(&self, name: &str) -> RatFunc {
        let mut w = RatFunc::one();
        let mut cur = name;
        while let Some(r) = self.regions.get(cur) {
            w = &w * &r.multiplicity;
            match self.parent.get(cur) {
                Some(p) => cur = p,
                None => break,
            }
        }
        w.reduce()
    }

    /// Value of every region: leaves by cone summation, in parallel; inner
    /// regions as the multiplicity-weighted sum of their children.
    pub fn evaluate(&self) -> Result<BTreeMap<String, RatFunc>, PadicError> {
        let leaves = self.leaves();
        let leaf_values: Vec<(String, Result<RatFunc, PadicError>)> =
            leaves.par_iter().map(|n| (n.to_string(), monomialize(&self.regions[*n]).and_then(|m| m.evaluate()))).collect();
        let mut values = BTreeMap::new();
        for (n, v) in leaf_values {
            values.insert(n, v?);
        }
        for name in self.order.iter().rev() {
            if let Some(kids) = self.children.get(name) {
                let total: RatFunc = kids.iter().map(|k| &self.regions[k].multiplicity * &values[k]).sum();
                values.insert(name.clone(), total.reduce());
            }
        }
        Ok(values)
    }

    /// For every split, checks that each sample point of the parent lies in
    /// exactly one child. Sample points are the integers `1..p^level` in every
    /// original variable.
    pub fn partition_check(&self, p: u64, level: u32) -> Result<PartitionStats, PadicError> {
        let vars: Vec<Var> = self.regions[&self.root].integral.variables.iter().map(|(v, _)| *v).collect();
        let m = p.pow(level);
        let mut point = vec![1u64; vars.len()];
        let mut stats = PartitionStats { splits: self.children.len(), points: 0, covered: 0 };
        loop {
            let pt: HashMap<Var, Q> = vars.iter().zip(&point).map(|(v, x)| (*v, Q::from_integer((*x).into()))).collect();
            stats.points += 1;
            if self.regions[&self.root].contains(&pt, p) {
                stats.covered += 1;
            }
            for (parent, kids) in &self.children {
                let inside = self.regions[parent].contains(&pt, p) as usize;
                let hits: Vec<&String> = kids.iter().filter(|k| self.regions[*k].contains(&pt, p)).collect();
                if hits.len() != inside {
                    return Err(PadicError::PartitionFailure(format!("{parent} at {point:?}: in parent {inside}, in children {hits:?}")));
                }
            }
            let mut i = 0;
            while i < point.len() {
                point[i] += 1;
                if point[i] < m {
                    break;
                }
                point[i] = 1;
                i += 1;
            }
            if i == point.len() {
                return Ok(stats);
            }
        }
    }

    /// For every split, checks that the children's measures, weighted by
    /// multiplicity, add up to the parent's measure.
    pub fn measure_check(&self) -> Result<(), PadicError> {
        for (parent, kids) in &self.children {
            let whole = region_measure(&self.regions[parent])?;
            let mut parts = RatFunc::zero();
            for k in kids {
                parts = &parts + &(&self.regions[k].multiplicity * &region_measure(&self.regions[k])?);
            }
            if !rf_equal(&whole, &parts) {
                return Err(PadicError::MeasureMismatch(format!("{parent}: {whole} vs {}", parts.reduce())));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionStats {
    pub splits: usize,
    pub points: usize,
    /// Sample points inside the root region.
    pub covered: usize,
}

/// Where a script takes its root integral from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralSource {
    /// The Heisenberg integral for `n`, in Pfaffian form; `letters` renames
    /// `Y1, Y2, Y3` to `x, y, z`.
    Heis {
        n: usize,
        #[serde(default)]
        letters: bool,
    },
    Custom(Box<PadicIntegral>),
}

/// An identity to verify once the tree has been evaluated. `expr` may refer
/// to region names and to `zeta`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expr: String,
    pub expected: String,
    /// The form as printed in the source, when it differs from `expected`.
    #[serde(default)]
    pub printed: Option<String>,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Script {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub integral: IntegralSource,
    pub root: String,
    pub steps: Vec<Step>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

impl Script {
    pub fn root_integral(&self) -> Result<PadicIntegral, PadicError> {
        match &self.integral {
            IntegralSource::Heis { n, letters } => {
                let i = build_integral(*n, IntegrandForm::Root).map_err(PadicError::Heis)?;
                Ok(if *letters { i.rename(&letter_names(*n)) } else { i })
            }
            IntegralSource::Custom(i) => Ok((**i).clone()),
        }
    }

    pub fn derivation(&self) -> Result<Derivation, PadicError> {
        let mut d = Derivation::new(&self.root, self.root_integral()?)?;
        for s in &self.steps {
            d.apply(s)?;
        }
        Ok(d)
    }

    pub fn run(&self) -> Result<DerivationReport, PadicError> {
        let d = self.derivation()?;
        let values = d.evaluate()?;
        let root = &d.regions[&d.root];
        let zeta = root.integral.assembly.as_ref().map(|a| a.apply(&values[&d.root]));
        let mut env: HashMap<Var, RatFunc> = values.iter().map(|(k, v)| (Var::new(k), v.clone())).collect();
        if let Some(z) = &zeta {
            env.insert(Var::new("zeta"), z.clone());
        }
        let parse = |s: &str| parse_rf(s).map_err(|e| PadicError::Fixture(format!("{s:?}: {e}")));
        let mut checks = Vec::new();
        for c in &self.checks {
            let derived = parse(&c.expr)?.substitute_many(&env).map_err(PadicError::Alg)?.reduce();
            let expected = parse(&c.expected)?;
            let printed = c.printed.as_deref().map(parse).transpose()?;
            let status = match (rf_equal(&derived, &expected), printed.as_ref().map(|p| rf_equal(&derived, p))) {
                (true, None | Some(true)) => CheckStatus::Match,
                (true, Some(false)) => CheckStatus::PrintedDiffers,
                (false, _) => CheckStatus::Mismatch,
            };
            checks.push(CheckOutcome { name: c.name.clone(), expr: c.expr.clone(), derived, expected, printed, status, note: c.note.clone() });
        }
        let regions = d
            .order
            .iter()
            .map(|n| RegionRow {
                name: n.clone(),
                integral: d.regions[n].integral.to_string(),
                weight: d.weight(n),
                value: values[n].clone(),
                leaf: !d.children.contains_key(n),
            })
            .collect();
        Ok(DerivationReport { script: self.name.clone(), regions, checks, zeta })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Match,
    /// The derived value equals the expected form, which corrects the printed one.
    PrintedDiffers,
    Mismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub expr: String,
    pub derived: RatFunc,
    pub expected: RatFunc,
    pub printed: Option<RatFunc>,
    pub status: CheckStatus,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionRow {
    pub name: String,
    pub integral: String,
    /// Number of copies of the region inside the root.
    pub weight: RatFunc,
    pub value: RatFunc,
    pub leaf: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivationReport {
    pub script: String,
    pub regions: Vec<RegionRow>,
    pub checks: Vec<CheckOutcome>,
    pub zeta: Option<RatFunc>,
}

impl DerivationReport {
    /// True when no check is a plain mismatch.
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Mismatch)
    }

    pub fn value(&self, region: &str) -> Option<&RatFunc> {
        self.regions.iter().find(|r| r.name == region).map(|r| &r.value)
    }
}

impl fmt::Display for DerivationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "derivation {}", self.script)?;
        writeln!(f, "{:<8} {:<4} {:<10} value", "region", "leaf", "weight")?;
        for r in &self.regions {
            writeln!(f, "{:<8} {:<4} {:<10} {}", r.name, if r.leaf { "*" } else { "" }, r.weight.to_string(), r.value)?;
        }
        for r in self.regions.iter().filter(|r| r.leaf) {
            writeln!(f, "  {} = {}", r.name, r.integral)?;
        }
        if let Some(z) = &self.zeta {
            writeln!(f, "zeta = {z}")?;
        }
        for c in &self.checks {
            let tag = match c.status {
                CheckStatus::Match => "ok",
                CheckStatus::PrintedDiffers => "ok (printed form differs)",
                CheckStatus::Mismatch => "MISMATCH",
            };
            writeln!(f, "check {}: {tag}", c.name)?;
            if c.status != CheckStatus::Match {
                writeln!(f, "  derived  {}", c.derived)?;
                if let Some(p) = &c.printed {
                    writeln!(f, "  printed  {p}")?;
                }
                if c.status == CheckStatus::Mismatch {
                    writeln!(f, "  expected {}", c.expected)?;
                }
            }
        }
        Ok(())
    }
}
