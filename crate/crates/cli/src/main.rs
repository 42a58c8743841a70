//! `hzeta`: derivations, verification, enumeration and catalog queries for the
//! representation zeta functions of `H(O[x]/(x^n))`.

mod manifest;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hzeta_core::catalog::{
    abscissa_of, closed_local, conjectured_local, conjectured_topological, dirichlet_coeffs, expansion_identity, local, multiplicativity_failures,
    pole_order, topological, GlobalZeta,
};
use hzeta_core::conesum::{lemma_fixture, parse_corpus};
use hzeta_core::enum_oracle::{adjudicate_appendix, compare, evaluate_cached, stability_check, EnumConfig, Strategy, Verdict, CACHE_ENV};
use hzeta_core::exactalg::rf_equal;
use hzeta_core::padic::{parse_script, script_names, script_source, CheckStatus, IntegralSource, Script};

use manifest::{content_hash, load_all, RunManifest};

#[derive(Parser)]
#[command(name = "hzeta", version, about = "Representation zeta functions of Heisenberg groups over O[x]/(x^n)")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory with lemmas.json and scripts/*.json replacing the built-in fixtures.
    #[arg(long, global = true)]
    fixtures_dir: Option<PathBuf>,
    /// Cache directory for enumeration results and run manifests; defaults to $ZETA_CACHE_DIR.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Lemmas,
    Appendix,
    N2,
    N3,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Form {
    Closed,
    Conjecture,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Classes,
    Minors,
    Brute,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run derivations and compare against the recorded closed forms.
    Verify {
        #[arg(value_enum)]
        target: Target,
        /// Prime used to adjudicate printed appendix rows.
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Degree of the adjudicating enumeration.
        #[arg(long, default_value_t = 4)]
        deg: usize,
        #[arg(long, default_value_t = 1 << 26)]
        budget: u128,
    },
    /// Run one derivation script, built-in by name or from a file.
    Derive { script: String },
    /// Evaluate the local zeta function at a prime by enumeration.
    Enum {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        deg: usize,
        /// Defaults to deg + 1.
        #[arg(long)]
        level: Option<u32>,
        #[arg(long, default_value_t = 1 << 26)]
        budget: u128,
        #[arg(long, value_enum, default_value_t = StrategyArg::Classes)]
        strategy: StrategyArg,
    },
    /// Local zeta function in closed form.
    Local {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Form::Closed)]
        form: Form,
    },
    /// Dirichlet coefficients over Q.
    Dirichlet {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        count: usize,
    },
    /// Abscissa of convergence and the pole there.
    Abscissa {
        #[arg(long)]
        n: usize,
    },
    /// Topological zeta function.
    Topo {
        #[arg(long)]
        n: usize,
    },
    /// Check the subset expansion of the product formula.
    ExpandIdentity {
        #[arg(long)]
        n: usize,
    },
    /// Consolidate the stored run manifests.
    Report,
}

/// Appendix rows among the n = 3 checks.
const APPENDIX_ROWS: [&str; 4] = ["Z322a", "Z322b1", "J1", "J2"];

struct Fixtures {
    lemmas: String,
    scripts: BTreeMap<String, String>,
}

impl Fixtures {
    fn load(dir: Option<&Path>) -> Result<Fixtures, String> {
        let Some(dir) = dir else {
            let scripts = script_names().into_iter().map(|n| (n.to_string(), script_source(n).expect("listed").to_string())).collect();
            return Ok(Fixtures { lemmas: lemma_fixture().to_string(), scripts });
        };
        let read = |p: PathBuf| std::fs::read_to_string(&p).map_err(|e| format!("fixture missing: {}: {e}", p.display()));
        let lemmas = read(dir.join("lemmas.json"))?;
        let mut scripts = BTreeMap::new();
        for n in script_names() {
            scripts.insert(n.to_string(), read(dir.join("scripts").join(format!("{n}.json")))?);
        }
        Ok(Fixtures { lemmas, scripts })
    }

    fn hash(&self) -> String {
        let mut v = vec![("lemmas.json", self.lemmas.as_str())];
        v.extend(self.scripts.iter().map(|(k, s)| (k.as_str(), s.as_str())));
        content_hash(v)
    }

    fn script(&self, name: &str) -> Result<Script, String> {
        let src = self.scripts.get(name).ok_or_else(|| format!("fixture missing: script {name}"))?;
        parse_script(src).map_err(|e| e.to_string())
    }
}

struct Run {
    manifest: RunManifest,
    text: String,
}

impl Run {
    fn new(command: &str, parameters: Value, fixture_hash: String) -> Run {
        let parameters = match parameters {
            Value::Object(m) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        Run { manifest: RunManifest::new(command, parameters, fixture_hash), text: String::new() }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.manifest.check(name, passed, detail);
    }

    fn output(&mut self, key: &str, v: Value) {
        if !self.manifest.outputs.is_object() {
            self.manifest.outputs = json!({});
        }
        self.manifest.outputs[key] = v;
    }
}

fn verify_lemmas(run: &mut Run, fx: &Fixtures) -> Result<(), String> {
    let corpus = parse_corpus(&fx.lemmas).map_err(|e| e.to_string())?;
    for s in &corpus {
        let (r, sp) = match s.resolve_specialized() {
            Ok(x) => x,
            Err(e) => {
                run.check(&s.name, false, e.to_string());
                continue;
            }
        };
        let mut ok = true;
        let mut notes = Vec::new();
        if let Some(e) = s.expected().map_err(|e| e.to_string())? {
            ok &= rf_equal(&r, &e);
        }
        if let Some(e) = s.specialized_expected().map_err(|e| e.to_string())? {
            ok &= sp.as_ref().is_some_and(|x| rf_equal(x, &e));
        }
        if let Some(p) = s.printed().map_err(|e| e.to_string())? {
            if !rf_equal(&r, &p) {
                notes.push(format!("printed form differs: {}", s.reading.as_deref().unwrap_or("no reading recorded")));
            }
        }
        if let (Some(p), Some(x)) = (s.specialized_printed().map_err(|e| e.to_string())?, sp.as_ref()) {
            if !rf_equal(x, &p) {
                notes.push(format!("printed specialization differs: {}", s.specialized_reading.as_deref().unwrap_or("no reading recorded")));
            }
        }
        run.check(&s.name, ok, notes.join("; "));
    }
    verify_script(run, fx, "aux-xy", None)
}

/// Runs a script and records its checks; `only` restricts to the named checks.
fn verify_script(run: &mut Run, fx: &Fixtures, name: &str, only: Option<&[&str]>) -> Result<(), String> {
    let script = fx.script(name)?;
    let report = script.run().map_err(|e| e.to_string())?;
    for c in &report.checks {
        if only.is_some_and(|o| !o.contains(&c.name.as_str())) {
            continue;
        }
        let detail = match c.status {
            CheckStatus::Match => String::new(),
            CheckStatus::PrintedDiffers => format!("printed form differs: {}", c.note.as_deref().unwrap_or("")),
            CheckStatus::Mismatch => format!("derived {}", c.derived),
        };
        run.check(format!("{name}: {}", c.name), c.status != CheckStatus::Mismatch, detail);
    }
    if only.is_none() {
        let d = script.derivation().map_err(|e| e.to_string())?;
        let measures = d.measure_check();
        run.check(format!("{name}: region measures add up"), measures.is_ok(), measures.err().map(|e| e.to_string()).unwrap_or_default());
        let part = d.partition_check(2, 3);
        let detail = match &part {
            Ok(s) => format!("{} splits, {} sample points", s.splits, s.points),
            Err(e) => e.to_string(),
        };
        run.check(format!("{name}: splits partition their parents"), part.is_ok(), detail);
        if let (IntegralSource::Heis { n, .. }, Some(z)) = (&script.integral, &report.zeta) {
            if let Ok(c) = closed_local(*n) {
                run.check(format!("{name}: zeta = {}", c.form), rf_equal(z, &c.expand()), "");
            }
        }
    }
    Ok(())
}

fn adjudicate(run: &mut Run, fx: &Fixtures, p: u64, deg: usize, budget: u128) -> Result<(), String> {
    let report = fx.script("n3")?.run().map_err(|e| e.to_string())?;
    let verdicts = adjudicate_appendix(&report, 3, p, deg, budget).map_err(|e| e.to_string())?;
    for v in &verdicts {
        let detail = match v.verdict {
            Verdict::Derived => format!("enumeration at p = {p} to t^{deg} confirms the derived value"),
            Verdict::Printed => format!("enumeration at p = {p} to t^{deg} agrees with the printed value"),
            Verdict::Indistinguishable => format!(
                "both readings agree at q = p = {p}; they differ as functions of q from t^{}",
                v.first_difference.map_or("?".into(), |d| d.to_string())
            ),
            Verdict::BeyondDepth => format!(
                "readings first differ at t^{}, beyond enumerated depth {deg}; derived value kept",
                v.first_difference.map_or("?".into(), |d| d.to_string())
            ),
        };
        run.check(format!("adjudicate {}", v.region), v.verdict != Verdict::Printed, detail);
    }
    run.output("adjudications", serde_json::to_value(&verdicts).expect("serializes"));
    Ok(())
}

fn cmd_verify(run: &mut Run, fx: &Fixtures, target: Target, p: u64, deg: usize, budget: u128) -> Result<(), String> {
    match target {
        Target::Lemmas => verify_lemmas(run, fx),
        Target::N2 => verify_script(run, fx, "n2", None),
        Target::N3 => verify_script(run, fx, "n3", None),
        Target::Appendix => {
            verify_script(run, fx, "n3", Some(&APPENDIX_ROWS))?;
            adjudicate(run, fx, p, deg, budget)
        }
        Target::All => {
            verify_lemmas(run, fx)?;
            verify_script(run, fx, "n2", None)?;
            verify_script(run, fx, "n3", None)?;
            adjudicate(run, fx, p, deg, budget)
        }
    }
}

fn cmd_derive(run: &mut Run, fx: &Fixtures, script: &str) -> Result<(), String> {
    let s = if fx.scripts.contains_key(script) {
        fx.script(script)?
    } else {
        let src = std::fs::read_to_string(script).map_err(|e| format!("{script}: {e}"))?;
        parse_script(&src).map_err(|e| e.to_string())?
    };
    let report = s.run().map_err(|e| e.to_string())?;
    run.line(report.to_string());
    for c in &report.checks {
        run.check(&c.name, c.status != CheckStatus::Mismatch, if c.status == CheckStatus::PrintedDiffers { "printed form differs" } else { "" });
    }
    let regions: Vec<Value> = report
        .regions
        .iter()
        .map(|r| json!({"name": r.name, "leaf": r.leaf, "weight": r.weight.to_string(), "value": r.value.to_string(), "integral": r.integral}))
        .collect();
    run.output("regions", Value::Array(regions));
    run.output("zeta", report.zeta.as_ref().map_or(Value::Null, |z| Value::String(z.to_string())));
    Ok(())
}

fn cmd_enum(run: &mut Run, cfg: EnumConfig, cache: Option<&Path>) -> Result<(), String> {
    let r = evaluate_cached(&cfg, cache).map_err(|e| e.to_string())?;
    let (label, closed) = match closed_local(cfg.n) {
        Ok(c) => ("closed form", c.expand()),
        Err(_) => ("conjectured product", conjectured_local(cfg.n).expand()),
    };
    let cmp = compare(&r, &closed).map_err(|e| e.to_string())?;
    run.line(format!("compared with the {label}"));
    run.line(cmp.table());
    for (k, ok) in cmp.matches.iter().enumerate() {
        if !ok {
            run.line(format!("t^{k}: enumerated {} but the {label} gives {}", cmp.enumerated[k], cmp.predicted[k]));
        }
    }
    run.check(format!("series matches the {label} through t^{}", cfg.degree_cap), cmp.all_match(), "");
    run.check("coefficients are non-negative integers", r.counts_are_integral(), "");
    let up = cfg.clone().with_level(cfg.level + 1);
    if up.points() <= cfg.point_budget {
        let stable = stability_check(&cfg).map_err(|e| e.to_string())?;
        run.line(format!("stability at level {}: {}", cfg.level + 1, if stable { "stable" } else { "UNSTABLE" }));
        run.check(format!("stable from level {} to {}", cfg.level, cfg.level + 1), stable, "");
    } else {
        run.line(format!("stability check skipped: level {} needs {} points", cfg.level + 1, up.points()));
    }
    run.output("coefficients", json!(r.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
    run.output("predicted", json!(cmp.predicted.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
    run.output("points", json!(r.points.to_string()));
    Ok(())
}

fn cmd_local(run: &mut Run, n: usize, form: Form) -> Result<(), String> {
    let lz = match form {
        Form::Closed => closed_local(n).map_err(|e| e.to_string())?,
        Form::Conjecture => conjectured_local(n),
    };
    run.line(format!("zeta_{n} = {}", lz.form));
    run.line(format!("source: {}", serde_json::to_value(lz.source).expect("serializes").as_str().unwrap_or("")));
    let series = lz.series_at(2, 6).map_err(|e| e.to_string())?;
    run.line(format!("at q = 2: {}", series.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")));
    run.output("local", serde_json::to_value(&lz).expect("serializes"));
    run.output("expanded", json!(lz.expand().to_string()));
    Ok(())
}

fn cmd_dirichlet(run: &mut Run, n: usize, count: usize) -> Result<(), String> {
    let r = dirichlet_coeffs(&GlobalZeta::rational(n), count).map_err(|e| e.to_string())?;
    let mut out = String::new();
    for (m, c) in r.iter().enumerate() {
        let _ = writeln!(out, "r_{} = {c}", m + 1);
    }
    run.line(out.trim_end());
    let bad = multiplicativity_failures(&r);
    run.check("coefficients are multiplicative", bad.is_empty(), bad.iter().map(|(a, b)| format!("({a}, {b})")).collect::<Vec<_>>().join(" "));
    run.output("coefficients", json!(r.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
    Ok(())
}

fn cmd_abscissa(run: &mut Run, n: usize) -> Result<(), String> {
    let lz = local(n);
    let (a, at) = abscissa_of(&lz.form).ok_or("no denominator factors")?;
    let order = pole_order(&lz.form, &a);
    run.line(format!("abscissa = {a}"));
    run.line(format!("attained by {}", at.iter().map(|(x, y)| format!("(1 - q^{x} t^{y})")).collect::<Vec<_>>().join(" ")));
    run.line(format!("pole order at s = {a}: {order}"));
    run.output("abscissa", json!(a.to_string()));
    run.output("attained_by", json!(at));
    run.output("pole_order", json!(order));
    Ok(())
}

fn cmd_topo(run: &mut Run, n: usize) -> Result<(), String> {
    let t = topological(n).map_err(|e| e.to_string())?;
    let form = local(n).form;
    let side = |fs: Vec<(i64, u64, i64)>| {
        let v: Vec<String> = fs
            .iter()
            .map(|(a, b, e)| {
                let lin = match (*b, *a) {
                    (1, 0) => "s".to_string(),
                    (1, a) => format!("(s - {a})"),
                    (b, 0) => format!("{b}*s"),
                    (b, a) => format!("({b}*s - {a})"),
                };
                if e.abs() == 1 {
                    lin
                } else {
                    format!("{lin}^{}", e.abs())
                }
            })
            .collect();
        if v.is_empty() {
            "1".to_string()
        } else {
            v.join("*")
        }
    };
    let den = side(form.denominator_factors().collect());
    let den = if den.contains(")*") { format!("({den})") } else { den };
    run.line(format!("zeta_top = {} / {den}", side(form.numerator_factors().collect())));
    run.check("agrees with the product formula", rf_equal(&t, &conjectured_topological(n)), "");
    run.output("topological", json!(t.to_string()));
    Ok(())
}

fn cmd_expand(run: &mut Run, n: usize) -> Result<(), String> {
    let ok = expansion_identity(n).map_err(|e| e.to_string())?;
    run.line(format!("subset expansion for n = {n}: {}", if ok { "holds" } else { "FAILS" }));
    run.check(format!("expansion identity n = {n}"), ok, "");
    run.output("holds", json!(ok));
    Ok(())
}

fn render_checks(run: &Run) -> String {
    let mut out = run.text.clone();
    for c in &run.manifest.checks {
        let _ = write!(out, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
        if !c.detail.is_empty() {
            let _ = write!(out, "  [{}]", c.detail);
        }
        out.push('\n');
    }
    let failed = run.manifest.checks.iter().filter(|c| !c.passed).count();
    if !run.manifest.checks.is_empty() {
        let _ = writeln!(out, "{} checks, {failed} failed", run.manifest.checks.len());
    }
    out
}

fn cmd_report(cache: Option<&Path>, format: Format) -> Result<bool, String> {
    let runs = match cache {
        Some(d) => load_all(d)?,
        None => Vec::new(),
    };
    let failed: usize = runs.iter().map(|r| r.checks.iter().filter(|c| !c.passed).count()).sum();
    match format {
        Format::Json => {
            let items: Vec<Value> = runs
                .iter()
                .map(|r| {
                    json!({"command": r.command, "parameters": r.parameters, "key": r.key(), "fixture_hash": r.fixture_hash,
                           "passed": r.passed(), "checks": r.checks})
                })
                .collect();
            let out = json!({"schema": "hzeta.report/1", "runs": items, "failures": failed});
            println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
        }
        Format::Text => {
            for r in &runs {
                let bad: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
                println!(
                    "{} {} {}: {} checks, {} failed",
                    if bad.is_empty() { "PASS" } else { "FAIL" },
                    r.command,
                    serde_json::to_string(&r.parameters).expect("serializes"),
                    r.checks.len(),
                    bad.len()
                );
                for c in bad {
                    println!("  FAIL {}  [{}]", c.name, c.detail);
                }
            }
            println!("{} runs, {failed} failures", runs.len());
        }
    }
    Ok(failed == 0)
}

fn execute(cli: &Cli) -> Result<bool, String> {
    let cache = cli.cache_dir.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
    if let Cmd::Report = cli.cmd {
        return cmd_report(cache.as_deref(), cli.format);
    }
    let fx = Fixtures::load(cli.fixtures_dir.as_deref())?;
    let hash = fx.hash();
    let mut run = match &cli.cmd {
        Cmd::Verify { target, p, deg, budget } => {
            let name = target.to_possible_value().expect("value").get_name().to_string();
            let mut run = Run::new("verify", json!({"target": name, "p": p, "deg": deg, "budget": budget.to_string()}), hash);
            cmd_verify(&mut run, &fx, *target, *p, *deg, *budget)?;
            run
        }
        Cmd::Derive { script } => {
            let mut run = Run::new("derive", json!({"script": script}), hash);
            cmd_derive(&mut run, &fx, script)?;
            run
        }
        Cmd::Enum { n, p, deg, level, budget, strategy } => {
            let strategy = match strategy {
                StrategyArg::Classes => Strategy::ValuationClasses,
                StrategyArg::Minors => Strategy::Minors,
                StrategyArg::Brute => Strategy::BruteForce,
            };
            let mut cfg = EnumConfig::new(*n, *p, *deg).with_budget(*budget).with_strategy(strategy);
            if let Some(l) = level {
                cfg = cfg.with_level(*l);
            }
            let mut run =
                Run::new("enum", json!({"n": n, "p": p, "deg": deg, "level": cfg.level, "budget": budget.to_string(), "strategy": strategy}), hash);
            cmd_enum(&mut run, cfg, cache.as_deref())?;
            run
        }
        Cmd::Local { n, form } => {
            let f = if *form == Form::Closed { "closed" } else { "conjecture" };
            let mut run = Run::new("local", json!({"n": n, "form": f}), hash);
            cmd_local(&mut run, *n, *form)?;
            run
        }
        Cmd::Dirichlet { n, count } => {
            let mut run = Run::new("dirichlet", json!({"n": n, "count": count}), hash);
            cmd_dirichlet(&mut run, *n, *count)?;
            run
        }
        Cmd::Abscissa { n } => {
            let mut run = Run::new("abscissa", json!({"n": n}), hash);
            cmd_abscissa(&mut run, *n)?;
            run
        }
        Cmd::Topo { n } => {
            let mut run = Run::new("topo", json!({"n": n}), hash);
            cmd_topo(&mut run, *n)?;
            run
        }
        Cmd::ExpandIdentity { n } => {
            let mut run = Run::new("expand-identity", json!({"n": n}), hash);
            cmd_expand(&mut run, *n)?;
            run
        }
        Cmd::Report => unreachable!("handled above"),
    };
    if run.manifest.outputs.is_null() {
        run.output("lines", json!(run.text.lines().collect::<Vec<_>>()));
    }
    match cli.format {
        Format::Json => println!("{}", run.manifest.to_json()),
        Format::Text => print!("{}", render_checks(&run)),
    }
    if let Some(dir) = &cache {
        run.manifest.store(dir).map_err(|e| format!("cannot store manifest: {e}"))?;
    }
    Ok(run.manifest.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
