//! Config-driven orchestration behind the `run` and `sweep` verbs.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bernstein::BernsteinEntry;
use crate::check::{run_battery, CheckResult};
use crate::config::{Axis, ConfigError, RunConfig, ScenarioSpec, Task};
use crate::criticality::{classify_subordinated, lambda_mu_base, verdict_from_lambda, FamilyMember, Verdict};
use crate::error::Error;
use crate::hardy::{origin_indicator, ScenarioInstance};
use crate::lattice::{attach_measure, build_space, schrodinger_matrix, FormMatrix, GridSpec, MeasureSpec, Sign, SignedMeasure};
use crate::report::num;
use crate::spectral::{decompose_with_budget, green_form_operator};
use crate::wave::{boundedness_verdict, default_times, solve_wave, write_trace_csv, Boundedness};

/// Largest operator for which the wave equation is solved (dense
/// eigendecomposition).
pub const WAVE_LIMIT: usize = 1500;
/// Relative energy drift `|E(t) − ‖g‖²|/‖g‖²` counted as a violation.
pub const ENERGY_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numeric(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Files written and invariant violations found.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() { 0 } else { 2 }
    }
}

/// Builds `(space, μ)` instances for a configured scenario.
pub struct Scenario<'a> {
    cfg: &'a RunConfig,
}

impl<'a> Scenario<'a> {
    pub fn new(cfg: &'a RunConfig) -> Self {
        Scenario { cfg }
    }

    pub fn sizes(&self) -> Vec<usize> {
        match self.cfg.scenario {
            ScenarioSpec::SingleNode { .. } => vec![1],
            _ => self.cfg.sizes.clone(),
        }
    }

    pub fn describe(&self) -> String {
        match &self.cfg.scenario {
            ScenarioSpec::SingleNode { killing, weight } => format!("single_node killing={killing} weight={weight}"),
            ScenarioSpec::Grid { dim, spacing, p, boundary } => format!("grid dim={dim} spacing={spacing} p={p} boundary={boundary:?}"),
            ScenarioSpec::Hardy(h) => format!(
                "{} dim={} alpha={} p={} spacing={} lambda_star={}",
                self.cfg.scenario_name, h.dim, h.alpha, h.p, h.spacing, num(h.lambda_star)
            ),
        }
    }

    pub fn instance(&self, n: usize, lambda: f64) -> Result<ScenarioInstance, RunError> {
        let plain = |space: crate::lattice::DiscreteSpace, mu: SignedMeasure| -> Result<ScenarioInstance, RunError> {
            let op = schrodinger_matrix(&space, &mu)?;
            let base = FormMatrix::Sparse(space.form_matrix());
            Ok(ScenarioInstance { space, mu, base, op })
        };
        match &self.cfg.scenario {
            ScenarioSpec::SingleNode { killing, weight } => {
                let mut space = build_space(&GridSpec::dirichlet(1, 1, 1.0), None)?;
                space.killing[0] = *killing;
                plain(space, SignedMeasure::negative(vec![lambda * weight]))
            }
            ScenarioSpec::Grid { dim, spacing, p, boundary } => {
                if n % 2 == 0 {
                    return Err(RunError::Usage(format!("grid sizes must be odd, got {n}")));
                }
                let space = build_space(&GridSpec::new(*dim, n, *spacing, *boundary), None)?;
                let mu = attach_measure(&space, &MeasureSpec::radial(lambda, *p), Sign::Minus)?;
                plain(space, mu)
            }
            ScenarioSpec::Hardy(h) => {
                if n % 2 == 0 {
                    return Err(RunError::Usage(format!("sizes must be odd, got {n}")));
                }
                Ok(h.instance(n, lambda)?)
            }
        }
    }

    /// `λ̂_n`, the coupling at which `λ(μ) = 1`.
    pub fn critical_coupling(&self, n: usize) -> Result<f64, RunError> {
        let inst = self.instance(n, 1.0)?;
        Ok(lambda_mu_base(&inst.base, &inst.mu)?)
    }

    /// Absolute coupling for a configured value at size `n`.
    pub fn coupling(&self, value: f64, n: usize) -> Result<f64, RunError> {
        if self.cfg.relative { Ok(value * self.critical_coupling(n)?) } else { Ok(value) }
    }
}

/// One evaluated `(n, λ)` point.
#[derive(Debug, Clone, Serialize)]
pub struct Point {
    pub axis_value: f64,
    pub n: usize,
    pub nodes: usize,
    pub coupling: f64,
    pub lambda_mu: f64,
    pub gamma_mu: f64,
    pub verdict: Verdict,
    pub green: f64,
    pub wave_sup: f64,
    pub energy_residual_max: f64,
    pub note: String,
}

fn refused(op: &crate::lattice::SchrodingerOperator, psd_tol: f64) -> bool {
    op.psd_certificate < -psd_tol * op.scale.max(1.0)
}

fn evaluate(scn: &Scenario, entry: &BernsteinEntry, axis_value: f64, n: usize, coupling: f64) -> Result<Point, RunError> {
    let cfg = scn.cfg;
    let inst = scn.instance(n, coupling)?;
    let lambda_mu = lambda_mu_base(&inst.base, &inst.mu)?;
    let verdict = verdict_from_lambda(lambda_mu, cfg.tol);
    let mut p = Point {
        axis_value,
        n,
        nodes: inst.op.dim(),
        coupling,
        lambda_mu,
        gamma_mu: inst.op.psd_certificate,
        verdict,
        green: f64::NAN,
        wave_sup: f64::NAN,
        energy_residual_max: f64::NAN,
        note: String::new(),
    };
    if refused(&inst.op, cfg.family.psd_tol) {
        p.note = "supercritical: Green form and wave refused".into();
        return Ok(p);
    }
    let g = origin_indicator(&inst.space)?;
    p.green = green_form_operator(&inst.op, entry, &g, cfg.family.dense_limit)?;
    if inst.op.dim() <= WAVE_LIMIT {
        let (trace, _) = wave_trace(&inst, entry, &g)?;
        p.wave_sup = trace.l2_norms.iter().cloned().fold(0.0, f64::max);
        p.energy_residual_max = trace.energy_residuals.iter().cloned().fold(0.0, f64::max) / trace.g_norm_sq;
    } else {
        p.note = format!("wave skipped above {WAVE_LIMIT} nodes");
    }
    Ok(p)
}

fn wave_trace(inst: &ScenarioInstance, entry: &BernsteinEntry, g: &DVector<f64>) -> Result<(crate::wave::WaveTrace, Option<Boundedness>), RunError> {
    let dec = decompose_with_budget(&inst.op, WAVE_LIMIT)?;
    let phi = dec.phi_spectrum(entry)?;
    let period = phi.iter().copied().filter(|&v| v > 0.0).reduce(f64::min).map_or(1.0, |v| 2.0 * std::f64::consts::PI / v.sqrt());
    let trace = solve_wave(&dec, entry, g, &default_times(period, 400, 4.0))?;
    let verdict = boundedness_verdict(&trace).ok();
    Ok((trace, verdict))
}

fn create(path: &Path, files: &mut Vec<PathBuf>) -> io::Result<BufWriter<fs::File>> {
    files.push(path.to_path_buf());
    Ok(BufWriter::new(fs::File::create(path)?))
}

fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool, RunError> {
    rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(|e| RunError::Usage(e.to_string()))
}

fn header(cfg: &RunConfig, scn: &Scenario, verb: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "subcrit {verb} report");
    let _ = writeln!(s, "seed: {}", cfg.seed);
    let _ = writeln!(s, "scenario: {}", scn.describe());
    let _ = writeln!(s, "subordinator: {}", cfg.subordinator.describe());
    let cs: Vec<String> = cfg.couplings.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(s, "couplings: {}{}", cs.join(", "), if cfg.relative { " (relative to the critical coupling)" } else { "" });
    let ns: Vec<String> = scn.sizes().iter().map(|n| n.to_string()).collect();
    let _ = writeln!(s, "sizes: {}", ns.join(", "));
    let _ = writeln!(s, "tol: {}", cfg.tol);
    s
}

#[derive(Debug, Clone, Serialize)]
struct ClassifyRow {
    coupling_value: f64,
    n: usize,
    lambda: f64,
    lambda_mu: f64,
    gamma_mu: f64,
    verdict: Verdict,
    consistent: bool,
}

/// Execute every configured task and write artifacts to `cfg.output`.
pub fn run(cfg: &RunConfig) -> Result<Outcome, RunError> {
    fs::create_dir_all(&cfg.output)?;
    let scn = Scenario::new(cfg);
    let pool = pool(cfg)?;
    let mut out = Outcome::default();
    let mut report = header(cfg, &scn, "run");
    let mut summary = serde_json::Map::new();
    summary.insert("seed".into(), json!(cfg.seed));
    summary.insert("scenario".into(), json!(scn.describe()));
    summary.insert("subordinator".into(), json!(cfg.subordinator.describe()));
    let sizes = scn.sizes();
    let grid: Vec<(f64, usize)> = cfg.couplings.iter().flat_map(|&c| sizes.iter().map(move |&n| (c, n))).collect();

    if cfg.has(Task::Classify) {
        let rows: Vec<ClassifyRow> = pool.install(|| {
            grid.par_iter()
                .map(|&(c, n)| -> Result<ClassifyRow, RunError> {
                    let lambda = scn.coupling(c, n)?;
                    let inst = scn.instance(n, lambda)?;
                    let lambda_mu = lambda_mu_base(&inst.base, &inst.mu)?;
                    let verdict = verdict_from_lambda(lambda_mu, cfg.tol);
                    let gamma = inst.op.psd_certificate;
                    let eps = 1e-9 * inst.op.scale.max(1.0);
                    let consistent = match verdict {
                        Verdict::Subcritical => gamma >= -eps,
                        Verdict::Supercritical => gamma <= eps,
                        Verdict::Critical => true,
                    };
                    Ok(ClassifyRow { coupling_value: c, n, lambda, lambda_mu, gamma_mu: gamma, verdict, consistent })
                })
                .collect::<Result<_, _>>()
        })?;
        let mut w = create(&cfg.output.join("classify.csv"), &mut out.files)?;
        writeln!(w, "coupling,n,lambda,lambda_mu,gamma_mu,verdict")?;
        report.push_str("\n[classify]\n");
        for r in &rows {
            writeln!(w, "{},{},{},{},{},{}", num(r.coupling_value), r.n, num(r.lambda), num(r.lambda_mu), num(r.gamma_mu), r.verdict)?;
            let _ = writeln!(
                report,
                "coupling={} n={} lambda={} lambda_mu={} gamma_mu={} verdict={}",
                r.coupling_value,
                r.n,
                num(r.lambda),
                num(r.lambda_mu),
                num(r.gamma_mu),
                r.verdict
            );
            if !r.consistent {
                out.violations.push(format!("sign of gamma(mu) contradicts lambda(mu) at n={} lambda={}", r.n, r.lambda));
            }
        }
        w.flush()?;
        summary.insert("classify".into(), json!(rows));
    }

    if cfg.has(Task::Green) {
        report.push_str("\n[green]\n");
        let mut w = create(&cfg.output.join("green.csv"), &mut out.files)?;
        writeln!(w, "coupling,n,lambda,green")?;
        let mut entries = Vec::new();
        for &c in &cfg.couplings {
            let family: Vec<FamilyMember> = pool.install(|| {
                sizes
                    .par_iter()
                    .map(|&n| -> Result<FamilyMember, RunError> {
                        let inst = scn.instance(n, scn.coupling(c, n)?)?;
                        let g = origin_indicator(&inst.space)?;
                        Ok(FamilyMember { size: n, op: inst.op, g })
                    })
                    .collect::<Result<_, _>>()
            })?;
            if family.iter().any(|m| refused(&m.op, cfg.family.psd_tol)) {
                let _ = writeln!(report, "coupling={c} verdict=Supercritical (refused: operator has negative spectrum)");
                entries.push(json!({"coupling": c, "verdict": "Supercritical", "refused": true}));
                continue;
            }
            let values: Vec<f64> = pool.install(|| {
                family.par_iter().map(|m| green_form_operator(&m.op, &cfg.subordinator, &m.g, cfg.family.dense_limit)).collect::<Result<_, _>>()
            })?;
            for (m, v) in family.iter().zip(&values) {
                writeln!(w, "{},{},{},{}", num(c), m.size, num(scn.coupling(c, m.size)?), num(*v))?;
            }
            if family.len() >= 3 {
                let cl = pool.install(|| classify_subordinated(&family, &cfg.subordinator, &cfg.family))?;
                let _ = writeln!(report, "coupling={c} verdict={}", cl.verdict);
                for (k, v) in &cl.evidence {
                    let _ = writeln!(report, "  {k} = {v}");
                }
                entries.push(json!({"coupling": c, "verdict": cl.verdict, "values": values, "evidence": cl.evidence}));
            } else {
                let vs: Vec<String> = values.iter().map(|&v| num(v)).collect();
                let _ = writeln!(report, "coupling={c} green=[{}] (fewer than 3 sizes: no verdict)", vs.join(", "));
                entries.push(json!({"coupling": c, "values": values}));
            }
        }
        w.flush()?;
        summary.insert("green".into(), json!(entries));
    }

    if cfg.has(Task::Wave) {
        report.push_str("\n[wave]\n");
        let mut entries = Vec::new();
        for (i, &c) in cfg.couplings.iter().enumerate() {
            for &n in &sizes {
                let inst = scn.instance(n, scn.coupling(c, n)?)?;
                if inst.op.dim() > WAVE_LIMIT {
                    let _ = writeln!(report, "coupling={c} n={n} skipped: {} nodes exceed {WAVE_LIMIT}", inst.op.dim());
                    continue;
                }
                if refused(&inst.op, cfg.family.psd_tol) {
                    let _ = writeln!(
                        report,
                        "coupling={c} n={n} refused: supercritical, gamma_mu={} (wave equation not solved)",
                        num(inst.op.psd_certificate)
                    );
                    entries.push(json!({"coupling": c, "n": n, "refused": "supercritical"}));
                    continue;
                }
                let g = origin_indicator(&inst.space)?;
                let (trace, verdict) = pool.install(|| wave_trace(&inst, &cfg.subordinator, &g))?;
                let path = cfg.output.join(format!("wave_c{i}_n{n}.csv"));
                write_trace_csv(&trace, create(&path, &mut out.files)?)?;
                let sup = trace.l2_norms.iter().cloned().fold(0.0, f64::max);
                let energy = trace.energy_residuals.iter().cloned().fold(0.0, f64::max) / trace.g_norm_sq;
                let verdict_text = match verdict {
                    Some(Boundedness::Bounded { .. }) => "bounded".to_string(),
                    Some(Boundedness::Growing { rate }) => format!("growing (rate {})", num(rate)),
                    None => "undetermined".to_string(),
                };
                let _ = writeln!(
                    report,
                    "coupling={c} n={n} sup={} range_seminorm={} energy_residual_max={} verdict={verdict_text}",
                    num(sup),
                    num(trace.range_seminorm),
                    num(energy)
                );
                if energy > ENERGY_TOL {
                    out.violations.push(format!("energy drift {energy:e} at coupling={c} n={n}"));
                }
                if trace.range_seminorm.is_finite() && sup > trace.range_seminorm * (1.0 + 1e-8) + 1e-14 {
                    out.violations.push(format!("wave norm {sup} exceeds the range seminorm {} at coupling={c} n={n}", trace.range_seminorm));
                }
                entries.push(json!({
                    "coupling": c, "n": n, "sup": sup, "range_seminorm": finite_or_null(trace.range_seminorm),
                    "energy_residual_max": energy, "verdict": verdict_text,
                }));
            }
        }
        summary.insert("wave".into(), json!(entries));
    }

    if cfg.has(Task::Check) {
        let results = pool.install(|| run_battery(cfg.seed, 1.0))?;
        write_checks(&results, &cfg.output.join("check.csv"), &mut out.files)?;
        report.push_str("\n[check]\n");
        for r in &results {
            let _ = writeln!(report, "{} {} worst={} threshold={} cases={}", if r.passed { "PASS" } else { "FAIL" }, r.name, num(r.worst), num(r.threshold), r.cases);
            if !r.passed {
                out.violations.push(format!("invariant {} failed: worst {}", r.name, r.worst));
            }
        }
        summary.insert("check".into(), json!(results));
    }

    finish(cfg, report, summary, &mut out)?;
    Ok(out)
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() { json!(x) } else { serde_json::Value::Null }
}

pub fn write_checks(results: &[CheckResult], path: &Path, files: &mut Vec<PathBuf>) -> io::Result<()> {
    let mut w = create(path, files)?;
    writeln!(w, "name,passed,worst,threshold,cases")?;
    for r in results {
        writeln!(w, "{},{},{},{},{}", r.name, r.passed, num(r.worst), num(r.threshold), r.cases)?;
    }
    w.flush()
}

fn finish(cfg: &RunConfig, mut report: String, mut summary: serde_json::Map<String, serde_json::Value>, out: &mut Outcome) -> Result<(), RunError> {
    report.push_str("\n[violations]\n");
    if out.violations.is_empty() {
        report.push_str("none\n");
    }
    for v in &out.violations {
        let _ = writeln!(report, "{v}");
    }
    summary.insert("violations".into(), json!(out.violations));
    summary.insert("exit_code".into(), json!(out.exit_code()));
    let rp = cfg.output.join("report.txt");
    fs::write(&rp, report)?;
    out.files.push(rp);
    let sp = cfg.output.join("summary.json");
    fs::write(&sp, serde_json::to_string_pretty(&serde_json::Value::Object(summary)).expect("summary serializes"))?;
    out.files.push(sp);
    Ok(())
}

/// Cross-product sweep along one axis, one CSV row per point.
pub fn sweep(cfg: &RunConfig, axis: Axis) -> Result<Outcome, RunError> {
    fs::create_dir_all(&cfg.output)?;
    let scn = Scenario::new(cfg);
    let missing = |what: &str| RunError::Usage(format!("sweep along {what} needs `{what}` in [sweep]"));
    // (axis value, entry, coupling value, size)
    let mut jobs: Vec<(f64, BernsteinEntry, f64, usize)> = Vec::new();
    match axis {
        Axis::Lambda => {
            let vals = cfg.sweep.lambda.as_ref().ok_or_else(|| missing("lambda"))?;
            for &v in vals {
                for &n in &scn.sizes() {
                    jobs.push((v, cfg.subordinator.clone(), v, n));
                }
            }
        }
        Axis::Size => {
            let sizes = match (&cfg.scenario, &cfg.sweep.size) {
                (ScenarioSpec::SingleNode { .. }, _) => vec![1],
                (_, Some(s)) => s.clone(),
                (_, None) => cfg.sizes.clone(),
            };
            for &c in &cfg.couplings {
                for &n in &sizes {
                    jobs.push((n as f64, cfg.subordinator.clone(), c, n));
                }
            }
        }
        Axis::Beta => {
            let betas = cfg.sweep.beta.as_ref().ok_or_else(|| missing("beta"))?;
            for &b in betas {
                let entry = if b == 2.0 { BernsteinEntry::identity() } else { BernsteinEntry::stable(b)? };
                for &c in &cfg.couplings {
                    for &n in &scn.sizes() {
                        jobs.push((b, entry.clone(), c, n));
                    }
                }
            }
        }
    }
    let pool = pool(cfg)?;
    let points: Vec<Point> = pool.install(|| {
        jobs.par_iter()
            .map(|(v, entry, c, n)| -> Result<Point, RunError> {
                let coupling = scn.coupling(*c, *n)?;
                evaluate(&scn, entry, *v, *n, coupling)
            })
            .collect::<Result<_, _>>()
    })?;

    let mut out = Outcome::default();
    let mut report = header(cfg, &scn, "sweep");
    let _ = writeln!(report, "axis: {}", axis.name());
    let mut w = create(&cfg.output.join(format!("sweep_{}.csv", axis.name())), &mut out.files)?;
    writeln!(w, "{},n,lambda,lambda_mu,verdict,green,wave_sup,energy_residual_max", axis.name())?;
    report.push_str("\n[points]\n");
    for p in &points {
        let axis_text = if axis == Axis::Size { p.n.to_string() } else { num(p.axis_value) };
        writeln!(
            w,
            "{axis_text},{},{},{},{},{},{},{}",
            p.n,
            num(p.coupling),
            num(p.lambda_mu),
            p.verdict,
            num(p.green),
            num(p.wave_sup),
            num(p.energy_residual_max)
        )?;
        let _ = writeln!(
            report,
            "{}={axis_text} n={} lambda={} lambda_mu={} verdict={} green={}{}",
            axis.name(),
            p.n,
            num(p.coupling),
            num(p.lambda_mu),
            p.verdict,
            num(p.green),
            if p.note.is_empty() { String::new() } else { format!(" ({})", p.note) }
        );
        if p.energy_residual_max > ENERGY_TOL {
            out.violations.push(format!("energy drift {:e} at {}={axis_text} n={}", p.energy_residual_max, axis.name(), p.n));
        }
    }
    w.flush()?;
    let mut summary = serde_json::Map::new();
    summary.insert("seed".into(), json!(cfg.seed));
    summary.insert("axis".into(), json!(axis.name()));
    summary.insert("scenario".into(), json!(scn.describe()));
    let rows: Vec<serde_json::Value> = points
        .iter()
        .map(|p| {
            json!({
                "axis_value": p.axis_value, "n": p.n, "nodes": p.nodes, "lambda": p.coupling,
                "lambda_mu": finite_or_null(p.lambda_mu), "gamma_mu": p.gamma_mu, "verdict": p.verdict,
                "green": finite_or_null(p.green), "wave_sup": finite_or_null(p.wave_sup),
                "energy_residual_max": finite_or_null(p.energy_residual_max), "note": p.note,
            })
        })
        .collect();
    summary.insert("points".into(), json!(rows));
    finish(cfg, report, summary, &mut out)?;
    Ok(out)
}

/// The `check` verb: full battery, CSV and report into `dir`.
pub fn check(seed: u64, scale: f64, dir: &Path) -> Result<(Vec<CheckResult>, Outcome), RunError> {
    fs::create_dir_all(dir)?;
    let results = run_battery(seed, scale)?;
    let mut out = Outcome::default();
    write_checks(&results, &dir.join("check.csv"), &mut out.files)?;
    for r in &results {
        if !r.passed {
            out.violations.push(format!("invariant {} failed: worst {}", r.name, r.worst));
        }
    }
    Ok((results, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str, dir: &Path) -> RunConfig {
        let mut c = RunConfig::parse(text).unwrap();
        c.output = dir.to_path_buf();
        c
    }

    #[test]
    fn single_node_critical_coupling() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg("[scenario]\nname = single_node\nweight = 4\nkilling = 3\n[run]\ntasks = classify\n", dir.path());
        let s = Scenario::new(&c);
        assert!((s.critical_coupling(1).unwrap() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn grid_green_sequence_runs() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(
            "[scenario]\nname = grid\ndim = 3\n[subordinator]\nname = stable\nbeta = 1\n[run]\ncouplings = 0\nsizes = 3, 5, 7\ntasks = green, wave\n",
            dir.path(),
        );
        let out = run(&c).unwrap();
        assert_eq!(out.exit_code(), 0, "{:?}", out.violations);
        let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
        assert!(report.contains("verdict=Subcritical"), "{report}");
        assert!(dir.path().join("wave_c0_n7.csv").exists());
    }
}
