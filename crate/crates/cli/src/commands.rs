//! Command implementations: load, compute, write artifacts, print a summary.

use std::fs;

use anyhow::{anyhow, bail, Context};
use cone_walk::asymptotics::{
    boundary_hugging_path, lattice_point_on_ray, martin_kernel, survival_exponent, verify_boundary,
    verify_halfspace, verify_interior, HarnessConfig, RatioSeries, VSettings,
};
use cone_walk::harmonic::{estimate_v, estimate_v_prime};
use cone_walk::kernel::green_table;
use cone_walk::sampler::{mc_green, mc_survival, McConfig, McEstimate};
use cone_walk::{green_many, survival_curve, validate_hypotheses, GreenConfig, StoppedConfig, WalkModel};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::config::{self, window, HarnessParams, Resolved};
use crate::report::{coords, num, opt, point, write_csv, write_json};
use crate::{Command, GlobalArgs, McCommand, VerifyCommand};

pub enum Outcome {
    Passed,
    Failed,
}

pub fn run(command: &Command, args: &GlobalArgs) -> anyhow::Result<Outcome> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| anyhow!("cannot size the worker pool: {e}"))?;
    }
    match command {
        Command::Validate => validate(load("validate", args)?),
        Command::Green => green(load("green", args)?),
        Command::Survival => survival(load("survival", args)?),
        Command::Harmonic => harmonic(load("harmonic", args)?),
        Command::Verify(VerifyCommand::Interior) => interior(load("verify-interior", args)?),
        Command::Verify(VerifyCommand::Halfspace) => halfspace(load("verify-halfspace", args)?),
        Command::Verify(VerifyCommand::Boundary) => boundary(load("verify-boundary", args)?),
        Command::Verify(VerifyCommand::Martin) => martin(load("verify-martin", args)?),
        Command::Mc(McCommand::Survival) => mc_surv(load("mc-survival", args)?),
        Command::Mc(McCommand::Green) => mc_gr(load("mc-green", args)?),
    }
}

struct Job<P> {
    cfg: Resolved<P>,
    model: WalkModel,
}

fn load<P: DeserializeOwned + Serialize>(command: &str, args: &GlobalArgs) -> anyhow::Result<Job<P>> {
    let cfg: Resolved<P> = config::resolve(command, args)?;
    let text = fs::read_to_string(&cfg.model).with_context(|| format!("model: cannot read {}", cfg.model.display()))?;
    let model = WalkModel::from_json(&text).map_err(|e| anyhow!("{e} (in {})", cfg.model.display()))?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    Ok(Job { cfg, model })
}

impl<P: Serialize> Job<P> {
    fn path(&self, name: &str) -> std::path::PathBuf {
        self.cfg.out.join(name)
    }

    fn document(&self, result: impl Serialize, summary: serde_json::Value) -> serde_json::Value {
        json!({
            "command": self.cfg.command,
            "config": self.cfg,
            "model": self.model.to_json(),
            "result": result,
            "summary": summary,
        })
    }

    fn dim(&self) -> usize {
        self.model.dimension()
    }
}

fn check_point(model: &WalkModel, p: &[i64], what: &str) -> anyhow::Result<()> {
    if p.len() != model.dimension() {
        bail!("config: {what} {p:?} has dimension {}, model has {}", p.len(), model.dimension());
    }
    Ok(())
}

fn validate(job: Job<config::ValidateParams>) -> anyhow::Result<Outcome> {
    let m = &job.model;
    let radius = job.cfg.params.radius;
    let samples = match &job.cfg.params.samples {
        Some(s) => s.clone(),
        None => default_samples(m, radius)?,
    };
    let report = validate_hypotheses(m, radius, &samples)?;
    let doc = job.document(&report, json!({ "satisfied": report.satisfied }));
    write_json(&job.path("validate.json"), &doc)?;
    let f = &report.satisfied;
    println!("drift zero:            {}", f.zero_drift);
    println!("identity covariance:   {}", f.identity_covariance);
    println!("strongly aperiodic:    {} (difference lattice index {:?})", f.strongly_aperiodic, report.aperiodic.difference_index);
    println!("strongly irreducible:  {} ({} sampled points, radius {radius})", f.strongly_irreducible, samples.len());
    println!("reduite exponent p:    {}", fmt_opt(report.reduite_exponent));
    println!("tangent exponent q:    {}", fmt_opt(report.tangent_exponent_sup));
    Ok(Outcome::Passed)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "n/a".into())
}

/// Points along an interior ray at a few multiples of the radius.
fn default_samples(m: &WalkModel, radius: f64) -> anyhow::Result<Vec<Vec<i64>>> {
    let w = m.cone.interior_witness()?;
    let n = cone_walk::geometry::norm(&w);
    let mut out = Vec::new();
    for k in [2.0, 4.0, 8.0] {
        let s = k * radius.max(1.0) / n;
        let p: Vec<i64> = w.iter().map(|c| (s * c).round() as i64).collect();
        if m.cone.contains_lattice(&p) && m.cone.metric_norm_lattice(&p) >= radius && !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

fn green(job: Job<config::GreenParams>) -> anyhow::Result<Outcome> {
    let p = &job.cfg.params;
    check_point(&job.model, &p.x, "x")?;
    if p.targets.is_empty() && !p.table {
        bail!("config: green needs `targets` or `table: true`");
    }
    let mut gc = GreenConfig::new(p.horizon).with_window(window(&p.window)).parallel(job.cfg.parallel());
    gc.tail = p.tail;
    let results = if p.targets.is_empty() {
        Vec::new()
    } else {
        for y in &p.targets {
            check_point(&job.model, y, "target")?;
        }
        green_many(&job.model, &p.x, &p.targets, &gc)?
    };
    let d = job.dim();
    let mut header = coords("y", d);
    header.extend(["truncated_sum", "tail_estimate", "value", "decay_exponent", "period", "flag"].map(String::from));
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = point(&r.target);
            row.extend([
                num(r.truncated_sum),
                num(r.tail_estimate),
                num(r.value()),
                opt(r.fitted_decay_exponent),
                r.period.to_string(),
                flag_name(&r.error_flag),
            ]);
            row
        })
        .collect();
    write_csv(&job.path("green.csv"), &header, &rows)?;
    if p.table {
        let table = green_table(&job.model, &p.x, p.horizon, window(&p.window))?;
        let mut header = coords("y", d);
        header.push("truncated_sum".into());
        let rows: Vec<Vec<String>> = table
            .iter()
            .map(|(y, v)| {
                let mut row = point(y);
                row.push(num(*v));
                row
            })
            .collect();
        write_csv(&job.path("green_table.csv"), &header, &rows)?;
    }
    let values: Vec<f64> = results.iter().map(|r| r.value()).collect();
    write_json(&job.path("green.json"), &job.document(&results, json!({ "values": values })))?;
    for r in &results {
        println!(
            "G({:?}, {:?}) = {:.10} (truncated {:.10}, tail {:.3e}, {})",
            p.x,
            r.target,
            r.value(),
            r.truncated_sum,
            r.tail_estimate,
            flag_name(&r.error_flag)
        );
    }
    Ok(Outcome::Passed)
}

fn flag_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn survival(job: Job<config::SurvivalParams>) -> anyhow::Result<Outcome> {
    let p = &job.cfg.params;
    check_point(&job.model, &p.x, "x")?;
    let curve = survival_curve(&job.model, &p.x, p.n, window(&p.window))?;
    let rows: Vec<Vec<String>> = curve.iter().enumerate().map(|(n, v)| vec![n.to_string(), num(*v)]).collect();
    write_csv(&job.path("survival.csv"), &["n".into(), "survival".into()], &rows)?;
    let slope = (p.n >= 20).then(|| survival_exponent(&curve, p.n / 10, p.n).slope);
    let expected = job.model.cone.reduite().ok().map(|u| -u.exponent / 2.0);
    let last = *curve.last().unwrap();
    let summary = json!({ "final": last, "fitted_exponent": slope, "expected_exponent": expected });
    write_json(&job.path("survival.json"), &job.document(&curve, summary))?;
    println!("P(tau_x > {}) = {last:.10e}", p.n);
    if let Some(s) = slope {
        println!("log-log slope over [{}, {}]: {s:.4} (expected {})", p.n / 10, p.n, fmt_opt(expected));
    }
    Ok(Outcome::Passed)
}

fn harmonic(job: Job<config::HarmonicParams>) -> anyhow::Result<Outcome> {
    let p = &job.cfg.params;
    let u = job.model.cone.reduite()?;
    let mut estimates = Vec::new();
    for x in &p.points {
        check_point(&job.model, x, "point")?;
        let eval = |q: &[i64]| u.eval_lattice(q);
        let e = if p.reversed {
            estimate_v_prime(&job.model, x, eval, &p.schedule, p.tol, window(&p.window))?
        } else {
            estimate_v(&job.model, x, eval, &p.schedule, p.tol, window(&p.window))?
        };
        estimates.push(e);
    }
    let mut header = coords("x", job.dim());
    header.extend(["n", "value"].map(String::from));
    let mut rows = Vec::new();
    for e in &estimates {
        for (n, v) in &e.sequence {
            let mut row = point(&e.point);
            row.extend([n.to_string(), num(*v)]);
            rows.push(row);
        }
    }
    write_csv(&job.path("harmonic.csv"), &header, &rows)?;
    let limits: Vec<f64> = estimates.iter().map(|e| e.limit).collect();
    write_json(&job.path("harmonic.json"), &job.document(&estimates, json!({ "limits": limits })))?;
    for e in &estimates {
        println!("V{}({:?}) = {:.10} ({})", if p.reversed { "'" } else { "" }, e.point, e.limit, flag_name(&e.convergence_flag));
    }
    Ok(Outcome::Passed)
}

fn harness(h: &HarnessParams, parallel: bool) -> HarnessConfig {
    let gc = GreenConfig::new(h.horizon).with_window(window(&h.window)).parallel(parallel);
    let mut cfg = HarnessConfig::new(gc);
    cfg.v = VSettings {
        schedule: h.v_schedule.clone(),
        tol: h.v_tol,
        window: window(&h.v_window),
    };
    cfg.k_last = h.k_last;
    cfg
}

fn write_series<P: Serialize>(job: &Job<P>, name: &str, s: &RatioSeries, verdict: serde_json::Value) -> anyhow::Result<()> {
    let mut header = vec!["scale".to_string(), "ratio".to_string()];
    header.extend(coords("y", job.dim()));
    header.extend(
        ["green", "green_tail", "green_flag", "u", "v_prime", "stopped_value", "unstopped_mass"]
            .map(String::from),
    );
    let rows: Vec<Vec<String>> = s
        .points
        .iter()
        .map(|p| {
            let mut row = vec![num(p.scale), num(p.ratio)];
            row.extend(point(&p.y));
            row.extend([
                num(p.green),
                num(p.green_tail),
                flag_name(&p.green_flag),
                opt(p.u),
                opt(p.v_prime),
                opt(p.stopped_value),
                opt(p.unstopped_mass),
            ]);
            row
        })
        .collect();
    write_csv(&job.path(&format!("{name}.csv")), &header, &rows)?;
    write_json(&job.path(&format!("{name}.json")), &job.document(s, verdict))
}

fn spread_verdict(s: &RatioSeries, max_spread: f64) -> (bool, serde_json::Value) {
    let passed = s.plateau_spread.is_finite() && s.plateau_spread < max_spread;
    (
        passed,
        json!({
            "fitted_limit": s.fitted_limit,
            "fitted_rate": s.fitted_rate,
            "plateau_spread": s.plateau_spread,
            "max_spread": max_spread,
            "passed": passed,
        }),
    )
}

fn report_series(label: &str, s: &RatioSeries, passed: bool) -> Outcome {
    println!(
        "{label}: limit {:.6}, spread {:.3e}, rate {:.3} over {} points -> {}",
        s.fitted_limit,
        s.plateau_spread,
        s.fitted_rate,
        s.scales.len(),
        if passed { "pass" } else { "fail" }
    );
    if passed {
        Outcome::Passed
    } else {
        Outcome::Failed
    }
}

fn interior(job: Job<config::InteriorParams>) -> anyhow::Result<Outcome> {
    let p = &job.cfg.params;
    check_point(&job.model, &p.x, "x")?;
    let cfg = harness(&p.harness, job.cfg.parallel());
    let s = verify_interior(&job.model, &p.x, &p.direction, &p.scales, p.alpha, &cfg)?;
    let (passed, verdict) = spread_verdict(&s, p.max_spread);
    write_series(&job, "verify_interior", &s, verdict)?;
    Ok(report_series("interior", &s, passed))
}

fn halfspace(job: Job<config::HalfspaceParams>) -> anyhow::Result<Outcome> {
    let p = &job.cfg.params;
    check_point(&job.model, &p.x, "x")?;
    let path = match &p.path {
        Some(path) => path.clone(),
        None => boundary_hugging_path(job.dim(), &p.ks, p.gamma),
    };
    let cfg = harness(&p.harness, job.cfg.parallel());
    let s = verify_halfspace(&job.model, &p.x, &path, &cfg)?;
    let (passed, verdict) = spread_verdict(&s, p.max_spread);
    write_series(&job, "verify_halfspace", &s, verdict)?;
    Ok(report_series("half-space", &s, passed))
}

fn boundary(job: Job<config::BoundaryParams>) -> anyhow::Result<Outcome> {
    let p = &job.cfg.params;
    check_point(&job.model, &p.x, "x")?;
    let mut cfg = harness(&p.harness, job.cfg.parallel());
    cfg.stopped = StoppedConfig {
        r: p.r,
        rho: p.rho,
        horizon: p.stopped_horizon,
        window: window(&p.stopped_window),
        early_stop: p.early_stop,
        parallel: job.cfg.parallel(),
    };
    cfg.unstopped_limit = p.unstopped_limit;
    let s = verify_boundary(&job.model, &p.x, &p.sigma, &p.scales, &cfg)?;
    let (passed, verdict) = spread_verdict(&s, p.max_spread);
    write_series(&job, "verify_boundary", &s, verdict)?;
    Ok(report_series("boundary", &s, passed))
}

fn martin(job: Job<config::MartinParams>) -> anyhow::Result<Outcome> {
    let p = &job.cfg.params;
    check_point(&job.model, &p.x, "x")?;
    check_point(&job.model, &p.x0, "x0")?;
    let path = match (&p.path, &p.direction) {
        (Some(path), _) => path.clone(),
        (None, Some(dir)) => p
            .scales
            .iter()
            .map(|s| lattice_point_on_ray(&job.model.cone, dir, *s).map(|(y, _)| y))
            .collect::<Result<_, _>>()?,
        (None, None) => bail!("config: verify martin needs `path` or `direction` with `scales`"),
    };
    let cfg = harness(&p.harness, job.cfg.parallel());
    let s = martin_kernel(&job.model, &p.x, &p.x0, &path, &cfg)?;
    let (passed, verdict) = match s.reference {
        Some(r) => {
            let dev = (s.fitted_limit / r - 1.0).abs();
            let passed = dev <= p.tolerance;
            (
                passed,
                json!({
                    "fitted_limit": s.fitted_limit,
                    "reference": r,
                    "relative_deviation": dev,
                    "tolerance": p.tolerance,
                    "plateau_spread": s.plateau_spread,
                    "passed": passed,
                }),
            )
        }
        None => spread_verdict(&s, p.tolerance),
    };
    write_series(&job, "verify_martin", &s, verdict)?;
    println!("reference V(x)/V(x0): {}", fmt_opt(s.reference));
    Ok(report_series("martin", &s, passed))
}

fn write_mc<P: Serialize>(job: &Job<P>, name: &str, e: &McEstimate) -> anyhow::Result<()> {
    let header = ["mean", "std_error", "n_samples", "rng_seed", "horizon"].map(String::from);
    let row = vec![num(e.mean), num(e.std_error), e.n_samples.to_string(), e.rng_seed.to_string(), e.horizon.to_string()];
    write_csv(&job.path(&format!("{name}.csv")), &header, &[row])?;
    write_json(&job.path(&format!("{name}.json")), &job.document(e, json!({ "mean": e.mean, "std_error": e.std_error })))?;
    println!("{name}: {:.6} ± {:.2e} ({} samples, seed {}, horizon {})", e.mean, e.std_error, e.n_samples, e.rng_seed, e.horizon);
    Ok(())
}

fn mc_config<P>(cfg: &Resolved<P>, samples: usize) -> McConfig {
    let mut c = McConfig::new(samples, cfg.seed);
    c.parallel = cfg.parallel();
    c
}

fn mc_surv(job: Job<config::McSurvivalParams>) -> anyhow::Result<Outcome> {
    let p = &job.cfg.params;
    check_point(&job.model, &p.x, "x")?;
    let e = mc_survival(&job.model, &p.x, p.n, mc_config(&job.cfg, p.samples));
    write_mc(&job, "mc_survival", &e)?;
    Ok(Outcome::Passed)
}

fn mc_gr(job: Job<config::McGreenParams>) -> anyhow::Result<Outcome> {
    let p = &job.cfg.params;
    check_point(&job.model, &p.x, "x")?;
    check_point(&job.model, &p.y, "y")?;
    let e = mc_green(&job.model, &p.x, &p.y, p.horizon, mc_config(&job.cfg, p.samples));
    write_mc(&job, "mc_green", &e)?;
    Ok(Outcome::Passed)
}

