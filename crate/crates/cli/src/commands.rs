use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use svnoise::bounds::{gaussian_dominance, min_samples_per_symbol, mpsk_feasibility, theorem_bound};
use svnoise::montecarlo::io::{write_trials_csv, GaussianitySummary, VerifySummary};
use svnoise::montecarlo::{coverage_report, gaussianity_diagnostics, CoverageVerdict, Experiment};
use svnoise::mpsk::io::{write_points_csv, write_sweep_csv};
use svnoise::mpsk::{classify, snr_sweep, synth_matrix};

use crate::config::{self, BoundConfig, MpskConfig, PlanConfig, VerifyConfig};
use crate::{Cli, Command, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_BOUND_INVALID: u8 = 2;
pub const EXIT_COVERAGE: u8 = 3;

struct Run<'a> {
    cli: &'a Cli,
    out: &'a Path,
    written: Vec<String>,
}

impl Run<'_> {
    fn json(&self) -> bool {
        matches!(self.cli.format, Format::Json | Format::Both)
    }

    fn csv(&self) -> bool {
        matches!(self.cli.format, Format::Csv | Format::Both)
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out.join(name);
        let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        use std::io::Write;
        writeln!(w)?;
        Ok(())
    }

    /// One-row CSV of a flat JSON object; arrays are `;`-joined.
    fn write_flat_csv(&mut self, name: &str, value: &Value) -> Result<()> {
        let Value::Object(map) = value else {
            bail!("{name}: expected an object");
        };
        let cell = |v: &Value| match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            Value::Array(a) => a.iter().map(|x| x.as_str().map_or(x.to_string(), str::to_string)).collect::<Vec<_>>().join(";"),
            other => other.to_string(),
        };
        let mut w = csv::Writer::from_writer(self.create(name)?);
        w.write_record(map.keys())?;
        w.write_record(map.values().map(cell))?;
        w.flush()?;
        Ok(())
    }

    fn manifest(&mut self, command: &str, resolved: Value) -> Result<()> {
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".to_string());
        let manifest = json!({
            "tool": "svnoise",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "seed": self.cli.seed,
            "format": self.cli.format,
            "jobs": self.cli.jobs,
            "trials": self.cli.trials,
            "config_path": self.cli.config.as_ref().map(|p| p.display().to_string()),
            "config": resolved,
            "outputs": outputs,
        });
        self.write_json("manifest.json", &manifest)
    }
}

/// Run `f` on a pool of `jobs` threads, or on the global pool.
fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(j) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .context("cannot start worker pool")?
            .install(f)),
        None => Ok(f()),
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    let out: PathBuf = cli.out.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut run = Run {
        cli,
        out: &out,
        written: Vec::new(),
    };
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Bound => bound(&mut run, config::load(cfg)?),
        Command::Verify => verify(&mut run, config::load(cfg)?),
        Command::Plan => plan(&mut run, config::load(cfg)?),
        Command::Classify => classify_cmd(&mut run, config::load(cfg)?),
        Command::Sweep => sweep(&mut run, config::load(cfg)?),
    }
}

fn bound(run: &mut Run, cfg: BoundConfig) -> Result<u8> {
    let report = theorem_bound(&cfg.inputs())?;
    if run.json() {
        run.write_json("bound_report.json", &report)?;
    }
    if run.csv() {
        run.write_flat_csv("bound_report.csv", &serde_json::to_value(&report)?)?;
    }
    run.manifest("bound", serde_json::to_value(&cfg)?)?;
    if report.valid {
        println!("rhs = {:e}, prob_floor = {}", report.rhs.unwrap_or(f64::NAN), report.prob_floor);
        Ok(EXIT_OK)
    } else {
        eprintln!("bound preconditions violated: {}", report.violated_conditions.join(", "));
        Ok(EXIT_BOUND_INVALID)
    }
}

fn verify(run: &mut Run, mut cfg: VerifyConfig) -> Result<u8> {
    cfg.apply(run.cli.seed, run.cli.trials);
    let scenario = cfg.scenario();
    let exp = Experiment::new(&scenario)?;
    let outcomes = in_pool(run.cli.jobs, || exp.run_outcomes())??;
    let records: Vec<_> = outcomes.iter().map(|o| o.record.clone()).collect();
    let bound = exp.bound();
    let coverage = coverage_report(&records, bound.prob_floor);
    let mut summary = VerifySummary::new(
        &scenario,
        exp.effective_eps(),
        exp.split().u1_max(),
        bound,
        &records,
        coverage,
    );
    if cfg.gaussianity {
        let devs: Vec<_> = outcomes.into_iter().map(|o| o.deviation).collect();
        let g = gaussianity_diagnostics(&devs, &exp.predictor_variance())?;
        summary.gaussianity = Some(GaussianitySummary::from(&g));
    }
    if run.csv() {
        let w = run.create("trials.csv")?;
        write_trials_csv(&records, w)?;
    }
    if run.json() {
        run.write_json("summary.json", &summary)?;
    }
    run.manifest("verify", serde_json::to_value(&cfg)?)?;
    println!(
        "coverage {}/{} = {:.4}, floor {:.4}, verdict {:?}",
        coverage.covered, coverage.trials, coverage.coverage, coverage.prob_floor, coverage.verdict
    );
    Ok(match coverage.verdict {
        CoverageVerdict::Pass | CoverageVerdict::SkippedVacuous => EXIT_OK,
        CoverageVerdict::SkippedInvalid => EXIT_BOUND_INVALID,
        CoverageVerdict::Fail => EXIT_COVERAGE,
    })
}

fn plan(run: &mut Run, cfg: PlanConfig) -> Result<u8> {
    let report = if let Some(alpha) = cfg.alpha {
        let min_l = min_samples_per_symbol(alpha)?;
        println!("L >= {min_l}");
        match cfg.samples_per_symbol {
            Some(l) => {
                let f = mpsk_feasibility(alpha, l)?;
                println!("L = {l}: {:?}", f.verdict);
                serde_json::to_value(f)?
            }
            None => json!({ "alpha": alpha, "min_samples_per_symbol": min_l }),
        }
    } else {
        let (Some(eps), Some(n), Some(beta), Some(u1_max)) = (cfg.eps, cfg.n, cfg.beta, cfg.u1_max)
        else {
            bail!("plan needs either `alpha` or all of `eps`, `n`, `beta`, `u1_max`");
        };
        let f = gaussian_dominance(eps, n, beta, u1_max)?;
        let verdict = serde_json::to_value(f.verdict)?;
        println!("{} margin {:.6} threshold {:.6}", verdict.as_str().unwrap_or(""), f.margin, f.threshold);
        serde_json::to_value(f)?
    };
    if run.json() {
        run.write_json("plan_report.json", &report)?;
    }
    if run.csv() {
        run.write_flat_csv("plan_report.csv", &report)?;
    }
    run.manifest("plan", serde_json::to_value(&cfg)?)?;
    Ok(EXIT_OK)
}

fn classify_cmd(run: &mut Run, mut cfg: MpskConfig) -> Result<u8> {
    cfg.apply(run.cli.seed, None);
    let scenario = cfg.scenario();
    let sample = synth_matrix(&scenario)?;
    let c = classify(&sample.y, scenario.n0, &cfg.options())?;
    if run.csv() {
        let w = run.create("points.csv")?;
        write_points_csv(&c, &sample.symbol_indices, w)?;
    }
    if run.json() {
        let summary = json!({
            "m_order": scenario.m_order,
            "n0": scenario.n0,
            "correct": c.m_hat == scenario.m_order,
            "classification": c,
        });
        run.write_json("classification.json", &summary)?;
    }
    run.manifest("classify", serde_json::to_value(&cfg)?)?;
    println!(
        "M_hat = {} (true {}), radius {:.6}, feasibility {:?}",
        c.m_hat, scenario.m_order, c.predicted_radius, c.feasibility.verdict
    );
    for w in &c.warnings {
        eprintln!("warning: {w}");
    }
    Ok(EXIT_OK)
}

fn sweep(run: &mut Run, mut cfg: MpskConfig) -> Result<u8> {
    cfg.apply(run.cli.seed, run.cli.trials);
    let base = cfg.scenario();
    let opts = cfg.options();
    let rows = in_pool(run.cli.jobs, || {
        snr_sweep(&base, &cfg.orders, &cfg.snr_grid, cfg.runs, &opts)
    })??;
    if run.csv() {
        let w = run.create("sweep.csv")?;
        write_sweep_csv(&rows, w)?;
    }
    if run.json() {
        run.write_json("sweep.json", &json!({ "rows": rows }))?;
    }
    run.manifest("sweep", serde_json::to_value(&cfg)?)?;
    for r in &rows {
        println!("M={} snr={} dB: {}/{}", r.m_order, r.snr_db, r.successes, r.runs);
    }
    Ok(EXIT_OK)
}
