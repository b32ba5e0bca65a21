use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sddo_core::bounds::{a2_probability, alpha3_upper_bound, combine_bound};
use sddo_core::calibration::{sweep_dose_counts, CalibrationResult, CalibrationTarget, SweepPoint};
use sddo_core::design::{DesignSpec, DosePrior, InformationFraction, ScenarioSpec};
use sddo_core::engine::{simulate_replicates, summarize};
use sddo_core::ssr::{ppos_with, reestimate_events_with, PposInputs};
use serde::Serialize;

mod config;
mod error;
mod output;

use error::{CliError, CliResult};
use output::{RunManifest, ScenarioRun};

#[derive(Parser)]
#[command(name = "sddo", version, about = "Seamless Phase II/III dose-optimization design engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every scenario in a config and export operating characteristics.
    Simulate(SimulateArgs),
    /// Grid-search the futility and significance margins.
    Calibrate(CalibrateArgs),
    /// Evaluate the analytic Type I error bounds.
    #[command(allow_negative_numbers = true)]
    Bounds(BoundsArgs),
    /// Predictive probability of success over a range of post-interim event counts.
    #[command(allow_negative_numbers = true)]
    Ppos(PposArgs),
}

#[derive(Args)]
struct WorkerArgs {
    /// Worker threads; 0 picks one per core.
    #[arg(long, env = "SDDO_WORKERS", default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct SimulateArgs {
    config: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    workers: WorkerArgs,
    #[arg(long, default_value = "sddo-out")]
    out: PathBuf,
    /// Compare the run against an earlier manifest.
    #[arg(long)]
    verify: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Config supplying the design, calibration target and template scenario.
    config: Option<PathBuf>,
    #[arg(long)]
    target_fn: Option<f64>,
    #[arg(long)]
    target_fp: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Simulated interims per calibration.
    #[arg(long)]
    sims: Option<usize>,
    #[command(flatten)]
    workers: WorkerArgs,
    /// Dose counts to calibrate, as `2..5` or `2,3,5`.
    #[arg(long, value_parser = parse_dose_counts)]
    sweep: Option<DoseCounts>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_delimiter = ',', default_value = "5")]
    doses: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    t_grid: Vec<f64>,
    #[arg(long, default_value_t = 60)]
    n0: u32,
    #[arg(long, default_value_t = 0.2)]
    p0: f64,
    #[arg(long, default_value_t = -0.05)]
    tau0: f64,
    #[arg(long, default_value_t = 0.9)]
    s0: f64,
    #[arg(long, default_value_t = 0.025)]
    alpha: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FractionArg {
    PerCandidate,
    Planned,
}

impl From<FractionArg> for InformationFraction {
    fn from(f: FractionArg) -> Self {
        match f {
            FractionArg::PerCandidate => InformationFraction::PerCandidate,
            FractionArg::Planned => InformationFraction::Planned,
        }
    }
}

#[derive(Args)]
struct PposArgs {
    /// Interim OS events in the selected arm plus control.
    #[arg(long)]
    m1: u32,
    /// Interim log hazard ratio estimate.
    #[arg(long)]
    loghr: f64,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 8.0)]
    sigma: f64,
    /// Planned and maximum post-interim events, `lo:hi`.
    #[arg(long, default_value = "226:507", value_parser = parse_range)]
    m2_range: RangeInclusive<u32>,
    #[arg(long, default_value_t = 0.025)]
    alpha: f64,
    #[arg(long, default_value_t = 0.9)]
    target: f64,
    /// Defaults to the target.
    #[arg(long)]
    aa_threshold: Option<f64>,
    #[arg(long, value_enum, default_value = "per-candidate")]
    information_fraction: FractionArg,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: u32 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: u32 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo == 0 || lo > hi {
        return Err("need 0 < lo <= hi".into());
    }
    Ok(lo..=hi)
}

#[derive(Clone)]
struct DoseCounts(Vec<usize>);

fn parse_dose_counts(s: &str) -> Result<DoseCounts, String> {
    let counts: Vec<usize> = if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|e| format!("{e}"))?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|e| format!("{e}"))?;
        (lo..=hi).collect()
    } else {
        s.split(',').map(|p| p.trim().parse().map_err(|e| format!("{e}"))).collect::<Result<_, _>>()?
    };
    if counts.is_empty() || counts.contains(&0) {
        return Err("dose counts must be positive".into());
    }
    Ok(DoseCounts(counts))
}

fn simulate(args: SimulateArgs) -> CliResult<()> {
    if args.reps == 0 {
        return Err(CliError::Config("--reps must be at least 1".into()));
    }
    let cfg = config::load(&args.config)?;
    if cfg.scenarios.is_empty() {
        return Err(CliError::Config("config defines no [[scenario]]".into()));
    }
    let expected = args.verify.as_deref().map(output::read_manifest).transpose()?;
    let workers = args.workers.workers;

    let mut results = Vec::new();
    for scen in &cfg.scenarios {
        let reps = simulate_replicates(&cfg.design, scen, args.reps, args.seed, workers)?;
        let oc = summarize(cfg.design.n_doses(), &scen.true_optimal_set(), &reps);
        results.push((scen.name.as_str(), oc, reps));
    }
    let runs: Vec<ScenarioRun> = results
        .iter()
        .map(|(name, oc, reps)| ScenarioRun { name, oc, reps })
        .collect();

    let dir = output::ensure_dir(&args.out)?;
    output::write_summary(&dir.join(output::SUMMARY_FILE), &runs)?;
    output::write_replicates(&dir.join(output::REPLICATES_FILE), &runs)?;
    let resolved = dir.join(output::RESOLVED_CONFIG_FILE);
    std::fs::write(&resolved, cfg.to_toml()?).map_err(|e| CliError::io(&resolved, e))?;
    let manifest = RunManifest {
        config_path: args.config.display().to_string(),
        seed: args.seed,
        n_reps: args.reps,
        workers,
        output_dir: args.out.display().to_string(),
        engine_version: sddo_core::VERSION.to_string(),
        config_digest: cfg.digest.clone(),
        outputs: output::file_digests(&dir, &[output::SUMMARY_FILE, output::REPLICATES_FILE, output::RESOLVED_CONFIG_FILE])?,
    };
    output::write_json(&dir.join(output::MANIFEST_FILE), &manifest)?;

    for run in &runs {
        let d = &run.oc.decision_pct;
        println!(
            "{}: terminate {:.2}% phase2 {:.2}% phase3 {:.2}% positive {:.2}% trigger_failed {}",
            run.name,
            d.terminate,
            d.phase2,
            d.phase3,
            100.0 * run.oc.positive_rate_overall,
            run.oc.n_trigger_failed
        );
    }
    println!("wrote {}", dir.display());

    if let Some(then) = expected {
        let diffs = output::manifest_differences(&then, &manifest);
        if !diffs.is_empty() {
            return Err(CliError::Mismatch(diffs.join("\n")));
        }
        println!("verified against manifest");
    }
    let dominant: Vec<String> = runs
        .iter()
        .filter(|r| 2 * r.oc.n_trigger_failed > args.reps)
        .map(|r| format!("{} ({}/{})", r.name, r.oc.n_trigger_failed, args.reps))
        .collect();
    if !dominant.is_empty() {
        return Err(CliError::TriggerFailed(dominant.join(", ")));
    }
    Ok(())
}

#[derive(Serialize)]
struct CalibrationRecord<'a> {
    engine_version: &'a str,
    seed: u64,
    config_digest: Option<&'a str>,
    target: &'a CalibrationTarget,
    points: &'a [SweepPoint],
}

fn describe(name: &str, r: &CalibrationResult) -> String {
    let note = if r.attained { "" } else { " (cap not attained, grid edge)" };
    format!("{name} = {:.2} rate {:.4} (se {:.4}){note}", r.value, r.rate, r.rate_se)
}

fn calibrate(args: CalibrateArgs) -> CliResult<()> {
    let cfg = args.config.as_deref().map(config::load).transpose()?;
    let (design, mut target, template) = match &cfg {
        Some(c) => (c.design.clone(), c.calibration.clone(), c.scenarios.first().cloned().unwrap_or_default()),
        None => (DesignSpec::default(), CalibrationTarget::default(), ScenarioSpec::default()),
    };
    if let Some(v) = args.target_fn {
        target.false_negative_cap = v;
    }
    if let Some(v) = args.target_fp {
        target.false_positive_cap = v;
    }
    if let Some(v) = args.sims {
        target.n_sims_per_point = v;
    }
    target.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let counts = args.sweep.map(|d| d.0).unwrap_or_else(|| vec![design.n_doses()]);
    let points = sweep_dose_counts(&design, &target, &template, &counts, args.seed, args.workers.workers)?;
    for p in &points {
        println!("I = {}: {}; {}", p.n_doses, describe("tau0", &p.tau0), describe("tau1", &p.tau1));
    }
    if let Some(out) = &args.out {
        let record = CalibrationRecord {
            engine_version: sddo_core::VERSION,
            seed: args.seed,
            config_digest: cfg.as_ref().map(|c| c.digest.as_str()),
            target: &target,
            points: &points,
        };
        output::write_json(out, &record)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn bounds(args: BoundsArgs) -> CliResult<()> {
    println!("n_doses,t,alpha3,a2,overall,exceeds_alpha");
    for &i in &args.doses {
        let a2 = a2_probability(i, args.n0, args.p0, args.tau0, args.s0)?;
        for &t in &args.t_grid {
            let a3 = alpha3_upper_bound(i, t, args.alpha)?;
            let overall = combine_bound(args.alpha, a2, a3);
            println!(
                "{i},{},{},{},{},{}",
                output::num(t),
                output::num(a3),
                output::num(a2),
                output::num(overall),
                overall > args.alpha
            );
        }
    }
    Ok(())
}

fn ppos(args: PposArgs) -> CliResult<()> {
    let prior = DosePrior { a: 1.0, b: 1.0, mu: args.mu, sigma: args.sigma };
    let inputs = PposInputs::from_interim(args.m1, args.loghr, &prior, args.alpha)?;
    let mode = InformationFraction::from(args.information_fraction);
    let (lo, hi) = (*args.m2_range.start(), *args.m2_range.end());
    let m1 = f64::from(args.m1);
    println!("m2,t,ppos");
    for m2 in lo..=hi {
        let t = match mode {
            InformationFraction::PerCandidate => m1 / (m1 + f64::from(m2)),
            InformationFraction::Planned => m1 / (m1 + f64::from(lo)),
        };
        let p = ppos_with(&inputs, u64::from(m2), mode, lo);
        println!("{m2},{},{}", output::num(t), output::num(p));
    }
    let adjusted = reestimate_events_with(&inputs, lo, hi, args.target, mode);
    let at = ppos_with(&inputs, u64::from(adjusted), mode, lo);
    let aa = args.aa_threshold.unwrap_or(args.target);
    println!("# adjusted_m2,{adjusted}");
    println!("# ppos_at_adjusted,{}", output::num(at));
    println!("# aa_supportable,{}", at >= aa);
    println!("# posterior_benefit_probability,{}", output::num(inputs.posterior_benefit_probability()));
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Bounds(a) => bounds(a),
        Command::Ppos(a) => ppos(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

