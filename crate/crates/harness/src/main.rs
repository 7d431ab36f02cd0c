use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use geo_smc::config::{parse_config, ConfigError};
use geo_smc::runner::{self, SweepGrid};
use geo_smc::verify::{self, VerifyOptions};
use geo_smc_core::control::ControllerRegistry;
use geo_smc_core::liegroup::SlidingSign;
use geo_smc_core::sim::{Scenario, SimConfig};

/// Attitude tracking on the unit-quaternion tangent bundle: simulation,
/// reproduction runs and numerical property checks.
#[derive(Debug, Parser)]
#[command(name = "geo-smc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one configuration and write its trace and summary.
    Run(RunArgs),
    /// Run the numerical property suites; exits 1 if any property fails.
    Verify(VerifyArgs),
    /// Run the ideal, uncertain-inertia and noisy scenarios for both controllers.
    Reproduce(RunArgs),
    /// Grid over geometric gains and seeds.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML config; omitted keys keep the reference values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// ideal, uncertain_inertia or noisy. Resets inertia scale and noise caps
    /// to that scenario's defaults.
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Registered controller name.
    #[arg(long)]
    controller: Option<String>,
    /// Integration step (s).
    #[arg(long)]
    dt: Option<f64>,
    /// Duration (s).
    #[arg(long)]
    t_end: Option<f64>,
    /// Use the sign-corrected sliding variable that attracts the nearer of ±1.
    #[arg(long)]
    signed_sliding: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict to these suites (algebra, group, dynamics, control).
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Samples per algebraic and group property.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Also write the reports as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated λ values.
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    lambda: Vec<f64>,
    /// Comma-separated scalar K_r values (K_r = k I).
    #[arg(long, value_delimiter = ',', default_value = "3")]
    kr: Vec<f64>,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
}

/// Bad input: usage-level failure.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load(args: &RunArgs, registry: &ControllerRegistry) -> anyhow::Result<SimConfig> {
    let mut cfg = match &args.config {
        Some(path) => parse_config(path).map_err(|e: ConfigError| usage(e.to_string()))?,
        None => SimConfig::default(),
    };
    if let Some(s) = args.scenario {
        cfg.scenario = s;
        cfg.inertia_scale = s.default_inertia_scale();
        cfg.noise_caps = s.default_noise_caps();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(c) = &args.controller {
        cfg.controller = c.clone();
    }
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    if let Some(t) = args.t_end {
        cfg.t_end = t;
    }
    if args.signed_sliding {
        cfg.gains.sliding = SlidingSign::Signed;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    if !registry.contains(&cfg.controller) {
        let names: Vec<&str> = registry.names().collect();
        return Err(usage(format!(
            "unknown controller `{}` (available: {})",
            cfg.controller,
            names.join(", ")
        )));
    }
    Ok(cfg)
}

fn run(args: RunArgs, registry: &ControllerRegistry) -> anyhow::Result<ExitCode> {
    let cfg = load(&args, registry)?;
    let summary = runner::with_pool(|| {
        let traces = runner::run_all(std::slice::from_ref(&cfg), registry)?;
        runner::write_outputs(traces, &args.out)
    })??;
    print!("{}", summary.table());
    let diverged = summary.runs.iter().any(|r| !r.completed);
    Ok(if diverged { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn reproduce(mut args: RunArgs, registry: &ControllerRegistry) -> anyhow::Result<ExitCode> {
    // scenario and controller select runs here rather than override the config
    let scenario = args.scenario.take();
    let controller = args.controller.take();
    let base = load(&args, registry)?;
    let scenarios: Vec<Scenario> = scenario.map_or(Scenario::ALL.to_vec(), |s| vec![s]);
    let controllers: Vec<String> =
        controller.map_or(vec!["geometric".into(), "baseline".into()], |c| vec![c]);
    if let Some(c) = controllers.iter().find(|c| !registry.contains(c)) {
        return Err(usage(format!("unknown controller `{c}`")));
    }
    let summary = runner::with_pool(|| {
        runner::reproduce(&base, &scenarios, &controllers, &args.out, registry)
    })??;
    print!("{}", summary.table());
    println!("outputs written to {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs, registry: &ControllerRegistry) -> anyhow::Result<ExitCode> {
    let base = load(&args.run, registry)?;
    if args.seeds == 0 {
        return Err(usage("--seeds must be at least 1"));
    }
    let grid = SweepGrid {
        lambdas: args.lambda,
        krs: args.kr,
        seeds: (base.seed..base.seed + args.seeds).collect(),
    };
    let rows = runner::with_pool(|| runner::sweep(&base, &grid, &args.run.out, registry))??;
    println!(
        "{} runs written to {}",
        rows.len(),
        args.run.out.join(runner::SWEEP_FILE).display()
    );
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let opts = VerifyOptions {
        seed: args.seed,
        samples: args.samples,
        ..VerifyOptions::default()
    };
    let names: Vec<String> = if args.suites.is_empty() {
        verify::SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        args.suites
    };
    let mut reports = Vec::new();
    for name in &names {
        let report = runner::with_pool(|| verify::run_suite(name, &opts))?
            .ok_or_else(|| usage(format!("unknown suite `{name}` (available: {})", verify::SUITES.join(", "))))?;
        print!("{report}");
        reports.push(report);
    }
    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&reports)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let failed = reports.iter().filter(|r| !r.ok()).count();
    if failed == 0 {
        println!("all {} suites passed", reports.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{failed} of {} suites failed", reports.len());
        Ok(ExitCode::FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = runner::thread_cap() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let registry = ControllerRegistry::builtin();
    let result = match cli.command {
        Command::Run(a) => run(a, &registry),
        Command::Verify(a) => verify(a),
        Command::Reproduce(a) => reproduce(a, &registry),
        Command::Sweep(a) => sweep(a, &registry),
    };
    match result {
        Ok(code) => code,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
