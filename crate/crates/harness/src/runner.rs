//! Batch execution: independent runs fan out over a rayon pool, each run
//! writes only its own trace file.

use std::fs;
use std::path::{Path, PathBuf};

use geo_smc_core::control::{ControllerRegistry, SpdMatrix4};
use geo_smc_core::liegroup::GroupParams;
use geo_smc_core::sim::{run_scenario, Scenario, SimConfig, SimError, SimTrace};
use rayon::prelude::*;
use thiserror::Error;

use crate::summary::{RunSummary, Summary};
use crate::trace::{trace_file_name, write_trace_csv, TraceError};

/// Caps the number of worker threads.
pub const THREADS_ENV: &str = "GEO_SMC_THREADS";

pub const SUMMARY_FILE: &str = "summary.json";
pub const COMPARISON_FILE: &str = "comparison.txt";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{scenario}/{controller}: {source}")]
    Sim {
        scenario: Scenario,
        controller: String,
        #[source]
        source: SimError,
    },
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{THREADS_ENV} must be a positive integer, got `{0}`")]
    Threads(String),
    #[error("invalid sweep grid: {0}")]
    Grid(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Thread cap from `GEO_SMC_THREADS`; `None` leaves rayon's default.
pub fn thread_cap() -> Result<Option<usize>, HarnessError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::Threads(v)),
        },
    }
}

/// Runs `f` inside a pool sized by [`thread_cap`].
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Threads(e.to_string()))?;
    Ok(pool.install(f))
}

/// Runs every config, returning traces in input order.
pub fn run_all(configs: &[SimConfig], registry: &ControllerRegistry) -> Result<Vec<SimTrace>, HarnessError> {
    configs
        .par_iter()
        .map(|cfg| {
            run_scenario(cfg, registry).map_err(|source| HarnessError::Sim {
                scenario: cfg.scenario,
                controller: cfg.controller.clone(),
                source,
            })
        })
        .collect()
}

/// Writes one CSV per trace plus `summary.json` into `out`.
pub fn write_outputs(traces: Vec<SimTrace>, out: &Path) -> Result<Summary, HarnessError> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let named: Vec<(SimTrace, String)> = traces
        .into_iter()
        .map(|t| {
            let name = trace_file_name(t.config.scenario.name(), &t.config.controller);
            (t, name)
        })
        .collect();
    named
        .par_iter()
        .try_for_each(|(t, name)| write_trace_csv(&t.records, &out.join(name)))?;
    let summary = Summary::build(&named);
    let path = out.join(SUMMARY_FILE);
    fs::write(&path, summary.to_json()).map_err(io_err(&path))?;
    Ok(summary)
}

/// Configs for the reproduction: each scenario with its own inertia scale
/// and noise caps, everything else taken from `base`.
pub fn reproduce_configs(base: &SimConfig, scenarios: &[Scenario], controllers: &[String]) -> Vec<SimConfig> {
    scenarios
        .iter()
        .flat_map(|&scenario| {
            controllers.iter().map(move |c| SimConfig {
                scenario,
                inertia_scale: scenario.default_inertia_scale(),
                noise_caps: scenario.default_noise_caps(),
                controller: c.clone(),
                ..base.clone()
            })
        })
        .collect()
}

/// Runs the scenario set, writes traces, `summary.json` and the
/// comparison table.
pub fn reproduce(
    base: &SimConfig,
    scenarios: &[Scenario],
    controllers: &[String],
    out: &Path,
    registry: &ControllerRegistry,
) -> Result<Summary, HarnessError> {
    let configs = reproduce_configs(base, scenarios, controllers);
    let traces = run_all(&configs, registry)?;
    let summary = write_outputs(traces, out)?;
    let path = out.join(COMPARISON_FILE);
    fs::write(&path, summary.table()).map_err(io_err(&path))?;
    Ok(summary)
}

/// Cartesian grid of gains and seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub lambdas: Vec<f64>,
    pub krs: Vec<f64>,
    pub seeds: Vec<u64>,
}

pub fn sweep_configs(base: &SimConfig, grid: &SweepGrid) -> Result<Vec<SimConfig>, HarnessError> {
    let mut out = Vec::new();
    for &lambda in &grid.lambdas {
        let group = GroupParams::new(lambda).map_err(|e| HarnessError::Grid(e.to_string()))?;
        for &kr in &grid.krs {
            if !(kr > 0.0 && kr.is_finite()) {
                return Err(HarnessError::Grid(format!("kr must be positive, got {kr}")));
            }
            for &seed in &grid.seeds {
                let mut cfg = base.clone();
                cfg.seed = seed;
                cfg.gains.geometric.group = group;
                cfg.gains.geometric.kr = SpdMatrix4::scaled_identity(kr);
                out.push(cfg);
            }
        }
    }
    Ok(out)
}

/// Runs the grid and writes one summary row per point to `sweep.csv`.
pub fn sweep(
    base: &SimConfig,
    grid: &SweepGrid,
    out: &Path,
    registry: &ControllerRegistry,
) -> Result<Vec<RunSummary>, HarnessError> {
    let configs = sweep_configs(base, grid)?;
    let rows: Vec<RunSummary> = configs
        .par_iter()
        .map(|cfg| {
            run_scenario(cfg, registry)
                .map(|t| RunSummary::from_trace(&t, ""))
                .map_err(|source| HarnessError::Sim {
                    scenario: cfg.scenario,
                    controller: cfg.controller.clone(),
                    source,
                })
        })
        .collect::<Result<_, _>>()?;

    fs::create_dir_all(out).map_err(io_err(out))?;
    let path = out.join(SWEEP_FILE);
    let mut text = String::from(
        "lambda,kr,seed,scenario,controller,completed,err_settling_time,s_settling_time,steady_state_err_max,final_energy\n",
    );
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for (cfg, r) in configs.iter().zip(&rows) {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            cfg.gains.geometric.group.lambda(),
            cfg.gains.geometric.kr.matrix()[(0, 0)],
            r.seed,
            r.scenario,
            r.controller,
            r.completed,
            opt(r.err_settling_time),
            opt(r.s_settling_time),
            opt(r.steady_state_err_max),
            r.final_energy
        ));
    }
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimConfig {
        SimConfig {
            t_end: 1.0,
            ..SimConfig::default()
        }
    }

    fn both() -> Vec<String> {
        vec!["geometric".into(), "baseline".into()]
    }

    #[test]
    fn reproduce_configs_take_scenario_defaults() {
        let cfgs = reproduce_configs(&base(), &Scenario::ALL, &both());
        assert_eq!(cfgs.len(), 6);
        let unc = cfgs.iter().find(|c| c.scenario == Scenario::UncertainInertia).unwrap();
        assert_eq!(unc.inertia_scale, 0.7);
        let noisy = cfgs.iter().find(|c| c.scenario == Scenario::Noisy).unwrap();
        assert_eq!(noisy.noise_caps, (0.1, 0.1));
        assert!(cfgs.iter().all(|c| c.t_end == 1.0));
    }

    #[test]
    fn reproduce_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let reg = ControllerRegistry::builtin();
        let summary = reproduce(&base(), &[Scenario::Ideal], &both(), dir.path(), &reg).unwrap();
        assert_eq!(summary.runs.len(), 2);
        for name in [
            "trace_ideal_geometric.csv",
            "trace_ideal_baseline.csv",
            SUMMARY_FILE,
            COMPARISON_FILE,
        ] {
            assert!(dir.path().join(name).is_file(), "{name}");
        }
    }

    #[test]
    fn unknown_controller_is_reported() {
        let reg = ControllerRegistry::builtin();
        let cfg = SimConfig {
            controller: "pid".into(),
            ..base()
        };
        let err = run_all(&[cfg], &reg).unwrap_err();
        assert!(err.to_string().contains("unknown controller `pid`"));
    }

    #[test]
    fn sweep_grid() {
        let grid = SweepGrid {
            lambdas: vec![0.1, 0.5],
            krs: vec![1.0, 3.0],
            seeds: vec![0, 1],
        };
        let cfgs = sweep_configs(&base(), &grid).unwrap();
        assert_eq!(cfgs.len(), 8);
        assert!(sweep_configs(&base(), &SweepGrid { lambdas: vec![0.0], ..grid.clone() }).is_err());
        assert!(sweep_configs(&base(), &SweepGrid { krs: vec![-1.0], ..grid.clone() }).is_err());

        let dir = tempfile::tempdir().unwrap();
        let small = SweepGrid {
            lambdas: vec![0.1],
            krs: vec![3.0],
            seeds: vec![4, 5],
        };
        let rows = sweep(&base(), &small, dir.path(), &ControllerRegistry::builtin()).unwrap();
        assert_eq!(rows.len(), 2);
        let text = fs::read_to_string(dir.path().join(SWEEP_FILE)).unwrap();
        assert_eq!(text.lines().count(), 3);
    }
}
