//! Scalar metrics per run, written as `summary.json`.

use std::fmt::Write as _;

use geo_smc_core::sim::metrics::{
    all_below_after, max_after, relative_settling_time, settling_time, value_at,
};
use geo_smc_core::sim::{compare_energy, RunStatus, SimTrace};
use serde::{Deserialize, Serialize};

/// Absolute band for "converged" on `‖q_e - 1‖` and `‖s‖`.
pub const CONVERGENCE_THRESHOLD: f64 = 0.01;
/// Relative settling band, as a fraction of the peak `‖s‖`.
pub const SETTLING_FRACTION: f64 = 0.02;
/// Start of the steady-state window (s).
pub const STEADY_STATE_START: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub controller: String,
    pub seed: u64,
    pub trace: String,
    pub completed: bool,
    pub diverged_at: Option<f64>,
    pub dt: f64,
    pub t_end: f64,
    pub inertia_scale: f64,
    pub m0_clamped: bool,
    pub noise_n1: f64,
    pub noise_n2: f64,
    /// First time after which `‖q_e - 1‖` stays below the threshold.
    pub err_settling_time: Option<f64>,
    /// Same for `‖s‖`.
    pub s_settling_time: Option<f64>,
    /// `‖s‖` settling into a band of [`SETTLING_FRACTION`] of its peak.
    pub s_settling_time_relative: Option<f64>,
    pub err_at_steady_state_start: Option<f64>,
    pub steady_state_err_max: Option<f64>,
    pub steady_state_s_max: Option<f64>,
    pub steady_state_converged: bool,
    pub final_err_norm: f64,
    pub final_s_norm: f64,
    pub final_energy: f64,
}

impl RunSummary {
    pub fn from_trace(trace: &SimTrace, trace_file: &str) -> Self {
        let cfg = &trace.config;
        let err = trace.series(|m| m.err_norm);
        let s = trace.series(|m| m.s_norm);
        let last = trace.last().map(|r| r.metrics).unwrap_or_default();
        let diverged_at = match trace.status {
            RunStatus::Completed => None,
            RunStatus::Diverged { t } => Some(t),
        };
        Self {
            scenario: cfg.scenario.name().to_owned(),
            controller: cfg.controller.clone(),
            seed: cfg.seed,
            trace: trace_file.to_owned(),
            completed: diverged_at.is_none(),
            diverged_at,
            dt: cfg.dt,
            t_end: cfg.t_end,
            inertia_scale: cfg.inertia_scale,
            m0_clamped: trace.m0_clamped,
            noise_n1: trace.noise.n1,
            noise_n2: trace.noise.n2,
            err_settling_time: settling_time(&err, CONVERGENCE_THRESHOLD),
            s_settling_time: settling_time(&s, CONVERGENCE_THRESHOLD),
            s_settling_time_relative: relative_settling_time(&s, SETTLING_FRACTION),
            err_at_steady_state_start: value_at(&err, STEADY_STATE_START),
            steady_state_err_max: max_after(&err, STEADY_STATE_START),
            steady_state_s_max: max_after(&s, STEADY_STATE_START),
            steady_state_converged: all_below_after(&err, STEADY_STATE_START, CONVERGENCE_THRESHOLD),
            final_err_norm: last.err_norm,
            final_s_norm: last.s_norm,
            final_energy: last.energy,
        }
    }
}

/// Final energies of the two controllers in one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub scenario: String,
    pub geometric: f64,
    pub baseline: f64,
    pub geometric_lower: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: Vec<RunSummary>,
    pub energy: Vec<EnergyRow>,
}

impl Summary {
    /// Pairs up geometric and baseline traces of the same scenario.
    pub fn build(traces: &[(SimTrace, String)]) -> Self {
        let runs = traces
            .iter()
            .map(|(t, file)| RunSummary::from_trace(t, file))
            .collect();
        let mut energy = Vec::new();
        for (geo, _) in traces.iter().filter(|(t, _)| t.config.controller == "geometric") {
            let partner = traces.iter().find(|(t, _)| {
                t.config.controller == "baseline" && t.config.scenario == geo.config.scenario
            });
            if let Some((base, _)) = partner {
                if let Ok(cmp) = compare_energy(geo, base) {
                    energy.push(EnergyRow {
                        scenario: geo.config.scenario.name().to_owned(),
                        geometric: cmp.first,
                        baseline: cmp.second,
                        geometric_lower: cmp.first < cmp.second,
                    });
                }
            }
        }
        Self { runs, energy }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary is serializable");
        s.push('\n');
        s
    }

    /// Plain-text comparison table, one row per run.
    pub fn table(&self) -> String {
        fn t(v: Option<f64>) -> String {
            v.map_or("-".to_owned(), |x| format!("{x:.2}"))
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<18} {:<10} {:>9} {:>10} {:>9} {:>11} {:>11} {:>9}",
            "scenario", "controller", "err<0.01", "|s|<0.01", "|s| 2%", "err@50", "max err>=50", "energy"
        );
        for r in &self.runs {
            let _ = writeln!(
                out,
                "{:<18} {:<10} {:>9} {:>10} {:>9} {:>11} {:>11} {:>9.4}",
                r.scenario,
                r.controller,
                t(r.err_settling_time),
                t(r.s_settling_time),
                t(r.s_settling_time_relative),
                r.err_at_steady_state_start.map_or("-".into(), |v| format!("{v:.5}")),
                r.steady_state_err_max.map_or("-".into(), |v| format!("{v:.5}")),
                r.final_energy,
            );
        }
        for e in &self.energy {
            let _ = writeln!(
                out,
                "{}: energy geometric {:.4} vs baseline {:.4} ({} lower)",
                e.scenario,
                e.geometric,
                e.baseline,
                if e.geometric_lower { "geometric" } else { "baseline" }
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use geo_smc_core::control::ControllerRegistry;
    use geo_smc_core::sim::{run_scenario, Scenario, SimConfig};

    fn short(controller: &str) -> SimTrace {
        let cfg = SimConfig {
            t_end: 1.0,
            ..SimConfig::for_scenario(Scenario::Ideal, controller)
        };
        run_scenario(&cfg, &ControllerRegistry::builtin()).unwrap()
    }

    #[test]
    fn pairs_controllers_and_serializes() {
        let traces = vec![(short("geometric"), "a.csv".into()), (short("baseline"), "b.csv".into())];
        let s = Summary::build(&traces);
        assert_eq!(s.runs.len(), 2);
        assert_eq!(s.energy.len(), 1);
        assert_eq!(s.runs[0].trace, "a.csv");
        assert!(s.runs[0].completed);
        // too short to reach the steady-state window
        assert_eq!(s.runs[0].steady_state_err_max, None);
        assert!(!s.runs[0].steady_state_converged);
        let back: Summary = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let table = s.table();
        assert_eq!(table.lines().count(), 4);
        assert!(table.contains("ideal: energy geometric"));
    }
}
