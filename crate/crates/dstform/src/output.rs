//! CSV traces and run summaries.

use std::io::{self, Write};

use dstform_core::sim::{SimTrace, V1_TOLERANCE};
use serde::{Deserialize, Serialize};

/// Error level used for time-to-threshold reporting.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-2;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column names: `t`, `x_<agent>_<component>`, `alpha_<child>_<parent>` for
/// adaptive tree edges, then `E`, `xi_err`, `V1`. Labels are 1-based.
pub fn csv_header(trace: &SimTrace, adaptive: bool) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 1..=trace.agents {
        for c in 1..=trace.dim {
            h.push(format!("x_{i}_{c}"));
        }
    }
    if adaptive {
        for &(child, parent) in &trace.edge_labels {
            h.push(format!("alpha_{}_{}", child + 1, parent + 1));
        }
    }
    h.extend(["E", "xi_err", "V1"].map(String::from));
    h
}

pub fn write_csv<W: Write>(mut w: W, trace: &SimTrace, adaptive: bool) -> io::Result<()> {
    writeln!(w, "{}", csv_header(trace, adaptive).join(","))?;
    let mut row = Vec::new();
    for k in 0..trace.times.len() {
        row.clear();
        row.push(fmt_num(trace.times[k]));
        row.extend(trace.states[k].iter().map(|&v| fmt_num(v)));
        if adaptive {
            row.extend(trace.weights[k].iter().map(|&v| fmt_num(v)));
        }
        row.push(fmt_num(trace.error[k]));
        row.push(fmt_num(trace.xi_err[k]));
        row.push(trace.v1.as_ref().map_or(String::new(), |v| fmt_num(v[k])));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mode: String,
    pub seed: u64,
    #[serde(rename = "final_E")]
    pub final_e: f64,
    pub max_weight: f64,
    pub settled: bool,
    pub diverged: bool,
    pub divergence_time: Option<f64>,
    pub feasibility_residual: f64,
    pub v1_monitored: bool,
    /// Whether `V₁` never rose by more than `1e-8·V₁(0)` in one step.
    pub v1_nonincreasing: Option<bool>,
    pub v1_worst_step_rise: Option<f64>,
    /// First time after which `E` stays at or below [`CONVERGENCE_THRESHOLD`].
    pub time_to_threshold: Option<f64>,
}

impl RunSummary {
    pub fn new(mode: &str, seed: u64, trace: &SimTrace) -> Self {
        Self {
            mode: mode.to_string(),
            seed,
            final_e: trace.final_error(),
            max_weight: trace.max_weight(),
            settled: trace.settled(),
            diverged: trace.diverged,
            divergence_time: trace.divergence_time,
            feasibility_residual: trace.feasibility_residual,
            v1_monitored: trace.v1.is_some(),
            v1_nonincreasing: trace.v1_step_worst_rise.map(|r| r <= V1_TOLERANCE),
            v1_worst_step_rise: trace.v1_step_worst_rise,
            time_to_threshold: trace.time_to_threshold(CONVERGENCE_THRESHOLD),
        }
    }
}
