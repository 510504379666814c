use alloc::vec::Vec;

use crate::control::{edge_errors, AgentFrame};
use crate::digraph::{LeaderPartition, SpanningTree};
use crate::fmath;
use crate::matnum::Mat;

/// Root-mean-square deviation of the formation states from their average.
pub fn metric_tvf_error(frame: &AgentFrame) -> f64 {
    let (n, dim) = (frame.agents(), frame.dim);
    let mut avg = alloc::vec![0.0; dim];
    for i in 0..n {
        for (a, v) in avg.iter_mut().zip(frame.d_i(i)) {
            *a += v / n as f64;
        }
    }
    let mut acc = 0.0;
    for i in 0..n {
        for (a, v) in avg.iter().zip(frame.d_i(i)) {
            acc += (v - a) * (v - a);
        }
    }
    fmath::sqrt(acc / n as f64)
}

/// Norm of the stacked parent-child errors `(Ξ ⊗ I)d`.
pub fn xi_error(d: &[f64], dim: usize, tree: &SpanningTree) -> f64 {
    fmath::sqrt(edge_errors(d, dim, tree).iter().map(|v| v * v).sum())
}

/// Root-mean-square follower deviation from `h_i + Σ β_l x_l`.
pub fn metric_tvft_error(frame: &AgentFrame, part: &LeaderPartition) -> f64 {
    let (n, dim, m) = (frame.agents(), frame.dim, part.m());
    let mut target = alloc::vec![0.0; dim];
    for (l, &b) in part.beta().iter().enumerate() {
        for (t, v) in target.iter_mut().zip(frame.x_i(l)) {
            *t += b * v;
        }
    }
    let mut acc = 0.0;
    for i in m..n {
        for (t, v) in target.iter().zip(frame.d_i(i)) {
            acc += (v - t) * (v - t);
        }
    }
    fmath::sqrt(acc / (n - m) as f64)
}

/// `½ Σ d̄_kᵀ P⁻¹ d̄_k + Σ (ā_k − φ_k)² / (2ρ_k)`.
pub fn lyapunov_value(dbar: &[f64], dim: usize, weights: &[f64], p_inv: &Mat, phi: &[f64], rho: &[f64]) -> f64 {
    let mut v = 0.0;
    for k in 0..weights.len() {
        let e = &dbar[k * dim..(k + 1) * dim];
        v += 0.5 * p_inv.bilinear(e, e);
        let w = weights[k] - phi[k];
        v += w * w / (2.0 * rho[k]);
    }
    v
}

/// Sampled Lyapunov values and whether they never rise by more than
/// `1e-8·V(0)` between consecutive samples.
#[derive(Debug, Clone, PartialEq)]
pub struct V1Report {
    pub values: Vec<f64>,
    pub nonincreasing: bool,
    /// Largest rise between consecutive samples, relative to `V(0)`.
    pub worst_rise: f64,
}

pub const V1_TOLERANCE: f64 = 1e-8;

impl V1Report {
    pub fn from_values(values: Vec<f64>) -> Self {
        let v0 = values.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        let worst_rise = values
            .windows(2)
            .map(|w| (w[1] - w[0]) / v0)
            .fold(f64::NEG_INFINITY, f64::max);
        Self {
            nonincreasing: worst_rise <= V1_TOLERANCE,
            worst_rise,
            values,
        }
    }
}
