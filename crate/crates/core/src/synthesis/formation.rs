//! Time-varying formation offsets `h_i(t)` and their derivatives.

use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;

/// One agent's harmonic offset: component `c` is
/// `offset[c] + sin_amp[c]·sin(ωt + phase) + cos_amp[c]·cos(ωt + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicAgent {
    pub phase: f64,
    pub sin_amp: Vec<f64>,
    pub cos_amp: Vec<f64>,
    pub offset: Vec<f64>,
}

impl HarmonicAgent {
    pub fn new(phase: f64, sin_amp: Vec<f64>, cos_amp: Vec<f64>) -> Self {
        let dim = sin_amp.len();
        Self {
            phase,
            sin_amp,
            cos_amp,
            offset: vec![0.0; dim],
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(0.0, vec![0.0; dim], vec![0.0; dim])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicFormation {
    pub omega: f64,
    pub agents: Vec<HarmonicAgent>,
}

/// Sampled offsets on a uniform time grid, interpolated by cubic Hermite
/// segments with central-difference slopes (so `ḣ` is the exact derivative
/// of the interpolant). Outside the grid the end values are held.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFormation {
    pub t0: f64,
    pub step: f64,
    /// `samples[s][i][c]`: sample `s`, agent `i`, component `c`.
    pub samples: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormationError {
    Empty,
    Ragged,
    NonPositiveStep,
    NonFinite,
}

impl core::fmt::Display for FormationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FormationError::Empty => write!(f, "formation has no agents or samples"),
            FormationError::Ragged => write!(f, "formation components have inconsistent dimensions"),
            FormationError::NonPositiveStep => write!(f, "sample step must be positive"),
            FormationError::NonFinite => write!(f, "formation parameters must be finite"),
        }
    }
}

impl core::error::Error for FormationError {}

#[derive(Debug, Clone, PartialEq)]
pub enum FormationSpec {
    Harmonic(HarmonicFormation),
    Tabulated(TabulatedFormation),
}

impl FormationSpec {
    pub fn harmonic(omega: f64, agents: Vec<HarmonicAgent>) -> Result<Self, FormationError> {
        let dim = agents.first().ok_or(FormationError::Empty)?.sin_amp.len();
        if dim == 0 {
            return Err(FormationError::Empty);
        }
        for a in &agents {
            if a.sin_amp.len() != dim || a.cos_amp.len() != dim || a.offset.len() != dim {
                return Err(FormationError::Ragged);
            }
            let finite = a.phase.is_finite()
                && a.sin_amp.iter().chain(&a.cos_amp).chain(&a.offset).all(|v| v.is_finite());
            if !finite {
                return Err(FormationError::NonFinite);
            }
        }
        if !omega.is_finite() {
            return Err(FormationError::NonFinite);
        }
        Ok(FormationSpec::Harmonic(HarmonicFormation { omega, agents }))
    }

    pub fn tabulated(t0: f64, step: f64, samples: Vec<Vec<Vec<f64>>>) -> Result<Self, FormationError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(FormationError::NonPositiveStep);
        }
        let first = samples.first().ok_or(FormationError::Empty)?;
        let agents = first.len();
        let dim = first.first().ok_or(FormationError::Empty)?.len();
        if dim == 0 {
            return Err(FormationError::Empty);
        }
        for s in &samples {
            if s.len() != agents || s.iter().any(|h| h.len() != dim) {
                return Err(FormationError::Ragged);
            }
            if s.iter().flatten().any(|v| !v.is_finite()) {
                return Err(FormationError::NonFinite);
            }
        }
        Ok(FormationSpec::Tabulated(TabulatedFormation { t0, step, samples }))
    }

    /// All-zero offsets.
    pub fn zero(agents: usize, dim: usize) -> Self {
        FormationSpec::Harmonic(HarmonicFormation {
            omega: 0.0,
            agents: (0..agents).map(|_| HarmonicAgent::zero(dim)).collect(),
        })
    }

    pub fn agents(&self) -> usize {
        match self {
            FormationSpec::Harmonic(h) => h.agents.len(),
            FormationSpec::Tabulated(t) => t.samples[0].len(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FormationSpec::Harmonic(h) => h.agents[0].sin_amp.len(),
            FormationSpec::Tabulated(t) => t.samples[0][0].len(),
        }
    }

    /// Writes `h_i(t)` and `ḣ_i(t)` into the given buffers of length `dim`.
    pub fn eval(&self, i: usize, t: f64, h: &mut [f64], hdot: &mut [f64]) {
        match self {
            FormationSpec::Harmonic(f) => {
                let a = &f.agents[i];
                let arg = f.omega * t + a.phase;
                let (s, c) = (fmath::sin(arg), fmath::cos(arg));
                for k in 0..a.sin_amp.len() {
                    h[k] = a.offset[k] + a.sin_amp[k] * s + a.cos_amp[k] * c;
                    hdot[k] = f.omega * (a.sin_amp[k] * c - a.cos_amp[k] * s);
                }
            }
            FormationSpec::Tabulated(f) => f.eval(i, t, h, hdot),
        }
    }

    /// Stacked `h(t)` and `ḣ(t)` for all agents.
    pub fn eval_all(&self, t: f64, h: &mut [f64], hdot: &mut [f64]) {
        let dim = self.dim();
        for i in 0..self.agents() {
            let r = i * dim..(i + 1) * dim;
            self.eval(i, t, &mut h[r.clone()], &mut hdot[r]);
        }
    }

    pub fn h(&self, i: usize, t: f64) -> Vec<f64> {
        let mut h = vec![0.0; self.dim()];
        let mut hd = vec![0.0; self.dim()];
        self.eval(i, t, &mut h, &mut hd);
        h
    }

    pub fn hdot(&self, i: usize, t: f64) -> Vec<f64> {
        let mut h = vec![0.0; self.dim()];
        let mut hd = vec![0.0; self.dim()];
        self.eval(i, t, &mut h, &mut hd);
        hd
    }

    /// Default certification grid: 200 points over three periods for a
    /// harmonic family, or over the sampled span.
    pub fn default_grid(&self) -> Vec<f64> {
        const POINTS: usize = 200;
        let span = match self {
            FormationSpec::Harmonic(h) if h.omega != 0.0 => 3.0 * 2.0 * core::f64::consts::PI / h.omega.abs(),
            FormationSpec::Harmonic(_) => 1.0,
            FormationSpec::Tabulated(t) => t.step * (t.samples.len().max(2) - 1) as f64,
        };
        let t0 = match self {
            FormationSpec::Tabulated(t) => t.t0,
            _ => 0.0,
        };
        (0..POINTS)
            .map(|k| t0 + span * k as f64 / (POINTS - 1) as f64)
            .collect()
    }
}

impl TabulatedFormation {
    fn eval(&self, i: usize, t: f64, h: &mut [f64], hdot: &mut [f64]) {
        let last = self.samples.len() - 1;
        let dim = h.len();
        if last == 0 {
            h.copy_from_slice(&self.samples[0][i]);
            hdot.fill(0.0);
            return;
        }
        let u = (t - self.t0) / self.step;
        if u <= 0.0 || u >= last as f64 {
            let s = if u <= 0.0 { 0 } else { last };
            h.copy_from_slice(&self.samples[s][i]);
            hdot.fill(0.0);
            return;
        }
        let s = (fmath::floor(u) as usize).min(last - 1);
        let x = u - s as f64;
        let slope = |k: usize, c: usize| -> f64 {
            let (lo, hi) = (k.saturating_sub(1), (k + 1).min(last));
            (self.samples[hi][i][c] - self.samples[lo][i][c]) / (hi - lo) as f64
        };
        let (x2, x3) = (x * x, x * x * x);
        let (h00, h10, h01, h11) = (2.0 * x3 - 3.0 * x2 + 1.0, x3 - 2.0 * x2 + x, -2.0 * x3 + 3.0 * x2, x3 - x2);
        let (d00, d10, d01, d11) = (6.0 * x2 - 6.0 * x, 3.0 * x2 - 4.0 * x + 1.0, -6.0 * x2 + 6.0 * x, 3.0 * x2 - 2.0 * x);
        for c in 0..dim {
            let (p0, p1) = (self.samples[s][i][c], self.samples[s + 1][i][c]);
            let (m0, m1) = (slope(s, c), slope(s + 1, c));
            h[c] = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1;
            hdot[c] = (d00 * p0 + d10 * m0 + d01 * p1 + d11 * m1) / self.step;
        }
    }
}
