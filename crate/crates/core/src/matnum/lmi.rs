//! Feasible point of `Ā·P + P·Āᵀ − η·B·Bᵀ + θ·P ≤ 0`, `P > 0`.
//!
//! With `M = Ā + (θ/2)·I` the dual Riccati equation
//!
//! ```text
//! Mᵀ·W + W·M − η·W·B·Bᵀ·W + ε·I = 0
//! ```
//!
//! has a stabilizing solution `W > 0` whenever `(M, B)` is stabilizable.
//! Pre- and post-multiplying by `P = W⁻¹` gives
//! `Ā·P + P·Āᵀ − η·B·Bᵀ + θ·P = −ε·P² < 0`.
//!
//! The Riccati equation is solved by Newton–Kleinman iteration. The initial
//! stabilizing point comes from a continuation in a diagonal shift `σ`: for
//! `σ` large, `M − σI` is Hurwitz and `W = 0` stabilizes it; each solved
//! shift stabilizes the next one as long as `σ` moves by less than the
//! closed-loop stability margin.

use super::{
    chol_pd, eigenvalues, inverse, is_stabilizable, solve_lyapunov, sym_eig, LinalgError, Mat,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmiOptions {
    /// Riccati regularizer. `None` uses `1e-2 · (1 + ‖Ā‖)`.
    pub epsilon: Option<f64>,
    /// Newton iteration cap per shift.
    pub max_newton: usize,
    /// Relative step size at which Newton iteration stops.
    pub newton_tol: f64,
    /// Number of times `ε` is halved after a failed solve.
    pub max_halvings: usize,
}

impl Default for LmiOptions {
    fn default() -> Self {
        Self {
            epsilon: None,
            max_newton: 100,
            newton_tol: 1e-11,
            max_halvings: 12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmiSolution {
    pub p: Mat,
    /// Riccati solution `W = P⁻¹`.
    pub w: Mat,
    /// Regularizer that was actually used.
    pub epsilon: f64,
    /// Largest eigenvalue of the LMI residual at `p`.
    pub residual_max: f64,
}

/// `Ā·P + P·Āᵀ − η·B·Bᵀ + θ·P`, symmetrized.
pub fn lmi_residual(abar: &Mat, b: &Mat, eta: f64, theta: f64, p: &Mat) -> Mat {
    let ap = abar * p;
    let bbt = b * &b.transpose();
    let r = &(&(&ap + &ap.transpose()) - &bbt.scale(eta)) + &p.scale(theta);
    r.symmetrize()
}

/// Returns `P > 0` satisfying the LMI with default options.
pub fn solve_lmi(abar: &Mat, b: &Mat, eta: f64, theta: f64) -> Result<Mat, LinalgError> {
    solve_lmi_with(abar, b, eta, theta, &LmiOptions::default()).map(|s| s.p)
}

pub fn solve_lmi_with(
    abar: &Mat,
    b: &Mat,
    eta: f64,
    theta: f64,
    opts: &LmiOptions,
) -> Result<LmiSolution, LinalgError> {
    super::require_square(abar)?;
    let n = abar.rows();
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: (n, b.cols()),
            got: (b.rows(), b.cols()),
        });
    }
    assert!(eta > 0.0 && theta > 0.0, "eta and theta must be positive");
    let m = abar.add_diag(0.5 * theta);
    // The θ-shift moves uncontrollable modes too; they must stay left of −θ/2.
    if !is_stabilizable(&m, b)? {
        return Err(LinalgError::NotStabilizable);
    }
    let g = (b * &b.transpose()).scale(eta);
    let mut eps = opts.epsilon.unwrap_or(1e-2 * (1.0 + abar.norm()));
    for _ in 0..=opts.max_halvings {
        if let Some(sol) = attempt(abar, b, eta, theta, &m, &g, eps, opts) {
            return Ok(sol);
        }
        eps *= 0.5;
    }
    Err(LinalgError::RiccatiNoConvergence)
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    abar: &Mat,
    b: &Mat,
    eta: f64,
    theta: f64,
    m: &Mat,
    g: &Mat,
    eps: f64,
    opts: &LmiOptions,
) -> Option<LmiSolution> {
    let n = m.rows();
    let w = riccati_by_continuation(m, g, eps, opts)?;
    if chol_pd(&w).is_err() {
        return None;
    }
    let p = inverse(&w).ok()?.symmetrize();
    chol_pd(&p).ok()?;
    let residual_max = sym_eig(&lmi_residual(abar, b, eta, theta, &p)).ok()?.max();
    if residual_max > 1e-9 * p.norm() {
        return None;
    }
    debug_assert_eq!(p.rows(), n);
    Some(LmiSolution {
        p,
        w,
        epsilon: eps,
        residual_max,
    })
}

const MAX_SHIFTS: usize = 500;

fn riccati_by_continuation(m: &Mat, g: &Mat, eps: f64, opts: &LmiOptions) -> Option<Mat> {
    let n = m.rows();
    let abscissa = eigenvalues(m).ok()?.abscissa();
    let mut sigma = if abscissa < 0.0 { 0.0 } else { abscissa + 1.0 };
    let mut w = Mat::zeros(n, n);
    for _ in 0..MAX_SHIFTS {
        let shifted = m.add_diag(-sigma);
        w = newton_kleinman(&shifted, g, eps, w, opts)?;
        if sigma == 0.0 {
            return Some(w);
        }
        let closed = &shifted - &(g * &w);
        let margin = -eigenvalues(&closed).ok()?.abscissa();
        if !(margin > 0.0) {
            return None;
        }
        sigma = (sigma - 0.5 * margin).max(0.0);
    }
    None
}

/// Newton–Kleinman iteration for `Mᵀ W + W M − W G W + ε I = 0` from a
/// stabilizing `w0` (i.e. `M − G·w0` Hurwitz).
fn newton_kleinman(m: &Mat, g: &Mat, eps: f64, w0: Mat, opts: &LmiOptions) -> Option<Mat> {
    let n = m.rows();
    let mut w = w0;
    let mut last_step = f64::INFINITY;
    for it in 0..opts.max_newton {
        let closed = m - &(g * &w);
        let wgw = &(&w * g) * &w;
        let q = wgw.add_diag(eps);
        // closedᵀ W + W closed + q = 0
        let next = solve_lyapunov(&closed.transpose(), &q).ok()?;
        if !next.is_finite() {
            return None;
        }
        let step = next.max_abs_diff(&w);
        let scale = next.max_abs().max(f64::MIN_POSITIVE);
        w = next;
        if step <= opts.newton_tol * scale {
            return Some(w);
        }
        // Rounding can stall the last digits; accept once the step stops shrinking.
        if it > 5 && step >= last_step && step <= 1e-8 * scale {
            return Some(w);
        }
        last_step = step;
    }
    let resid = riccati_residual(m, g, eps, &w);
    if resid <= 1e-8 * (1.0 + w.max_abs()) * (1.0 + m.max_abs()) {
        debug_assert_eq!(w.rows(), n);
        Some(w)
    } else {
        None
    }
}

fn riccati_residual(m: &Mat, g: &Mat, eps: f64, w: &Mat) -> f64 {
    let wm = w * m;
    let r = &(&(&wm.transpose() + &wm) - &(&(w * g) * w)).add_diag(eps);
    r.max_abs()
}
