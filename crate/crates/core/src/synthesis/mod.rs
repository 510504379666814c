//! Formation feasibility and controller gain design.

mod formation;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use formation::{FormationError, FormationSpec, HarmonicAgent, HarmonicFormation, TabulatedFormation};

use crate::digraph::SpanningTree;
use crate::fmath;
use crate::matnum::{
    inverse, is_stabilizable, lmi_residual, solve_lmi, sym_eig, LinalgError, Mat, ABS_FLOOR,
};

#[derive(Debug, Clone, PartialEq)]
pub enum SynthesisError {
    NotStabilizable,
    DimensionMismatch(&'static str),
    Linalg(LinalgError),
}

impl fmt::Display for SynthesisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthesisError::NotStabilizable => write!(f, "system pair is not stabilizable"),
            SynthesisError::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            SynthesisError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SynthesisError {}

impl From<LinalgError> for SynthesisError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotStabilizable => SynthesisError::NotStabilizable,
            other => SynthesisError::Linalg(other),
        }
    }
}

/// Residual below which a formation counts as feasible: `1e-9·(1 + ‖A‖)`.
pub fn feasibility_threshold(a: &Mat) -> f64 {
    1e-9 * (1.0 + a.norm())
}

/// `‖(A + BK₀)g − ġ‖` maximized over the given `(g, ġ)` pairs.
fn max_residual(a: &Mat, b: &Mat, k0: &Mat, pairs: impl Iterator<Item = (Vec<f64>, Vec<f64>)>) -> f64 {
    let closed = a + &(b * k0);
    let mut worst = 0.0f64;
    for (g, gdot) in pairs {
        let r = closed.mul_vec(&g);
        let s: f64 = r.iter().zip(&gdot).map(|(x, y)| (x - y) * (x - y)).sum();
        worst = worst.max(fmath::sqrt(s));
    }
    worst
}

/// Differences `h_p − h_c` (and derivatives) across each tree edge, mapped to
/// the formation's agent labels through the tree's relabeling.
fn tree_differences<'a>(
    spec: &'a FormationSpec,
    tree: &'a SpanningTree,
    grid: &'a [f64],
) -> impl Iterator<Item = (Vec<f64>, Vec<f64>)> + 'a {
    let order = tree.order();
    grid.iter().flat_map(move |&t| {
        tree.tree_edges().map(move |(p, c)| {
            let (hp, hc) = (spec.h(order[p], t), spec.h(order[c], t));
            let (dp, dc) = (spec.hdot(order[p], t), spec.hdot(order[c], t));
            let g = hp.iter().zip(&hc).map(|(x, y)| x - y).collect();
            let gd = dp.iter().zip(&dc).map(|(x, y)| x - y).collect();
            (g, gd)
        })
    })
}

fn follower_offsets<'a>(
    spec: &'a FormationSpec,
    followers: &'a [usize],
    grid: &'a [f64],
) -> impl Iterator<Item = (Vec<f64>, Vec<f64>)> + 'a {
    grid.iter()
        .flat_map(move |&t| followers.iter().map(move |&i| (spec.h(i, t), spec.hdot(i, t))))
}

/// Largest formation-feasibility residual over tree edges and grid times.
pub fn feasibility_residual_tvf(
    a: &Mat,
    b: &Mat,
    k0: &Mat,
    spec: &FormationSpec,
    tree: &SpanningTree,
    grid: &[f64],
) -> f64 {
    max_residual(a, b, k0, tree_differences(spec, tree, grid))
}

/// Largest tracking-feasibility residual over followers and grid times.
pub fn feasibility_residual_tvft(
    a: &Mat,
    b: &Mat,
    k0: &Mat,
    spec: &FormationSpec,
    followers: &[usize],
    grid: &[f64],
) -> f64 {
    max_residual(a, b, k0, follower_offsets(spec, followers, grid))
}

/// Which offset vectors the fitted `K₀` must render feasible.
#[derive(Debug, Clone, Copy)]
pub enum FitTarget<'a> {
    /// Parent-child differences along a spanning tree.
    Tree(&'a SpanningTree),
    /// Each follower's own offset.
    Followers(&'a [usize]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct K0Fit {
    pub k0: Mat,
    /// Numerical rank of the stacked system.
    pub rank: usize,
    /// True when the system does not determine `K₀` uniquely; `k0` is then
    /// the minimum-norm least-squares solution.
    pub rank_deficient: bool,
}

/// Least-squares `K₀` for `B·K₀·g(t) = ġ(t) − A·g(t)` stacked over the grid.
pub fn fit_k0(a: &Mat, b: &Mat, spec: &FormationSpec, target: FitTarget<'_>, grid: &[f64]) -> K0Fit {
    let (n, m) = (a.rows(), b.cols());
    let unknowns = m * n;
    let mut normal = Mat::zeros(unknowns, unknowns);
    let mut rhs = vec![0.0; unknowns];
    let mut row = vec![0.0; unknowns];
    let mut accumulate = |(g, gdot): (Vec<f64>, Vec<f64>)| {
        let ag = a.mul_vec(&g);
        for r in 0..n {
            // coefficient of K₀[i][j] in row r is B[r][i]·g[j]
            for i in 0..m {
                for j in 0..n {
                    row[i * n + j] = b[(r, i)] * g[j];
                }
            }
            let target = gdot[r] - ag[r];
            for u in 0..unknowns {
                if row[u] == 0.0 {
                    continue;
                }
                rhs[u] += row[u] * target;
                for v in 0..unknowns {
                    normal[(u, v)] += row[u] * row[v];
                }
            }
        }
    };
    match target {
        FitTarget::Tree(tree) => tree_differences(spec, tree, grid).for_each(&mut accumulate),
        FitTarget::Followers(f) => follower_offsets(spec, f, grid).for_each(&mut accumulate),
    }
    let eig = sym_eig(&normal.symmetrize()).expect("normal matrix is symmetric");
    let top = eig.max().max(0.0);
    let tol = (1e-10 * top).max(ABS_FLOOR);
    let mut sol = vec![0.0; unknowns];
    let mut rank = 0;
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= tol {
            continue;
        }
        rank += 1;
        let v = eig.vectors.col(k);
        let coeff = v.iter().zip(&rhs).map(|(x, y)| x * y).sum::<f64>() / lam;
        for u in 0..unknowns {
            sol[u] += coeff * v[u];
        }
    }
    K0Fit {
        k0: Mat::from_vec(m, n, sol),
        rank,
        rank_deficient: rank < unknowns,
    }
}

/// Complete controller parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    pub k0: Mat,
    pub k1: Mat,
    pub k2: Mat,
    pub gamma: Mat,
    pub p: Mat,
    pub eta: f64,
    pub theta: f64,
    /// Uniform adaptation gain.
    pub rho: f64,
    /// Per-tree-edge override of `rho`.
    pub rho_edges: Option<Vec<f64>>,
}

/// Deviations of a [`GainSet`] from its defining formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainCheck {
    /// `max|K₂ + BᵀP⁻¹|`
    pub k2_err: f64,
    /// `max|Γ − P⁻¹BBᵀP⁻¹|`
    pub gamma_err: f64,
    /// `λ_max` of the LMI residual at `P`.
    pub lmi_max: f64,
    /// `λ_min(P)`.
    pub p_min: f64,
}

impl GainSet {
    /// `K₂ = −BᵀP⁻¹` and `Γ = P⁻¹BBᵀP⁻¹` from a given `P`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_p(k0: Mat, k1: Mat, b: &Mat, p: Mat, eta: f64, theta: f64, rho: f64) -> Result<Self, SynthesisError> {
        let pinv = inverse(&p)?.symmetrize();
        let k2 = (&b.transpose() * &pinv).scale(-1.0);
        let gamma = (&k2.transpose() * &k2).symmetrize();
        Ok(Self {
            k0,
            k1,
            k2,
            gamma,
            p,
            eta,
            theta,
            rho,
            rho_edges: None,
        })
    }

    pub fn rho_for(&self, edge: usize) -> f64 {
        self.rho_edges.as_ref().map_or(self.rho, |r| r[edge])
    }

    pub fn p_inv(&self) -> Mat {
        inverse(&self.p).expect("P is positive definite").symmetrize()
    }

    /// `A + B·K₀ + B·K₁`.
    pub fn abar(&self, a: &Mat, b: &Mat) -> Mat {
        a + &(b * &(&self.k0 + &self.k1))
    }

    pub fn check(&self, a: &Mat, b: &Mat) -> GainCheck {
        let pinv = self.p_inv();
        let k2 = (&b.transpose() * &pinv).scale(-1.0);
        let gamma = &(&pinv * &(b * &b.transpose())) * &pinv;
        let residual = lmi_residual(&self.abar(a, b), b, self.eta, self.theta, &self.p);
        GainCheck {
            k2_err: self.k2.max_abs_diff(&k2),
            gamma_err: self.gamma.max_abs_diff(&gamma),
            lmi_max: sym_eig(&residual).map(|s| s.max()).unwrap_or(f64::INFINITY),
            p_min: sym_eig(&self.p).map(|s| s.min()).unwrap_or(f64::NEG_INFINITY),
        }
    }
}

fn check_dims(a: &Mat, b: &Mat, k: &Mat) -> Result<(), SynthesisError> {
    if !a.is_square() {
        return Err(SynthesisError::DimensionMismatch("A must be square"));
    }
    if b.rows() != a.rows() {
        return Err(SynthesisError::DimensionMismatch("B must have as many rows as A"));
    }
    if k.rows() != b.cols() || k.cols() != a.rows() {
        return Err(SynthesisError::DimensionMismatch("gain rows must be inputs x states"));
    }
    Ok(())
}

/// Gains for formation control; `k1` defaults to zero.
pub fn design_tvf_gains(
    a: &Mat,
    b: &Mat,
    k0: &Mat,
    k1: Option<&Mat>,
    eta: f64,
    theta: f64,
    rho: f64,
) -> Result<GainSet, SynthesisError> {
    check_dims(a, b, k0)?;
    let k1 = k1.cloned().unwrap_or_else(|| Mat::zeros(k0.rows(), k0.cols()));
    check_dims(a, b, &k1)?;
    let abar = a + &(b * &(k0 + &k1));
    if !is_stabilizable(&abar, b)? {
        return Err(SynthesisError::NotStabilizable);
    }
    let p = solve_lmi(&abar, b, eta, theta)?;
    GainSet::from_p(k0.clone(), k1, b, p, eta, theta, rho)
}

/// Gains for formation tracking; `K₁ = −K₀` so the design matrix is `A`.
pub fn design_tvft_gains(
    a: &Mat,
    b: &Mat,
    k0: &Mat,
    eta: f64,
    theta: f64,
    rho: f64,
) -> Result<GainSet, SynthesisError> {
    check_dims(a, b, k0)?;
    if !is_stabilizable(a, b)? {
        return Err(SynthesisError::NotStabilizable);
    }
    let p = solve_lmi(a, b, eta, theta)?;
    GainSet::from_p(k0.clone(), k0.scale(-1.0), b, p, eta, theta, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn e1_spec() -> FormationSpec {
        let agents = (0..12)
            .map(|i| {
                let r = if i < 6 { 6.0 } else { 3.0 };
                HarmonicAgent::new(i as f64 * PI / 3.0, vec![r, 0.0], vec![0.0, r])
            })
            .collect();
        FormationSpec::harmonic(1.0, agents).unwrap()
    }

    fn chain_tree(n: usize) -> SpanningTree {
        SpanningTree::from_parents((0..n).map(|i| if i == 0 { None } else { Some(i - 1) }).collect()).unwrap()
    }

    fn e1_a() -> Mat {
        Mat::from_rows(&[[0.0, 1.0], [-1.0, 2.0]])
    }

    fn col(v: &[f64]) -> Mat {
        Mat::col_vec(v)
    }

    #[test]
    fn e1_feasible_with_shaping_gain() {
        let spec = e1_spec();
        let grid = spec.default_grid();
        let r = feasibility_residual_tvf(&e1_a(), &col(&[0.0, 1.0]), &Mat::row_vec(&[0.0, -2.0]), &spec, &chain_tree(12), &grid);
        assert!(r <= 1e-12, "{r}");
    }

    #[test]
    fn e1_infeasible_without_shaping_gain() {
        let spec = e1_spec();
        let r = feasibility_residual_tvf(&e1_a(), &col(&[0.0, 1.0]), &Mat::zeros(1, 2), &spec, &chain_tree(12), &[0.0]);
        assert!(r > 0.1);
    }

    #[test]
    fn identical_offsets_always_feasible() {
        let agents = (0..3)
            .map(|_| HarmonicAgent::new(0.4, vec![1.0, 2.0], vec![0.5, 0.0]))
            .collect();
        let spec = FormationSpec::harmonic(2.0, agents).unwrap();
        let r = feasibility_residual_tvf(&e1_a(), &col(&[0.0, 1.0]), &Mat::row_vec(&[5.0, 7.0]), &spec, &chain_tree(3), &spec.default_grid());
        assert_eq!(r, 0.0);
    }

    #[test]
    fn zero_offsets_trivially_track() {
        let spec = FormationSpec::zero(4, 2);
        let r = feasibility_residual_tvft(&e1_a(), &col(&[0.0, 1.0]), &Mat::row_vec(&[3.0, 1.0]), &spec, &[1, 2, 3], &spec.default_grid());
        assert_eq!(r, 0.0);
    }

    #[test]
    fn fit_recovers_e1_gain() {
        let spec = e1_spec();
        let fit = fit_k0(&e1_a(), &col(&[0.0, 1.0]), &spec, FitTarget::Tree(&chain_tree(12)), &spec.default_grid());
        assert!(!fit.rank_deficient);
        assert!(fit.k0.max_abs_diff(&Mat::row_vec(&[0.0, -2.0])) < 1e-8, "{:?}", fit.k0);
    }

    #[test]
    fn fit_constant_offsets_zero_dynamics_is_min_norm_zero() {
        let mut agent = HarmonicAgent::zero(2);
        agent.offset = vec![1.0, -2.0];
        let spec = FormationSpec::harmonic(0.0, vec![HarmonicAgent::zero(2), agent]).unwrap();
        let fit = fit_k0(&Mat::zeros(2, 2), &col(&[0.0, 1.0]), &spec, FitTarget::Followers(&[1]), &spec.default_grid());
        assert!(fit.rank_deficient);
        assert!(fit.k0.max_abs() < 1e-14);
    }

    #[test]
    fn e1_gains_from_printed_p() {
        let p = Mat::from_rows(&[[1.0 / 3.0, -1.0 / 3.0], [-1.0 / 3.0, 2.0 / 3.0]]);
        let b = col(&[0.0, 1.0]);
        let g = GainSet::from_p(Mat::row_vec(&[0.0, -2.0]), Mat::zeros(1, 2), &b, p, 2.0, 1.0, 0.1).unwrap();
        assert!(g.k2.max_abs_diff(&Mat::row_vec(&[-3.0, -3.0])) < 1e-12);
        assert!(g.gamma.max_abs_diff(&Mat::from_rows(&[[9.0, 9.0], [9.0, 9.0]])) < 1e-12);
        let c = g.check(&e1_a(), &b);
        assert!((c.lmi_max + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn e2_printed_gains_admit_an_lmi_certificate() {
        // K₂ fixes only the last row of P⁻¹; the upper block is a completion
        // found offline by minimizing the LMI's largest eigenvalue.
        let a = Mat::from_rows(&[[0.0, 1.0, 1.0], [1.0, 2.0, 1.0], [-2.0, -10.0, -3.0]]);
        let b = col(&[0.0, 0.0, 1.0]);
        let k = [2.3066, 6.8257, 2.4970];
        let p_inv = Mat::from_rows(&[[4.569, 6.1193, k[0]], [6.1193, 36.6692, k[1]], k]);
        let p = crate::matnum::inverse(&p_inv).unwrap().symmetrize();
        let g = GainSet::from_p(Mat::row_vec(&[0.0, 4.0, 0.0]), Mat::row_vec(&[0.0, -4.0, 0.0]), &b, p, 2.0, 1.0, 0.1)
            .unwrap();
        assert!(g.k2.max_abs_diff(&Mat::row_vec(&[-k[0], -k[1], -k[2]])) < 1e-9);
        let printed_gamma = Mat::from_rows(&[
            [5.3206, 15.7444, 5.7596],
            [15.7444, 46.5895, 17.0434],
            [5.7596, 17.0434, 6.2349],
        ]);
        // 4-decimal rounding of K₂ moves the products by up to ~7e-4
        assert!(g.gamma.max_abs_diff(&printed_gamma) < 1e-3);
        let c = g.check(&a, &b);
        assert!(c.p_min > 0.0);
        assert!(c.lmi_max <= 0.0, "{}", c.lmi_max);
    }

    #[test]
    fn scalar_design() {
        let g = design_tvf_gains(&Mat::from_rows(&[[0.0]]), &Mat::from_rows(&[[1.0]]), &Mat::from_rows(&[[0.0]]), None, 2.0, 1.0, 0.1)
            .unwrap();
        let c = g.check(&Mat::from_rows(&[[0.0]]), &Mat::from_rows(&[[1.0]]));
        assert!(c.k2_err < 1e-9 && c.gamma_err < 1e-9 && c.lmi_max <= 1e-9);
        assert!((g.gamma[(0, 0)] - g.k2[(0, 0)] * g.k2[(0, 0)]).abs() < 1e-12);
    }

    #[test]
    fn no_input_unstable_fails() {
        let r = design_tvf_gains(&Mat::from_rows(&[[1.0]]), &Mat::from_rows(&[[0.0]]), &Mat::from_rows(&[[0.0]]), None, 2.0, 1.0, 0.1);
        assert_eq!(r.unwrap_err(), SynthesisError::NotStabilizable);
    }

    #[test]
    fn hurwitz_without_input_designs() {
        let a = Mat::identity(2).scale(-1.0);
        let g = design_tvft_gains(&a, &Mat::zeros(2, 1), &Mat::zeros(1, 2), 2.0, 1.0, 0.1).unwrap();
        assert!(g.check(&a, &Mat::zeros(2, 1)).lmi_max <= 1e-9);
    }

    #[test]
    fn tvft_k1_is_negated_k0() {
        let a = Mat::from_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let k0 = Mat::row_vec(&[-1.0, 0.0]);
        let g = design_tvft_gains(&a, &col(&[0.0, 1.0]), &k0, 2.0, 1.0, 0.1).unwrap();
        assert_eq!(g.k1, k0.scale(-1.0));
        assert!(g.abar(&a, &col(&[0.0, 1.0])).max_abs_diff(&a) == 0.0);
    }
}
