//! Reduced-order graph algebra on a directed spanning tree.
//!
//! All functions expect the graph in the tree's labels (root = 0, parents
//! before children); use [`Digraph::relabel`] with [`SpanningTree::order`].
//! Tree edge `k` enters node `k + 1` from `p_k = tree.edge_parent(k)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::digraph::{laplacian, Digraph, Edge, SpanningTree};
use crate::matnum::{lu_solve, sym_eig, Mat};

#[derive(Debug, Clone, PartialEq)]
pub enum TreeAlgError {
    /// The tree uses an edge the graph does not have.
    TreeEdgeMissing { parent: usize, child: usize },
    DimensionMismatch { expected: usize, got: usize },
    /// An algebraic identity failed; signals an indexing bug.
    IdentityViolation { which: &'static str, residual: f64 },
}

impl fmt::Display for TreeAlgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeAlgError::TreeEdgeMissing { parent, child } => {
                write!(f, "tree edge {parent}->{child} is not an edge of the graph")
            }
            TreeAlgError::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected} tree weights, got {got}")
            }
            TreeAlgError::IdentityViolation { which, residual } => {
                write!(f, "identity {which} violated with residual {residual:e}")
            }
        }
    }
}

impl core::error::Error for TreeAlgError {}

/// `(n−1)×n` edge-difference operator: row `k` is `e_{p_k} − e_{k+1}`.
pub fn build_xi(tree: &SpanningTree) -> Mat {
    let n = tree.n();
    let mut xi = Mat::zeros(n - 1, n);
    for (k, (p, c)) in tree.tree_edges().enumerate() {
        xi[(k, c)] = -1.0;
        xi[(k, p)] = 1.0;
    }
    xi
}

/// `n×(n−1)` 0/1 matrix with `J[i][k] = 0` iff `i` lies in the subtree of `k + 1`.
pub fn build_j(tree: &SpanningTree) -> Mat {
    let n = tree.n();
    Mat::from_fn(n, n - 1, |i, k| if tree.in_subtree(i, k + 1) { 0.0 } else { 1.0 })
}

/// Laplacian of the non-tree edges only.
pub fn nontree_laplacian(g: &Digraph, tree: &SpanningTree) -> Mat {
    let edges = g
        .edges()
        .iter()
        .filter(|e| tree.parent(e.to) != Some(e.from))
        .copied();
    laplacian(&Digraph::new(g.n(), edges).expect("subgraph of a valid graph"))
}

/// Laplacian of the tree edges carrying `weights` (indexed by edge).
pub fn tree_laplacian(tree: &SpanningTree, weights: &[f64]) -> Mat {
    let n = tree.n();
    let mut l = Mat::zeros(n, n);
    for (k, (p, c)) in tree.tree_edges().enumerate() {
        l[(c, p)] -= weights[k];
        l[(c, c)] += weights[k];
    }
    l
}

/// `Q̃[k][j] = Σ_{c ∈ subtree(j+1)} (L̃[k+1][c] − L̃[p_k][c])`.
pub fn qtilde_from(tree: &SpanningTree, ltilde: &Mat) -> Mat {
    let n = tree.n();
    let mut q = Mat::zeros(n - 1, n - 1);
    for k in 0..n - 1 {
        let (child, parent) = (k + 1, tree.edge_parent(k));
        for j in 0..n - 1 {
            let mut s = 0.0;
            for c in (0..n).filter(|&c| tree.in_subtree(c, j + 1)) {
                s += ltilde[(child, c)] - ltilde[(parent, c)];
            }
            q[(k, j)] = s;
        }
    }
    q
}

/// Tree part of `Q`: `ā_k` on the diagonal and `−ā_{p_k − 1}` at column
/// `p_k − 1` whenever the parent is not the root.
pub fn qbar_from(tree: &SpanningTree, weights: &[f64]) -> Mat {
    let n = tree.n();
    let mut q = Mat::zeros(n - 1, n - 1);
    qbar_into(tree, weights, &mut q);
    q
}

/// As [`qbar_from`], writing into a preallocated `(n−1)×(n−1)` matrix.
pub fn qbar_into(tree: &SpanningTree, weights: &[f64], q: &mut Mat) {
    q.as_mut_slice().fill(0.0);
    for k in 0..tree.edge_count() {
        q[(k, k)] = weights[k];
        let p = tree.edge_parent(k);
        if p > 0 {
            q[(k, p - 1)] = -weights[p - 1];
        }
    }
}

/// Weights of the tree edges as stored in `g`, `0` for missing edges.
pub fn graph_tree_weights(g: &Digraph, tree: &SpanningTree) -> Vec<f64> {
    tree.tree_edges()
        .map(|(p, c)| g.weight(p, c).unwrap_or(0.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeMatrices {
    pub xi: Mat,
    pub j: Mat,
    pub qtilde: Mat,
    pub qbar: Mat,
    pub q: Mat,
}

/// Builds `Ξ`, `J`, `Q̃`, `Q̄` and `Q` for the graph with its tree edges
/// carrying `tree_weights`, and checks `ΞL = QΞ` and `Q = ΞLJ`.
pub fn build_q(g: &Digraph, tree: &SpanningTree, tree_weights: &[f64]) -> Result<TreeMatrices, TreeAlgError> {
    if tree_weights.len() != tree.edge_count() {
        return Err(TreeAlgError::DimensionMismatch {
            expected: tree.edge_count(),
            got: tree_weights.len(),
        });
    }
    for (p, c) in tree.tree_edges() {
        if !g.has_edge(p, c) {
            return Err(TreeAlgError::TreeEdgeMissing { parent: p, child: c });
        }
    }
    let xi = build_xi(tree);
    let j = build_j(tree);
    let ltilde = nontree_laplacian(g, tree);
    let l = &ltilde + &tree_laplacian(tree, tree_weights);
    let qtilde = qtilde_from(tree, &ltilde);
    let qbar = qbar_from(tree, tree_weights);
    let q = &qtilde + &qbar;

    let tol = 1e-10 * l.max_abs().max(1.0);
    let r1 = (&xi * &l).max_abs_diff(&(&q * &xi));
    if r1 > tol {
        return Err(TreeAlgError::IdentityViolation {
            which: "XiL = QXi",
            residual: r1,
        });
    }
    let r2 = q.max_abs_diff(&(&(&xi * &l) * &j));
    if r2 > tol {
        return Err(TreeAlgError::IdentityViolation {
            which: "Q = XiLJ",
            residual: r2,
        });
    }
    Ok(TreeMatrices { xi, j, qtilde, qbar, q })
}

/// Max-entry residuals of the four tree identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `L − L·J·Ξ`
    pub l_eq_ljxi: f64,
    /// `Q − Ξ·L·J`
    pub q_eq_xilj: f64,
    /// `Ξ·L − Q·Ξ`
    pub xil_eq_qxi: f64,
    /// `Q̄ − Ξ·L̄·J`
    pub qbar_eq_xilbarj: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.l_eq_ljxi
            .max(self.q_eq_xilj)
            .max(self.xil_eq_qxi)
            .max(self.qbar_eq_xilbarj)
    }
}

/// Evaluates every identity without asserting; the tree edges take their
/// weights from `g` (zero where the graph lacks the edge).
pub fn verify_identities(g: &Digraph, tree: &SpanningTree) -> IdentityResiduals {
    let weights = graph_tree_weights(g, tree);
    let xi = build_xi(tree);
    let j = build_j(tree);
    let l = laplacian(g);
    let lbar = tree_laplacian(tree, &weights);
    let ltilde = &l - &lbar;
    let qbar = qbar_from(tree, &weights);
    let q = &qtilde_from(tree, &ltilde) + &qbar;
    let xil = &xi * &l;
    IdentityResiduals {
        l_eq_ljxi: l.max_abs_diff(&(&(&l * &j) * &xi)),
        q_eq_xilj: q.max_abs_diff(&(&xil * &j)),
        xil_eq_qxi: xil.max_abs_diff(&(&q * &xi)),
        qbar_eq_xilbarj: qbar.max_abs_diff(&(&(&xi * &lbar) * &j)),
    }
}

/// Comparison matrix with `Φ[k][k] = φ_k` and `Φ[k][p_k − 1] = −φ_{p_k − 1}`.
pub fn phi_matrix(tree: &SpanningTree, phi: &[f64]) -> Mat {
    qbar_from(tree, phi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiDesign {
    /// One positive constant per tree edge.
    pub phi: Vec<f64>,
    pub phi_matrix: Mat,
    /// `λ_min(Q̃ + Q̃ᵀ + Φ + Φᵀ)`.
    pub margin: f64,
}

/// Slack factor over the strict Schur-complement bound.
const PHI_SLACK: f64 = 1.1;

/// Chooses `φ` so that every leading block of `Φ + Φᵀ` is positive definite
/// and `λ_min(Q̃ + Q̃ᵀ + Φ + Φᵀ) ≥ η`.
///
/// Edge by edge, the new diagonal entry `2φ_k` must exceed `vᵀ Ψ⁻¹ v`, where
/// `Ψ` is the block built so far and `v` its coupling column (nonzero only
/// at the parent's edge). `φ_k` takes that exact Schur term with a 10% slack,
/// floored at 1. Bounding the term through `λ_min(Ψ)` and the sum of all
/// previous `φ²` instead squares the values at every level and overflows on
/// trees only ten levels deep. A final uniform scale lifts the margin to `η`.
pub fn construct_phi(tree: &SpanningTree, qtilde: &Mat, eta: f64) -> PhiDesign {
    let edges = tree.edge_count();
    assert!(edges >= 1, "need at least two nodes");
    assert_eq!(qtilde.rows(), edges);
    let mut phi = vec![1.0; edges];
    for k in 1..edges {
        let p = tree.edge_parent(k);
        if p == 0 {
            continue;
        }
        let sym = phi_sym(tree, &phi);
        let psi = sym.block(0, 0, k, k);
        let mut e = Mat::zeros(k, 1);
        e[(p - 1, 0)] = 1.0;
        let col = lu_solve(&psi, &e).expect("leading block is positive definite");
        let schur = phi[p - 1] * phi[p - 1] * col[(p - 1, 0)];
        phi[k] = (PHI_SLACK * schur / 2.0).max(1.0);
    }
    let qsym = qtilde + &qtilde.transpose();
    let lam_q = sym_eig(&qsym).expect("symmetric by construction").min();
    let lam_phi = sym_eig(&phi_sym(tree, &phi)).expect("symmetric by construction").min();
    let mut scale = ((eta - lam_q) / lam_phi).max(1.0);
    loop {
        let scaled: Vec<f64> = phi.iter().map(|v| v * scale).collect();
        let total = &qsym + &phi_sym(tree, &scaled);
        let margin = sym_eig(&total).expect("symmetric by construction").min();
        if margin >= eta {
            return PhiDesign {
                phi_matrix: phi_matrix(tree, &scaled),
                phi: scaled,
                margin,
            };
        }
        // rounding left the margin a hair short
        scale *= 1.0 + 1e-9;
    }
}

/// `Φ + Φᵀ`.
fn phi_sym(tree: &SpanningTree, phi: &[f64]) -> Mat {
    let m = phi_matrix(tree, phi);
    &m + &m.transpose()
}

/// Rebuilds a graph from tree edges with `weights` plus `extra` edges.
pub fn tree_plus_edges(tree: &SpanningTree, weights: &[f64], extra: &[Edge]) -> Digraph {
    let mut edges: Vec<Edge> = tree
        .tree_edges()
        .enumerate()
        .map(|(k, (p, c))| Edge::new(p, c, weights[k]))
        .collect();
    edges.extend_from_slice(extra);
    Digraph::new(tree.n(), edges).expect("valid tree plus extra edges")
}
