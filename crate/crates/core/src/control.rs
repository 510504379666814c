//! Distributed formation controllers and adaptive weight laws.
//!
//! Agents keep their original labels here; tree edge `k` joins
//! `tree.original_edge(k)`. States are stacked per agent (`N·n` vectors),
//! inputs per agent (`m` entries each).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::digraph::{
    check_generalized_dst, find_dst, induce_single_leader_graph, Digraph, Edge, GraphError, LeaderPartition,
    SpanningTree,
};
use crate::matnum::Mat;
use crate::synthesis::{FormationSpec, GainSet};

#[derive(Debug, Clone, PartialEq)]
pub enum ControlError {
    DimensionMismatch { expected: usize, got: usize },
    Graph(GraphError),
}

impl fmt::Display for ControlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            ControlError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ControlError {}

impl From<GraphError> for ControlError {
    fn from(e: GraphError) -> Self {
        ControlError::Graph(e)
    }
}

/// Snapshot of all agents: stacked states `x` and formation states `d = x − h`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentFrame {
    pub t: f64,
    pub dim: usize,
    pub x: Vec<f64>,
    pub d: Vec<f64>,
}

impl AgentFrame {
    pub fn new(t: f64, dim: usize, x: Vec<f64>, spec: &FormationSpec) -> Self {
        let mut h = vec![0.0; x.len()];
        let mut hd = vec![0.0; x.len()];
        spec.eval_all(t, &mut h, &mut hd);
        let d = x.iter().zip(&h).map(|(a, b)| a - b).collect();
        Self { t, dim, x, d }
    }

    pub fn from_parts(t: f64, dim: usize, x: Vec<f64>, d: Vec<f64>) -> Result<Self, ControlError> {
        if d.len() != x.len() || !x.len().is_multiple_of(dim) {
            return Err(ControlError::DimensionMismatch {
                expected: x.len(),
                got: d.len(),
            });
        }
        Ok(Self { t, dim, x, d })
    }

    pub fn agents(&self) -> usize {
        self.x.len() / self.dim
    }

    pub fn x_i(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn d_i(&self, i: usize) -> &[f64] {
        &self.d[i * self.dim..(i + 1) * self.dim]
    }

    /// `h_i = x_i − d_i`.
    pub fn h_i(&self, i: usize) -> Vec<f64> {
        self.x_i(i).iter().zip(self.d_i(i)).map(|(a, b)| a - b).collect()
    }

    /// Formation states with the first `m` agents replaced by their raw states.
    fn tracking_d(&self, m: usize) -> Vec<f64> {
        let mut d = self.d.clone();
        d[..m * self.dim].copy_from_slice(&self.x[..m * self.dim]);
        d
    }
}

/// Coupling weights: adaptive on tree edges, fixed elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingState {
    /// One weight per tree edge, in edge order.
    pub tree_weights: Vec<f64>,
    /// Non-tree edges with their fixed weights.
    pub static_weights: Vec<Edge>,
}

impl CouplingState {
    /// Non-tree edges take their weights from `g`.
    pub fn new(g: &Digraph, tree: &SpanningTree, tree_weights: Vec<f64>) -> Self {
        let static_weights = g
            .edges()
            .iter()
            .filter(|e| !is_tree_edge(tree, e))
            .copied()
            .collect();
        Self {
            tree_weights,
            static_weights,
        }
    }

    /// Every edge of `g` at the weight it currently carries.
    pub fn as_digraph(&self, g: &Digraph, tree: &SpanningTree) -> Digraph {
        let mut edges = self.static_weights.clone();
        edges.extend(
            tree.original_edges()
                .zip(&self.tree_weights)
                .map(|((p, c), &w)| Edge::new(p, c, w)),
        );
        // the graph type rejects non-positive weights, which adaptive weights may reach
        Digraph::new(g.n(), edges.iter().map(|e| Edge::new(e.from, e.to, e.weight.abs().max(f64::MIN_POSITIVE))))
            .expect("same edge set as g")
    }
}

fn is_tree_edge(tree: &SpanningTree, e: &Edge) -> bool {
    match tree.edge_into_original(e.to) {
        Some(k) => tree.original_edge(k).0 == e.from,
        None => false,
    }
}

/// `out[i] += w·(a − b)` componentwise.
#[inline]
fn add_diff(out: &mut [f64], w: f64, a: &[f64], b: &[f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o += w * (x - y);
    }
}

/// `s_i = Σ_j α_ij (d_i − d_j)` for every node.
pub fn coupling_sums(d: &[f64], dim: usize, tree: &SpanningTree, cw: &CouplingState) -> Vec<f64> {
    let mut out = vec![0.0; d.len()];
    let seg = |i: usize| i * dim..(i + 1) * dim;
    for e in &cw.static_weights {
        let (i, j) = (e.to, e.from);
        add_diff(&mut out[seg(i)], e.weight, &d[seg(i)], &d[seg(j)]);
    }
    for (k, (p, c)) in tree.original_edges().enumerate() {
        add_diff(&mut out[seg(c)], cw.tree_weights[k], &d[seg(c)], &d[seg(p)]);
    }
    out
}

/// Stacked tree-edge errors `d̄_k = d_parent − d_child`.
pub fn edge_errors(d: &[f64], dim: usize, tree: &SpanningTree) -> Vec<f64> {
    let mut out = vec![0.0; tree.edge_count() * dim];
    for (k, (p, c)) in tree.original_edges().enumerate() {
        for s in 0..dim {
            out[k * dim + s] = d[p * dim + s] - d[c * dim + s];
        }
    }
    out
}

/// `ρ_k (d̄_k − Σ_{children} d̄_child)ᵀ Γ d̄_k` for every tree edge.
pub fn adaptive_rates(d: &[f64], dim: usize, tree: &SpanningTree, gains: &GainSet) -> Vec<f64> {
    let dbar = edge_errors(d, dim, tree);
    rates_from_edge_errors(&dbar, dim, tree, gains)
}

/// Adaptive rates from stacked edge errors.
pub fn rates_from_edge_errors(dbar: &[f64], dim: usize, tree: &SpanningTree, gains: &GainSet) -> Vec<f64> {
    let mut z = vec![0.0; dim];
    (0..tree.edge_count())
        .map(|k| {
            let own = &dbar[k * dim..(k + 1) * dim];
            z.copy_from_slice(own);
            for &c in tree.children(k + 1) {
                for s in 0..dim {
                    z[s] -= dbar[(c - 1) * dim + s];
                }
            }
            gains.rho_for(k) * gains.gamma.bilinear(&z, own)
        })
        .collect()
}

/// `u_i = K₀x_i + K₁d_i + K₂ Σ_j α_ij (d_i − d_j)` for every agent.
pub fn tvf_control(frame: &AgentFrame, gains: &GainSet, tree: &SpanningTree, cw: &CouplingState) -> Vec<f64> {
    let dim = frame.dim;
    let inputs = gains.k0.rows();
    let s = coupling_sums(&frame.d, dim, tree, cw);
    let mut u = vec![0.0; frame.agents() * inputs];
    let mut tmp = vec![0.0; inputs];
    for i in 0..frame.agents() {
        let ui = &mut u[i * inputs..(i + 1) * inputs];
        gains.k0.mul_vec_into(frame.x_i(i), ui);
        gains.k1.mul_vec_into(frame.d_i(i), &mut tmp);
        ui.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);
        gains.k2.mul_vec_into(&s[i * dim..(i + 1) * dim], &mut tmp);
        ui.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);
    }
    u
}

pub fn tvf_weight_rates(frame: &AgentFrame, tree: &SpanningTree, gains: &GainSet) -> Vec<f64> {
    adaptive_rates(&frame.d, frame.dim, tree, gains)
}

/// `K₀h_i + K₂ s_i` for agents `first..`, where `s` are coupling sums.
fn tracking_inputs(frame: &AgentFrame, gains: &GainSet, s: &[f64], first: usize, s_offset: usize) -> Vec<f64> {
    let dim = frame.dim;
    let inputs = gains.k0.rows();
    let followers = frame.agents() - first;
    let mut u = vec![0.0; followers * inputs];
    let mut tmp = vec![0.0; inputs];
    for f in 0..followers {
        let i = first + f;
        let ui = &mut u[f * inputs..(f + 1) * inputs];
        gains.k0.mul_vec_into(&frame.h_i(i), ui);
        let j = i - first + s_offset;
        gains.k2.mul_vec_into(&s[j * dim..(j + 1) * dim], &mut tmp);
        ui.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);
    }
    u
}

/// Follower inputs `u_i = K₀h_i + K₂ Σ_j α_ij (d_i − d_j)` with the leader
/// (agent 0) entering through its raw state. Returns inputs for agents `1..N`.
pub fn tvft_single_control(frame: &AgentFrame, gains: &GainSet, tree: &SpanningTree, cw: &CouplingState) -> Vec<f64> {
    let d = frame.tracking_d(1);
    let s = coupling_sums(&d, frame.dim, tree, cw);
    tracking_inputs(frame, gains, &s, 1, 1)
}

pub fn tvft_single_weight_rates(frame: &AgentFrame, tree: &SpanningTree, gains: &GainSet) -> Vec<f64> {
    adaptive_rates(&frame.tracking_d(1), frame.dim, tree, gains)
}

/// Single-leader surrogate of a multi-leader network.
///
/// Node 0 is the joint leader with state `Σ β_l x_l`; node `j ≥ 1` is
/// follower `j + m − 1` of the original network.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliarySystem {
    pub part: LeaderPartition,
    pub graph: Digraph,
    pub tree: SpanningTree,
}

impl AuxiliarySystem {
    pub fn new(g: &Digraph, part: &LeaderPartition) -> Result<Self, ControlError> {
        let check = check_generalized_dst(g, part);
        if !check.holds {
            return Err(GraphError::AssumptionViolated {
                witness: check.witness(),
            }
            .into());
        }
        let graph = induce_single_leader_graph(g, part)?;
        let tree = find_dst(&graph, Some(0))?;
        if tree.order()[0] != 0 {
            return Err(GraphError::NoDst.into());
        }
        Ok(Self {
            part: part.clone(),
            graph,
            tree,
        })
    }

    pub fn nodes(&self) -> usize {
        self.graph.n()
    }

    /// Auxiliary states `y` and formation states `d′` (the joint leader has
    /// zero offset).
    pub fn states(&self, frame: &AgentFrame) -> (Vec<f64>, Vec<f64>) {
        let (dim, m) = (frame.dim, self.part.m());
        let mut y = vec![0.0; self.nodes() * dim];
        for (l, &b) in self.part.beta().iter().enumerate() {
            for s in 0..dim {
                y[s] += b * frame.x[l * dim + s];
            }
        }
        y[dim..].copy_from_slice(&frame.x[m * dim..]);
        let mut dp = y.clone();
        dp[dim..].copy_from_slice(&frame.d[m * dim..]);
        (y, dp)
    }
}

/// Follower inputs for a multi-leader network via its auxiliary system.
/// Returns inputs for agents `m..N`.
pub fn tvft_multi_control(frame: &AgentFrame, gains: &GainSet, aux: &AuxiliarySystem, cw: &CouplingState) -> Vec<f64> {
    let (_, dp) = aux.states(frame);
    let s = coupling_sums(&dp, frame.dim, &aux.tree, cw);
    tracking_inputs(frame, gains, &s, aux.part.m(), 1)
}

pub fn tvft_multi_weight_rates(frame: &AgentFrame, aux: &AuxiliarySystem, gains: &GainSet) -> Vec<f64> {
    let (_, dp) = aux.states(frame);
    adaptive_rates(&dp, frame.dim, &aux.tree, gains)
}

/// Per-follower adaptive gains of the node-based baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineState {
    pub c: Vec<f64>,
}

impl BaselineState {
    pub fn uniform(followers: usize, c0: f64) -> Self {
        Self { c: vec![c0; followers] }
    }
}

/// Node-adaptive baseline for a single leader (agent 0):
/// `u_i = K₀h_i + K₂ (c_i + ξ_iᵀP⁻¹ξ_i) ξ_i`, `ċ_i = ξ_iᵀΓξ_i`,
/// `ξ_i = Σ_j a_ij (d_i − d_j)` with `a_ij` the weights of `weights`.
/// Returns follower inputs and `ċ`.
pub fn baseline_node_adaptive(
    frame: &AgentFrame,
    gains: &GainSet,
    weights: &Digraph,
    bs: &BaselineState,
    p_inv: &Mat,
) -> (Vec<f64>, Vec<f64>) {
    let dim = frame.dim;
    let inputs = gains.k0.rows();
    let d = frame.tracking_d(1);
    let followers = frame.agents() - 1;
    let mut u = vec![0.0; followers * inputs];
    let mut rates = vec![0.0; followers];
    let mut xi = vec![0.0; dim];
    let mut tmp = vec![0.0; inputs];
    for f in 0..followers {
        let i = f + 1;
        xi.fill(0.0);
        for e in weights.in_edges(i) {
            add_diff(&mut xi, e.weight, &d[i * dim..(i + 1) * dim], &d[e.from * dim..(e.from + 1) * dim]);
        }
        let gain = bs.c[f] + p_inv.bilinear(&xi, &xi);
        let ui = &mut u[f * inputs..(f + 1) * inputs];
        gains.k0.mul_vec_into(&frame.h_i(i), ui);
        gains.k2.mul_vec_into(&xi, &mut tmp);
        ui.iter_mut().zip(&tmp).for_each(|(a, b)| *a += gain * b);
        rates[f] = gains.gamma.bilinear(&xi, &xi);
    }
    (u, rates)
}

/// Which adaptive law a network runs; the frozen-weight baseline uses the same
/// controllers with zero weight rates.
#[derive(Debug, Clone, PartialEq)]
pub enum Network {
    Formation { graph: Digraph, tree: SpanningTree },
    SingleLeader { graph: Digraph, tree: SpanningTree },
    MultiLeader { graph: Digraph, aux: AuxiliarySystem },
}

impl Network {
    pub fn graph(&self) -> &Digraph {
        match self {
            Network::Formation { graph, .. } | Network::SingleLeader { graph, .. } | Network::MultiLeader { graph, .. } => graph,
        }
    }

    /// Tree carrying the adaptive weights (on the auxiliary graph for several leaders).
    pub fn tree(&self) -> &SpanningTree {
        match self {
            Network::Formation { tree, .. } | Network::SingleLeader { tree, .. } => tree,
            Network::MultiLeader { aux, .. } => &aux.tree,
        }
    }

    /// Graph that the tree spans.
    pub fn coupling_graph(&self) -> &Digraph {
        match self {
            Network::Formation { graph, .. } | Network::SingleLeader { graph, .. } => graph,
            Network::MultiLeader { aux, .. } => &aux.graph,
        }
    }

    /// Number of leaders (0 for leaderless formation).
    pub fn leaders(&self) -> usize {
        match self {
            Network::Formation { .. } => 0,
            Network::SingleLeader { .. } => 1,
            Network::MultiLeader { aux, .. } => aux.part.m(),
        }
    }

    /// Inputs for the controlled agents (all agents, or the followers).
    pub fn control(&self, frame: &AgentFrame, gains: &GainSet, cw: &CouplingState) -> Vec<f64> {
        match self {
            Network::Formation { tree, .. } => tvf_control(frame, gains, tree, cw),
            Network::SingleLeader { tree, .. } => tvft_single_control(frame, gains, tree, cw),
            Network::MultiLeader { aux, .. } => tvft_multi_control(frame, gains, aux, cw),
        }
    }

    pub fn weight_rates(&self, frame: &AgentFrame, gains: &GainSet) -> Vec<f64> {
        match self {
            Network::Formation { tree, .. } => tvf_weight_rates(frame, tree, gains),
            Network::SingleLeader { tree, .. } => tvft_single_weight_rates(frame, tree, gains),
            Network::MultiLeader { aux, .. } => tvft_multi_weight_rates(frame, aux, gains),
        }
    }

    /// Stacked states the adaptive law acts on: `d`, `d` with leader states,
    /// or the auxiliary `d′`.
    pub fn coupled_states(&self, frame: &AgentFrame) -> Vec<f64> {
        match self {
            Network::Formation { .. } => frame.d.clone(),
            Network::SingleLeader { .. } => frame.tracking_d(1),
            Network::MultiLeader { aux, .. } => aux.states(frame).1,
        }
    }
}

/// Controller output with every weight held at `frozen`.
pub fn baseline_static_control(frame: &AgentFrame, gains: &GainSet, net: &Network, frozen: &CouplingState) -> Vec<f64> {
    net.control(frame, gains, frozen)
}
