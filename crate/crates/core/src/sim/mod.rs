//! Closed-loop simulation, the reduced edge-error system, and run metrics.

mod metrics;
mod rk4;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use metrics::{
    lyapunov_value, metric_tvf_error, metric_tvft_error, xi_error, V1Report, V1_TOLERANCE,
};
pub use rk4::{rk4_step, Rk4};

use crate::control::{
    baseline_node_adaptive, edge_errors, rates_from_edge_errors, AgentFrame, AuxiliarySystem, BaselineState,
    ControlError, CouplingState, Network,
};
use crate::digraph::{find_dst, Digraph, Edge, GraphError, LeaderPartition, SpanningTree};
use crate::fmath;
use crate::matnum::Mat;
use crate::rng::SplitMix64;
use crate::synthesis::{
    feasibility_residual_tvf, feasibility_residual_tvft, feasibility_threshold, FormationSpec, GainSet,
};
use crate::treealg::{construct_phi, nontree_laplacian, qbar_into, qtilde_from, PhiDesign};

/// State magnitude beyond which a run counts as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    NonFiniteState { t: f64 },
    Graph(GraphError),
    Control(ControlError),
    Config(&'static str),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::NonFiniteState { t } => write!(f, "state became non-finite at t = {t}"),
            SimError::Graph(e) => write!(f, "{e}"),
            SimError::Control(e) => write!(f, "{e}"),
            SimError::Config(why) => write!(f, "invalid scenario: {why}"),
        }
    }
}

impl core::error::Error for SimError {}

impl From<GraphError> for SimError {
    fn from(e: GraphError) -> Self {
        SimError::Graph(e)
    }
}

impl From<ControlError> for SimError {
    fn from(e: ControlError) -> Self {
        SimError::Control(e)
    }
}

/// How coupling weights evolve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    /// Tree weights follow the adaptive law; other edges stay fixed.
    Adaptive,
    /// Every weight stays at its initial value.
    Frozen,
    /// Node-based adaptive gains (single leader only), starting at `c0`. The
    /// graph's own edge weights serve as the fixed neighbour weights.
    NodeAdaptive { c0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightInit {
    /// Every coupling weight drawn uniformly from `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// Weights taken from the graph.
    FromGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub dt: f64,
    pub horizon: f64,
    pub output_stride: f64,
    pub seed: u64,
    /// Standard deviation of the random initial states.
    pub init_std: f64,
    pub weight_init: WeightInit,
    /// Initial states of the leaders, in leader order.
    pub leader_initials: Vec<Vec<f64>>,
    pub monitor_v1: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 50.0,
            output_stride: 0.01,
            seed: 1,
            init_std: 5.0,
            weight_init: WeightInit::Uniform { lo: 0.0, hi: 0.1 },
            leader_initials: Vec::new(),
            monitor_v1: true,
        }
    }
}

/// Everything needed to run one closed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub a: Mat,
    pub b: Mat,
    pub graph: Digraph,
    /// `None` for leaderless formation.
    pub leaders: Option<LeaderPartition>,
    pub formation: FormationSpec,
    pub gains: GainSet,
    pub law: Law,
    pub run: RunSettings,
}

/// Derived structure of a validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub network: Network,
    pub feasibility_residual: f64,
    pub feasible: bool,
    pub steps: usize,
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConditions {
    pub x: Vec<f64>,
    pub coupling: CouplingState,
}

impl Scenario {
    pub fn agents(&self) -> usize {
        self.graph.n()
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn leader_count(&self) -> usize {
        self.leaders.as_ref().map_or(0, |p| p.m())
    }

    /// Validates dimensions and graph assumptions and builds the network.
    pub fn prepare(&self) -> Result<Prepared, SimError> {
        let (n, inputs) = (self.dim(), self.b.cols());
        if !self.a.is_square() || self.b.rows() != n {
            return Err(SimError::Config("A must be square and B must match its rows"));
        }
        for k in [&self.gains.k0, &self.gains.k1, &self.gains.k2] {
            if k.rows() != inputs || k.cols() != n {
                return Err(SimError::Config("gain matrices must be inputs x states"));
            }
        }
        if self.formation.dim() != n || self.formation.agents() != self.agents() {
            return Err(SimError::Config("formation must give one offset per agent with the state dimension"));
        }
        let r = &self.run;
        if !(r.dt > 0.0 && r.horizon > 0.0 && r.output_stride >= r.dt) {
            return Err(SimError::Config("dt, horizon and output stride must be positive with stride >= dt"));
        }
        let stride = fmath::round(r.output_stride / r.dt) as usize;
        if (stride as f64 * r.dt - r.output_stride).abs() > 1e-9 * r.output_stride {
            return Err(SimError::Config("output stride must be a multiple of dt"));
        }
        let steps = fmath::round(r.horizon / r.dt) as usize;
        let m = self.leader_count();
        if r.leader_initials.len() != m || r.leader_initials.iter().any(|x| x.len() != n) {
            return Err(SimError::Config("one initial state per leader is required"));
        }

        let grid = self.formation.default_grid();
        let (network, residual) = match &self.leaders {
            None => {
                let tree = find_dst(&self.graph, Some(0))?;
                let res = feasibility_residual_tvf(&self.a, &self.b, &self.gains.k0, &self.formation, &tree, &grid);
                (
                    Network::Formation {
                        graph: self.graph.clone(),
                        tree,
                    },
                    res,
                )
            }
            Some(part) => {
                part.validate(&self.graph)?;
                let followers: Vec<usize> = (m..self.agents()).collect();
                let res = feasibility_residual_tvft(&self.a, &self.b, &self.gains.k0, &self.formation, &followers, &grid);
                let net = if m == 1 {
                    let tree = find_dst(&self.graph, Some(0))?;
                    if tree.order()[0] != 0 {
                        return Err(GraphError::NoDst.into());
                    }
                    Network::SingleLeader {
                        graph: self.graph.clone(),
                        tree,
                    }
                } else {
                    Network::MultiLeader {
                        graph: self.graph.clone(),
                        aux: AuxiliarySystem::new(&self.graph, part)?,
                    }
                };
                (net, res)
            }
        };
        if matches!(self.law, Law::NodeAdaptive { .. }) && !matches!(network, Network::SingleLeader { .. }) {
            return Err(SimError::Config("the node-adaptive baseline needs exactly one leader"));
        }
        Ok(Prepared {
            network,
            feasible: residual <= feasibility_threshold(&self.a),
            feasibility_residual: residual,
            steps,
            stride,
        })
    }

    /// Seeded initial states and weights.
    ///
    /// Draw order: non-leader agents in index order, `n` Gaussian components
    /// each; then tree-edge weights in edge order; then the remaining edges of
    /// the coupling graph sorted by `(to, from)`.
    pub fn initial_conditions(&self, prep: &Prepared) -> InitialConditions {
        let (n, m) = (self.dim(), self.leader_count());
        let mut rng = SplitMix64::new(self.run.seed);
        let mut x = Vec::with_capacity(self.agents() * n);
        for i in 0..self.agents() {
            if i < m {
                x.extend_from_slice(&self.run.leader_initials[i]);
            } else {
                for _ in 0..n {
                    x.push(rng.normal(0.0, self.run.init_std));
                }
            }
        }
        let cg = prep.network.coupling_graph();
        let tree = prep.network.tree();
        let mut coupling = CouplingState::new(cg, tree, crate::treealg::graph_tree_weights(&cg.relabel(tree.order()), tree));
        if let WeightInit::Uniform { lo, hi } = self.run.weight_init {
            for w in coupling.tree_weights.iter_mut() {
                *w = rng.uniform(lo, hi);
            }
            for e in coupling.static_weights.iter_mut() {
                e.weight = rng.uniform(lo, hi);
            }
        }
        InitialConditions { x, coupling }
    }
}

/// `φ` for the Lyapunov monitor, from the fixed non-tree weights.
pub fn phi_for(tree: &SpanningTree, coupling: &CouplingState, eta: f64) -> PhiDesign {
    let qtilde = qtilde_in_tree_labels(tree, &coupling.static_weights);
    construct_phi(tree, &qtilde, eta)
}

fn qtilde_in_tree_labels(tree: &SpanningTree, static_weights: &[Edge]) -> Mat {
    let mut edges: Vec<Edge> = static_weights.to_vec();
    edges.extend(tree.original_edges().map(|(p, c)| Edge::new(p, c, 1.0)));
    let g = Digraph::new(tree.n(), edges).expect("tree plus static edges form a valid graph");
    let rg = g.relabel(tree.order());
    qtilde_from(tree, &nontree_laplacian(&rg, tree))
}

/// Time-indexed record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub dim: usize,
    pub agents: usize,
    pub leaders: usize,
    pub times: Vec<f64>,
    /// Stacked agent states per sample.
    pub states: Vec<Vec<f64>>,
    /// Tree weights per sample (constant for the frozen baseline, empty for
    /// the node-adaptive one).
    pub weights: Vec<Vec<f64>>,
    /// Node-adaptive gains per sample (empty otherwise).
    pub node_gains: Vec<Vec<f64>>,
    /// Stacked tree-edge errors per sample.
    pub dbar: Vec<Vec<f64>>,
    pub error: Vec<f64>,
    pub xi_err: Vec<f64>,
    pub v1: Option<Vec<f64>>,
    /// Largest single-step rise of `V₁`, relative to `V₁(0)`.
    pub v1_step_worst_rise: Option<f64>,
    /// Tree edges as `(child, parent)`, 0-based labels of the coupling graph.
    pub edge_labels: Vec<(usize, usize)>,
    pub diverged: bool,
    pub divergence_time: Option<f64>,
    pub feasibility_residual: f64,
}

impl SimTrace {
    pub fn final_error(&self) -> f64 {
        self.error.last().copied().unwrap_or(f64::NAN)
    }

    /// Largest weight magnitude over the run.
    pub fn max_weight(&self) -> f64 {
        self.weights
            .iter()
            .flatten()
            .chain(self.node_gains.iter().flatten())
            .fold(0.0f64, |m, w| m.max(w.abs()))
    }

    /// Largest change of any weight over the final `fraction` of the run.
    pub fn late_weight_variation(&self, fraction: f64) -> f64 {
        let Some(&t_end) = self.times.last() else {
            return 0.0;
        };
        let start = t_end * (1.0 - fraction);
        let series = if self.weights.first().is_some_and(|w| !w.is_empty()) {
            &self.weights
        } else {
            &self.node_gains
        };
        let late: Vec<&Vec<f64>> = self
            .times
            .iter()
            .zip(series)
            .filter(|(t, _)| **t >= start - 1e-12)
            .map(|(_, w)| w)
            .collect();
        let Some(first) = late.first() else {
            return 0.0;
        };
        (0..first.len())
            .map(|k| {
                let (lo, hi) = late
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| (lo.min(w[k]), hi.max(w[k])));
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// Weights bounded by `1e3` and varying by at most `1e-3` over the last 10%.
    pub fn settled(&self) -> bool {
        !self.diverged && self.max_weight() < 1e3 && self.late_weight_variation(0.1) <= 1e-3
    }

    pub fn v1_report(&self) -> Option<V1Report> {
        self.v1.clone().map(V1Report::from_values)
    }

    /// Earliest sample time after which the error stays at or below `threshold`.
    pub fn time_to_threshold(&self, threshold: f64) -> Option<f64> {
        if self.diverged || self.final_error() > threshold {
            return None;
        }
        let last_above = self.error.iter().rposition(|&e| e > threshold);
        Some(match last_above {
            None => self.times[0],
            Some(k) => self.times[k + 1],
        })
    }
}

/// Integrates the scenario from seeded initial conditions.
pub fn run_scenario(scenario: &Scenario) -> Result<SimTrace, SimError> {
    let prep = scenario.prepare()?;
    let ic = scenario.initial_conditions(&prep);
    run_prepared(scenario, &prep, ic)
}

/// Integrates the scenario from the given initial conditions.
pub fn run_prepared(scenario: &Scenario, prep: &Prepared, ic: InitialConditions) -> Result<SimTrace, SimError> {
    let (dim, agents) = (scenario.dim(), scenario.agents());
    let net = &prep.network;
    let tree = net.tree();
    let leaders = net.leaders();
    let gains = &scenario.gains;
    let inputs = scenario.b.cols();
    let nx = agents * dim;
    let edges = tree.edge_count();
    if ic.x.len() != nx || ic.coupling.tree_weights.len() != edges {
        return Err(SimError::Config("initial conditions do not match the scenario"));
    }

    let adaptive = matches!(scenario.law, Law::Adaptive);
    let node_c0 = match scenario.law {
        Law::NodeAdaptive { c0 } => Some(c0),
        _ => None,
    };
    let followers = agents - leaders;
    let mut state = ic.x.clone();
    if adaptive {
        state.extend_from_slice(&ic.coupling.tree_weights);
    }
    if let Some(c0) = node_c0 {
        state.extend(core::iter::repeat_n(c0, followers));
    }
    let node_weights = net.coupling_graph();
    let p_inv = gains.p_inv();
    let rho: Vec<f64> = (0..edges).map(|k| gains.rho_for(k)).collect();

    let monitor = scenario.run.monitor_v1 && prep.feasible && node_c0.is_none() && edges > 0;
    let phi = monitor.then(|| phi_for(tree, &ic.coupling, gains.eta));

    let formation = &scenario.formation;
    let (a, b) = (&scenario.a, &scenario.b);
    let mut coupling = ic.coupling.clone();
    let mut h = vec![0.0; nx];
    let mut hd = vec![0.0; nx];
    let mut deriv = |t: f64, s: &[f64], out: &mut [f64]| {
        formation.eval_all(t, &mut h, &mut hd);
        let x = &s[..nx];
        let d: Vec<f64> = x.iter().zip(&h).map(|(p, q)| p - q).collect();
        let frame = AgentFrame {
            t,
            dim,
            x: x.to_vec(),
            d,
        };
        let u = if node_c0.is_some() {
            let bs = BaselineState {
                c: s[nx..nx + followers].to_vec(),
            };
            let (u, rates) = baseline_node_adaptive(&frame, gains, node_weights, &bs, &p_inv);
            out[nx..nx + followers].copy_from_slice(&rates);
            u
        } else {
            if adaptive {
                coupling.tree_weights.copy_from_slice(&s[nx..nx + edges]);
                let rates = net.weight_rates(&frame, gains);
                out[nx..nx + edges].copy_from_slice(&rates);
            }
            net.control(&frame, gains, &coupling)
        };
        let first = if matches!(net, Network::Formation { .. }) { 0 } else { leaders };
        for i in 0..agents {
            let xi = &x[i * dim..(i + 1) * dim];
            let oi = &mut out[i * dim..(i + 1) * dim];
            a.mul_vec_into(xi, oi);
            if i >= first {
                let ui = &u[(i - first) * inputs..(i - first + 1) * inputs];
                for r in 0..dim {
                    oi[r] += (0..inputs).map(|c| b[(r, c)] * ui[c]).sum::<f64>();
                }
            }
        }
    };

    let mut trace = SimTrace {
        dim,
        agents,
        leaders,
        times: Vec::new(),
        states: Vec::new(),
        weights: Vec::new(),
        node_gains: Vec::new(),
        dbar: Vec::new(),
        error: Vec::new(),
        xi_err: Vec::new(),
        v1: phi.as_ref().map(|_| Vec::new()),
        v1_step_worst_rise: None,
        edge_labels: tree.original_edges().map(|(p, c)| (c, p)).collect(),
        diverged: false,
        divergence_time: None,
        feasibility_residual: prep.feasibility_residual,
    };

    let observe = |t: f64, s: &[f64]| -> (AgentFrame, Vec<f64>, Vec<f64>) {
        let frame = AgentFrame::new(t, dim, s[..nx].to_vec(), formation);
        let coupled = net.coupled_states(&frame);
        let dbar = edge_errors(&coupled, dim, tree);
        let weights = if adaptive {
            s[nx..nx + edges].to_vec()
        } else if node_c0.is_some() {
            Vec::new()
        } else {
            ic.coupling.tree_weights.clone()
        };
        (frame, dbar, weights)
    };
    let v1_of = |dbar: &[f64], weights: &[f64]| -> Option<f64> {
        phi.as_ref()
            .map(|ph| lyapunov_value(dbar, dim, weights, &p_inv, &ph.phi, &rho))
    };
    let record = |trace: &mut SimTrace, t: f64, s: &[f64]| -> Option<f64> {
        let (frame, dbar, weights) = observe(t, s);
        let e = match &scenario.leaders {
            None => metric_tvf_error(&frame),
            Some(part) => metric_tvft_error(&frame, part),
        };
        let v = v1_of(&dbar, &weights);
        trace.times.push(t);
        trace.error.push(e);
        trace.xi_err.push(fmath::sqrt(dbar.iter().map(|q| q * q).sum()));
        trace.states.push(frame.x);
        trace.weights.push(weights);
        if node_c0.is_some() {
            trace.node_gains.push(s[nx..nx + followers].to_vec());
        }
        trace.dbar.push(dbar);
        if let (Some(vs), Some(v)) = (trace.v1.as_mut(), v) {
            vs.push(v);
        }
        v
    };

    let dt = scenario.run.dt;
    let mut v_prev = record(&mut trace, 0.0, &state);
    let v0 = v_prev.unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let mut worst_rise = f64::NEG_INFINITY;
    let mut rk = Rk4::new(state.len());
    for k in 0..prep.steps {
        let t = k as f64 * dt;
        let t_next = (k + 1) as f64 * dt;
        let ok = rk.step(&mut deriv, &mut state, t, dt).is_ok()
            && state[..nx].iter().all(|v| v.abs() <= DIVERGENCE_LIMIT);
        if !ok {
            trace.diverged = true;
            trace.divergence_time = Some(t_next);
            break;
        }
        if phi.is_some() {
            let (_, dbar, weights) = observe(t_next, &state);
            let v = v1_of(&dbar, &weights).expect("monitor active");
            if let Some(p) = v_prev {
                worst_rise = worst_rise.max((v - p) / v0);
            }
            v_prev = Some(v);
        }
        if (k + 1) % prep.stride == 0 {
            record(&mut trace, t_next, &state);
        }
    }
    if phi.is_some() {
        trace.v1_step_worst_rise = Some(worst_rise);
    }
    Ok(trace)
}

/// Trajectory of the reduced edge-error system.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTrace {
    pub times: Vec<f64>,
    pub dbar: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
    pub diverged: bool,
}

/// Integrates `d̄̇ = (I ⊗ Ā + Q(t) ⊗ B·K₂) d̄` together with the tree weights,
/// where `Ā = A + B(K₀ + K₁)` and `Q(t) = Q̃ + Q̄(ā(t))`.
pub fn run_reduced(scenario: &Scenario, prep: &Prepared, ic: &InitialConditions) -> Result<ReducedTrace, SimError> {
    if matches!(scenario.law, Law::NodeAdaptive { .. }) {
        return Err(SimError::Config("the reduced system covers tree-weight laws only"));
    }
    let dim = scenario.dim();
    let net = &prep.network;
    let tree = net.tree();
    let edges = tree.edge_count();
    let gains = &scenario.gains;
    let abar = gains.abar(&scenario.a, &scenario.b);
    let bk2 = &scenario.b * &gains.k2;
    let qtilde = qtilde_in_tree_labels(tree, &ic.coupling.static_weights);
    let adaptive = matches!(scenario.law, Law::Adaptive);

    let frame0 = AgentFrame::new(0.0, dim, ic.x.clone(), &scenario.formation);
    let mut state = edge_errors(&net.coupled_states(&frame0), dim, tree);
    let nd = state.len();
    state.extend_from_slice(&ic.coupling.tree_weights);

    let mut q = Mat::zeros(edges, edges);
    let mut tmp = vec![0.0; dim];
    let mut deriv = |_: f64, s: &[f64], out: &mut [f64]| {
        let (dbar, w) = s.split_at(nd);
        qbar_into(tree, w, &mut q);
        for k in 0..edges {
            let ok = &mut out[k * dim..(k + 1) * dim];
            abar.mul_vec_into(&dbar[k * dim..(k + 1) * dim], ok);
            for j in 0..edges {
                let qkj = qtilde[(k, j)] + q[(k, j)];
                if qkj != 0.0 {
                    bk2.mul_vec_into(&dbar[j * dim..(j + 1) * dim], &mut tmp);
                    ok.iter_mut().zip(&tmp).for_each(|(o, v)| *o += qkj * v);
                }
            }
        }
        if adaptive {
            out[nd..].copy_from_slice(&rates_from_edge_errors(dbar, dim, tree, gains));
        } else {
            out[nd..].fill(0.0);
        }
    };

    let mut trace = ReducedTrace {
        times: vec![0.0],
        dbar: vec![state[..nd].to_vec()],
        weights: vec![state[nd..].to_vec()],
        diverged: false,
    };
    let dt = scenario.run.dt;
    let mut rk = Rk4::new(state.len());
    for k in 0..prep.steps {
        let t = k as f64 * dt;
        let ok = rk.step(&mut deriv, &mut state, t, dt).is_ok()
            && state[..nd].iter().all(|v| v.abs() <= DIVERGENCE_LIMIT);
        if !ok {
            trace.diverged = true;
            break;
        }
        if (k + 1) % prep.stride == 0 {
            trace.times.push((k + 1) as f64 * dt);
            trace.dbar.push(state[..nd].to_vec());
            trace.weights.push(state[nd..].to_vec());
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{design_tvf_gains, HarmonicAgent};

    fn scalar_gains() -> GainSet {
        GainSet {
            k0: Mat::from_rows(&[[-1.0]]),
            k1: Mat::from_rows(&[[0.0]]),
            k2: Mat::from_rows(&[[-1.0]]),
            gamma: Mat::from_rows(&[[1.0]]),
            p: Mat::from_rows(&[[1.0]]),
            eta: 2.0,
            theta: 1.0,
            rho: 0.1,
            rho_edges: None,
        }
    }

    #[test]
    fn single_stable_agent_decays() {
        let sc = Scenario {
            a: Mat::from_rows(&[[0.0]]),
            b: Mat::from_rows(&[[1.0]]),
            graph: Digraph::new(1, []).unwrap(),
            leaders: None,
            formation: FormationSpec::zero(1, 1),
            gains: scalar_gains(),
            law: Law::Adaptive,
            run: RunSettings {
                horizon: 1.0,
                ..RunSettings::default()
            },
        };
        let tr = run_scenario(&sc).unwrap();
        let x0 = tr.states[0][0];
        let x1 = tr.states.last().unwrap()[0];
        assert!((x1 - x0 * fmath::exp(-1.0)).abs() < 1e-9 * x0.abs().max(1.0));
        assert_eq!(tr.times.len(), 101);
    }

    fn e1_like(law: Law, horizon: f64) -> Scenario {
        let a = Mat::from_rows(&[[0.0, 1.0], [-1.0, 2.0]]);
        let b = Mat::col_vec(&[0.0, 1.0]);
        let k0 = Mat::row_vec(&[0.0, -2.0]);
        let gains = design_tvf_gains(&a, &b, &k0, None, 2.0, 1.0, 0.1).unwrap();
        let agents = (0..4)
            .map(|i| HarmonicAgent::new(i as f64 * core::f64::consts::PI / 2.0, vec![2.0, 0.0], vec![0.0, 2.0]))
            .collect();
        let edges = [Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 3, 1.0), Edge::new(3, 1, 1.0)];
        Scenario {
            a,
            b,
            graph: Digraph::new(4, edges).unwrap(),
            leaders: None,
            formation: FormationSpec::harmonic(1.0, agents).unwrap(),
            gains,
            law,
            run: RunSettings {
                horizon,
                seed: 7,
                ..RunSettings::default()
            },
        }
    }

    #[test]
    fn reduced_matches_full() {
        let sc = e1_like(Law::Adaptive, 3.0);
        let prep = sc.prepare().unwrap();
        assert!(prep.feasible);
        let ic = sc.initial_conditions(&prep);
        let full = run_prepared(&sc, &prep, ic.clone()).unwrap();
        let red = run_reduced(&sc, &prep, &ic).unwrap();
        assert_eq!(full.times.len(), red.times.len());
        for (a, b) in full.dbar.iter().zip(&red.dbar) {
            let diff = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
            assert!(fmath::sqrt(diff) < 1e-8);
        }
    }

    #[test]
    fn deterministic_runs() {
        let sc = e1_like(Law::Adaptive, 1.0);
        assert_eq!(run_scenario(&sc).unwrap(), run_scenario(&sc).unwrap());
    }

    #[test]
    fn frozen_weights_stay_put() {
        let sc = e1_like(Law::Frozen, 1.0);
        let tr = run_scenario(&sc).unwrap();
        assert!(tr.weights.iter().all(|w| *w == tr.weights[0]));
    }

    #[test]
    fn zero_edge_errors_stay_zero_in_reduced_system() {
        let sc = e1_like(Law::Adaptive, 0.5);
        let prep = sc.prepare().unwrap();
        let mut ic = sc.initial_conditions(&prep);
        // put every agent on its offset: x_i = h_i(0)
        for i in 0..4 {
            let h = sc.formation.h(i, 0.0);
            ic.x[2 * i..2 * i + 2].copy_from_slice(&h);
        }
        let red = run_reduced(&sc, &prep, &ic).unwrap();
        assert!(red.dbar.iter().flatten().all(|v| *v == 0.0));
        assert!(red.weights.iter().all(|w| *w == ic.coupling.tree_weights));
    }
}
