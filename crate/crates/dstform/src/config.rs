//! Scenario files (TOML) and their translation into core types.
//!
//! Agent and node labels in scenario files are 1-based.

use std::fmt;
use std::path::Path;

use dstform_core::digraph::{find_dst, Digraph, Edge, LeaderPartition, SpanningTree};
use dstform_core::matnum::Mat;
use dstform_core::sim::{Law, RunSettings, Scenario, WeightInit};
use dstform_core::synthesis::{
    design_tvf_gains, design_tvft_gains, fit_k0, FitTarget, FormationSpec, GainSet, HarmonicAgent, K0Fit,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub system: SystemConfig,
    pub graph: GraphConfig,
    pub formation: FormationConfig,
    pub controller: ControllerConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub n: usize,
    /// `(from, to, weight)`, 1-based.
    pub edges: Vec<(usize, usize, f64)>,
    /// Number of leaders; they are agents `1..=leaders`.
    #[serde(default)]
    pub leaders: usize,
    /// Leader weights; uniform when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormationConfig {
    Harmonic {
        omega: f64,
        agents: Vec<HarmonicAgentConfig>,
    },
    Tabulated {
        t0: f64,
        step: f64,
        /// `samples[s][i][c]`.
        samples: Vec<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicAgentConfig {
    pub phase: f64,
    pub sin_amp: Vec<f64>,
    pub cos_amp: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Tvf,
    TvftSingle,
    TvftMulti,
    BaselineStatic,
    BaselineNode,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Tvf => "tvf",
            Mode::TvftSingle => "tvft_single",
            Mode::TvftMulti => "tvft_multi",
            Mode::BaselineStatic => "baseline_static",
            Mode::BaselineNode => "baseline_node",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

/// A matrix given explicitly or the keyword `"auto"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixOrAuto {
    Auto(AutoTag),
    Matrix(Vec<Vec<f64>>),
}

impl Default for MatrixOrAuto {
    fn default() -> Self {
        MatrixOrAuto::Auto(AutoTag::Auto)
    }
}

impl MatrixOrAuto {
    pub fn auto() -> Self {
        Self::default()
    }

    fn is_auto(&self) -> bool {
        matches!(self, MatrixOrAuto::Auto(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    pub mode: Mode,
    /// Shaping gain; `"auto"` fits it from the formation.
    pub k0: MatrixOrAuto,
    /// Formation-mode stabilizing gain (zero when absent). Tracking modes fix it to `-K₀`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<Vec<Vec<f64>>>,
    /// LMI solution; `"auto"` solves for it.
    #[serde(default, skip_serializing_if = "MatrixOrAuto::is_auto")]
    pub p: MatrixOrAuto,
    /// Initial node gain of the node-adaptive baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightInitConfig {
    Uniform { lo: f64, hi: f64 },
    Graph,
}

impl Default for WeightInitConfig {
    fn default() -> Self {
        WeightInitConfig::Uniform { lo: 0.0, hi: 0.1 }
    }
}

fn default_init_std() -> f64 {
    5.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dt: f64,
    pub horizon: f64,
    pub output_stride: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub leader_initials: Vec<Vec<f64>>,
    pub rho: f64,
    pub eta: f64,
    pub theta: f64,
    #[serde(default = "default_init_std")]
    pub init_std: f64,
    #[serde(default)]
    pub weights: WeightInitConfig,
    #[serde(default = "default_true")]
    pub monitor_v1: bool,
}

/// Command-line overrides of run settings.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
}

/// A configuration translated into a runnable scenario.
#[derive(Debug, Clone)]
pub struct Built {
    pub scenario: Scenario,
    pub mode: Mode,
    /// Present when `K₀` was fitted.
    pub k0_fit: Option<K0Fit>,
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<Mat, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::config(format!("{what} must be a non-empty rectangular matrix")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::config(format!("{what} has non-finite entries")));
    }
    Ok(Mat::from_rows(rows))
}

pub fn mat_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        if cfg.version != CONFIG_VERSION {
            return Err(CliError::config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(s) = o.seed {
            self.run.seed = s;
        }
        if let Some(dt) = o.dt {
            self.run.dt = dt;
        }
        if let Some(h) = o.horizon {
            self.run.horizon = h;
        }
    }

    pub fn system(&self) -> Result<(Mat, Mat), CliError> {
        let a = matrix(&self.system.a, "system.a")?;
        let b = matrix(&self.system.b, "system.b")?;
        if !a.is_square() || b.rows() != a.rows() {
            return Err(CliError::config("system.a must be square and system.b must have as many rows"));
        }
        Ok((a, b))
    }

    /// The graph with 0-based labels.
    pub fn digraph(&self) -> Result<Digraph, CliError> {
        let n = self.graph.n;
        let mut edges = Vec::with_capacity(self.graph.edges.len());
        for &(from, to, w) in &self.graph.edges {
            if from == 0 || to == 0 || from > n || to > n {
                return Err(CliError::config(format!("edge ({from}, {to}) is outside 1..={n}")));
            }
            edges.push(Edge::new(from - 1, to - 1, w));
        }
        Digraph::new(n, edges).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn partition(&self) -> Result<Option<LeaderPartition>, CliError> {
        let m = self.graph.leaders;
        if m == 0 {
            if !self.graph.beta.is_empty() {
                return Err(CliError::config("graph.beta given without leaders"));
            }
            return Ok(None);
        }
        if m >= self.graph.n {
            return Err(CliError::config("there must be at least one follower"));
        }
        let part = if self.graph.beta.is_empty() {
            LeaderPartition::uniform(m)
        } else if self.graph.beta.len() != m {
            return Err(CliError::config("graph.beta needs one entry per leader"));
        } else {
            LeaderPartition::new(self.graph.beta.clone())
        };
        part.map(Some).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn formation_spec(&self) -> Result<FormationSpec, CliError> {
        let spec = match &self.formation {
            FormationConfig::Harmonic { omega, agents } => {
                let agents = agents
                    .iter()
                    .map(|a| {
                        let mut h = HarmonicAgent::new(a.phase, a.sin_amp.clone(), a.cos_amp.clone());
                        if let Some(off) = &a.offset {
                            h.offset = off.clone();
                        }
                        h
                    })
                    .collect();
                FormationSpec::harmonic(*omega, agents)
            }
            FormationConfig::Tabulated { t0, step, samples } => FormationSpec::tabulated(*t0, *step, samples.clone()),
        };
        spec.map_err(|e| CliError::config(format!("formation: {e}")))
    }

    fn check_mode(&self, part: &Option<LeaderPartition>) -> Result<(), CliError> {
        let m = part.as_ref().map_or(0, |p| p.m());
        let ok = match self.controller.mode {
            Mode::Tvf => m == 0,
            Mode::TvftSingle | Mode::BaselineNode => m == 1,
            Mode::TvftMulti => m >= 1,
            Mode::BaselineStatic => true,
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::config(format!(
                "mode {} does not fit a graph with {m} leader(s)",
                self.controller.mode
            )))
        }
    }

    /// Fits or reads `K₀` and designs the remaining gains.
    pub fn gains(
        &self,
        a: &Mat,
        b: &Mat,
        graph: &Digraph,
        part: &Option<LeaderPartition>,
        spec: &FormationSpec,
    ) -> Result<(GainSet, Option<K0Fit>), CliError> {
        let r = &self.run;
        let (k0, fit) = match &self.controller.k0 {
            MatrixOrAuto::Matrix(rows) => (matrix(rows, "controller.k0")?, None),
            MatrixOrAuto::Auto(_) => {
                let grid = spec.default_grid();
                let fit = match part {
                    None => {
                        let tree = dst_of(graph)?;
                        fit_k0(a, b, spec, FitTarget::Tree(&tree), &grid)
                    }
                    Some(p) => {
                        let followers: Vec<usize> = (p.m()..graph.n()).collect();
                        fit_k0(a, b, spec, FitTarget::Followers(&followers), &grid)
                    }
                };
                if fit.rank_deficient {
                    log::warn!("K0 fit is rank deficient (rank {}); using the minimum-norm solution", fit.rank);
                }
                (fit.k0.clone(), Some(fit))
            }
        };
        let tracking = part.is_some();
        if tracking && self.controller.k1.is_some() {
            return Err(CliError::config("controller.k1 is fixed to -k0 in tracking modes"));
        }
        let k1 = self.controller.k1.as_deref().map(|k| matrix(k, "controller.k1")).transpose()?;
        let gains = match &self.controller.p {
            MatrixOrAuto::Auto(_) if tracking => design_tvft_gains(a, b, &k0, r.eta, r.theta, r.rho),
            MatrixOrAuto::Auto(_) => design_tvf_gains(a, b, &k0, k1.as_ref(), r.eta, r.theta, r.rho),
            MatrixOrAuto::Matrix(rows) => {
                let p = matrix(rows, "controller.p")?;
                let k1 = match (tracking, k1) {
                    (true, _) => k0.scale(-1.0),
                    (false, Some(k1)) => k1,
                    (false, None) => Mat::zeros(k0.rows(), k0.cols()),
                };
                GainSet::from_p(k0, k1, b, p, r.eta, r.theta, r.rho)
            }
        };
        Ok((gains.map_err(CliError::synthesis)?, fit))
    }

    pub fn build(&self) -> Result<Built, CliError> {
        let (a, b) = self.system()?;
        let graph = self.digraph()?;
        let part = self.partition()?;
        self.check_mode(&part)?;
        let spec = self.formation_spec()?;
        if spec.agents() != graph.n() || spec.dim() != a.rows() {
            return Err(CliError::config("formation must list one offset per agent with the state dimension"));
        }
        let (gains, k0_fit) = self.gains(&a, &b, &graph, &part, &spec)?;
        let law = match self.controller.mode {
            Mode::Tvf | Mode::TvftSingle | Mode::TvftMulti => Law::Adaptive,
            Mode::BaselineStatic => Law::Frozen,
            Mode::BaselineNode => Law::NodeAdaptive {
                c0: self.controller.c0.unwrap_or(10.0),
            },
        };
        let r = &self.run;
        let run = RunSettings {
            dt: r.dt,
            horizon: r.horizon,
            output_stride: r.output_stride,
            seed: r.seed,
            init_std: r.init_std,
            weight_init: match r.weights {
                WeightInitConfig::Uniform { lo, hi } => WeightInit::Uniform { lo, hi },
                WeightInitConfig::Graph => WeightInit::FromGraph,
            },
            leader_initials: r.leader_initials.clone(),
            monitor_v1: r.monitor_v1,
        };
        Ok(Built {
            scenario: Scenario {
                a,
                b,
                graph,
                leaders: part,
                formation: spec,
                gains,
                law,
                run,
            },
            mode: self.controller.mode,
            k0_fit,
        })
    }
}

/// DST of a leaderless graph, rooted at agent 1 when possible.
pub fn dst_of(g: &Digraph) -> Result<SpanningTree, CliError> {
    find_dst(g, Some(0)).map_err(CliError::assumption)
}
