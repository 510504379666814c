//! Command implementations. Each returns a serializable report; printing and
//! exit codes are left to the binary.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use dstform_core::digraph::{
    check_generalized_dst, classify_followers, find_dst, induce_single_leader_graph, Digraph, FollowerClass,
    SpanningTree,
};
use dstform_core::matnum::{lmi_residual, sym_eig};
use dstform_core::sim::{run_scenario, Law, SimTrace};
use dstform_core::treealg::verify_identities;
use serde::Serialize;

use crate::config::{mat_rows, Mode, ScenarioConfig};
use crate::error::{exit, CliError};
use crate::output::{write_csv, RunSummary};

#[derive(Debug, Clone, Serialize)]
pub struct DstReport {
    /// `"input"`, or `"induced"` for the single-leader graph built from several leaders.
    pub graph: &'static str,
    pub root: usize,
    /// `order[k]` is the node relabeled `k + 1`; 1-based.
    pub order: Vec<usize>,
    /// Parent of each node in its own labels, 1-based; `None` for the root.
    pub parents: Vec<Option<usize>>,
}

impl DstReport {
    fn new(graph: &'static str, tree: &SpanningTree) -> Self {
        let order = tree.order();
        let mut parents = vec![None; tree.n()];
        for (p, c) in tree.original_edges() {
            parents[c] = Some(p + 1);
        }
        Self {
            graph,
            root: order[0] + 1,
            order: order.iter().map(|i| i + 1).collect(),
            parents,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AssumptionReport {
    pub has_dst: bool,
    pub leaders_without_in_edges: Option<bool>,
    /// `(agent, class)` for every follower, 1-based.
    pub follower_classes: Vec<(usize, &'static str)>,
    pub generalized_dst: Option<bool>,
    /// Nodes that violate the assumption, 1-based.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub residual: f64,
    pub threshold: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LmiReport {
    pub residual_eigenvalues: Vec<f64>,
    pub max: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub l_eq_ljxi: f64,
    pub q_eq_xilj: f64,
    pub xil_eq_qxi: f64,
    pub qbar_eq_xilbarj: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub exit_code: i32,
    pub failure: Option<String>,
    pub dst: Option<DstReport>,
    pub assumptions: AssumptionReport,
    pub feasibility: Option<FeasibilityReport>,
    pub lmi: Option<LmiReport>,
    pub identities: Option<IdentityReport>,
}

fn class_name(c: FollowerClass) -> &'static str {
    match c {
        FollowerClass::WellInformed => "well_informed",
        FollowerClass::Uninformed => "uninformed",
        FollowerClass::Partial => "partial",
    }
}

/// Graph assumptions; returns the coupling graph and its tree on success.
fn check_assumptions(
    cfg: &ScenarioConfig,
    report: &mut VerifyReport,
) -> Result<(Digraph, SpanningTree, &'static str), CliError> {
    let graph = cfg.digraph()?;
    let part = cfg.partition()?;
    let a = &mut report.assumptions;
    let Some(part) = part else {
        let tree = find_dst(&graph, Some(0)).map_err(CliError::assumption)?;
        a.has_dst = true;
        return Ok((graph, tree, "input"));
    };
    let leaders_ok = part.validate(&graph);
    a.leaders_without_in_edges = Some(leaders_ok.is_ok());
    leaders_ok.map_err(CliError::assumption)?;
    if part.m() == 1 {
        let tree = find_dst(&graph, Some(0)).map_err(CliError::assumption)?;
        if tree.order()[0] != 0 {
            return Err(CliError::assumption("the leader does not reach every follower"));
        }
        a.has_dst = true;
        return Ok((graph, tree, "input"));
    }
    a.follower_classes = classify_followers(&graph, &part)
        .into_iter()
        .map(|(i, c)| (i + 1, class_name(c)))
        .collect();
    let check = check_generalized_dst(&graph, &part);
    a.generalized_dst = Some(check.holds);
    a.witness = check.witness().iter().map(|i| i + 1).collect();
    if !check.holds {
        return Err(CliError::assumption(format!(
            "no generalized DST rooted at the leaders (witness nodes {:?})",
            a.witness
        )));
    }
    let induced = induce_single_leader_graph(&graph, &part).map_err(CliError::assumption)?;
    let tree = find_dst(&induced, Some(0)).map_err(CliError::assumption)?;
    a.has_dst = true;
    Ok((induced, tree, "induced"))
}

pub fn verify(cfg: &ScenarioConfig) -> Result<VerifyReport, CliError> {
    let mut report = VerifyReport {
        passed: false,
        exit_code: exit::OK,
        failure: None,
        dst: None,
        assumptions: AssumptionReport::default(),
        feasibility: None,
        lmi: None,
        identities: None,
    };
    let fail = |mut r: VerifyReport, e: CliError| -> Result<VerifyReport, CliError> {
        if matches!(e, CliError::Config(_) | CliError::Io(_)) {
            return Err(e);
        }
        r.exit_code = e.exit_code();
        r.failure = Some(e.to_string());
        Ok(r)
    };
    cfg.system()?;
    let (cgraph, tree, which) = match check_assumptions(cfg, &mut report) {
        Ok(v) => v,
        Err(e) => return fail(report, e),
    };
    report.dst = Some(DstReport::new(which, &tree));

    let relabeled = cgraph.relabel(tree.order());
    let res = verify_identities(&relabeled, &tree);
    let scale = dstform_core::digraph::laplacian(&relabeled).max_abs().max(1.0);
    let bound = 1e-10 * scale;
    report.identities = Some(IdentityReport {
        l_eq_ljxi: res.l_eq_ljxi,
        q_eq_xilj: res.q_eq_xilj,
        xil_eq_qxi: res.xil_eq_qxi,
        qbar_eq_xilbarj: res.qbar_eq_xilbarj,
        bound,
        pass: res.max() <= bound,
    });

    let built = match cfg.build() {
        Ok(b) => b,
        Err(e) => return fail(report, e),
    };
    let sc = &built.scenario;
    let prep = match sc.prepare() {
        Ok(p) => p,
        Err(e) => return fail(report, CliError::assumption(e)),
    };
    report.feasibility = Some(FeasibilityReport {
        residual: prep.feasibility_residual,
        threshold: dstform_core::synthesis::feasibility_threshold(&sc.a),
        feasible: prep.feasible,
    });
    let g = &sc.gains;
    let r = lmi_residual(&g.abar(&sc.a, &sc.b), &sc.b, g.eta, g.theta, &g.p);
    let eig = sym_eig(&r).map_err(CliError::synthesis)?;
    let bound = 1e-9 * g.p.norm();
    report.lmi = Some(LmiReport {
        max: eig.max(),
        pass: eig.max() <= bound,
        residual_eigenvalues: eig.values.clone(),
        bound,
    });

    let identities_ok = report.identities.as_ref().is_some_and(|i| i.pass);
    let lmi_ok = report.lmi.as_ref().is_some_and(|l| l.pass);
    if !identities_ok {
        report.exit_code = exit::ASSUMPTION;
        report.failure = Some("tree identity residuals exceed the bound".into());
    } else if !prep.feasible {
        report.exit_code = exit::INFEASIBLE;
        report.failure = Some(format!(
            "formation infeasible for K0: residual {:e}",
            prep.feasibility_residual
        ));
    } else if !lmi_ok {
        report.exit_code = exit::INFEASIBLE;
        report.failure = Some("P does not satisfy the LMI".into());
    }
    report.passed = report.exit_code == exit::OK;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub rank: usize,
    pub rank_deficient: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GainReport {
    pub k0: Vec<Vec<f64>>,
    pub k1: Vec<Vec<f64>>,
    pub k2: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub eta: f64,
    pub theta: f64,
    pub rho: f64,
    pub k0_fit: Option<FitReport>,
    pub lmi_residual_eigenvalues: Vec<f64>,
    pub p_min_eigenvalue: f64,
}

pub fn synthesize(cfg: &ScenarioConfig) -> Result<GainReport, CliError> {
    let built = cfg.build()?;
    let sc = &built.scenario;
    let g = &sc.gains;
    let r = lmi_residual(&g.abar(&sc.a, &sc.b), &sc.b, g.eta, g.theta, &g.p);
    let eig = sym_eig(&r).map_err(CliError::synthesis)?;
    let check = g.check(&sc.a, &sc.b);
    Ok(GainReport {
        k0: mat_rows(&g.k0),
        k1: mat_rows(&g.k1),
        k2: mat_rows(&g.k2),
        gamma: mat_rows(&g.gamma),
        p: mat_rows(&g.p),
        eta: g.eta,
        theta: g.theta,
        rho: g.rho,
        k0_fit: built.k0_fit.map(|f| FitReport {
            rank: f.rank,
            rank_deficient: f.rank_deficient,
        }),
        lmi_residual_eigenvalues: eig.values,
        p_min_eigenvalue: check.p_min,
    })
}

/// Runs the scenario; writes the CSV trace when `csv` is given.
pub fn simulate(cfg: &ScenarioConfig, csv: Option<&Path>) -> Result<(RunSummary, SimTrace), CliError> {
    let built = cfg.build()?;
    let sc = &built.scenario;
    log::info!("simulating {} for {} s at dt = {}", built.mode, sc.run.horizon, sc.run.dt);
    let trace = run_scenario(sc).map_err(|e| match e {
        dstform_core::sim::SimError::Config(m) => CliError::config(m),
        other => CliError::assumption(other),
    })?;
    if trace.v1.is_none() && sc.run.monitor_v1 && matches!(sc.law, Law::Adaptive | Law::Frozen) {
        log::warn!("V1 monitor skipped: the formation is infeasible for K0");
    }
    if trace.diverged {
        log::warn!("run diverged at t = {:?}", trace.divergence_time);
    }
    if let Some(path) = csv {
        let f = File::create(path).map_err(|e| CliError::io(path, e))?;
        write_csv(BufWriter::new(f), &trace, matches!(sc.law, Law::Adaptive)).map_err(|e| CliError::io(path, e))?;
    }
    Ok((RunSummary::new(&built.mode.to_string(), sc.run.seed, &trace), trace))
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub seed: u64,
    pub adaptive: RunSummary,
    pub baseline_static: RunSummary,
    /// Only defined for a single leader.
    pub baseline_node: Option<RunSummary>,
}

/// Adaptive law, frozen weights and (for one leader) the node-adaptive
/// baseline on the same seed, run concurrently.
pub fn compare(cfg: &ScenarioConfig) -> Result<CompareReport, CliError> {
    let leaders = cfg.graph.leaders;
    let adaptive_mode = match leaders {
        0 => Mode::Tvf,
        1 => Mode::TvftSingle,
        _ => Mode::TvftMulti,
    };
    let with_mode = |mode: Mode| {
        let mut c = cfg.clone();
        c.controller.mode = mode;
        c
    };
    let run = |c: ScenarioConfig| simulate(&c, None).map(|(s, _)| s);
    let (a, s, n) = std::thread::scope(|scope| {
        let a = scope.spawn(|| run(with_mode(adaptive_mode)));
        let s = scope.spawn(|| run(with_mode(Mode::BaselineStatic)));
        let n = (leaders == 1).then(|| scope.spawn(|| run(with_mode(Mode::BaselineNode))));
        (
            a.join().expect("adaptive run panicked"),
            s.join().expect("static run panicked"),
            n.map(|h| h.join().expect("node run panicked")),
        )
    });
    Ok(CompareReport {
        seed: cfg.run.seed,
        adaptive: a?,
        baseline_static: s?,
        baseline_node: n.transpose()?,
    })
}
