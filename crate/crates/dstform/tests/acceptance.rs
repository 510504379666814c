//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dstform::config::{MatrixOrAuto, Mode};
use dstform::presets;
use dstform::{commands, Overrides, ScenarioConfig};
use dstform_core::control::{
    tvft_multi_control, tvft_multi_weight_rates, tvft_single_control, tvft_single_weight_rates, AgentFrame,
    AuxiliarySystem, CouplingState,
};
use dstform_core::digraph::{find_dst, Digraph, Edge, LeaderPartition, SpanningTree};
use dstform_core::matnum::{chol_pd, lmi_residual, sym_eig, Mat};
use dstform_core::rng::SplitMix64;
use dstform_core::sim::{run_prepared, run_reduced, run_scenario, SimTrace};
use dstform_core::synthesis::GainSet;
use dstform_core::treealg::{construct_phi, verify_identities};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn index(rng: &mut SplitMix64, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// Shuffled random spanning tree plus up to `3n` extra edges, weights in `[0.1, 2]`.
fn random_dst_graph(rng: &mut SplitMix64) -> Digraph {
    let n = 3 + index(rng, 10);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, index(rng, i + 1));
    }
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for i in 1..n {
        let (from, to) = (perm[index(rng, i)], perm[i]);
        seen.insert((from, to));
        edges.push(Edge::new(from, to, rng.uniform(0.1, 2.0)));
    }
    for _ in 0..index(rng, 3 * n + 1) {
        let (from, to) = (index(rng, n), index(rng, n));
        let w = rng.uniform(0.1, 2.0);
        if from != to && seen.insert((from, to)) {
            edges.push(Edge::new(from, to, w));
        }
    }
    Digraph::new(n, edges).unwrap()
}

fn c1_graph_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xC1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let g = random_dst_graph(&mut rng);
        let tree = find_dst(&g, None).unwrap();
        worst = worst.max(verify_identities(&g.relabel(tree.order()), &tree).max());
    }
    let el = start.elapsed();
    outcome(
        worst <= 1e-10 && el < Duration::from_secs(5),
        format!("200 digraphs, worst residual {worst:.2e}, {el:.2?}"),
    )
}

fn c2_phi_construction() -> Outcome {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xC2);
    let mut worst_gap = f64::INFINITY;
    let mut all_psi_pd = true;
    for _ in 0..100 {
        let n = 2 + index(&mut rng, 11);
        let parents = (0..n).map(|i| (i > 0).then(|| index(&mut rng, i))).collect();
        let tree = SpanningTree::from_parents(parents).unwrap();
        let e = n - 1;
        let qtilde = Mat::from_fn(e, e, |_, _| rng.uniform(-2.0, 2.0));
        let eta = rng.uniform(0.5, 5.0);
        let design = construct_phi(&tree, &qtilde, eta);
        let phi_sym = &design.phi_matrix + &design.phi_matrix.transpose();
        for k in 1..=e {
            all_psi_pd &= chol_pd(&phi_sym.block(0, 0, k, k)).is_ok();
        }
        let total = &(&qtilde + &qtilde.transpose()) + &phi_sym;
        let lam = sym_eig(&total).unwrap().min();
        worst_gap = worst_gap.min(lam - eta);
    }
    let el = start.elapsed();
    outcome(
        all_psi_pd && worst_gap >= -1e-9 && el < Duration::from_secs(5),
        format!("100 trees, leading blocks PD: {all_psi_pd}, min(lambda_min - eta) {worst_gap:.2e}, {el:.2?}"),
    )
}

fn c3_oscillator_gains() -> Outcome {
    let b = Mat::col_vec(&[0.0, 1.0]);
    let a = Mat::from_rows(&[[0.0, 1.0], [-1.0, 2.0]]);
    let k0 = Mat::row_vec(&[0.0, -2.0]);
    let p = Mat::from_rows(&[[1.0 / 3.0, -1.0 / 3.0], [-1.0 / 3.0, 2.0 / 3.0]]);
    let g = GainSet::from_p(k0, Mat::zeros(1, 2), &b, p.clone(), 2.0, 1.0, 0.1).unwrap();
    let res = lmi_residual(&g.abar(&a, &b), &b, 2.0, 1.0, &p);
    let res_err = res.max_abs_diff(&Mat::diag(&[-1.0 / 3.0, -2.0 / 3.0]));
    let k2_err = g.k2.max_abs_diff(&Mat::row_vec(&[-3.0, -3.0]));
    let gamma_err = g.gamma.max_abs_diff(&Mat::from_rows(&[[9.0, 9.0], [9.0, 9.0]]));
    let printed = res_err <= 1e-12 && k2_err <= 1e-12 && gamma_err <= 1e-12;

    let solved = presets::e1().build().unwrap().scenario.gains;
    let p_pd = chol_pd(&solved.p).is_ok();
    let lmax = sym_eig(&lmi_residual(&solved.abar(&a, &b), &b, 2.0, 1.0, &solved.p)).unwrap().max();
    outcome(
        printed && p_pd && lmax <= 1e-9,
        format!(
            "printed P: residual err {res_err:.1e}, K2 err {k2_err:.1e}, Gamma err {gamma_err:.1e}; \
             solver P PD {p_pd}, lambda_max {lmax:.2e}"
        ),
    )
}

fn c4_tracking_gains() -> Outcome {
    let mut cfg = presets::e3();
    cfg.controller.p = MatrixOrAuto::Matrix(vec![vec![0.6513, -0.6513], vec![-0.6513, 0.8256]]);
    let sc = cfg.build().unwrap().scenario;
    let g = &sc.gains;
    let k2_err = g.k2.max_abs_diff(&Mat::row_vec(&[-5.7356, -5.7356]));
    let abar = g.abar(&sc.a, &sc.b);
    let lmax = sym_eig(&lmi_residual(&abar, &sc.b, g.eta, g.theta, &g.p)).unwrap().max();
    outcome(
        k2_err <= 5e-3 && lmax <= 5e-3 && abar.max_abs_diff(&sc.a) == 0.0,
        format!("K2 {:?} (err {k2_err:.1e}), residual lambda_max {lmax:.2e}", g.k2.row(0)),
    )
}

fn c5_feasibility() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in presets::NAMES {
        let r = commands::verify(&presets::preset(name).unwrap()).unwrap();
        let res = r.feasibility.map_or(f64::INFINITY, |f| f.residual);
        pass &= res <= 1e-9;
        parts.push(format!("{name} {res:.1e}"));
    }
    for (name, want) in [("e1", [0.0, -2.0]), ("e3", [-1.0, 0.0])] {
        let mut cfg = presets::preset(name).unwrap();
        cfg.controller.k0 = MatrixOrAuto::auto();
        let fit = commands::synthesize(&cfg).unwrap();
        let err = fit.k0[0].iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pass &= err <= 1e-8 && fit.k0_fit.is_some_and(|f| !f.rank_deficient);
        parts.push(format!("{name} fit err {err:.1e}"));
    }
    outcome(pass, parts.join(", "))
}

fn seeded(cfg: &ScenarioConfig, seed: u64) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.apply(Overrides {
        seed: Some(seed),
        ..Overrides::default()
    });
    c
}

fn run(cfg: &ScenarioConfig) -> SimTrace {
    run_scenario(&cfg.build().unwrap().scenario).unwrap()
}

/// Runs seeds `1..=20` on all available cores.
fn sweep(cfg: &ScenarioConfig) -> Vec<SimTrace> {
    let seeds: Vec<u64> = (1..=20).collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = seeds.len().div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(|&seed| run(&seeded(cfg, seed))).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    })
}

fn adaptive_ok(t: &SimTrace) -> bool {
    !t.diverged
        && t.final_error() <= 1e-2
        && t.max_weight() < 1e3
        && t.settled()
        && t.v1_step_worst_rise.is_some_and(|r| r <= 1e-8)
}

fn c6_adaptive_convergence() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for name in presets::NAMES {
        let traces = sweep(&presets::preset(name).unwrap());
        let good = traces.iter().filter(|t| adaptive_ok(t)).count();
        let worst = traces.iter().map(SimTrace::final_error).fold(0.0, f64::max);
        pass &= good >= 18;
        parts.push(format!("{name} {good}/20 (worst E {worst:.1e})"));
    }
    let el = start.elapsed();
    pass &= el < Duration::from_secs(60);
    outcome(pass, format!("{}, {el:.2?}", parts.join(", ")))
}

fn with_mode(mut cfg: ScenarioConfig, mode: Mode) -> ScenarioConfig {
    cfg.controller.mode = mode;
    cfg
}

fn c7_baselines() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["e1", "e3"] {
        let traces = sweep(&with_mode(presets::preset(name).unwrap(), Mode::BaselineStatic));
        let failing = traces.iter().filter(|t| t.diverged || t.final_error() >= 0.1).count();
        pass &= failing >= 18;
        parts.push(format!("frozen {name} {failing}/20 non-convergent"));
    }
    let node = sweep(&with_mode(presets::e3(), Mode::BaselineNode));
    let converged = node.iter().filter(|t| !t.diverged && t.final_error() <= 1e-2).count();
    pass &= converged >= 18;
    parts.push(format!("node-adaptive e3 {converged}/20 converge"));

    let tree_time = run(&presets::e3()).time_to_threshold(1e-2);
    let node_time = node[0].time_to_threshold(1e-2);
    let fmt = |t: Option<f64>| t.map_or("never".to_string(), |v| format!("{v:.2} s"));
    parts.push(format!(
        "seed 1 time to E<=1e-2: tree-adaptive {}, node-adaptive {}",
        fmt(tree_time),
        fmt(node_time)
    ));
    outcome(pass, parts.join(", "))
}

fn c8_reduced_oracle() -> Outcome {
    let sc = presets::e1().build().unwrap().scenario;
    let prep = sc.prepare().unwrap();
    let ic = sc.initial_conditions(&prep);
    let full = run_prepared(&sc, &prep, ic.clone()).unwrap();
    let red = run_reduced(&sc, &prep, &ic).unwrap();
    let gap = full
        .dbar
        .iter()
        .zip(&red.dbar)
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let samples = full.times.len().min(red.times.len());
    outcome(
        gap <= 1e-6 && samples == full.times.len() && prep.feasible,
        format!("{samples} samples, max gap {gap:.2e}"),
    )
}

fn c9_single_leader_multi() -> Outcome {
    // e3's graph: agent 1 leads the other seven
    let g = presets::e3().digraph().unwrap();
    let n = g.n();
    let dim = 2;
    let part = LeaderPartition::uniform(1).unwrap();
    let aux = AuxiliarySystem::new(&g, &part).unwrap();
    let tree = find_dst(&g, Some(0)).unwrap();
    let gains = presets::e3().build().unwrap().scenario.gains;
    let mut rng = SplitMix64::new(0xC9);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x: Vec<f64> = (0..n * dim).map(|_| rng.uniform(-10.0, 10.0)).collect();
        let d: Vec<f64> = (0..n * dim).map(|_| rng.uniform(-10.0, 10.0)).collect();
        let w: Vec<f64> = (0..n - 1).map(|_| rng.uniform(0.1, 5.0)).collect();
        let frame = AgentFrame::from_parts(0.0, dim, x, d).unwrap();
        let cw = CouplingState::new(&g, &tree, w.clone());
        let cw_aux = CouplingState::new(&aux.graph, &aux.tree, w);
        let pairs = [
            (
                tvft_single_control(&frame, &gains, &tree, &cw),
                tvft_multi_control(&frame, &gains, &aux, &cw_aux),
            ),
            (
                tvft_single_weight_rates(&frame, &tree, &gains),
                tvft_multi_weight_rates(&frame, &aux, &gains),
            ),
        ];
        for (s, m) in &pairs {
            if s.len() != m.len() {
                worst = f64::INFINITY;
            }
            for (a, b) in s.iter().zip(m) {
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
    }
    outcome(worst <= 1e-14, format!("50 states, max relative difference {worst:.1e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("graph identities", c1_graph_identities),
        ("comparison matrix construction", c2_phi_construction),
        ("oscillator gains", c3_oscillator_gains),
        ("tracking gains", c4_tracking_gains),
        ("feasibility and K0 fit", c5_feasibility),
        ("adaptive convergence", c6_adaptive_convergence),
        ("baselines", c7_baselines),
        ("reduced-system oracle", c8_reduced_oracle),
        ("single-leader multi pipeline", c9_single_leader_multi),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}): {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
