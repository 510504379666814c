//! Built-in scenarios `e1`, `e2` and `e3`.
//!
//! The system matrices, shaping gains and formation tables are fixed by the
//! examples. The communication graphs are reconstructions: each has the
//! required spanning structure plus non-tree edges closing directed cycles, and
//! they are the canonical fixtures for tests.

use std::f64::consts::PI;

use crate::config::{
    ControllerConfig, FormationConfig, GraphConfig, HarmonicAgentConfig, MatrixOrAuto, Mode, RunConfig,
    ScenarioConfig, SystemConfig, WeightInitConfig, CONFIG_VERSION,
};

pub const NAMES: [&str; 3] = ["e1", "e2", "e3"];

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    match name {
        "e1" => Some(e1()),
        "e2" => Some(e2()),
        "e3" => Some(e3()),
        _ => None,
    }
}

fn unit_edges(edges: &[(usize, usize)]) -> Vec<(usize, usize, f64)> {
    edges.iter().map(|&(f, t)| (f, t, 1.0)).collect()
}

fn planar(phase: f64, r: f64) -> HarmonicAgentConfig {
    HarmonicAgentConfig {
        phase,
        sin_amp: vec![r, 0.0],
        cos_amp: vec![0.0, r],
        offset: None,
    }
}

fn still(dim: usize) -> HarmonicAgentConfig {
    HarmonicAgentConfig {
        phase: 0.0,
        sin_amp: vec![0.0; dim],
        cos_amp: vec![0.0; dim],
        offset: None,
    }
}

fn run(horizon: f64, leader_initials: Vec<Vec<f64>>) -> RunConfig {
    RunConfig {
        dt: 1e-3,
        horizon,
        output_stride: 0.01,
        seed: 1,
        leader_initials,
        rho: 0.1,
        eta: 2.0,
        theta: 1.0,
        init_std: 5.0,
        weights: WeightInitConfig::Uniform { lo: 0.0, hi: 0.1 },
        monitor_v1: true,
    }
}

/// Twelve agents forming two nested rotating hexagons.
pub fn e1() -> ScenarioConfig {
    let agents = (0..12)
        .map(|i| planar(i as f64 * PI / 3.0, if i < 6 { 6.0 } else { 3.0 }))
        .collect();
    let edges = [
        // spanning tree rooted at agent 1
        (1, 2),
        (1, 3),
        (2, 4),
        (2, 5),
        (3, 6),
        (3, 7),
        (4, 8),
        (5, 9),
        (6, 10),
        (7, 11),
        (8, 12),
        // extra edges
        (12, 1),
        (9, 4),
        (11, 5),
        (10, 2),
        (6, 5),
    ];
    ScenarioConfig {
        version: CONFIG_VERSION,
        name: Some("e1".into()),
        system: SystemConfig {
            a: vec![vec![0.0, 1.0], vec![-1.0, 2.0]],
            b: vec![vec![0.0], vec![1.0]],
        },
        graph: GraphConfig {
            n: 12,
            edges: unit_edges(&edges),
            leaders: 0,
            beta: Vec::new(),
        },
        formation: FormationConfig::Harmonic { omega: 1.0, agents },
        controller: ControllerConfig {
            mode: Mode::Tvf,
            k0: MatrixOrAuto::Matrix(vec![vec![0.0, -2.0]]),
            k1: Some(vec![vec![0.0, 0.0]]),
            p: MatrixOrAuto::auto(),
            c0: None,
        },
        run: run(50.0, Vec::new()),
    }
}

/// Three leaders and five followers forming a rotating pentagram around the
/// leaders' average.
pub fn e2() -> ScenarioConfig {
    let mut agents = vec![still(3); 3];
    for i in 4..=8 {
        agents.push(HarmonicAgentConfig {
            phase: 2.0 * (i as f64 - 4.0) * PI / 5.0,
            sin_amp: vec![3.0, 0.0, 0.0],
            cos_amp: vec![0.0, -3.0, 6.0],
            offset: None,
        });
    }
    let edges = [
        // agents 4 and 5 hear every leader
        (1, 4),
        (2, 4),
        (3, 4),
        (1, 5),
        (2, 5),
        (3, 5),
        (4, 6),
        (5, 7),
        (6, 8),
        (8, 7),
        (7, 4),
        (6, 5),
    ];
    let third = 1.0 / 3.0;
    ScenarioConfig {
        version: CONFIG_VERSION,
        name: Some("e2".into()),
        system: SystemConfig {
            a: vec![vec![0.0, 1.0, 1.0], vec![1.0, 2.0, 1.0], vec![-2.0, -10.0, -3.0]],
            b: vec![vec![0.0], vec![0.0], vec![1.0]],
        },
        graph: GraphConfig {
            n: 8,
            edges: unit_edges(&edges),
            leaders: 3,
            beta: vec![third, third, third],
        },
        formation: FormationConfig::Harmonic { omega: 1.0, agents },
        controller: ControllerConfig {
            mode: Mode::TvftMulti,
            k0: MatrixOrAuto::Matrix(vec![vec![0.0, 4.0, 0.0]]),
            k1: None,
            p: MatrixOrAuto::auto(),
            c0: None,
        },
        run: run(
            60.0,
            vec![vec![5.0, 5.0, 10.0], vec![-10.0, -5.0, -5.0], vec![5.0, -10.0, 5.0]],
        ),
    }
}

/// One leader and seven followers: a rotating triangle and square around the leader.
pub fn e3() -> ScenarioConfig {
    let mut agents = vec![still(2)];
    for i in 2..=8 {
        let i = i as f64;
        agents.push(if i <= 4.0 {
            planar(2.0 * (i - 2.0) * PI / 3.0 + PI, 4.0)
        } else {
            planar((i - 5.0) * PI / 2.0, 2.0)
        });
    }
    let edges = [
        (1, 2),
        (1, 3),
        (1, 4),
        (2, 5),
        (3, 6),
        (4, 7),
        (5, 8),
        (8, 6),
        (6, 7),
        (7, 5),
        (6, 3),
    ];
    ScenarioConfig {
        version: CONFIG_VERSION,
        name: Some("e3".into()),
        system: SystemConfig {
            a: vec![vec![0.0, 1.0], vec![0.0, 0.0]],
            b: vec![vec![0.0], vec![1.0]],
        },
        graph: GraphConfig {
            n: 8,
            edges: unit_edges(&edges),
            leaders: 1,
            beta: Vec::new(),
        },
        formation: FormationConfig::Harmonic { omega: 1.0, agents },
        controller: ControllerConfig {
            mode: Mode::TvftSingle,
            k0: MatrixOrAuto::Matrix(vec![vec![-1.0, 0.0]]),
            k1: None,
            p: MatrixOrAuto::auto(),
            c0: Some(10.0),
        },
        run: run(50.0, vec![vec![0.5, 0.5]]),
    }
}
