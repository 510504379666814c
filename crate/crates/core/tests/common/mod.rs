#![allow(dead_code)]

use std::collections::BTreeSet;

use dstform_core::digraph::{Digraph, Edge};
use dstform_core::matnum::Mat;
use proptest::prelude::*;

/// A random spanning tree (node labels shuffled) plus up to `3n` extra edges,
/// every weight in `[0.1, 2]`.
pub fn arb_dst_graph(n_range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Digraph> {
    n_range
        .prop_flat_map(|n| {
            let parents: Vec<std::ops::Range<usize>> = (1..n).map(|i| 0..i).collect();
            let perm = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
            let tree_w = prop::collection::vec(0.1f64..=2.0, n - 1);
            let extra = prop::collection::vec((0..n, 0..n, 0.1f64..=2.0), 0..=3 * n);
            (Just(n), parents, perm, tree_w, extra)
        })
        .prop_map(|(n, parents, perm, tree_w, extra)| {
            let mut seen = BTreeSet::new();
            let mut edges = Vec::new();
            for i in 1..n {
                let (from, to) = (perm[parents[i - 1]], perm[i]);
                seen.insert((from, to));
                edges.push(Edge::new(from, to, tree_w[i - 1]));
            }
            for (from, to, w) in extra {
                if from != to && seen.insert((from, to)) {
                    edges.push(Edge::new(from, to, w));
                }
            }
            Digraph::new(n, edges).expect("valid by construction")
        })
}

pub fn arb_mat(rows: usize, cols: usize, lim: f64) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-lim..=lim, rows * cols).prop_map(move |v| Mat::from_vec(rows, cols, v))
}

pub fn arb_square(n_range: std::ops::RangeInclusive<usize>, lim: f64) -> impl Strategy<Value = Mat> {
    n_range.prop_flat_map(move |n| arb_mat(n, n, lim))
}
