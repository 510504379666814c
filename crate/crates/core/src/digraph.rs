//! Weighted digraphs, Laplacians, directed spanning trees and leader structure.
//!
//! Nodes are 0-based. An edge `from → to` with weight `w` means `from` is an
//! in-neighbor of `to`, i.e. the adjacency entry `a[to][from] = w`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::matnum::Mat;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(from: usize, to: usize, weight: f64) -> Self {
        Self { from, to, weight }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphError {
    NodeOutOfRange { node: usize, n: usize },
    SelfLoop { node: usize },
    NonPositiveWeight { from: usize, to: usize, weight: f64 },
    DuplicateEdge { from: usize, to: usize },
    Empty,
    /// No node reaches every other node.
    NoDst,
    /// Some leader has an in-neighbor.
    LeadersHaveInEdges { leader: usize },
    InvalidPartition(&'static str),
    /// The generalized-DST assumption fails; `witness` lists offending followers.
    AssumptionViolated { witness: Vec<usize> },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::NodeOutOfRange { node, n } => {
                write!(f, "node {node} out of range for a graph with {n} nodes")
            }
            GraphError::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            GraphError::NonPositiveWeight { from, to, weight } => {
                write!(f, "edge {from}->{to} has non-positive weight {weight}")
            }
            GraphError::DuplicateEdge { from, to } => write!(f, "duplicate edge {from}->{to}"),
            GraphError::Empty => write!(f, "graph has no nodes"),
            GraphError::NoDst => write!(f, "graph has no directed spanning tree"),
            GraphError::LeadersHaveInEdges { leader } => {
                write!(f, "leader {leader} has an in-neighbor")
            }
            GraphError::InvalidPartition(why) => write!(f, "invalid leader partition: {why}"),
            GraphError::AssumptionViolated { witness } => {
                write!(f, "generalized spanning tree assumption violated at followers {witness:?}")
            }
        }
    }
}

impl core::error::Error for GraphError {}

/// Weighted digraph with positive weights and no self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph {
    n: usize,
    /// Sorted by `(to, from)`.
    edges: Vec<Edge>,
    /// `in_start[i]..in_start[i+1]` indexes the in-edges of node `i`.
    in_start: Vec<usize>,
}

impl Digraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &edges {
            for node in [e.from, e.to] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if e.from == e.to {
                return Err(GraphError::SelfLoop { node: e.from });
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(GraphError::NonPositiveWeight {
                    from: e.from,
                    to: e.to,
                    weight: e.weight,
                });
            }
        }
        edges.sort_by_key(|e| (e.to, e.from));
        for w in edges.windows(2) {
            if (w[0].from, w[0].to) == (w[1].from, w[1].to) {
                return Err(GraphError::DuplicateEdge {
                    from: w[0].from,
                    to: w[0].to,
                });
            }
        }
        let mut in_start = vec![0; n + 1];
        for e in &edges {
            in_start[e.to + 1] += 1;
        }
        for i in 0..n {
            in_start[i + 1] += in_start[i];
        }
        Ok(Self { n, edges, in_start })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// In-edges of `node`, sorted by source.
    #[inline]
    pub fn in_edges(&self, node: usize) -> &[Edge] {
        &self.edges[self.in_start[node]..self.in_start[node + 1]]
    }

    pub fn out_neighbors(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.edges.iter().filter(|e| e.from == node).map(|e| e.to).collect();
        out.sort_unstable();
        out
    }

    pub fn weight(&self, from: usize, to: usize) -> Option<f64> {
        self.in_edges(to).iter().find(|e| e.from == from).map(|e| e.weight)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.weight(from, to).is_some()
    }

    /// Adjacency matrix with `a[to][from] = weight`.
    pub fn adjacency(&self) -> Mat {
        let mut a = Mat::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.to, e.from)] = e.weight;
        }
        a
    }

    /// The same graph with node `order[k]` renamed to `k`.
    pub fn relabel(&self, order: &[usize]) -> Digraph {
        assert_eq!(order.len(), self.n);
        let mut position = vec![0; self.n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(position[e.from], position[e.to], e.weight));
        Digraph::new(self.n, edges).expect("relabeling preserves validity")
    }

    /// Nodes reachable from `start` along directed edges (including `start`).
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let out = self.out_lists();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in &out[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn out_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for e in &self.edges {
            out[e.from].push(e.to);
        }
        for l in &mut out {
            l.sort_unstable();
        }
        out
    }
}

/// `L_ij = −a_ij` for `i ≠ j`, `L_ii = Σ_k a_ik`.
pub fn laplacian(g: &Digraph) -> Mat {
    let mut l = Mat::zeros(g.n(), g.n());
    for e in g.edges() {
        l[(e.to, e.from)] -= e.weight;
        l[(e.to, e.to)] += e.weight;
    }
    l
}

/// Rooted directed spanning tree in relabeled coordinates.
///
/// Node 0 is the root and every parent has a smaller label than its children
/// (BFS order). Tree edge `k` (for `k in 0..n-1`) enters child `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    /// `subtree[v][q]` is true iff `q` lies in the subtree rooted at `v`.
    subtree: Vec<Vec<bool>>,
}

impl SpanningTree {
    /// Builds a tree from a parent map in already-relabeled coordinates.
    ///
    /// Requires `parent[0] == None` and `parent[k] == Some(p)` with `p < k`
    /// for every other node; `order` defaults to the identity.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self, GraphError> {
        let n = parent.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if parent[0].is_some() {
            return Err(GraphError::InvalidPartition("tree root must be node 0"));
        }
        for (k, p) in parent.iter().enumerate().skip(1) {
            match p {
                Some(p) if *p < k => {}
                _ => return Err(GraphError::InvalidPartition("parent labels must precede children")),
            }
        }
        Ok(Self::from_parents_unchecked((0..n).collect(), parent))
    }

    /// No validation. Subtree sets are derived by walking ancestors, with a step
    /// cap so that cyclic maps terminate; the result is then not a tree.
    pub fn from_parents_unchecked(order: Vec<usize>, parent: Vec<Option<usize>>) -> Self {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for (c, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(c);
            }
        }
        let mut subtree = vec![vec![false; n]; n];
        for q in 0..n {
            let mut v = Some(q);
            let mut steps = 0;
            while let Some(u) = v {
                if steps > n {
                    break;
                }
                subtree[u][q] = true;
                v = parent[u];
                steps += 1;
            }
        }
        Self {
            order,
            parent,
            children,
            subtree,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    /// `order[new] = original` node label.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &o)| i == o)
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    /// Parent of the child of tree edge `k`, i.e. of node `k + 1`.
    #[inline]
    pub fn edge_parent(&self, k: usize) -> usize {
        self.parent[k + 1].expect("non-root node has a parent")
    }

    /// Number of tree edges, `n − 1`.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.n() - 1
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn in_subtree(&self, q: usize, root: usize) -> bool {
        self.subtree[root][q]
    }

    /// Vertex set of the subtree rooted at `root`.
    pub fn subtree_set(&self, root: usize) -> Vec<usize> {
        (0..self.n()).filter(|&q| self.subtree[root][q]).collect()
    }

    /// Endpoints of tree edge `k` as original labels `(parent, child)`.
    #[inline]
    pub fn original_edge(&self, k: usize) -> (usize, usize) {
        (self.order[self.edge_parent(k)], self.order[k + 1])
    }

    /// Tree edges as original labels `(parent, child)` in edge order.
    pub fn original_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.edge_count()).map(move |k| self.original_edge(k))
    }

    /// Edge index entering original node `node`, if it is not the root.
    pub fn edge_into_original(&self, node: usize) -> Option<usize> {
        let pos = self.order.iter().position(|&o| o == node)?;
        pos.checked_sub(1)
    }

    /// Tree edges as `(parent, child)` in edge order.
    pub fn tree_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.edge_count()).map(move |k| (self.edge_parent(k), k + 1))
    }
}

/// Finds a DST by breadth-first search and relabels nodes in BFS order.
///
/// The root is `preferred_root` when it reaches every node, otherwise the
/// lowest-index node that does. Each node's parent is the lowest-index
/// in-neighbor on the previous BFS level; within a level nodes are labeled by
/// their parent's new label, then by original index.
pub fn find_dst(g: &Digraph, preferred_root: Option<usize>) -> Result<SpanningTree, GraphError> {
    let n = g.n();
    let spans = |r: usize| g.reachable_from(r).iter().all(|&s| s);
    let root = preferred_root
        .filter(|&r| r < n && spans(r))
        .or_else(|| (0..n).find(|&r| spans(r)))
        .ok_or(GraphError::NoDst)?;

    let out = g.out_lists();
    let mut level = vec![usize::MAX; n];
    level[root] = 0;
    let mut frontier = vec![root];
    let mut orig_parent: Vec<Option<usize>> = vec![None; n];
    let mut order = vec![root];
    let mut position = vec![usize::MAX; n];
    position[root] = 0;
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next: Vec<usize> = Vec::new();
        // frontier is in label order; the lowest original index wins ties
        let mut by_index = frontier.clone();
        by_index.sort_unstable();
        for &u in &by_index {
            for &v in &out[u] {
                if level[v] == usize::MAX {
                    level[v] = depth + 1;
                    orig_parent[v] = Some(u);
                    next.push(v);
                }
            }
        }
        next.sort_by_key(|&v| (position[orig_parent[v].unwrap()], v));
        for &v in &next {
            position[v] = order.len();
            order.push(v);
        }
        frontier = next;
        depth += 1;
    }
    debug_assert_eq!(order.len(), n);
    let parent = order
        .iter()
        .map(|&v| orig_parent[v].map(|p| position[p]))
        .collect();
    Ok(SpanningTree::from_parents_unchecked(order, parent))
}

/// Leaders are nodes `0..m`; `beta` are their convex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderPartition {
    m: usize,
    beta: Vec<f64>,
}

impl LeaderPartition {
    pub fn new(beta: Vec<f64>) -> Result<Self, GraphError> {
        if beta.is_empty() {
            return Err(GraphError::InvalidPartition("at least one leader is required"));
        }
        if beta.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(GraphError::InvalidPartition("leader weights must be positive"));
        }
        let sum: f64 = beta.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(GraphError::InvalidPartition("leader weights must sum to one"));
        }
        Ok(Self { m: beta.len(), beta })
    }

    /// `m` leaders with equal weights `1/m`.
    pub fn uniform(m: usize) -> Result<Self, GraphError> {
        if m == 0 {
            return Err(GraphError::InvalidPartition("at least one leader is required"));
        }
        let b = 1.0 / m as f64;
        let mut beta = vec![b; m];
        // absorb rounding into the last weight
        let rest: f64 = beta[..m - 1].iter().sum();
        beta[m - 1] = 1.0 - rest;
        Self::new(beta)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Checks `m < n` and that no leader has an in-edge.
    pub fn validate(&self, g: &Digraph) -> Result<(), GraphError> {
        if self.m >= g.n() {
            return Err(GraphError::InvalidPartition("need at least one follower"));
        }
        for l in 0..self.m {
            if !g.in_edges(l).is_empty() {
                return Err(GraphError::LeadersHaveInEdges { leader: l });
            }
        }
        Ok(())
    }
}

/// Splits the follower rows of `l` into the leader block `L1` and follower block `L2`.
pub fn partition_laplacian(l: &Mat, part: &LeaderPartition) -> Result<(Mat, Mat), GraphError> {
    let (n, m) = (l.rows(), part.m());
    if m >= n {
        return Err(GraphError::InvalidPartition("need at least one follower"));
    }
    for leader in 0..m {
        if l.row(leader).iter().any(|&v| v != 0.0) {
            return Err(GraphError::LeadersHaveInEdges { leader });
        }
    }
    Ok((l.block(m, 0, n - m, m), l.block(m, m, n - m, n - m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FollowerClass {
    /// Every leader is an in-neighbor.
    WellInformed,
    /// No leader is an in-neighbor.
    Uninformed,
    /// Some but not all leaders are in-neighbors.
    Partial,
}

/// Classification of every follower, as `(node, class)` in node order.
pub fn classify_followers(g: &Digraph, part: &LeaderPartition) -> Vec<(usize, FollowerClass)> {
    let m = part.m();
    (m..g.n())
        .map(|i| {
            let from_leaders = g.in_edges(i).iter().filter(|e| e.from < m).count();
            let class = if from_leaders == m {
                FollowerClass::WellInformed
            } else if from_leaders == 0 {
                FollowerClass::Uninformed
            } else {
                FollowerClass::Partial
            };
            (i, class)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedDstCheck {
    pub holds: bool,
    /// Followers that are neither well-informed nor uninformed.
    pub partial: Vec<usize>,
    /// Uninformed followers no well-informed follower reaches.
    pub unreachable: Vec<usize>,
}

impl GeneralizedDstCheck {
    pub fn witness(&self) -> Vec<usize> {
        let mut w = self.partial.clone();
        w.extend_from_slice(&self.unreachable);
        w.sort_unstable();
        w
    }
}

/// Checks for a generalized DST rooted at the leadership.
pub fn check_generalized_dst(g: &Digraph, part: &LeaderPartition) -> GeneralizedDstCheck {
    let m = part.m();
    let classes = classify_followers(g, part);
    let partial: Vec<usize> = classes
        .iter()
        .filter(|(_, c)| *c == FollowerClass::Partial)
        .map(|(i, _)| *i)
        .collect();

    // multi-source BFS from well-informed followers through follower edges
    let mut reached = vec![false; g.n()];
    let mut queue: VecDeque<usize> = classes
        .iter()
        .filter(|(_, c)| *c == FollowerClass::WellInformed)
        .map(|(i, _)| *i)
        .collect();
    for &i in &queue {
        reached[i] = true;
    }
    let out = g.out_lists();
    while let Some(u) = queue.pop_front() {
        for &v in &out[u] {
            if v >= m && !reached[v] {
                reached[v] = true;
                queue.push_back(v);
            }
        }
    }
    let unreachable: Vec<usize> = classes
        .iter()
        .filter(|(i, c)| *c == FollowerClass::Uninformed && !reached[*i])
        .map(|(i, _)| *i)
        .collect();
    GeneralizedDstCheck {
        holds: partial.is_empty() && unreachable.is_empty(),
        partial,
        unreachable,
    }
}

/// Merges the leaders into a single joint leader (node 0).
///
/// Follower `i` of `g` becomes node `i − m + 1`. The joint leader feeds every
/// well-informed follower with the mean of that follower's leader-edge weights;
/// follower-follower edges keep their weights.
pub fn induce_single_leader_graph(g: &Digraph, part: &LeaderPartition) -> Result<Digraph, GraphError> {
    part.validate(g)?;
    let check = check_generalized_dst(g, part);
    if !check.holds {
        return Err(GraphError::AssumptionViolated {
            witness: check.witness(),
        });
    }
    let m = part.m();
    let n_aux = g.n() - m + 1;
    let mut edges = Vec::new();
    for i in m..g.n() {
        let j = i - m + 1;
        let leader_weights: Vec<f64> = g
            .in_edges(i)
            .iter()
            .filter(|e| e.from < m)
            .map(|e| e.weight)
            .collect();
        if !leader_weights.is_empty() {
            let mean = leader_weights.iter().sum::<f64>() / leader_weights.len() as f64;
            edges.push(Edge::new(0, j, mean));
        }
        for e in g.in_edges(i).iter().filter(|e| e.from >= m) {
            edges.push(Edge::new(e.from - m + 1, j, e.weight));
        }
    }
    Digraph::new(n_aux, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3(w21: f64, w32: f64) -> Digraph {
        Digraph::new(3, [Edge::new(0, 1, w21), Edge::new(1, 2, w32)]).unwrap()
    }

    #[test]
    fn laplacian_of_chain() {
        let l = laplacian(&chain3(0.7, 1.3));
        let expected = Mat::from_rows(&[[0.0, 0.0, 0.0], [-0.7, 0.7, 0.0], [0.0, -1.3, 1.3]]);
        assert_eq!(l, expected);
    }

    #[test]
    fn laplacian_of_edgeless_graph_is_zero() {
        let g = Digraph::new(4, []).unwrap();
        assert_eq!(laplacian(&g), Mat::zeros(4, 4));
    }

    #[test]
    fn laplacian_with_back_edge() {
        let g = Digraph::new(3, [Edge::new(0, 1, 0.7), Edge::new(1, 2, 1.3), Edge::new(2, 0, 0.4)]).unwrap();
        let l = laplacian(&g);
        assert_eq!(l.row(0), &[0.4, 0.0, -0.4]);
    }

    #[test]
    fn invalid_graphs_rejected() {
        assert_eq!(Digraph::new(2, [Edge::new(1, 1, 1.0)]), Err(GraphError::SelfLoop { node: 1 }));
        assert!(matches!(
            Digraph::new(2, [Edge::new(0, 1, 0.0)]),
            Err(GraphError::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            Digraph::new(2, [Edge::new(0, 1, 1.0), Edge::new(0, 1, 2.0)]),
            Err(GraphError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            Digraph::new(2, [Edge::new(0, 2, 1.0)]),
            Err(GraphError::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn dst_of_chain() {
        let t = find_dst(&chain3(1.0, 1.0), None).unwrap();
        assert_eq!(t.edge_parent(0), 0);
        assert_eq!(t.edge_parent(1), 1);
        assert!(t.is_identity());
    }

    #[test]
    fn disconnected_has_no_dst() {
        let g = Digraph::new(2, []).unwrap();
        assert_eq!(find_dst(&g, None), Err(GraphError::NoDst));
    }

    #[test]
    fn bfs_tree_prefers_lowest_parent() {
        let g = Digraph::new(
            4,
            [Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0), Edge::new(2, 3, 1.0), Edge::new(1, 2, 1.0)],
        )
        .unwrap();
        let t = find_dst(&g, None).unwrap();
        assert_eq!(t.parents(), &[None, Some(0), Some(0), Some(2)]);
    }

    #[test]
    fn root_relabeled_to_zero() {
        // only node 2 reaches everything: 2→0, 2→1
        let g = Digraph::new(3, [Edge::new(2, 0, 1.0), Edge::new(2, 1, 1.0)]).unwrap();
        let t = find_dst(&g, Some(0)).unwrap();
        assert_eq!(t.order(), &[2, 0, 1]);
        assert_eq!(t.parents(), &[None, Some(0), Some(0)]);
        let rg = g.relabel(t.order());
        for (p, c) in t.tree_edges() {
            assert!(rg.has_edge(p, c));
        }
    }

    #[test]
    fn subtree_sets_of_chain_and_star() {
        let t = SpanningTree::from_parents(vec![None, Some(0), Some(1)]).unwrap();
        assert_eq!(t.subtree_set(1), vec![1, 2]);
        assert_eq!(t.subtree_set(2), vec![2]);
        let s = SpanningTree::from_parents(vec![None, Some(0), Some(0)]).unwrap();
        assert_eq!(s.subtree_set(1), vec![1]);
        assert_eq!(s.subtree_set(0), vec![0, 1, 2]);
    }

    #[test]
    fn partition_blocks() {
        let part = LeaderPartition::new(vec![1.0]).unwrap();
        let (l1, l2) = partition_laplacian(&laplacian(&chain3(0.5, 2.0)), &part).unwrap();
        assert_eq!(l1, Mat::col_vec(&[-0.5, 0.0]));
        assert_eq!(l2, Mat::from_rows(&[[0.5, 0.0], [-2.0, 2.0]]));
        let part2 = LeaderPartition::uniform(2).unwrap();
        let g = Digraph::new(3, [Edge::new(0, 2, 1.0), Edge::new(1, 2, 1.0)]).unwrap();
        let (_, l2) = partition_laplacian(&laplacian(&g), &part2).unwrap();
        assert_eq!((l2.rows(), l2.cols()), (1, 1));
    }

    #[test]
    fn leader_in_edge_rejected() {
        let g = Digraph::new(3, [Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 0, 1.0)]).unwrap();
        let part = LeaderPartition::new(vec![1.0]).unwrap();
        assert_eq!(
            partition_laplacian(&laplacian(&g), &part),
            Err(GraphError::LeadersHaveInEdges { leader: 0 })
        );
    }

    #[test]
    fn partition_weights_validated() {
        assert!(LeaderPartition::new(vec![0.5, 0.4]).is_err());
        assert!(LeaderPartition::new(vec![1.5, -0.5]).is_err());
        assert!(LeaderPartition::uniform(3).is_ok());
    }

    #[test]
    fn single_leader_classification() {
        let g = Digraph::new(3, [Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0)]).unwrap();
        let part = LeaderPartition::new(vec![1.0]).unwrap();
        assert!(classify_followers(&g, &part)
            .iter()
            .all(|(_, c)| *c == FollowerClass::WellInformed));
    }

    #[test]
    fn partial_follower_reported() {
        // leaders 0,1,2; follower 3 hears all, follower 4 hears only leader 0
        let g = Digraph::new(
            5,
            [
                Edge::new(0, 3, 1.0),
                Edge::new(1, 3, 1.0),
                Edge::new(2, 3, 1.0),
                Edge::new(0, 4, 1.0),
            ],
        )
        .unwrap();
        let part = LeaderPartition::uniform(3).unwrap();
        let classes = classify_followers(&g, &part);
        assert_eq!(classes, vec![(3, FollowerClass::WellInformed), (4, FollowerClass::Partial)]);
        let check = check_generalized_dst(&g, &part);
        assert!(!check.holds);
        assert_eq!(check.witness(), vec![4]);
    }

    #[test]
    fn unreachable_uninformed_follower() {
        // follower 2 hears leader 0; follower 3 only hears itself-cycle partner 4
        let g = Digraph::new(5, [Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0), Edge::new(4, 3, 1.0), Edge::new(3, 4, 1.0)])
            .unwrap();
        let part = LeaderPartition::new(vec![1.0]).unwrap();
        let check = check_generalized_dst(&g, &part);
        assert!(!check.holds);
        assert_eq!(check.unreachable, vec![3, 4]);
    }

    #[test]
    fn induced_graph_single_leader_is_identity() {
        let g = Digraph::new(3, [Edge::new(0, 1, 0.3), Edge::new(1, 2, 0.8), Edge::new(2, 1, 0.2)]).unwrap();
        let part = LeaderPartition::new(vec![1.0]).unwrap();
        assert_eq!(induce_single_leader_graph(&g, &part).unwrap(), g);
    }

    #[test]
    fn induced_graph_uses_mean_leader_weight() {
        let g = Digraph::new(
            5,
            [
                Edge::new(0, 3, 1.0),
                Edge::new(1, 3, 2.0),
                Edge::new(2, 3, 3.0),
                Edge::new(3, 4, 0.5),
            ],
        )
        .unwrap();
        let part = LeaderPartition::uniform(3).unwrap();
        let gp = induce_single_leader_graph(&g, &part).unwrap();
        assert_eq!(gp.n(), 3);
        assert_eq!(gp.weight(0, 1), Some(2.0));
        assert_eq!(gp.weight(1, 2), Some(0.5));
        assert_eq!(gp.edges().len(), 2);
    }

    #[test]
    fn induced_graph_rejects_partial() {
        let g = Digraph::new(4, [Edge::new(0, 2, 1.0), Edge::new(2, 3, 1.0), Edge::new(1, 3, 1.0), Edge::new(1, 2, 1.0)])
            .unwrap();
        let part = LeaderPartition::uniform(2).unwrap();
        assert!(matches!(
            induce_single_leader_graph(&g, &part),
            Err(GraphError::AssumptionViolated { .. })
        ));
    }
}
