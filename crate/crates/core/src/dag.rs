//! Immutable simple directed acyclic graph.
//!
//! Nodes are dense ids in `[0, node_count)`. Edges are stored sorted by
//! `(source, target)` with duplicates removed, together with CSR out- and
//! in-adjacency, the root and leaf sets, and a canonical topological order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    roots: Vec<NodeId>,
    leaves: Vec<NodeId>,
    order: Vec<NodeId>,
}

/// Position of every node in the canonical topological order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologicalOrder {
    pub rank: Vec<usize>,
}

/// Population mean and variance of the in- and out-degree sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub in_mean: f64,
    pub in_variance: f64,
    pub out_mean: f64,
    pub out_variance: f64,
}

impl Dag {
    /// Validates and builds a DAG.
    ///
    /// Duplicate edges are dropped. Self-loops, out-of-range ids and cycles
    /// are rejected; for a cycle the first back edge met by a depth-first
    /// traversal (nodes and children in ascending id order) is reported.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if node_count > NodeId::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "node count {node_count} does not fit a 32-bit id"
            )));
        }
        let mut edges: Vec<(NodeId, NodeId)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            for id in [u, v] {
                if id as usize >= node_count {
                    return Err(Error::NodeIdOutOfRange {
                        id: u64::from(id),
                        node_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
        }
        edges.sort_unstable();
        edges.dedup();

        let (out_offsets, out_targets) = csr(node_count, edges.iter().copied());
        let mut reversed: Vec<(NodeId, NodeId)> = edges.iter().map(|&(u, v)| (v, u)).collect();
        reversed.sort_unstable();
        let (in_offsets, in_sources) = csr(node_count, reversed);

        let order = kahn_order(node_count, &out_offsets, &out_targets, &in_offsets);
        if order.len() < node_count {
            let (source, target) = first_back_edge(node_count, &out_offsets, &out_targets)
                .expect("a graph without a topological order has a back edge");
            return Err(Error::CycleDetected { from: source, to: target });
        }

        let roots = (0..node_count)
            .filter(|&v| in_offsets[v] == in_offsets[v + 1])
            .map(|v| v as NodeId)
            .collect();
        let leaves = (0..node_count)
            .filter(|&v| out_offsets[v] == out_offsets[v + 1])
            .map(|v| v as NodeId)
            .collect();

        Ok(Self {
            node_count,
            edges,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            roots,
            leaves,
            order,
        })
    }

    /// Graph with `node_count` isolated nodes.
    pub fn empty(node_count: usize) -> Result<Self> {
        Self::new(node_count, std::iter::empty())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(source, target)`.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Children of `u` in ascending id order.
    pub fn children(&self, u: NodeId) -> &[NodeId] {
        let u = u as usize;
        &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    /// Parents of `v` in ascending id order.
    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.children(u).len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.parents(v).len()
    }

    /// Nodes with in-degree zero, ascending.
    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    /// Nodes with out-degree zero, ascending.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn is_root(&self, v: NodeId) -> bool {
        self.in_degree(v) == 0
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.out_degree(v) == 0
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.children(u).binary_search(&v).is_ok()
    }

    /// Nodes in canonical topological order: Kahn's algorithm, always
    /// releasing the smallest ready id first.
    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn topological_order(&self) -> TopologicalOrder {
        let mut rank = vec![0; self.node_count];
        for (pos, &v) in self.order.iter().enumerate() {
            rank[v as usize] = pos;
        }
        TopologicalOrder { rank }
    }

    pub fn degree_stats(&self) -> Result<DegreeStats> {
        if self.node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let n = self.node_count as f64;
        let mean = self.edges.len() as f64 / n;
        let variance = |offsets: &[usize]| {
            offsets
                .windows(2)
                .map(|w| {
                    let d = (w[1] - w[0]) as f64 - mean;
                    d * d
                })
                .sum::<f64>()
                / n
        };
        Ok(DegreeStats {
            in_mean: mean,
            in_variance: variance(&self.in_offsets),
            out_mean: mean,
            out_variance: variance(&self.out_offsets),
        })
    }
}

impl TopologicalOrder {
    /// Checks every edge goes forward in rank.
    pub fn respects(&self, edges: &[(NodeId, NodeId)]) -> bool {
        edges
            .iter()
            .all(|&(u, v)| self.rank[u as usize] < self.rank[v as usize])
    }
}

/// Back edges of an arbitrary digraph found by depth-first search, visiting
/// start nodes and children in ascending id order. Removing them leaves an
/// acyclic graph. Self-loops count as back edges; duplicate edges are
/// considered once.
pub fn back_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Vec<(NodeId, NodeId)> {
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let (offsets, targets) = csr(node_count, sorted);
    dfs_back_edges(node_count, &offsets, &targets, false)
}

fn first_back_edge(
    node_count: usize,
    offsets: &[usize],
    targets: &[NodeId],
) -> Option<(NodeId, NodeId)> {
    dfs_back_edges(node_count, offsets, targets, true).into_iter().next()
}

fn dfs_back_edges(
    node_count: usize,
    offsets: &[usize],
    targets: &[NodeId],
    stop_at_first: bool,
) -> Vec<(NodeId, NodeId)> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; node_count];
    let mut found = Vec::new();
    // (node, index of next child to inspect)
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for start in 0..node_count {
        if mark[start] != Mark::New {
            continue;
        }
        mark[start] = Mark::Active;
        stack.push((start, offsets[start]));
        while let Some(top) = stack.last_mut() {
            let (u, next) = *top;
            if next == offsets[u + 1] {
                mark[u] = Mark::Done;
                stack.pop();
                continue;
            }
            top.1 += 1;
            let v = targets[next] as usize;
            match mark[v] {
                Mark::New => {
                    mark[v] = Mark::Active;
                    stack.push((v, offsets[v]));
                }
                Mark::Active => {
                    found.push((u as NodeId, v as NodeId));
                    if stop_at_first {
                        return found;
                    }
                }
                Mark::Done => {}
            }
        }
    }
    found
}

/// CSR from pairs sorted by their first component.
fn csr<I>(node_count: usize, sorted_pairs: I) -> (Vec<usize>, Vec<NodeId>)
where
    I: IntoIterator<Item = (NodeId, NodeId)>,
{
    let mut offsets = vec![0usize; node_count + 1];
    let mut targets = Vec::new();
    for (u, v) in sorted_pairs {
        offsets[u as usize + 1] += 1;
        targets.push(v);
    }
    for i in 0..node_count {
        offsets[i + 1] += offsets[i];
    }
    (offsets, targets)
}

fn kahn_order(
    node_count: usize,
    out_offsets: &[usize],
    out_targets: &[NodeId],
    in_offsets: &[usize],
) -> Vec<NodeId> {
    let mut pending: Vec<usize> = in_offsets.windows(2).map(|w| w[1] - w[0]).collect();
    let mut ready: BinaryHeap<Reverse<NodeId>> = (0..node_count)
        .filter(|&v| pending[v] == 0)
        .map(|v| Reverse(v as NodeId))
        .collect();
    let mut order = Vec::with_capacity(node_count);
    while let Some(Reverse(u)) = ready.pop() {
        order.push(u);
        let u = u as usize;
        for &v in &out_targets[out_offsets[u]..out_offsets[u + 1]] {
            pending[v as usize] -= 1;
            if pending[v as usize] == 0 {
                ready.push(Reverse(v));
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Dag {
        Dag::new(n, (1..n as NodeId).map(|v| (v - 1, v))).unwrap()
    }

    fn diamond() -> Dag {
        Dag::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn single_edge() {
        let dag = Dag::new(2, [(0, 1)]).unwrap();
        assert_eq!(dag.roots(), &[0]);
        assert_eq!(dag.leaves(), &[1]);
    }

    #[test]
    fn sample_dag_degrees() {
        // a=0 b=1 e=2 h=3 l=4 i=5 r=6; parents(e) = {b}, children(e) = {h, l, i}
        let dag = Dag::new(7, [(0, 1), (1, 2), (2, 3), (2, 4), (2, 5), (6, 5)]).unwrap();
        assert_eq!(dag.in_degree(2), 1);
        assert_eq!(dag.out_degree(2), 3);
        assert_eq!(dag.parents(2), &[1]);
        assert_eq!(dag.children(2), &[3, 4, 5]);
    }

    #[test]
    fn three_cycle_rejected() {
        let err = Dag::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap_err();
        assert!(matches!(
            err,
Error::CycleDetected { from: 2, to: 0 }
        ));
    }

    #[test]
    fn self_loop_and_range_rejected() {
        assert!(matches!(Dag::new(2, [(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(
            Dag::new(2, [(0, 2)]),
            Err(Error::NodeIdOutOfRange { id: 2, node_count: 2 })
        ));
    }

    #[test]
    fn duplicates_dropped() {
        let dag = Dag::new(3, [(0, 1), (0, 1), (1, 2), (0, 1)]).unwrap();
        assert_eq!(dag.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn isolated_nodes_are_roots_and_leaves() {
        let dag = Dag::empty(3).unwrap();
        assert_eq!(dag.roots(), &[0, 1, 2]);
        assert_eq!(dag.leaves(), &[0, 1, 2]);
    }

    #[test]
    fn topological_orders() {
        assert_eq!(chain(3).topological_order().rank, vec![0, 1, 2]);
        assert_eq!(Dag::empty(3).unwrap().topological_order().rank, vec![0, 1, 2]);
        assert_eq!(diamond().topological_order().rank, vec![0, 1, 2, 3]);
        // tie-break is by id, not by discovery
        let dag = Dag::new(4, [(3, 0), (2, 1)]).unwrap();
        assert_eq!(dag.order(), &[2, 1, 3, 0]);
    }

    #[test]
    fn diamond_order_matches_enumeration() {
        // Valid orders of the diamond are [0,1,2,3] and [0,2,1,3]; the
        // smallest-ready-id rule picks the lexicographically first.
        let dag = diamond();
        let perms = [[0u32, 1, 2, 3], [0, 2, 1, 3], [1, 0, 2, 3], [0, 1, 3, 2]];
        let valid: Vec<_> = perms
            .iter()
            .filter(|p| {
                let mut rank = [0usize; 4];
                for (i, &v) in p.iter().enumerate() {
                    rank[v as usize] = i;
                }
                dag.edges().iter().all(|&(u, v)| rank[u as usize] < rank[v as usize])
            })
            .collect();
        assert_eq!(valid.len(), 2);
        assert_eq!(dag.order(), valid.iter().min().unwrap().as_slice());
    }

    #[test]
    fn chain_degree_stats() {
        let stats = chain(3).degree_stats().unwrap();
        assert!((stats.in_mean - 2.0 / 3.0).abs() < 1e-15);
        assert!((stats.out_mean - 2.0 / 3.0).abs() < 1e-15);
        // degrees 1,1,0 around mean 2/3
        assert!((stats.out_variance - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn star_degree_stats_two_pass() {
        for k in [1usize, 2, 5, 17] {
            let dag = Dag::new(k + 1, (1..=k as NodeId).map(|v| (0, v))).unwrap();
            let stats = dag.degree_stats().unwrap();
            let outs: Vec<f64> = (0..=k as NodeId).map(|v| dag.out_degree(v) as f64).collect();
            let mean = outs.iter().sum::<f64>() / outs.len() as f64;
            let var = outs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / outs.len() as f64;
            assert!((stats.out_variance - var).abs() < 1e-12);
            // closed form: k^2 / (k+1) - (k/(k+1))^2
            let kf = k as f64;
            let closed = kf * kf / (kf + 1.0) - (kf / (kf + 1.0)).powi(2);
            assert!((stats.out_variance - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_graph_stats_error() {
        assert!(matches!(Dag::empty(0).unwrap().degree_stats(), Err(Error::EmptyGraph)));
    }

    #[test]
    fn back_edges_make_graph_acyclic() {
        let edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 1), (3, 3)];
        let back = back_edges(4, &edges);
        assert_eq!(back, vec![(2, 0), (3, 1), (3, 3)]);
        let kept = edges.iter().copied().filter(|e| !back.contains(e));
        assert!(Dag::new(4, kept).is_ok());
    }
}
