//! Random DAG generators.
//!
//! * [`add_random_edges`]: start from a complete binary tree and, for `c`
//!   iterations, insert `ceil(n(1+epsilon))` edges whose source is strictly
//!   shallower (in tree depth) than their target.
//! * [`rank_random_dag`]: draw a random rank order and insert uniformly
//!   chosen node pairs oriented from lower to higher rank.
//! * [`matched_random`]: rank-ordered generation constrained to approximate
//!   a real graph's node, edge, root and leaf counts.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dag::{Dag, NodeId};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Complete binary tree in heap order (children of `i` are `2i+1`, `2i+2`),
/// annotated with tree depth.
#[derive(Debug, Clone)]
pub struct SeededTree {
    dag: Dag,
    td: Vec<u32>,
}

impl SeededTree {
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn node_count(&self) -> usize {
        self.td.len()
    }

    /// Tree depth of every node; the root is at depth 0.
    pub fn depths(&self) -> &[u32] {
        &self.td
    }

    pub fn depth(&self, v: NodeId) -> u32 {
        self.td[v as usize]
    }

    pub fn max_depth(&self) -> u32 {
        self.td.last().copied().unwrap_or(0)
    }

    /// Number of nodes with tree depth strictly below `depth`. In heap order
    /// these are exactly the ids `0..nodes_above(depth)`.
    pub fn nodes_above(&self, depth: u32) -> usize {
        if depth >= usize::BITS - 1 {
            return self.td.len();
        }
        ((1usize << depth) - 1).min(self.td.len())
    }

    /// Number of nodes on each level, from the root down.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.max_depth() as usize + 1];
        for &d in &self.td {
            sizes[d as usize] += 1;
        }
        sizes
    }

    /// Count of ordered pairs `(u, v)` with `td[u] < td[v]`.
    pub fn legal_pair_count(&self) -> u64 {
        self.td.iter().map(|&d| self.nodes_above(d) as u64).sum()
    }
}

pub fn complete_binary_tree(n: usize) -> Result<SeededTree> {
    if n == 0 {
        return Err(Error::InvalidParameter("tree needs at least one node".into()));
    }
    let edges = (1..n).map(|v| (((v - 1) / 2) as NodeId, v as NodeId));
    let dag = Dag::new(n, edges)?;
    let td = (0..n).map(|i| (i + 1).ilog2()).collect();
    Ok(SeededTree { dag, td })
}

/// What to do when the requested edges cannot all be inserted as new,
/// distinct edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Saturation {
    /// Give up on an edge after `max_resample_attempts` duplicate draws and
    /// count it as skipped.
    #[default]
    Skip,
    /// Refuse up front when the total budget exceeds the free legal pairs.
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub n: usize,
    pub iterations: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub max_resample_attempts: u32,
    #[serde(default)]
    pub saturation: Saturation,
}

impl GenerationConfig {
    /// Config with the default `epsilon = log2(n) - 1`, i.e. `n log2 n`
    /// edges per iteration.
    pub fn new(n: usize, iterations: usize, seed: u64) -> Self {
        Self {
            n,
            iterations,
            epsilon: default_epsilon(n),
            seed,
            max_resample_attempts: 64,
            saturation: Saturation::Skip,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Edges requested per iteration: `ceil(n (1 + epsilon))`.
    pub fn budget(&self) -> usize {
        (self.n as f64 * (1.0 + self.epsilon)).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {}", self.n)));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be >= 1".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// `log2(n) - 1`, floored at zero.
pub fn default_epsilon(n: usize) -> f64 {
    ((n.max(1) as f64).log2() - 1.0).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStats {
    /// Non-root nodes, i.e. nodes that may be targets.
    pub eligible: usize,
    /// Distinct nodes drawn as the target of at least one pair this
    /// iteration, whether or not the pair was already an edge.
    pub selected: usize,
    pub unselected: usize,
    pub inserted: usize,
    /// Duplicate draws that were thrown back.
    pub resampled: u64,
    /// Budgeted edges abandoned after exhausting the resample attempts.
    pub skipped: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iterations: Vec<IterationStats>,
}

impl IterationLog {
    pub fn total_inserted(&self) -> usize {
        self.iterations.iter().map(|s| s.inserted).sum()
    }

    pub fn total_skipped(&self) -> usize {
        self.iterations.iter().map(|s| s.skipped).sum()
    }
}

/// Tree-seeded edge insertion, one iteration at a time.
///
/// Each edge draws a target uniformly among non-root nodes and then a source
/// uniformly among nodes of smaller tree depth. A draw that repeats an
/// existing edge is thrown back and redrawn (target and source) up to
/// `max_resample_attempts` times.
pub struct TreeInsertion<'a> {
    tree: &'a SeededTree,
    config: GenerationConfig,
    existing: HashSet<(NodeId, NodeId)>,
    edges: Vec<(NodeId, NodeId)>,
    rng: Rng,
    selected_stamp: Vec<u32>,
    log: IterationLog,
}

impl<'a> TreeInsertion<'a> {
    pub fn new(tree: &'a SeededTree, config: GenerationConfig) -> Result<Self> {
        config.validate()?;
        if tree.node_count() != config.n {
            return Err(Error::InvalidParameter(format!(
                "tree has {} nodes but config asks for {}",
                tree.node_count(),
                config.n
            )));
        }
        if config.saturation == Saturation::Fail {
            let free = tree.legal_pair_count() - tree.dag().edge_count() as u64;
            let requested = (config.budget() as u64).saturating_mul(config.iterations as u64);
            if requested > free {
                return Err(Error::BudgetInfeasible {
                    requested,
                    available: free,
                });
            }
        }
        let edges = tree.dag().edges().to_vec();
        Ok(Self {
            tree,
            existing: edges.iter().copied().collect(),
            edges,
            rng: rng::stream(config.seed, 0),
            selected_stamp: vec![0; config.n],
            log: IterationLog::default(),
            config,
        })
    }

    pub fn iterations_done(&self) -> usize {
        self.log.iterations.len()
    }

    pub fn is_finished(&self) -> bool {
        self.iterations_done() >= self.config.iterations
    }

    /// Runs one iteration and returns its statistics.
    pub fn step(&mut self) -> &IterationStats {
        let n = self.config.n;
        let stamp = self.log.iterations.len() as u32 + 1;
        let mut stats = IterationStats {
            eligible: n - 1,
            selected: 0,
            unselected: 0,
            inserted: 0,
            resampled: 0,
            skipped: 0,
        };
        for _ in 0..self.config.budget() {
            let mut attempts = 0;
            loop {
                let v = self.rng.random_range(1..n as NodeId);
                let sources = self.tree.nodes_above(self.tree.depth(v)) as NodeId;
                let u = self.rng.random_range(0..sources);
                if self.selected_stamp[v as usize] != stamp {
                    self.selected_stamp[v as usize] = stamp;
                    stats.selected += 1;
                }
                if self.existing.insert((u, v)) {
                    self.edges.push((u, v));
                    stats.inserted += 1;
                    break;
                }
                stats.resampled += 1;
                attempts += 1;
                if attempts > self.config.max_resample_attempts {
                    stats.skipped += 1;
                    break;
                }
            }
        }
        stats.unselected = stats.eligible - stats.selected;
        self.log.iterations.push(stats);
        self.log.iterations.last().unwrap()
    }

    /// Current graph.
    pub fn dag(&self) -> Dag {
        Dag::new(self.config.n, self.edges.iter().copied())
            .expect("depth-ordered edges are acyclic")
    }

    pub fn log(&self) -> &IterationLog {
        &self.log
    }

    pub fn finish(mut self) -> (Dag, IterationLog) {
        while !self.is_finished() {
            self.step();
        }
        let dag = self.dag();
        (dag, self.log)
    }
}

pub fn add_random_edges(tree: &SeededTree, config: &GenerationConfig) -> Result<(Dag, IterationLog)> {
    Ok(TreeInsertion::new(tree, config.clone())?.finish())
}

/// Rank-ordered random DAG, also returning the drawn ranks (`rank[node]`).
///
/// Unordered node pairs are drawn uniformly and oriented from lower to higher
/// rank until `edge_count` distinct edges exist. When more than half of all
/// pairs are requested, a uniform subset of the pair index space is drawn
/// instead of rejection sampling.
pub fn rank_random(n: usize, edge_count: usize, seed: u64) -> Result<(Dag, Vec<usize>)> {
    let max_pairs = pair_count(n);
    if edge_count as u64 > max_pairs {
        return Err(Error::BudgetInfeasible {
            requested: edge_count as u64,
            available: max_pairs,
        });
    }
    let mut rng = rng::stream(seed, 0);
    let mut at_rank: Vec<NodeId> = (0..n as NodeId).collect();
    at_rank.shuffle(&mut rng);
    let mut rank = vec![0usize; n];
    for (r, &v) in at_rank.iter().enumerate() {
        rank[v as usize] = r;
    }

    let mut edges = Vec::with_capacity(edge_count);
    if 2 * edge_count as u64 > max_pairs {
        let mut picks: Vec<u64> = rand::seq::index::sample(&mut rng, max_pairs as usize, edge_count)
            .into_iter()
            .map(|i| i as u64)
            .collect();
        picks.sort_unstable();
        // pair index k enumerates (lo, hi) rank pairs row by row
        let mut row_start = 0u64;
        let mut lo = 0usize;
        for k in picks {
            while k >= row_start + (n - 1 - lo) as u64 {
                row_start += (n - 1 - lo) as u64;
                lo += 1;
            }
            let hi = lo + 1 + (k - row_start) as usize;
            edges.push((at_rank[lo], at_rank[hi]));
        }
    } else {
        let mut seen = HashSet::with_capacity(edge_count);
        while edges.len() < edge_count {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if seen.insert((lo, hi)) {
                edges.push((at_rank[lo], at_rank[hi]));
            }
        }
    }
    let dag = Dag::new(n, edges)?;
    Ok((dag, rank))
}

pub fn rank_random_dag(n: usize, edge_count: usize, seed: u64) -> Result<Dag> {
    rank_random(n, edge_count, seed).map(|(dag, _)| dag)
}

fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Node, edge, root and leaf counts a matched-random graph should reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchProfile {
    pub node_count: usize,
    pub edge_count: usize,
    pub root_count: usize,
    pub leaf_count: usize,
}

pub fn profile_of(dag: &Dag) -> MatchProfile {
    MatchProfile {
        node_count: dag.node_count(),
        edge_count: dag.edge_count(),
        root_count: dag.roots().len(),
        leaf_count: dag.leaves().len(),
    }
}

impl MatchProfile {
    /// Pairs `(source rank, target rank)` admitted by the role partition:
    /// targets avoid the `root_count` lowest ranks, sources avoid the
    /// `leaf_count` highest ranks, and sources rank below targets.
    pub fn legal_pair_count(&self) -> u64 {
        let source_limit = self.node_count.saturating_sub(self.leaf_count);
        (self.root_count.max(1)..self.node_count)
            .map(|t| t.min(source_limit) as u64)
            .sum()
    }

    fn check(&self) -> Result<()> {
        let n = self.node_count;
        if self.root_count + self.leaf_count > n {
            return Err(Error::ProfileInfeasible(format!(
                "{} roots + {} leaves exceed {} nodes",
                self.root_count, self.leaf_count, n
            )));
        }
        if self.edge_count as u64 > pair_count(n) {
            return Err(Error::BudgetInfeasible {
                requested: self.edge_count as u64,
                available: pair_count(n),
            });
        }
        let legal = self.legal_pair_count();
        if self.edge_count as u64 > legal {
            return Err(Error::ProfileInfeasible(format!(
                "role partition admits {legal} pairs, {} edges requested",
                self.edge_count
            )));
        }
        Ok(())
    }
}

/// Random counterpart of a graph with the given profile.
///
/// Nodes get a uniform random rank. The `root_count` lowest ranks are never
/// targets and the `leaf_count` highest ranks are never sources. Each edge
/// draws a target uniformly among the admissible ranks and then a source
/// uniformly among admissible lower ranks; duplicates are redrawn. Nodes left
/// with no edges are dropped and the survivors renumbered in id order, so the
/// node count can come out below the profile's.
pub fn matched_random(profile: &MatchProfile, seed: u64) -> Result<Dag> {
    profile.check()?;
    let n = profile.node_count;
    let m = profile.edge_count;
    let mut rng = rng::stream(seed, 0);
    let mut at_rank: Vec<NodeId> = (0..n as NodeId).collect();
    at_rank.shuffle(&mut rng);

    let target_lo = profile.root_count.max(1);
    let source_limit = n - profile.leaf_count;
    let max_draws = 1000 * m as u64 + 1_000_000;
    let mut draws = 0u64;
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        draws += 1;
        if draws > max_draws {
            return Err(Error::ProfileInfeasible(format!(
                "gave up after {max_draws} draws with {} of {m} edges placed",
                edges.len()
            )));
        }
        let t = rng.random_range(target_lo..n);
        let s = rng.random_range(0..t.min(source_limit));
        if seen.insert((s, t)) {
            edges.push((at_rank[s], at_rank[t]));
        }
    }

    let mut touched = vec![false; n];
    for &(u, v) in &edges {
        touched[u as usize] = true;
        touched[v as usize] = true;
    }
    let mut new_id = vec![NodeId::MAX; n];
    let mut next = 0;
    for (v, _) in touched.iter().enumerate().filter(|(_, &t)| t) {
        new_id[v] = next;
        next += 1;
    }
    Dag::new(
        next as usize,
        edges
            .into_iter()
            .map(|(u, v)| (new_id[u as usize], new_id[v as usize])),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_trees() {
        let t1 = complete_binary_tree(1).unwrap();
        assert_eq!(t1.depths(), &[0]);
        assert_eq!(t1.dag().edge_count(), 0);

        let t3 = complete_binary_tree(3).unwrap();
        assert_eq!(t3.dag().edges(), &[(0, 1), (0, 2)]);
        assert_eq!(t3.depths(), &[0, 1, 1]);

        let t7 = complete_binary_tree(7).unwrap();
        assert_eq!(t7.level_sizes(), vec![1, 2, 4]);
        assert_eq!(t7.max_depth(), 2);

        assert!(complete_binary_tree(0).is_err());
    }

    #[test]
    fn tree_invariants() {
        for n in [2usize, 5, 10, 31, 100, 1000] {
            let t = complete_binary_tree(n).unwrap();
            assert_eq!(t.dag().roots(), &[0]);
            for v in 1..n as NodeId {
                assert_eq!(t.dag().in_degree(v), 1);
                let p = t.dag().parents(v)[0];
                assert_eq!(t.depth(v), t.depth(p) + 1);
            }
            let sizes = t.level_sizes();
            let mut remaining = n;
            for (d, &s) in sizes.iter().enumerate() {
                assert_eq!(s, (1usize << d).min(remaining));
                remaining -= s;
            }
            for d in 0..=t.max_depth() + 1 {
                let brute = t.depths().iter().filter(|&&x| x < d).count();
                assert_eq!(t.nodes_above(d), brute);
            }
        }
    }

    #[test]
    fn two_node_tree_cannot_change() {
        let tree = complete_binary_tree(2).unwrap();
        let config = GenerationConfig::new(2, 3, 11).with_epsilon(1.0);
        let (dag, log) = add_random_edges(&tree, &config).unwrap();
        assert_eq!(dag.edges(), &[(0, 1)]);
        assert_eq!(log.total_inserted(), 0);
        assert_eq!(log.total_skipped(), 3 * 4);
    }

    #[test]
    fn fail_policy_reports_infeasible_budget() {
        let tree = complete_binary_tree(4).unwrap();
        let mut config = GenerationConfig::new(4, 1, 0).with_epsilon(1.0);
        config.saturation = Saturation::Fail;
        // legal pairs 1+1+3 = 5, tree uses 3, budget 8
        assert!(matches!(
            add_random_edges(&tree, &config),
            Err(Error::BudgetInfeasible { requested: 8, available: 2 })
        ));
        // legal pairs 0+1+1+3*4+7 = 21, tree uses 7, budget 8
        let tree8 = complete_binary_tree(8).unwrap();
        let ok = GenerationConfig { n: 8, epsilon: 0.0, ..config };
        assert!(add_random_edges(&tree8, &ok).is_ok());
        let too_long = GenerationConfig { iterations: 2, ..ok };
        assert!(add_random_edges(&tree8, &too_long).is_err());
    }

    #[test]
    fn invalid_configs() {
        let tree = complete_binary_tree(8).unwrap();
        assert!(add_random_edges(&tree, &GenerationConfig::new(8, 0, 0)).is_err());
        assert!(add_random_edges(&tree, &GenerationConfig::new(9, 1, 0)).is_err());
        assert!(add_random_edges(&tree, &GenerationConfig::new(8, 1, 0).with_epsilon(-1.0)).is_err());
    }

    #[test]
    fn inserted_edges_follow_tree_depth() {
        let tree = complete_binary_tree(255).unwrap();
        let (dag, log) = add_random_edges(&tree, &GenerationConfig::new(255, 3, 5)).unwrap();
        assert!(dag
            .edges()
            .iter()
            .all(|&(u, v)| tree.depth(u) < tree.depth(v)));
        assert_eq!(log.iterations.len(), 3);
        for it in &log.iterations {
            assert_eq!(it.selected + it.unselected, it.eligible);
            assert_eq!(it.inserted + it.skipped, GenerationConfig::new(255, 3, 5).budget());
        }
        assert_eq!(dag.edge_count(), 254 + log.total_inserted());
    }

    #[test]
    fn rank_random_small_cases() {
        let dag = rank_random_dag(2, 1, 3).unwrap();
        assert_eq!(dag.edge_count(), 1);

        let (dag, rank) = rank_random(4, 6, 9).unwrap();
        assert_eq!(dag.edge_count(), 6);
        for &(u, v) in dag.edges() {
            assert!(rank[u as usize] < rank[v as usize]);
        }
        assert_eq!(dag.roots().len(), 1);
        assert_eq!(dag.leaves().len(), 1);

        assert!(matches!(
            rank_random_dag(4, 7, 0),
            Err(Error::BudgetInfeasible { requested: 7, available: 6 })
        ));
        assert_eq!(rank_random_dag(0, 0, 0).unwrap().node_count(), 0);
    }

    #[test]
    fn rank_random_dense_path_is_exact() {
        for seed in 0..20 {
            let (dag, rank) = rank_random(12, 50, seed).unwrap();
            assert_eq!(dag.edge_count(), 50);
            assert!(dag.edges().iter().all(|&(u, v)| rank[u as usize] < rank[v as usize]));
        }
    }

    #[test]
    fn profiles() {
        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            profile_of(&chain),
            MatchProfile { node_count: 3, edge_count: 2, root_count: 1, leaf_count: 1 }
        );
        assert_eq!(
            profile_of(&Dag::empty(5).unwrap()),
            MatchProfile { node_count: 5, edge_count: 0, root_count: 5, leaf_count: 5 }
        );
        let diamond = Dag::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            profile_of(&diamond),
            MatchProfile { node_count: 4, edge_count: 4, root_count: 1, leaf_count: 1 }
        );
    }

    #[test]
    fn matched_forced_single_edge() {
        let p = MatchProfile { node_count: 2, edge_count: 1, root_count: 1, leaf_count: 1 };
        for seed in 0..10 {
            let dag = matched_random(&p, seed).unwrap();
            assert_eq!(profile_of(&dag), p);
        }
    }

    #[test]
    fn matched_legal_pairs_brute_force() {
        for n in 1..9usize {
            for r in 0..=n {
                for l in 0..=(n - r) {
                    let p = MatchProfile { node_count: n, edge_count: 0, root_count: r, leaf_count: l };
                    let brute = (0..n)
                        .flat_map(|s| (s + 1..n).map(move |t| (s, t)))
                        .filter(|&(s, t)| t >= r && s < n - l)
                        .count() as u64;
                    assert_eq!(p.legal_pair_count(), brute, "n={n} r={r} l={l}");
                }
            }
        }
    }

    #[test]
    fn matched_infeasible_profiles() {
        let too_many_roles = MatchProfile { node_count: 4, edge_count: 1, root_count: 3, leaf_count: 2 };
        assert!(matches!(matched_random(&too_many_roles, 0), Err(Error::ProfileInfeasible(_))));
        let too_many_edges = MatchProfile { node_count: 4, edge_count: 7, root_count: 1, leaf_count: 1 };
        assert!(matches!(matched_random(&too_many_edges, 0), Err(Error::BudgetInfeasible { .. })));
        // 4 nodes, 2 forced roots and 1 forced leaf: targets ranks 2,3 with
        // sources {0,1} and {0,1,2} -> 5 legal pairs
        let tight = MatchProfile { node_count: 4, edge_count: 6, root_count: 2, leaf_count: 1 };
        assert!(matches!(matched_random(&tight, 0), Err(Error::ProfileInfeasible(_))));
        let saturated = MatchProfile { edge_count: 5, ..tight };
        assert_eq!(matched_random(&saturated, 0).unwrap().edge_count(), 5);
    }
}
