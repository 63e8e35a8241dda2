//! Collapse measures.
//!
//! Two views of how "flat" a DAG is:
//!
//! * the **depth distribution**: shortest distance from the root set to each
//!   leaf ([`depth_map`], [`depth_distribution`]);
//! * the **RRL distribution**: length in edges of a random walk that starts
//!   at a uniformly chosen root and follows uniformly chosen out-edges until
//!   it reaches a leaf ([`rrl_sample`], [`rrl_exact`]).
//!
//! A graph is *collapsed* when at least `threshold` (default 99%) of the RRL
//! mass lies strictly below `beta` (default 10).

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dag::{Dag, DegreeStats, NodeId};
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_BETA: u64 = 10;
pub const DEFAULT_THRESHOLD: f64 = 0.99;
/// Largest graph [`rrl_exact`] accepts by default.
pub const DEFAULT_EXACT_CAP: usize = 10_000;

/// Integer-valued frequency table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    bins: BTreeMap<u64, u64>,
    total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values<I: IntoIterator<Item = u64>>(values: I) -> Self {
        let mut h = Self::new();
        for v in values {
            h.add(v);
        }
        h
    }

    pub fn add(&mut self, value: u64) {
        self.add_count(value, 1);
    }

    pub fn add_count(&mut self, value: u64, count: u64) {
        if count == 0 {
            return;
        }
        *self.bins.entry(value).or_insert(0) += count;
        self.total += count;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&v, &c) in &other.bins {
            self.add_count(v, c);
        }
    }

    pub fn bins(&self) -> &BTreeMap<u64, u64> {
        &self.bins
    }

    pub fn count(&self, value: u64) -> u64 {
        self.bins.get(&value).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn min(&self) -> Option<u64> {
        self.bins.keys().next().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.bins.keys().next_back().copied()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.total == 0 {
            return None;
        }
        let sum: f64 = self.bins.iter().map(|(&v, &c)| v as f64 * c as f64).sum();
        Some(sum / self.total as f64)
    }

    /// Population variance.
    pub fn variance(&self) -> Option<f64> {
        let mean = self.mean()?;
        let ss: f64 = self
            .bins
            .iter()
            .map(|(&v, &c)| (v as f64 - mean).powi(2) * c as f64)
            .sum();
        Some(ss / self.total as f64)
    }

    /// Lower nearest-rank quantile: the smallest value whose cumulative count
    /// reaches `max(1, ceil(q * total))`.
    pub fn quantile(&self, q: f64) -> Option<u64> {
        if self.total == 0 {
            return None;
        }
        let q = q.clamp(0.0, 1.0);
        let rank = ((q * self.total as f64).ceil() as u64).max(1);
        let mut seen = 0;
        for (&v, &c) in &self.bins {
            seen += c;
            if seen >= rank {
                return Some(v);
            }
        }
        self.max()
    }

    /// Fraction of the samples with value strictly below `beta`.
    pub fn fraction_below(&self, beta: u64) -> Option<f64> {
        if self.total == 0 {
            return None;
        }
        let below: u64 = self.bins.range(..beta).map(|(_, &c)| c).sum();
        Some(below as f64 / self.total as f64)
    }

    pub fn to_distribution(&self) -> LengthDistribution {
        let t = self.total as f64;
        LengthDistribution {
            mass: self.bins.iter().map(|(&v, &c)| (v, c as f64 / t)).collect(),
        }
    }

    /// Checks that the stored total equals the sum of the bins.
    pub fn is_consistent(&self) -> bool {
        self.bins.values().sum::<u64>() == self.total
    }
}

/// Probability mass over walk lengths.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LengthDistribution {
    pub mass: BTreeMap<u64, f64>,
}

impl LengthDistribution {
    pub fn probability(&self, length: u64) -> f64 {
        self.mass.get(&length).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    pub fn mean(&self) -> f64 {
        self.mass.iter().map(|(&v, &p)| v as f64 * p).sum()
    }

    pub fn fraction_below(&self, beta: u64) -> f64 {
        self.mass.range(..beta).map(|(_, &p)| p).sum()
    }

    /// Total variation distance, `0.5 * sum |p - q|`.
    pub fn tv_distance(&self, other: &LengthDistribution) -> f64 {
        let mut keys: Vec<u64> = self.mass.keys().chain(other.mass.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        0.5 * keys
            .into_iter()
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .sum::<f64>()
    }
}

/// Graph depth of every node: shortest distance from the root set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthMap {
    depths: Vec<u32>,
}

impl DepthMap {
    pub const UNREACHABLE: u32 = u32::MAX;

    pub fn get(&self, v: NodeId) -> Option<u32> {
        match self.depths[v as usize] {
            Self::UNREACHABLE => None,
            d => Some(d),
        }
    }

    /// Raw depths, [`DepthMap::UNREACHABLE`] for nodes no root reaches.
    pub fn as_slice(&self) -> &[u32] {
        &self.depths
    }

    pub fn len(&self) -> usize {
        self.depths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depths.is_empty()
    }
}

/// Multi-source unit-weight shortest paths from the roots, relaxed in
/// topological order: `dd[root] = 0`, `dd[v] = 1 + min dd[parent]`.
pub fn depth_map(dag: &Dag) -> DepthMap {
    let mut depths = vec![DepthMap::UNREACHABLE; dag.node_count()];
    for &r in dag.roots() {
        depths[r as usize] = 0;
    }
    for &u in dag.order() {
        let du = depths[u as usize];
        if du == DepthMap::UNREACHABLE {
            continue;
        }
        for &v in dag.children(u) {
            let slot = &mut depths[v as usize];
            *slot = (*slot).min(du + 1);
        }
    }
    DepthMap { depths }
}

/// Histogram of graph depth over the leaves.
pub fn depth_distribution(dag: &Dag) -> Histogram {
    let depths = depth_map(dag);
    Histogram::from_values(
        dag.leaves()
            .iter()
            .filter_map(|&v| depths.get(v))
            .map(u64::from),
    )
}

pub fn in_degree_histogram(dag: &Dag) -> Histogram {
    Histogram::from_values((0..dag.node_count() as NodeId).map(|v| dag.in_degree(v) as u64))
}

pub fn out_degree_histogram(dag: &Dag) -> Histogram {
    Histogram::from_values((0..dag.node_count() as NodeId).map(|v| dag.out_degree(v) as u64))
}

/// Samples `walks` random root-to-leaf walks on a single stream.
pub fn rrl_sample(dag: &Dag, walks: u64, seed: u64) -> Result<Histogram> {
    rrl_sample_parallel(dag, walks, seed, 1)
}

/// Samples random root-to-leaf walks split over `workers` threads.
///
/// Worker `w` runs its share of the walks on stream `(seed, w)`; the counts
/// are summed, so the result depends only on `(seed, workers)`.
pub fn rrl_sample_parallel(dag: &Dag, walks: u64, seed: u64, workers: usize) -> Result<Histogram> {
    if walks == 0 {
        return Err(Error::ZeroWalks);
    }
    if dag.roots().is_empty() {
        return Err(Error::EmptyGraph);
    }
    let shares = rng::partition(walks, workers);
    if shares.len() == 1 {
        return Ok(walk_batch(dag, walks, seed, 0));
    }
    let parts: Vec<Histogram> = std::thread::scope(|scope| {
        let handles: Vec<_> = shares
            .iter()
            .enumerate()
            .map(|(w, &share)| scope.spawn(move || walk_batch(dag, share, seed, w as u64)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("walk worker panicked")).collect()
    });
    let mut hist = Histogram::new();
    for part in &parts {
        hist.merge(part);
    }
    Ok(hist)
}

fn walk_batch(dag: &Dag, walks: u64, seed: u64, stream: u64) -> Histogram {
    let mut rng = rng::stream(seed, stream);
    let roots = dag.roots();
    // lengths are bounded by the node count, so a dense table is cheap
    let mut counts = vec![0u64; dag.node_count()];
    for _ in 0..walks {
        let mut v = roots[rng.random_range(0..roots.len())];
        let mut length = 0usize;
        loop {
            let children = dag.children(v);
            if children.is_empty() {
                break;
            }
            v = children[rng.random_range(0..children.len())];
            length += 1;
        }
        counts[length] += 1;
    }
    let mut hist = Histogram::new();
    for (len, &c) in counts.iter().enumerate() {
        hist.add_count(len as u64, c);
    }
    hist
}

/// Exact RRL distribution for graphs up to [`DEFAULT_EXACT_CAP`] nodes.
pub fn rrl_exact(dag: &Dag) -> Result<LengthDistribution> {
    rrl_exact_capped(dag, DEFAULT_EXACT_CAP)
}

pub fn rrl_exact_capped(dag: &Dag, cap: usize) -> Result<LengthDistribution> {
    if dag.node_count() > cap {
        return Err(Error::CapExceeded {
            node_count: dag.node_count(),
            cap,
        });
    }
    if dag.roots().is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(propagate_walk_mass(dag).0)
}

/// Pushes walk probability mass through the graph in topological order.
/// Each root starts with `1/|roots|` at length 0; a node splits what it
/// receives evenly over its children at length + 1; leaves absorb. Returns
/// the absorbed distribution and the total mass that reached each node.
fn propagate_walk_mass(dag: &Dag) -> (LengthDistribution, Vec<f64>) {
    let n = dag.node_count();
    let start = 1.0 / dag.roots().len() as f64;
    // arrival[v][k]: probability the walk is at v after exactly k steps
    let mut arrival: Vec<Vec<f64>> = vec![Vec::new(); n];
    for &r in dag.roots() {
        arrival[r as usize] = vec![start];
    }
    let mut totals = vec![0.0; n];
    let mut absorbed = vec![0.0; n];
    for &u in dag.order() {
        let here = std::mem::take(&mut arrival[u as usize]);
        totals[u as usize] = here.iter().sum();
        let children = dag.children(u);
        if children.is_empty() {
            for (k, &p) in here.iter().enumerate() {
                absorbed[k] += p;
            }
            continue;
        }
        let share = 1.0 / children.len() as f64;
        for &v in children {
            let slot = &mut arrival[v as usize];
            if slot.len() < here.len() + 1 {
                slot.resize(here.len() + 1, 0.0);
            }
            for (k, &p) in here.iter().enumerate() {
                slot[k + 1] += p * share;
            }
        }
    }
    let mass = absorbed
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p > 0.0)
        .map(|(k, p)| (k as u64, p))
        .collect();
    (LengthDistribution { mass }, totals)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseVerdict {
    pub beta: u64,
    pub threshold: f64,
    pub fraction_below: f64,
    pub collapsed: bool,
    pub sample_count: u64,
}

/// Collapse verdict for a sampled walk-length histogram.
pub fn collapse_test(hist: &Histogram, beta: u64, threshold: f64) -> Result<CollapseVerdict> {
    let fraction_below = hist.fraction_below(beta).ok_or(Error::EmptyHistogram)?;
    Ok(CollapseVerdict {
        beta,
        threshold,
        fraction_below,
        collapsed: fraction_below >= threshold,
        sample_count: hist.total(),
    })
}

/// One row of descriptive statistics for a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub name: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub root_count: usize,
    pub leaf_count: usize,
    pub edge_factor: f64,
    pub root_factor: f64,
    pub leaf_factor: f64,
    pub degree_stats: DegreeStats,
}

pub fn summarize(dag: &Dag, name: &str) -> Result<GraphSummary> {
    let degree_stats = dag.degree_stats()?;
    let n = dag.node_count() as f64;
    Ok(GraphSummary {
        name: name.to_string(),
        node_count: dag.node_count(),
        edge_count: dag.edge_count(),
        root_count: dag.roots().len(),
        leaf_count: dag.leaves().len(),
        edge_factor: dag.edge_count() as f64 / n,
        root_factor: dag.roots().len() as f64 / n,
        leaf_factor: dag.leaves().len() as f64 / n,
        degree_stats,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub walks: u64,
    pub seed: u64,
    pub beta: u64,
    pub threshold: f64,
    pub workers: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            walks: 100_000,
            seed: 0,
            beta: DEFAULT_BETA,
            threshold: DEFAULT_THRESHOLD,
            workers: 1,
        }
    }
}

/// Summary, the four distributions and the collapse verdict of one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphAnalysis {
    pub summary: GraphSummary,
    pub in_degree: Histogram,
    pub out_degree: Histogram,
    pub depth: Histogram,
    pub rrl: Histogram,
    pub verdict: CollapseVerdict,
}

pub fn analyze(dag: &Dag, name: &str, options: &AnalysisOptions) -> Result<GraphAnalysis> {
    let summary = summarize(dag, name)?;
    let rrl = rrl_sample_parallel(dag, options.walks, options.seed, options.workers)?;
    let verdict = collapse_test(&rrl, options.beta, options.threshold)?;
    Ok(GraphAnalysis {
        summary,
        in_degree: in_degree_histogram(dag),
        out_degree: out_degree_histogram(dag),
        depth: depth_distribution(dag),
        rrl,
        verdict,
    })
}

/// Default relative difference above which a scalar is flagged.
pub const DEFAULT_MISMATCH_TOLERANCE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub name: String,
    pub real: f64,
    pub random: f64,
    /// `|real - random| / max(|real|, |random|)`, zero when both are zero.
    pub relative: f64,
    /// `real / random`, absent when `random` is zero.
    pub ratio: Option<f64>,
    pub flagged: bool,
}

impl Divergence {
    fn new(name: &str, real: f64, random: f64, tolerance: f64) -> Self {
        let scale = real.abs().max(random.abs());
        let relative = if scale == 0.0 { 0.0 } else { (real - random).abs() / scale };
        Self {
            name: name.to_string(),
            real,
            random,
            relative,
            ratio: (random != 0.0).then(|| real / random),
            flagged: relative > tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub real: GraphSummary,
    pub random: GraphSummary,
    pub tolerance: f64,
    pub divergences: Vec<Divergence>,
    pub real_verdict: CollapseVerdict,
    pub random_verdict: CollapseVerdict,
    pub verdict_mismatch: bool,
}

impl ComparisonReport {
    pub fn flagged(&self) -> impl Iterator<Item = &Divergence> {
        self.divergences.iter().filter(|d| d.flagged)
    }

    pub fn divergence(&self, name: &str) -> Option<&Divergence> {
        self.divergences.iter().find(|d| d.name == name)
    }
}

/// Side-by-side comparison of a real graph and its random counterpart.
pub fn compare(real: &GraphAnalysis, random: &GraphAnalysis, tolerance: f64) -> ComparisonReport {
    let scalars = |a: &GraphAnalysis| {
        let s = &a.summary;
        let max = |h: &Histogram| h.max().unwrap_or(0) as f64;
        [
            ("node_count", s.node_count as f64),
            ("edge_factor", s.edge_factor),
            ("root_factor", s.root_factor),
            ("leaf_factor", s.leaf_factor),
            ("out_degree_variance", s.degree_stats.out_variance),
            ("in_degree_variance", s.degree_stats.in_variance),
            ("out_degree_max", max(&a.out_degree)),
            ("in_degree_max", max(&a.in_degree)),
            ("depth_max", max(&a.depth)),
            ("rrl_mean", a.rrl.mean().unwrap_or(0.0)),
            ("rrl_max", max(&a.rrl)),
        ]
    };
    let divergences = scalars(real)
        .into_iter()
        .zip(scalars(random))
        .map(|((name, a), (_, b))| Divergence::new(name, a, b, tolerance))
        .collect();
    ComparisonReport {
        real: real.summary.clone(),
        random: random.summary.clone(),
        tolerance,
        divergences,
        real_verdict: real.verdict,
        random_verdict: random.verdict,
        verdict_mismatch: real.verdict.collapsed != random.verdict.collapsed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Dag {
        Dag::new(n, (1..n as NodeId).map(|v| (v - 1, v))).unwrap()
    }

    fn fork() -> Dag {
        // r=0, x=1, a=2: r->x, r->a, a->x
        Dag::new(3, [(0, 1), (0, 2), (2, 1)]).unwrap()
    }

    #[test]
    fn histogram_statistics() {
        let h = Histogram::from_values([1, 1, 3, 3, 3, 3]);
        assert_eq!(h.total(), 6);
        assert_eq!(h.min(), Some(1));
        assert_eq!(h.max(), Some(3));
        assert!((h.mean().unwrap() - 14.0 / 6.0).abs() < 1e-15);
        let m = 14.0 / 6.0;
        let var = (2.0 * (1.0 - m) * (1.0f64 - m) + 4.0 * (3.0 - m) * (3.0f64 - m)) / 6.0;
        assert!((h.variance().unwrap() - var).abs() < 1e-15);
        assert_eq!(h.quantile(0.0), Some(1));
        assert_eq!(h.quantile(1.0 / 3.0), Some(1));
        assert_eq!(h.quantile(0.34), Some(3));
        assert_eq!(h.quantile(1.0), Some(3));
        assert_eq!(Histogram::new().mean(), None);
        assert_eq!(Histogram::new().quantile(0.5), None);
    }

    #[test]
    fn quantile_is_monotone() {
        let h = Histogram::from_values([5, 2, 9, 9, 1, 4, 4, 4, 7]);
        let qs: Vec<u64> = (0..=20).map(|i| h.quantile(i as f64 / 20.0).unwrap()).collect();
        assert!(qs.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn depth_maps() {
        let tree = Dag::new(2, [(0, 1)]).unwrap();
        assert_eq!(depth_map(&tree).as_slice(), &[0, 1]);

        let shortcut = Dag::new(4, [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]).unwrap();
        assert_eq!(depth_map(&shortcut).get(3), Some(1));
    }

    #[test]
    fn depth_distributions() {
        let tree7 = Dag::new(7, (1..7u32).map(|v| ((v - 1) / 2, v))).unwrap();
        assert_eq!(depth_distribution(&tree7), Histogram::from_values([2, 2, 2, 2]));
        assert_eq!(depth_distribution(&chain(6)), Histogram::from_values([5]));
    }

    #[test]
    fn rrl_exact_examples() {
        for k in 1..6 {
            let d = rrl_exact(&chain(k + 1)).unwrap();
            assert_eq!(d.mass, BTreeMap::from([(k as u64, 1.0)]));
        }
        let diamond = Dag::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(rrl_exact(&diamond).unwrap().mass, BTreeMap::from([(2, 1.0)]));
        assert_eq!(rrl_exact(&fork()).unwrap().mass, BTreeMap::from([(1, 0.5), (2, 0.5)]));
        // isolated node: a root that is also a leaf walks 0 steps
        let mixed = Dag::new(3, [(0, 1)]).unwrap();
        assert_eq!(rrl_exact(&mixed).unwrap().mass, BTreeMap::from([(0, 0.5), (1, 0.5)]));
    }

    #[test]
    fn rrl_exact_cap() {
        assert!(matches!(
            rrl_exact_capped(&chain(5), 4),
            Err(Error::CapExceeded { node_count: 5, cap: 4 })
        ));
    }

    #[test]
    fn walk_mass_is_conserved_per_node() {
        let dag = crate::generate::rank_random_dag(40, 120, 3).unwrap();
        let (dist, totals) = propagate_walk_mass(&dag);
        assert!((dist.total_mass() - 1.0).abs() < 1e-9);
        let start = 1.0 / dag.roots().len() as f64;
        for v in 0..dag.node_count() as NodeId {
            let inflow: f64 = if dag.is_root(v) {
                start
            } else {
                dag.parents(v)
                    .iter()
                    .map(|&u| totals[u as usize] / dag.out_degree(u) as f64)
                    .sum()
            };
            assert!((inflow - totals[v as usize]).abs() < 1e-12);
        }
        let absorbed: f64 = dag.leaves().iter().map(|&v| totals[v as usize]).sum();
        assert!((absorbed - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rrl_sample_forced_path() {
        let dag = Dag::new(2, [(0, 1)]).unwrap();
        assert_eq!(rrl_sample(&dag, 500, 1).unwrap(), Histogram::from_values(vec![1; 500]));
        assert!(matches!(rrl_sample(&dag, 0, 1), Err(Error::ZeroWalks)));
    }

    #[test]
    fn rrl_sample_fork_within_three_sigma() {
        let walks = 20_000;
        let h = rrl_sample(&fork(), walks, 42).unwrap();
        assert_eq!(h.total(), walks);
        let sigma = (walks as f64 * 0.25).sqrt();
        assert!((h.count(1) as f64 - walks as f64 / 2.0).abs() <= 3.0 * sigma);
        assert_eq!(h.count(1) + h.count(2), walks);
    }

    #[test]
    fn rrl_sample_parallel_is_deterministic() {
        let dag = crate::generate::rank_random_dag(200, 800, 9).unwrap();
        let a = rrl_sample_parallel(&dag, 10_001, 5, 4).unwrap();
        let b = rrl_sample_parallel(&dag, 10_001, 5, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total(), 10_001);
        assert_eq!(rrl_sample_parallel(&dag, 999, 5, 1).unwrap(), rrl_sample(&dag, 999, 5).unwrap());
    }

    #[test]
    fn collapse_verdicts() {
        let v = collapse_test(&Histogram::from_values(vec![1; 100]), 10, 0.99).unwrap();
        assert!(v.collapsed);
        assert_eq!(v.fraction_below, 1.0);

        let uniform = Histogram::from_values(1..=100);
        let v = collapse_test(&uniform, 10, 0.99).unwrap();
        assert_eq!(v.fraction_below, 0.09);
        assert!(!v.collapsed);

        let edge = Histogram::from_values((0..100).map(|i| if i < 99 { 1 } else { 10 }));
        assert!(collapse_test(&edge, 10, 0.99).unwrap().collapsed);

        assert!(matches!(collapse_test(&Histogram::new(), 10, 0.99), Err(Error::EmptyHistogram)));
    }

    #[test]
    fn chain_summary() {
        let s = summarize(&chain(3), "chain").unwrap();
        assert_eq!(s.node_count, 3);
        assert!((s.edge_factor - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.root_factor - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.leaf_factor - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(summarize(&Dag::empty(0).unwrap(), "x"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn compare_with_self_has_zero_divergence() {
        let dag = crate::generate::rank_random_dag(300, 900, 1).unwrap();
        let a = analyze(&dag, "g", &AnalysisOptions { walks: 2000, ..Default::default() }).unwrap();
        let report = compare(&a, &a, DEFAULT_MISMATCH_TOLERANCE);
        assert!(report.divergences.iter().all(|d| d.relative == 0.0 && !d.flagged));
        assert!(!report.verdict_mismatch);
    }

    #[test]
    fn compare_flags_in_degree_variance_gap() {
        let dag = chain(4);
        let mut real = analyze(&dag, "WORDNET", &AnalysisOptions { walks: 10, ..Default::default() }).unwrap();
        let mut random = real.clone();
        real.summary.degree_stats.in_variance = 34.55;
        random.summary.degree_stats.in_variance = 5.32;
        let report = compare(&real, &random, DEFAULT_MISMATCH_TOLERANCE);
        let d = report.divergence("in_degree_variance").unwrap();
        assert!(d.flagged);
        assert!((d.ratio.unwrap() - 34.55 / 5.32).abs() < 1e-12);
        assert_eq!(report.flagged().count(), 1);
    }
}
