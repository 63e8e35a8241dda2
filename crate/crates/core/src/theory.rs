//! Monte Carlo and closed-form checks of the collapse argument for
//! tree-seeded generation.
//!
//! * [`lemma1_trial`]: a source drawn uniformly among nodes shallower than a
//!   target at depth `d` lies at depth `< d - 1` with probability
//!   `(k - 1) / (2k - 1)`, `k = 2^(d-1)`, i.e. essentially one half.
//! * [`selection_trial`] and [`bound_curves`]: with `n(1+eps)` uniform target
//!   draws over `n` nodes the expected number of never-drawn nodes is
//!   `n (1 - 1/n)^(n(1+eps))`, with a union bound and a Chernoff bound on the
//!   upper tail.
//! * [`collapse_experiment`]: after `c` iterations almost every node ends up
//!   within graph depth 2 of the root.
//!
//! Logarithms used for experiment sizes are base 2; the closed forms keep `e`
//! where the bounds are natural-log expressions.

use serde::{Deserialize, Serialize};

use rand::Rng as _;

use crate::dag::NodeId;
use crate::error::{Error, Result};
use crate::generate::{complete_binary_tree, GenerationConfig, SeededTree, TreeInsertion};
use crate::metrics::{depth_map, Histogram};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Result {
    pub conditioned_depth: u32,
    /// Nodes on level `conditioned_depth - 1`.
    pub k: u64,
    pub exact_probability: f64,
    pub empirical_probability: f64,
    pub hits: u64,
    pub samples: u64,
    /// Four binomial standard errors around the exact value.
    pub tolerance: f64,
    pub within_tolerance: bool,
}

/// Draws `samples` sources uniformly among the nodes of depth below
/// `target_depth` and counts those at depth below `target_depth - 1`.
pub fn lemma1_trial(tree: &SeededTree, target_depth: u32, samples: u64, seed: u64) -> Result<Lemma1Result> {
    let max_depth = tree.max_depth();
    if target_depth < 2 || target_depth > max_depth || target_depth > 62 {
        return Err(Error::DepthOutOfRange {
            depth: target_depth,
            max_depth,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let candidates = tree.nodes_above(target_depth) as NodeId;
    let mut rng = rng::stream(seed, 0);
    let hits = (0..samples)
        .filter(|_| tree.depth(rng.random_range(0..candidates)) < target_depth - 1)
        .count() as u64;

    let k = 1u64 << (target_depth - 1);
    let exact = (k - 1) as f64 / (2 * k - 1) as f64;
    let empirical = hits as f64 / samples as f64;
    let tolerance = 4.0 * (exact * (1.0 - exact) / samples as f64).sqrt();
    Ok(Lemma1Result {
        conditioned_depth: target_depth,
        k,
        exact_probability: exact,
        empirical_probability: empirical,
        hits,
        samples,
        tolerance,
        within_tolerance: (empirical - exact).abs() <= tolerance,
    })
}

/// `n (1 - 1/n)^(n(1+eps))`: expected count of nodes never drawn.
pub fn expected_unselected(n: u64, epsilon: f64) -> f64 {
    let n = n as f64;
    n * (n * (1.0 + epsilon) * (-1.0 / n).ln_1p()).exp()
}

/// Natural log of `C(n, gamma) (1 - 1/n)^(n gamma (1+eps))`, the union bound
/// on the probability that `gamma` given-size sets of nodes stay unselected.
pub fn union_bound_ln(n: u64, epsilon: f64, gamma: u64) -> f64 {
    let nf = n as f64;
    ln_binomial(n, gamma) + nf * gamma as f64 * (1.0 + epsilon) * (-1.0 / nf).ln_1p()
}

/// Natural log of `(e^delta / (1+delta)^(1+delta))^mu`.
pub fn chernoff_bound_ln(mu: f64, delta: f64) -> f64 {
    mu * (delta - (1.0 + delta) * delta.ln_1p())
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// `(log2 log2 n)^(log2 log2 n)`, the size of the set of nodes allowed to
/// escape collapse.
pub fn exception_reference(n: u64) -> f64 {
    let ll = (n as f64).log2().log2();
    if ll <= 0.0 {
        return 1.0;
    }
    ll.powf(ll)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrialResult {
    pub n: u64,
    pub epsilon: f64,
    pub draws_per_trial: u64,
    pub trials: u64,
    pub unselected: Vec<u64>,
    pub empirical_mean: f64,
    pub standard_error: f64,
    pub predicted_mean: f64,
    pub gamma: u64,
    pub union_bound: f64,
    /// Share of trials with at least `gamma` unselected nodes.
    pub fraction_at_least_gamma: f64,
    pub delta: f64,
    pub chernoff_bound: f64,
    /// Share of trials with more than `predicted_mean (1 + delta)` unselected.
    pub fraction_above_chernoff: f64,
}

/// Idealised coverage model: each trial draws `ceil(n(1+eps))` targets
/// uniformly from all `n` nodes and counts the nodes never drawn.
///
/// Trial `t` uses stream `(seed, t)`, so results do not depend on `workers`.
/// The bounds are evaluated at `gamma = ceil(log2 n)` and
/// `1 + delta = log2 log2 n` (floored at `delta = 0`).
pub fn selection_trial(n: u64, epsilon: f64, trials: u64, seed: u64, workers: usize) -> Result<SelectionTrialResult> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let draws = (n as f64 * (1.0 + epsilon)).ceil() as u64;
    let run = |t: u64| {
        let mut rng = rng::stream(seed, t);
        let mut hit = vec![false; n as usize];
        for _ in 0..draws {
            hit[rng.random_range(0..n as usize)] = true;
        }
        hit.iter().filter(|&&h| !h).count() as u64
    };
    let unselected = parallel_map(trials, workers, run);

    let tf = trials as f64;
    let mean = unselected.iter().sum::<u64>() as f64 / tf;
    let var = unselected.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / tf;
    let predicted = expected_unselected(n, epsilon);

    let gamma = ((n as f64).log2().ceil() as u64).clamp(1, n);
    let delta = ((n as f64).log2().log2() - 1.0).max(0.0);
    let threshold = predicted * (1.0 + delta);
    Ok(SelectionTrialResult {
        n,
        epsilon,
        draws_per_trial: draws,
        trials,
        empirical_mean: mean,
        standard_error: (var / tf).sqrt(),
        predicted_mean: predicted,
        gamma,
        union_bound: union_bound_ln(n, epsilon, gamma).exp().min(1.0),
        fraction_at_least_gamma: unselected.iter().filter(|&&x| x >= gamma).count() as f64 / tf,
        delta,
        chernoff_bound: chernoff_bound_ln(predicted, delta).exp().min(1.0),
        fraction_above_chernoff: unselected.iter().filter(|&&x| x as f64 > threshold).count() as f64 / tf,
        unselected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint<X> {
    pub x: X,
    pub ln_value: f64,
    /// `exp(ln_value)` clamped to 1.
    pub value: f64,
}

fn point<X>(x: X, ln_value: f64) -> BoundPoint<X> {
    BoundPoint {
        x,
        ln_value,
        value: ln_value.exp().min(1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurves {
    pub n: u64,
    pub epsilon: f64,
    pub mu: f64,
    pub union: Vec<BoundPoint<u64>>,
    pub chernoff: Vec<BoundPoint<f64>>,
}

/// Tabulates the union bound over `gammas` and the Chernoff factor over
/// `deltas`, in log space.
pub fn bound_curves(n: u64, epsilon: f64, gammas: &[u64], deltas: &[f64]) -> Result<BoundCurves> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if gammas.is_empty() || deltas.is_empty() {
        return Err(Error::InvalidParameter("gamma and delta ranges must be non-empty".into()));
    }
    if let Some(&g) = gammas.iter().find(|&&g| g == 0 || g > n) {
        return Err(Error::InvalidParameter(format!("gamma {g} outside [1, {n}]")));
    }
    if let Some(&d) = deltas.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::InvalidParameter(format!("delta {d} must be >= 0")));
    }
    let mu = expected_unselected(n, epsilon);
    Ok(BoundCurves {
        n,
        epsilon,
        mu,
        union: gammas.iter().map(|&g| point(g, union_bound_ln(n, epsilon, g))).collect(),
        chernoff: deltas.iter().map(|&d| point(d, chernoff_bound_ln(mu, d))).collect(),
    })
}

/// Depth evolution of one tree-seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseTrace {
    pub seed: u64,
    /// After iteration `i` (1-based), share of nodes with
    /// `dd < max(2, td / 2^i)`.
    pub fractions: Vec<f64>,
    /// Graph depth over all nodes after the last iteration.
    pub depth_histogram: Histogram,
    /// Nodes with graph depth above 2 after the last iteration.
    pub exceptions: u64,
    /// Share of leaves with graph depth at most 2.
    pub shallow_leaf_fraction: f64,
    /// Share of non-root nodes with graph depth at most 1.
    pub depth_one_fraction: f64,
    /// No node's depth grew from one iteration to the next.
    pub depth_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseExperiment {
    pub n: usize,
    pub iterations: usize,
    pub epsilon: f64,
    pub budget: usize,
    pub traces: Vec<CollapseTrace>,
    pub median_exceptions: f64,
    pub exception_reference: f64,
    pub min_shallow_leaf_fraction: f64,
}

pub fn collapse_trace(tree: &SeededTree, config: &GenerationConfig) -> Result<CollapseTrace> {
    let mut run = TreeInsertion::new(tree, config.clone())?;
    let td = tree.depths();
    let n = tree.node_count();
    let mut fractions = Vec::with_capacity(config.iterations);
    let mut previous: Option<Vec<u32>> = None;
    let mut depth_monotone = true;
    let mut last = None;
    for i in 1..=config.iterations {
        run.step();
        let dag = run.dag();
        let depths = depth_map(&dag);
        let dd = depths.as_slice();
        let scale = 2f64.powi(i as i32);
        let ok = (0..n)
            .filter(|&v| (dd[v] as f64) < (td[v] as f64 / scale).max(2.0))
            .count();
        fractions.push(ok as f64 / n as f64);
        if let Some(prev) = &previous {
            depth_monotone &= prev.iter().zip(dd).all(|(a, b)| b <= a);
        }
        previous = Some(dd.to_vec());
        last = Some(dag);
    }
    let dag = last.expect("at least one iteration");
    let dd = previous.expect("at least one iteration");
    let leaves = dag.leaves();
    let shallow = leaves.iter().filter(|&&v| dd[v as usize] <= 2).count();
    let non_roots = (0..n).filter(|&v| !dag.is_root(v as NodeId)).count();
    let depth_one = (0..n)
        .filter(|&v| !dag.is_root(v as NodeId) && dd[v] <= 1)
        .count();
    Ok(CollapseTrace {
        seed: config.seed,
        fractions,
        depth_histogram: Histogram::from_values(dd.iter().map(|&d| u64::from(d))),
        exceptions: dd.iter().filter(|&&d| d > 2).count() as u64,
        shallow_leaf_fraction: ratio(shallow, leaves.len()),
        depth_one_fraction: ratio(depth_one, non_roots),
        depth_monotone,
    })
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

/// Runs [`collapse_trace`] for every seed (in parallel over `workers`) and
/// aggregates the exception counts by their median.
pub fn collapse_experiment(
    n: usize,
    iterations: usize,
    epsilon: f64,
    seeds: &[u64],
    workers: usize,
) -> Result<CollapseExperiment> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one seed is required".into()));
    }
    let base = GenerationConfig::new(n, iterations, 0).with_epsilon(epsilon);
    base.validate()?;
    let tree = complete_binary_tree(n)?;
    let traces = parallel_map(seeds.len() as u64, workers, |i| {
        let config = GenerationConfig {
            seed: seeds[i as usize],
            ..base.clone()
        };
        collapse_trace(&tree, &config)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut exceptions: Vec<u64> = traces.iter().map(|t| t.exceptions).collect();
    exceptions.sort_unstable();
    let mid = exceptions.len() / 2;
    let median = if exceptions.len() % 2 == 1 {
        exceptions[mid] as f64
    } else {
        (exceptions[mid - 1] + exceptions[mid]) as f64 / 2.0
    };
    Ok(CollapseExperiment {
        n,
        iterations,
        epsilon,
        budget: base.budget(),
        median_exceptions: median,
        exception_reference: exception_reference(n as u64),
        min_shallow_leaf_fraction: traces
            .iter()
            .map(|t| t.shallow_leaf_fraction)
            .fold(1.0, f64::min),
        traces,
    })
}

/// Maps `f` over `0..count` on up to `workers` threads in contiguous chunks,
/// returning results in index order.
fn parallel_map<T, F>(count: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let shares = rng::partition(count, workers);
    if shares.len() == 1 {
        return (0..count).map(f).collect();
    }
    let f = &f;
    std::thread::scope(|scope| {
        let mut start = 0;
        let handles: Vec<_> = shares
            .iter()
            .map(|&len| {
                let range = start..start + len;
                start += len;
                scope.spawn(move || range.map(f).collect::<Vec<T>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
