#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use dagcollapse::generate::{self, GenerationConfig, MatchProfile};
use dagcollapse::{Dag, NodeId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Multi-source BFS from the roots over an adjacency list built from the raw edge list.
pub fn bfs_depths(dag: &Dag) -> Vec<Option<u32>> {
    let n = dag.node_count();
    let mut adj = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(u, v) in dag.edges() {
        adj[u as usize].push(v as usize);
        indeg[v as usize] += 1;
    }
    let mut depth = vec![None; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if indeg[v] == 0 {
            depth[v] = Some(0);
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = depth[u].unwrap();
        for &v in &adj[u] {
            if depth[v].is_none() {
                depth[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    depth
}

/// Exact RRL distribution by enumerating every root-to-leaf path.
pub fn rrl_by_paths(dag: &Dag) -> BTreeMap<u64, f64> {
    fn walk(dag: &Dag, v: NodeId, len: u64, p: f64, out: &mut BTreeMap<u64, f64>) {
        let children = dag.children(v);
        if children.is_empty() {
            *out.entry(len).or_insert(0.0) += p;
            return;
        }
        let q = p / children.len() as f64;
        for &c in children {
            walk(dag, c, len + 1, q, out);
        }
    }
    let mut out = BTreeMap::new();
    let roots = dag.roots();
    for &r in roots {
        walk(dag, r, 0, 1.0 / roots.len() as f64, &mut out);
    }
    out
}

/// `levels` layers of `width` nodes; every node links to every node of the next layer.
pub fn layered_dag(levels: usize, width: usize) -> Dag {
    let mut edges = Vec::new();
    for l in 0..levels.saturating_sub(1) {
        for a in 0..width {
            for b in 0..width {
                edges.push(((l * width + a) as NodeId, ((l + 1) * width + b) as NodeId));
            }
        }
    }
    Dag::new(levels * width, edges).unwrap()
}

/// Random permutation order with each forward pair kept with probability `p`.
pub fn permuted_gnp(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Dag {
    let mut perm: Vec<NodeId> = (0..n as NodeId).collect();
    perm.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((perm[i], perm[j]));
            }
        }
    }
    Dag::new(n, edges).unwrap()
}

/// Small DAG from one of several generators, chosen by the seed.
pub fn mixed_small_dag(seed: u64, max_n: usize) -> Dag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.random_range(2..=max_n);
    match seed % 4 {
        0 => {
            let p = rng.random_range(0.05..0.6);
            permuted_gnp(n, p, &mut rng)
        }
        1 => {
            let max_m = n * (n - 1) / 2;
            let m = rng.random_range(0..=max_m.min(3 * n));
            generate::rank_random_dag(n, m, seed).unwrap()
        }
        2 => {
            let tree = generate::complete_binary_tree(n).unwrap();
            let config = GenerationConfig::new(n, rng.random_range(1..=3), seed).with_epsilon(rng.random_range(0.0..2.0));
            generate::add_random_edges(&tree, &config).unwrap().0
        }
        _ => {
            let n = n.max(4);
            let roots = rng.random_range(1..=n / 2);
            let leaves = rng.random_range(1..=n - roots);
            let mut profile = MatchProfile {
                node_count: n,
                edge_count: 0,
                root_count: roots,
                leaf_count: leaves,
            };
            let legal = profile.legal_pair_count() as usize;
            profile.edge_count = rng.random_range(1..=legal.clamp(1, 2 * n));
            generate::matched_random(&profile, seed).unwrap()
        }
    }
}
