//! Fixtures shared by the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramsey_core::structure::FinStructure;
use ramsey_core::tree::{Node, TreeSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph with edge probability 1/2.
pub fn random_graph(n: usize, seed: u64) -> FinStructure {
    let mut r = rng(seed);
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| r.gen_bool(0.5))
        .collect();
    FinStructure::graph(n, &edges).expect("valid graph")
}

/// `count` random nodes of height at most `max_height`.
pub fn random_nodes(count: usize, max_height: usize, seed: u64) -> TreeSet {
    let mut r = rng(seed);
    let mut out = TreeSet::new();
    while out.len() < count {
        let len = r.gen_range(0..=max_height);
        out.insert(Node::from_bits((0..len).map(|_| r.gen_bool(0.5))));
    }
    out
}

/// The full binary tree `2^{≤depth}`.
pub fn full_tree(depth: usize) -> TreeSet {
    (0..=depth)
        .flat_map(|len| {
            (0..1usize << len).map(move |v| Node::from_bits((0..len).rev().map(move |j| v >> j & 1 == 1)))
        })
        .collect()
}
