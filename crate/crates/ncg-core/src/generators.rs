//! Seeded random initial configurations: uniform labeled trees via
//! Prüfer sequences and connected Erdős–Rényi graphs, with edge
//! ownership assigned by fair coin.
//!
//! All generators are deterministic in their seed. Topology and
//! ownership draw from separate sub-streams so that changing one aspect
//! of a generator cannot perturb the other.

use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::OwnedGraph;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("no connected graph found in {0} attempts")]
    MaxAttemptsExceeded(usize),
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn substream(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(tag)))
}

/// Tree drawn uniformly from the `n^(n-2)` labeled trees on `n >= 2`
/// vertices (uniform Prüfer sequence, decoded); each edge's owner is a
/// fair coin toss between its endpoints.
pub fn random_tree(n: usize, seed: u64) -> OwnedGraph {
    assert!(n >= 2, "a tree needs at least 2 vertices");
    let mut topology = substream(seed, 0);
    let edges = if n == 2 {
        vec![(0, 1)]
    } else {
        let prufer: Vec<usize> = (0..n - 2).map(|_| topology.gen_range(0..n)).collect();
        decode_prufer(&prufer)
    };
    assign_owners(n, &edges, &mut substream(seed, 1))
}

fn decode_prufer(prufer: &[usize]) -> Vec<(usize, usize)> {
    let n = prufer.len() + 2;
    let mut degree = vec![1u32; n];
    for &a in prufer {
        degree[a] += 1;
    }
    let mut leaves: BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &a in prufer {
        let leaf = leaves.pop().unwrap().0;
        edges.push((leaf, a));
        degree[a] -= 1;
        if degree[a] == 1 {
            leaves.push(std::cmp::Reverse(a));
        }
    }
    let u = leaves.pop().unwrap().0;
    let v = leaves.pop().unwrap().0;
    edges.push((u, v));
    edges
}

fn assign_owners(n: usize, edges: &[(usize, usize)], rng: &mut ChaCha8Rng) -> OwnedGraph {
    let mut g = OwnedGraph::new(n);
    for &(u, v) in edges {
        let owner = if rng.gen_bool(0.5) { u } else { v };
        g.add_edge(u, v, owner).expect("generator produced a simple graph");
    }
    g
}

/// Erdős–Rényi `G(n, p)` conditioned on connectivity: each unordered
/// pair becomes an edge independently with probability `p`; disconnected
/// draws are discarded and regenerated, up to `max_attempts` times.
pub fn gnp_connected(
    n: usize,
    p: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<OwnedGraph, GenError> {
    assert!(n >= 2, "need at least 2 vertices");
    assert!((0.0..=1.0).contains(&p), "p must be a probability");
    assert!(max_attempts >= 1);
    let mut topology = substream(seed, 2);
    let mut ownership = substream(seed, 3);
    for _ in 0..max_attempts {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if topology.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = assign_owners(n, &edges, &mut ownership);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GenError::MaxAttemptsExceeded(max_attempts))
}
