//! Bounded-radius views: the induced subgraph on a player's k-ball,
//! which is her entire knowledge of the network.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::graph::OwnedGraph;

/// Induced subgraph on the k-ball around a player, with distance labels
/// and the frontier (vertices at distance exactly `k`).
///
/// Vertices are re-indexed to local ids `0..len()` in order of
/// `(distance from center, global id)`, so the center is always local 0.
#[derive(Debug, Clone)]
pub struct View {
    center_global: usize,
    k: usize,
    graph: OwnedGraph,
    to_global: Vec<usize>,
    to_local: HashMap<usize, usize>,
    dist: Vec<usize>,
    frontier: Vec<usize>,
}

impl View {
    /// Builds the view of `center` with radius `k >= 1` in `g`.
    pub fn build(g: &OwnedGraph, center: usize, k: usize) -> View {
        assert!(k >= 1, "view radius must be at least 1");
        assert!(center < g.n(), "center out of range");

        let mut dist_global = vec![None; g.n()];
        dist_global[center] = Some(0usize);
        let mut queue = VecDeque::new();
        queue.push_back(center);
        let mut members: Vec<(usize, usize)> = vec![(0, center)];
        while let Some(x) = queue.pop_front() {
            let dx = dist_global[x].unwrap();
            if dx == k {
                continue;
            }
            for &y in g.neighbors(x) {
                if dist_global[y].is_none() {
                    dist_global[y] = Some(dx + 1);
                    members.push((dx + 1, y));
                    queue.push_back(y);
                }
            }
        }
        members.sort_unstable();

        let to_global: Vec<usize> = members.iter().map(|&(_, v)| v).collect();
        let dist: Vec<usize> = members.iter().map(|&(d, _)| d).collect();
        let to_local: HashMap<usize, usize> = to_global
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();

        let mut graph = OwnedGraph::new(to_global.len());
        for (i, &gu) in to_global.iter().enumerate() {
            for &gv in g.neighbors(gu) {
                if let Some(&j) = to_local.get(&gv) {
                    if i < j {
                        let owner_global = g.owner(gu, gv).unwrap();
                        let owner = if owner_global == gu { i } else { j };
                        graph.add_edge(i, j, owner).unwrap();
                    }
                }
            }
        }

        let frontier: Vec<usize> = (0..dist.len()).filter(|&i| dist[i] == k).collect();

        View {
            center_global: center,
            k,
            graph,
            to_global,
            to_local,
            dist,
            frontier,
        }
    }

    /// Number of vertices in the view.
    pub fn len(&self) -> usize {
        self.to_global.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a view always contains its center
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn center_global(&self) -> usize {
        self.center_global
    }

    /// The induced subgraph in local ids; the center is local 0.
    pub fn graph(&self) -> &OwnedGraph {
        &self.graph
    }

    pub fn dist(&self, local: usize) -> usize {
        self.dist[local]
    }

    /// Local ids at distance exactly `k` from the center, ascending.
    pub fn frontier(&self) -> &[usize] {
        &self.frontier
    }

    pub fn to_global(&self, local: usize) -> usize {
        self.to_global[local]
    }

    pub fn to_local(&self, global: usize) -> Option<usize> {
        self.to_local.get(&global).copied()
    }

    /// The center's strategy within the view, in local ids.
    pub fn center_owned(&self) -> &BTreeSet<usize> {
        self.graph.strategy(0)
    }

    /// Local ids of players that bought an edge towards the center.
    pub fn center_in_neighbors(&self) -> Vec<usize> {
        self.graph.in_neighbors(0)
    }
}
