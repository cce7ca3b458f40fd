//! Cost functions and worst-case evaluation of strategy switches.
//!
//! A player pays `alpha` per bought edge plus a usage term: her
//! eccentricity (Max variant) or her sum of distances (Sum variant).
//! With a bounded view, a switch is scored against the worst network
//! compatible with the view: for Max that worst case is the view itself;
//! for Sum the same holds unless the switch pushes a frontier vertex
//! beyond distance `k`, in which case unseen vertices hanging off that
//! frontier vertex can make the switch arbitrarily bad.

use std::collections::BTreeSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::OwnedGraph;
use crate::view::View;

/// Absolute tolerance for cost comparisons.
pub const COST_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Max,
    Sum,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Variant::Max),
            "sum" => Ok(Variant::Sum),
            other => Err(format!("unknown variant `{}` (expected max or sum)", other)),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Max => write!(f, "max"),
            Variant::Sum => write!(f, "sum"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("view radius k must be at least 1")]
    ZeroRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub variant: Variant,
    pub alpha: f64,
    pub k: usize,
}

impl GameConfig {
    pub fn new(variant: Variant, alpha: f64, k: usize) -> Result<Self, ConfigError> {
        if !(alpha > 0.0) {
            return Err(ConfigError::NonPositiveAlpha(alpha));
        }
        if k == 0 {
            return Err(ConfigError::ZeroRadius);
        }
        Ok(GameConfig { variant, alpha, k })
    }
}

/// A set of endpoints bought by the acting player.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Strategy {
    endpoints: BTreeSet<usize>,
}

impl Strategy {
    pub fn new(endpoints: impl IntoIterator<Item = usize>) -> Self {
        Strategy {
            endpoints: endpoints.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Strategy {
            endpoints: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.endpoints.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.endpoints.iter().copied()
    }

    pub fn endpoints(&self) -> &BTreeSet<usize> {
        &self.endpoints
    }
}

/// Result of evaluating a strategy switch on a view.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaOutcome {
    /// Worst-case cost difference (new minus old); negative improves.
    Finite(f64),
    /// Sum variant only: the switch pushes a frontier vertex beyond `k`,
    /// so the worst case over compatible networks is unbounded.
    RejectedFrontier,
    /// Some view vertex becomes unreachable from the player.
    Disconnecting,
}

#[derive(Debug, Error, PartialEq)]
pub enum DeltaError {
    #[error("endpoint {0} is outside the player's view")]
    EndpointOutsideView(usize),
    #[error("a strategy cannot contain the acting player")]
    SelfEndpoint,
}

/// `true` iff the outcome is a strictly negative finite difference.
pub fn is_improving(outcome: &DeltaOutcome) -> bool {
    matches!(outcome, DeltaOutcome::Finite(x) if *x < -COST_EPS)
}

/// Cost of player `u`: `alpha * |strategy| + usage`, or `None` when some
/// vertex is unreachable from `u`.
pub fn player_cost(g: &OwnedGraph, u: usize, cfg: &GameConfig) -> Option<f64> {
    let dist = g.bfs_distances(u);
    let usage = usage_from_distances(dist.iter().map(|d| d.map(|x| x as f64)), cfg.variant)?;
    Some(cfg.alpha * g.bought_count(u) as f64 + usage)
}

fn usage_from_distances(
    dists: impl Iterator<Item = Option<f64>>,
    variant: Variant,
) -> Option<f64> {
    let mut acc = 0.0f64;
    for d in dists {
        let d = d?;
        match variant {
            Variant::Max => acc = acc.max(d),
            Variant::Sum => acc += d,
        }
    }
    Some(acc)
}

/// Total cost over all players: `alpha * m + sum of usage terms`.
pub fn social_cost(g: &OwnedGraph, cfg: &GameConfig) -> Option<f64> {
    let mut total = cfg.alpha * g.edge_count() as f64;
    for u in 0..g.n() {
        let dist = g.bfs_distances(u);
        total += usage_from_distances(dist.iter().map(|d| d.map(|x| x as f64)), cfg.variant)?;
    }
    Some(total)
}

/// Closed-form social cost of the spanning star on `n >= 2` vertices.
pub fn star_cost(n: usize, cfg: &GameConfig) -> f64 {
    assert!(n >= 2, "a star needs at least 2 vertices");
    let nf = n as f64;
    let edges = cfg.alpha * (nf - 1.0);
    match cfg.variant {
        Variant::Max => edges + 1.0 + 2.0 * (nf - 1.0),
        Variant::Sum => edges + (nf - 1.0) + (nf - 1.0) * (1.0 + 2.0 * (nf - 2.0)),
    }
}

/// Worst-case cost difference for the view's center switching to
/// `new_strategy` (endpoints in global ids, all inside the view).
///
/// The modified view H' keeps edges bought by others towards the player
/// and replaces the player's owned edges with edges to the new endpoints.
pub fn delta(view: &View, new_strategy: &Strategy, cfg: &GameConfig) -> Result<DeltaOutcome, DeltaError> {
    let mut local = BTreeSet::new();
    for e in new_strategy.iter() {
        if e == view.center_global() {
            return Err(DeltaError::SelfEndpoint);
        }
        let l = view
            .to_local(e)
            .ok_or(DeltaError::EndpointOutsideView(e))?;
        local.insert(l);
    }
    Ok(delta_local(view, &local, cfg))
}

/// Same as [`delta`] with endpoints already in local view ids.
pub(crate) fn delta_local(view: &View, endpoints: &BTreeSet<usize>, cfg: &GameConfig) -> DeltaOutcome {
    let old_owned = view.center_owned().len();
    let dist = distances_after_switch(view, endpoints);

    // a lost vertex outranks a stretched frontier
    if dist.iter().any(|d| d.is_none()) {
        return DeltaOutcome::Disconnecting;
    }
    let mut usage_new = 0.0f64;
    for (i, d) in dist.iter().enumerate() {
        let d = d.unwrap();
        if cfg.variant == Variant::Sum && view.dist(i) == view.k() && d > view.k() {
            return DeltaOutcome::RejectedFrontier;
        }
        match cfg.variant {
            Variant::Max => usage_new = usage_new.max(d as f64),
            Variant::Sum => usage_new += d as f64,
        }
    }

    let usage_old = match cfg.variant {
        Variant::Max => (0..view.len()).map(|i| view.dist(i)).max().unwrap_or(0) as f64,
        Variant::Sum => (0..view.len()).map(|i| view.dist(i)).sum::<usize>() as f64,
    };
    let edge_diff = endpoints.len() as f64 - old_owned as f64;
    DeltaOutcome::Finite(cfg.alpha * edge_diff + usage_new - usage_old)
}

/// BFS distances from the center in the switched view H'.
///
/// The adjacency of non-center vertices is reused unchanged: removed
/// center edges only matter when expanding the center, and stale entries
/// pointing back at the center are harmless because the source is
/// already settled.
pub(crate) fn distances_after_switch(view: &View, endpoints: &BTreeSet<usize>) -> Vec<Option<usize>> {
    let g = view.graph();
    let mut center_adj: BTreeSet<usize> = endpoints.clone();
    center_adj.extend(view.center_in_neighbors());

    let mut dist = vec![None; view.len()];
    dist[0] = Some(0);
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(0usize);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].unwrap();
        let step = |y: usize, dist: &mut Vec<Option<usize>>, queue: &mut std::collections::VecDeque<usize>| {
            if dist[y].is_none() {
                dist[y] = Some(dx + 1);
                queue.push_back(y);
            }
        };
        if x == 0 {
            for &y in &center_adj {
                step(y, &mut dist, &mut queue);
            }
        } else {
            for &y in g.neighbors(x) {
                if y != 0 {
                    step(y, &mut dist, &mut queue);
                }
            }
        }
    }
    dist
}

/// Cost of the center's current strategy measured on its view.
pub fn current_view_cost(view: &View, cfg: &GameConfig) -> f64 {
    let usage = match cfg.variant {
        Variant::Max => (0..view.len()).map(|i| view.dist(i)).max().unwrap_or(0) as f64,
        Variant::Sum => (0..view.len()).map(|i| view.dist(i)).sum::<usize>() as f64,
    };
    cfg.alpha * view.center_owned().len() as f64 + usage
}
