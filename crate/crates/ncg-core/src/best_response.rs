//! Exact best-response computation and equilibrium verification.
//!
//! Max variant: guess the post-move eccentricity `h`, then the optimal
//! strategy is a minimum dominating set of the `(h-1)`-th power of the
//! view minus the player, with the players that bought an edge towards
//! her forced into the solution. Sweeping `h` and keeping the cheapest
//! candidate is exact.
//!
//! Sum variant: exact subset enumeration over view vertices (the view is
//! capped), skipping strategies that disconnect the view or push a
//! frontier vertex beyond distance `k`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::game::{current_view_cost, GameConfig, Strategy, Variant, COST_EPS};
use crate::graph::SimpleGraph;
use crate::view::View;

/// Default cap on view size for the exact Sum solver.
pub const DEFAULT_SUM_CAP: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("view has {size} vertices, above the exact-search cap {cap}")]
    ViewTooLarge { size: usize, cap: usize },
    #[error("graph is disconnected")]
    Disconnected,
}

/// Minimum dominating set instance with a forced vertex subset.
#[derive(Debug, Clone)]
pub struct DominatingInstance {
    pub graph: SimpleGraph,
    pub forced: BTreeSet<usize>,
}

/// Fixed-capacity bitset over vertex ids.
#[derive(Clone, PartialEq, Eq)]
struct Mask {
    words: Vec<u64>,
    len: usize,
}

impl Mask {
    fn new(len: usize) -> Self {
        Mask {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn union_with(&mut self, other: &Mask) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    fn is_full(&self) -> bool {
        self.count() == self.len
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn count_new(&self, dominated: &Mask) -> usize {
        self.words
            .iter()
            .zip(&dominated.words)
            .map(|(w, d)| (w & !d).count_ones() as usize)
            .sum()
    }

    fn intersects(&self, other: &Mask) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }
}

struct MdsSearch<'a> {
    closed: &'a [Mask],
    n: usize,
    /// Solutions must be strictly smaller than this to be recorded.
    bound: usize,
    best: Option<Vec<usize>>,
}

impl MdsSearch<'_> {
    fn greedy(&self, mut chosen: Vec<usize>, mut dominated: Mask) -> Vec<usize> {
        while !dominated.is_full() {
            let mut pick = usize::MAX;
            let mut gain = 0;
            for c in 0..self.n {
                let g = self.closed[c].count_new(&dominated);
                if g > gain {
                    gain = g;
                    pick = c;
                }
            }
            chosen.push(pick);
            dominated.union_with(&self.closed[pick]);
        }
        chosen
    }

    fn recurse(&mut self, chosen: &mut Vec<usize>, dominated: &Mask, banned: &Mask) {
        if chosen.len() >= self.bound {
            return;
        }
        if dominated.is_full() {
            self.bound = chosen.len();
            self.best = Some(chosen.clone());
            return;
        }

        // Lower bound: undominated vertices with pairwise-disjoint closed
        // neighborhoods need pairwise-distinct dominators. Also pick the
        // branching vertex (fewest available dominators) in the same scan.
        let mut packing = 0;
        let mut blocked = Mask::new(self.n);
        let mut branch_v = usize::MAX;
        let mut branch_cands = usize::MAX;
        for v in 0..self.n {
            if dominated.contains(v) {
                continue;
            }
            let cands = self.closed[v].count_new(banned);
            if cands == 0 {
                return; // v can no longer be dominated on this branch
            }
            if cands < branch_cands {
                branch_cands = cands;
                branch_v = v;
            }
            if !self.closed[v].intersects(&blocked) {
                packing += 1;
                blocked.union_with(&self.closed[v]);
            }
        }
        if chosen.len() + packing >= self.bound {
            return;
        }

        let mut cands: Vec<usize> = (0..self.n)
            .filter(|&c| self.closed[branch_v].contains(c) && !banned.contains(c))
            .collect();
        cands.sort_by_key(|&c| (usize::MAX - self.closed[c].count_new(dominated), c));

        let mut local_banned = banned.clone();
        for c in cands {
            chosen.push(c);
            let mut dom = dominated.clone();
            dom.union_with(&self.closed[c]);
            self.recurse(chosen, &dom, &local_banned);
            chosen.pop();
            local_banned.set(c);
        }
    }
}

/// Exact minimum dominating set containing all forced vertices,
/// minimizing the number of non-forced vertices. Branch and bound with a
/// greedy upper bound and a disjoint-neighborhood lower bound.
pub fn min_dominating_set(inst: &DominatingInstance) -> Vec<usize> {
    let n = inst.graph.n();
    if n == 0 {
        return Vec::new();
    }
    let mut closed = Vec::with_capacity(n);
    for v in 0..n {
        let mut mask = Mask::new(n);
        mask.set(v);
        for &w in inst.graph.neighbors(v) {
            mask.set(w);
        }
        closed.push(mask);
    }
    solve_mds_masks(&closed, inst.forced.iter().copied(), n)
        .expect("an unbudgeted dominating-set search always succeeds")
}

/// Mask-level entry point shared by [`min_dominating_set`] and the
/// eccentricity sweep, which builds the power neighborhoods directly.
///
/// Solutions larger than `max_size` are not of interest to the caller;
/// when none exists within that budget the search refutes quickly and
/// returns `None`.
fn solve_mds_masks(
    closed: &[Mask],
    forced: impl IntoIterator<Item = usize>,
    max_size: usize,
) -> Option<Vec<usize>> {
    let base: Vec<usize> = forced.into_iter().collect();
    if base.len() > max_size {
        return None;
    }
    let n = closed.len();
    let mut dominated = Mask::new(n);
    for &f in &base {
        dominated.union_with(&closed[f]);
    }

    let mut search = MdsSearch {
        closed,
        n,
        bound: max_size + 1,
        best: None,
    };
    let greedy = search.greedy(base.clone(), dominated.clone());
    if greedy.len() < search.bound {
        search.bound = greedy.len();
        search.best = Some(greedy);
    }

    let banned = Mask::new(n);
    let mut chosen = base;
    search.recurse(&mut chosen, &dominated, &banned);

    let mut sol = search.best?;
    sol.sort_unstable();
    Some(sol)
}

/// A best response together with its view cost and the difference to the
/// player's current view cost.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    /// Endpoints in global vertex ids.
    pub strategy: Strategy,
    pub cost: f64,
    pub delta_vs_current: f64,
}

/// Ties are broken towards fewer bought edges, then the lexicographically
/// smallest endpoint set, for reproducible dynamics.
fn better(cost: f64, strategy: &Strategy, best: &Option<(f64, Strategy)>) -> bool {
    match best {
        None => true,
        Some((bc, bs)) => {
            if cost < bc - COST_EPS {
                true
            } else if cost > bc + COST_EPS {
                false
            } else {
                (strategy.len(), strategy) < (bs.len(), bs)
            }
        }
    }
}

/// Exact best response in the Max variant via the eccentricity-guessing
/// dominating-set reduction.
pub fn best_response_max(view: &View, cfg: &GameConfig) -> BestResponse {
    debug_assert_eq!(cfg.variant, Variant::Max);
    let m = view.len();
    let current = current_view_cost(view, cfg);
    if m == 1 {
        return BestResponse {
            strategy: Strategy::empty(),
            cost: 0.0,
            delta_vs_current: -current,
        };
    }

    // Vertices of the view minus the player, re-indexed by: local id i
    // (1-based within the view) maps to i - 1.
    let rest = m - 1;
    let mut without = SimpleGraph::new(rest);
    for (a, b, _) in view.graph().edges_with_owner() {
        if a != 0 && b != 0 {
            without.add_edge(a - 1, b - 1).unwrap();
        }
    }
    // Pairs bucketed by distance, so the (h-1)-th power neighborhoods can
    // grow incrementally across the h sweep.
    let mut by_distance: Vec<Vec<(usize, usize)>> = vec![Vec::new(); rest];
    for v in 0..rest {
        for (w, d) in without.bfs_distances(v).into_iter().enumerate() {
            if let Some(d) = d {
                if d > 0 {
                    by_distance[d].push((v, w));
                }
            }
        }
    }
    let forced: BTreeSet<usize> = view.center_in_neighbors().iter().map(|&l| l - 1).collect();

    let mut closed: Vec<Mask> = (0..rest)
        .map(|v| {
            let mut mask = Mask::new(rest);
            mask.set(v);
            mask
        })
        .collect();
    // Seed with the current strategy: it caps the sweep and gives each h
    // a size budget, so hopeless dominating-set instances refute fast.
    let current_strategy = Strategy::new(view.center_owned().iter().map(|&l| view.to_global(l)));
    let mut best: Option<(f64, Strategy)> = Some((current, current_strategy));
    for h in 1..=rest {
        let bc = best.as_ref().map(|(c, _)| *c).unwrap();
        if h as f64 > bc + COST_EPS {
            break;
        }
        // extend the neighborhoods to the (h-1)-th power
        if h >= 2 {
            for &(v, w) in &by_distance[h - 1] {
                closed[v].set(w);
            }
        }
        // strategies costlier than the incumbent can never be chosen
        let budget = ((bc + COST_EPS - h as f64) / cfg.alpha).floor() as usize;
        let sol = match solve_mds_masks(&closed, forced.iter().copied(), forced.len() + budget) {
            Some(sol) => sol,
            None => continue,
        };
        let extra: Vec<usize> = sol.iter().copied().filter(|v| !forced.contains(v)).collect();
        let cost = cfg.alpha * extra.len() as f64 + h as f64;
        let strategy = Strategy::new(extra.iter().map(|&v| view.to_global(v + 1)));
        if better(cost, &strategy, &best) {
            best = Some((cost, strategy));
        }
        if extra.is_empty() {
            break; // larger h can only cost more
        }
    }

    let (cost, strategy) = best.expect("the current strategy seeds the sweep");
    BestResponse {
        strategy,
        cost,
        delta_vs_current: cost - current,
    }
}

/// Exact best response in the Sum variant by subset enumeration in
/// (size, lexicographic) order with cost-bound pruning.
pub fn best_response_sum(
    view: &View,
    cfg: &GameConfig,
    cap: usize,
) -> Result<BestResponse, SolverError> {
    debug_assert_eq!(cfg.variant, Variant::Sum);
    let m = view.len();
    if m > cap {
        return Err(SolverError::ViewTooLarge { size: m, cap });
    }
    let current = current_view_cost(view, cfg);
    if m == 1 {
        return Ok(BestResponse {
            strategy: Strategy::empty(),
            cost: 0.0,
            delta_vs_current: -current,
        });
    }

    let min_usage = (m - 1) as f64; // every other vertex at distance >= 1
    let mut best: Option<(f64, BTreeSet<usize>)> = None;
    let mut subset = BTreeSet::new();
    for size in 0..m {
        if let Some((bc, _)) = &best {
            if cfg.alpha * size as f64 + min_usage >= bc - COST_EPS {
                break;
            }
        }
        enumerate_size(view, cfg, size, 1, &mut subset, &mut best);
    }

    let (cost, locals) = best.expect("the current strategy is always feasible");
    let strategy = Strategy::new(locals.iter().map(|&l| view.to_global(l)));
    Ok(BestResponse {
        strategy,
        cost,
        delta_vs_current: cost - current,
    })
}

fn enumerate_size(
    view: &View,
    cfg: &GameConfig,
    remaining: usize,
    start: usize,
    subset: &mut BTreeSet<usize>,
    best: &mut Option<(f64, BTreeSet<usize>)>,
) {
    if remaining == 0 {
        if let Some(cost) = feasible_sum_cost(view, subset, cfg) {
            let strictly_better = match best {
                None => true,
                Some((bc, _)) => cost < *bc - COST_EPS,
            };
            if strictly_better {
                *best = Some((cost, subset.clone()));
            }
        }
        return;
    }
    let last = view.len() - remaining;
    for v in start..=last {
        subset.insert(v);
        enumerate_size(view, cfg, remaining - 1, v + 1, subset, best);
        subset.remove(&v);
    }
}

/// View cost of a candidate Sum strategy, or `None` when it disconnects
/// the view or pushes a frontier vertex beyond `k`.
fn feasible_sum_cost(view: &View, endpoints: &BTreeSet<usize>, cfg: &GameConfig) -> Option<f64> {
    let dist = crate::game::distances_after_switch(view, endpoints);
    let mut usage = 0.0;
    for (i, d) in dist.iter().enumerate() {
        let d = (*d)?;
        if view.dist(i) == view.k() && d > view.k() {
            return None;
        }
        usage += d as f64;
    }
    Some(cfg.alpha * endpoints.len() as f64 + usage)
}

/// Variant dispatch for a single view.
pub fn best_response(view: &View, cfg: &GameConfig, sum_cap: usize) -> Result<BestResponse, SolverError> {
    match cfg.variant {
        Variant::Max => Ok(best_response_max(view, cfg)),
        Variant::Sum => best_response_sum(view, cfg, sum_cap),
    }
}

/// An improving deviation found by [`verify_lke`].
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub player: usize,
    pub strategy: Strategy,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LkeOutcome {
    Equilibrium,
    NotEquilibrium(Witness),
}

impl LkeOutcome {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, LkeOutcome::Equilibrium)
    }
}

/// Checks every player's best response on her view; returns the first
/// (lowest player id) improving witness, if any.
pub fn verify_lke(
    g: &crate::graph::OwnedGraph,
    cfg: &GameConfig,
    sum_cap: usize,
) -> Result<LkeOutcome, SolverError> {
    if !g.is_connected() {
        return Err(SolverError::Disconnected);
    }
    for u in 0..g.n() {
        let view = View::build(g, u, cfg.k);
        let br = best_response(&view, cfg, sum_cap)?;
        if br.delta_vs_current < -COST_EPS {
            return Ok(LkeOutcome::NotEquilibrium(Witness {
                player: u,
                strategy: br.strategy,
                delta: br.delta_vs_current,
            }));
        }
    }
    Ok(LkeOutcome::Equilibrium)
}
