//! Acceptance suite: one test per criterion, each printing a pass line
//! with its runtime (run with `--nocapture` to see them).

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ncg_core::best_response::{
    best_response_max, best_response_sum, verify_lke, LkeOutcome, DEFAULT_SUM_CAP,
};
use ncg_core::constructions::{build_cycle, build_torus, heawood, TorusParams};
use ncg_core::dynamics::{run, DynamicsOptions, RoundStats, TerminalStatus};
use ncg_core::game::{delta, DeltaOutcome, GameConfig, Strategy, Variant, COST_EPS};
use ncg_core::generators::random_tree;
use ncg_core::graph::OwnedGraph;
use ncg_core::view::View;

fn mix(parts: &[u64]) -> u64 {
    let mut x = 0x9e3779b97f4a7c15u64;
    for &p in parts {
        x ^= p.wrapping_add(0x517cc1b727220a95).wrapping_mul(0x2545f4914f6cdd1d);
        x = x.rotate_left(23).wrapping_mul(0xbf58476d1ce4e5b9);
    }
    x
}

/// BFS distances from `center` with its adjacency replaced by
/// `center_adj`; edges of other vertices are untouched (stale references
/// back to the center are ignored). Test-local oracle machinery.
fn bfs_switched(g: &OwnedGraph, center: usize, center_adj: &BTreeSet<usize>) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[center] = Some(0usize);
    let mut queue = std::collections::VecDeque::from([center]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].unwrap();
        let nbrs: Vec<usize> = if x == center {
            center_adj.iter().copied().collect()
        } else {
            g.neighbors(x).iter().copied().filter(|&y| y != center).collect()
        };
        for y in nbrs {
            if dist[y].is_none() {
                dist[y] = Some(dx + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Exhaustive best-response cost over all endpoint subsets of the view.
fn oracle_best_cost(view: &View, cfg: &GameConfig) -> f64 {
    let m = view.len();
    let in_nbrs: BTreeSet<usize> = view.center_in_neighbors().into_iter().collect();
    let mut best = f64::INFINITY;
    for mask in 0u64..(1 << (m - 1)) {
        let endpoints: BTreeSet<usize> = (1..m).filter(|&v| mask >> (v - 1) & 1 == 1).collect();
        let mut center_adj = endpoints.clone();
        center_adj.extend(in_nbrs.iter().copied());
        let dist = bfs_switched(view.graph(), 0, &center_adj);
        if dist.iter().any(|d| d.is_none()) {
            continue;
        }
        if cfg.variant == Variant::Sum
            && (0..m).any(|v| view.dist(v) == view.k() && dist[v].unwrap() > view.k())
        {
            continue;
        }
        let usage = match cfg.variant {
            Variant::Max => dist.iter().map(|d| d.unwrap()).max().unwrap() as f64,
            Variant::Sum => dist.iter().map(|d| d.unwrap()).sum::<usize>() as f64,
        };
        best = best.min(cfg.alpha * endpoints.len() as f64 + usage);
    }
    best
}

/// Random connected owned graph: a uniform tree plus a few chords.
fn random_owned_graph(rng: &mut ChaCha8Rng, n: usize) -> OwnedGraph {
    let mut g = random_tree(n, rng.gen());
    for _ in 0..rng.gen_range(0..4) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && !g.has_edge(u, v) {
            let owner = if rng.gen_bool(0.5) { u } else { v };
            g.add_edge(u, v, owner).unwrap();
        }
    }
    g
}

#[test]
fn criterion_1_best_response_oracle_equivalence() {
    let start = Instant::now();
    for (variant, view_cap, seed) in [(Variant::Max, 12usize, 0xC1A0u64), (Variant::Sum, 14, 0xC1B0)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut done = 0;
        while done < 200 {
            let n = rng.gen_range(6..16);
            let g = random_owned_graph(&mut rng, n);
            let k = rng.gen_range(1..4);
            let player = rng.gen_range(0..n);
            let view = View::build(&g, player, k);
            if view.len() < 2 || view.len() > view_cap {
                continue;
            }
            let alpha = [0.25, 0.6, 1.0, 2.0, 5.0][rng.gen_range(0..5)];
            let cfg = GameConfig::new(variant, alpha, k).unwrap();
            let solver_cost = match variant {
                Variant::Max => best_response_max(&view, &cfg).cost,
                Variant::Sum => best_response_sum(&view, &cfg, DEFAULT_SUM_CAP).unwrap().cost,
            };
            let oracle = oracle_best_cost(&view, &cfg);
            assert!(
                (solver_cost - oracle).abs() <= 1e-9,
                "{:?} solver cost {} != oracle {} (n={}, k={}, alpha={}, player={})",
                variant,
                solver_cost,
                oracle,
                n,
                k,
                alpha,
                player
            );
            done += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {:?}", elapsed);
    println!(
        "criterion 1 (best-response oracle equivalence, 200+200 graphs): PASS in {:?}",
        elapsed
    );
}

fn cycle_distance(n: usize, a: usize, b: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

#[test]
fn criterion_2_cycle_equilibria() {
    let start = Instant::now();
    for n in [10usize, 12] {
        for k in [2usize, 3, 4] {
            if n < 2 * k + 2 {
                continue;
            }
            for alpha in [(k - 1) as f64, k as f64, (2 * k) as f64] {
                let g = build_cycle(n).unwrap();
                let cfg = GameConfig::new(Variant::Max, alpha, k).unwrap();
                let outcome = verify_lke(&g, &cfg, DEFAULT_SUM_CAP).unwrap();
                assert!(
                    outcome.is_equilibrium(),
                    "C_{} should be stable at k={}, alpha={}: {:?}",
                    n,
                    k,
                    alpha,
                    outcome
                );
            }
        }
    }

    let g = build_cycle(12).unwrap();
    let cfg = GameConfig::new(Variant::Max, 0.5, 4).unwrap();
    match verify_lke(&g, &cfg, DEFAULT_SUM_CAP).unwrap() {
        LkeOutcome::NotEquilibrium(w) => {
            assert!(w.delta < -COST_EPS);
            assert!(
                w.strategy
                    .iter()
                    .any(|e| cycle_distance(12, w.player, e) >= 2),
                "witness should buy a chord: {:?}",
                w
            );
        }
        LkeOutcome::Equilibrium => panic!("C_12 at k=4, alpha=0.5 must admit an improving move"),
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {:?}", elapsed);
    println!("criterion 2 (cycle equilibria, 18 stable + 1 witness): PASS in {:?}", elapsed);
}

fn fig2_torus() -> ncg_core::constructions::TorusGraph {
    build_torus(&TorusParams::new(2, 2, vec![3, 4]).unwrap()).unwrap()
}

#[test]
fn criterion_3_torus_equilibrium_max() {
    let start = Instant::now();
    let t = fig2_torus();
    assert_eq!(t.graph.n(), 72);
    let cfg = GameConfig::new(Variant::Max, 2.0, 4).unwrap();
    let outcome = verify_lke(&t.graph, &cfg, DEFAULT_SUM_CAP).unwrap();
    assert!(
        outcome.is_equilibrium(),
        "stretched torus should be stable at alpha=2, k=4: {:?}",
        outcome
    );
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {:?}", elapsed);
    println!("criterion 3 (72-vertex torus is a Max equilibrium): PASS in {:?}", elapsed);
}

#[test]
fn criterion_4_torus_metrics() {
    let start = Instant::now();
    let fig1 = build_torus(&TorusParams::new(2, 2, vec![15, 5]).unwrap()).unwrap();
    assert_eq!(fig1.intersection_count(), 150);
    assert_eq!(fig1.graph.n(), 450);

    let t = fig2_torus();
    assert!(t.graph.diameter().unwrap() >= 2 * 4);

    // Coordinate lower bound on every pair; at intersection endpoints the
    // bound is tight along the F^h sets (each member sits at distance
    // exactly h), which also certifies |F^h| = 2^d for h <= k.
    for x in 0..t.graph.n() {
        let dist = t.graph.bfs_distances(x);
        for y in 0..t.graph.n() {
            assert!(dist[y].unwrap() >= t.distance_bound(x, y));
        }
    }
    for v in 0..t.intersection_count() {
        let dist = t.graph.bfs_distances(v);
        for h in 1..=4 {
            let f = t.f_set(v, h).unwrap();
            assert_eq!(f.len(), 4);
            for &y in &f {
                assert_eq!(dist[y], Some(h));
                assert_eq!(t.distance_bound(v, y), h);
            }
        }
    }
    let elapsed = start.elapsed();
    println!("criterion 4 (torus counts, diameter, distance bounds): PASS in {:?}", elapsed);
}

#[test]
fn criterion_5_torus_equilibrium_sum() {
    let start = Instant::now();
    let t = build_torus(&TorusParams::new(2, 2, vec![2, 3]).unwrap()).unwrap();
    assert_eq!(t.graph.n(), 36);
    // alpha = 4k^3 with k = 2
    let cfg = GameConfig::new(Variant::Sum, 32.0, 2).unwrap();
    let outcome = verify_lke(&t.graph, &cfg, DEFAULT_SUM_CAP).unwrap();
    assert!(
        outcome.is_equilibrium(),
        "stretched torus should be stable in Sum at alpha=32, k=2: {:?}",
        outcome
    );
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {:?}", elapsed);
    println!("criterion 5 (36-vertex torus is a Sum equilibrium): PASS in {:?}", elapsed);
}

#[test]
fn criterion_6_heawood_fixture() {
    let start = Instant::now();
    let g = heawood();
    for v in 0..g.n() {
        assert_eq!(g.degree(v), 3);
    }
    assert_eq!(g.girth(), Some(6));
    let cfg = GameConfig::new(Variant::Max, 1.5, 2).unwrap();
    assert!(verify_lke(&g, &cfg, DEFAULT_SUM_CAP).unwrap().is_equilibrium());
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {:?}", elapsed);
    println!("criterion 6 (cubic girth-6 fixture is an equilibrium): PASS in {:?}", elapsed);
}

/// A random network compatible with the view: fresh chains and cliques
/// hanging off frontier vertices. Never touches edges inside the view.
fn random_extension(view: &View, rng: &mut ChaCha8Rng) -> OwnedGraph {
    let m = view.len();
    let frontier = view.frontier();
    let mut plan: Vec<(usize, bool, usize)> = Vec::new();
    let mut extra = 0;
    if !frontier.is_empty() {
        for _ in 0..rng.gen_range(0..4) {
            let f = frontier[rng.gen_range(0..frontier.len())];
            let clique = rng.gen_bool(0.4);
            let size = if clique { rng.gen_range(2..5) } else { rng.gen_range(1..4) };
            plan.push((f, clique, size));
            extra += size;
        }
    }
    let mut g = OwnedGraph::new(m + extra);
    for (a, b, owner) in view.graph().edges_with_owner() {
        g.add_edge(a, b, owner).unwrap();
    }
    let mut next = m;
    for (f, clique, size) in plan {
        if clique {
            let ids: Vec<usize> = (next..next + size).collect();
            g.add_edge(f, ids[0], ids[0]).unwrap();
            for i in 0..ids.len() {
                for j in i + 1..ids.len() {
                    g.add_edge(ids[i], ids[j], ids[j]).unwrap();
                }
            }
        } else {
            let mut prev = f;
            for id in next..next + size {
                g.add_edge(prev, id, id).unwrap();
                prev = id;
            }
        }
        next += size;
    }
    g
}

#[test]
fn criterion_7_extension_property() {
    let start = Instant::now();
    for (variant, seed) in [(Variant::Max, 0x71u64), (Variant::Sum, 0x72)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut done = 0;
        while done < 1000 {
            let n = rng.gen_range(6..18);
            let g = random_owned_graph(&mut rng, n);
            let k = rng.gen_range(1..4);
            let player = rng.gen_range(0..n);
            let view = View::build(&g, player, k);
            if view.len() < 2 {
                continue;
            }
            let alpha = [0.3, 1.0, 3.0][rng.gen_range(0..3)];
            let cfg = GameConfig::new(variant, alpha, k).unwrap();

            // random switch: mutate the current strategy or draw fresh
            let mut endpoints: BTreeSet<usize> = if rng.gen_bool(0.5) {
                view.center_owned().clone()
            } else {
                BTreeSet::new()
            };
            for v in 1..view.len() {
                if rng.gen_bool(2.0 / view.len() as f64) {
                    if endpoints.contains(&v) {
                        endpoints.remove(&v);
                    } else {
                        endpoints.insert(v);
                    }
                }
            }
            let strategy = Strategy::new(endpoints.iter().map(|&l| view.to_global(l)));
            let dv = match delta(&view, &strategy, &cfg).unwrap() {
                DeltaOutcome::Finite(dv) => dv,
                _ => continue,
            };

            let ext = random_extension(&view, &mut rng);
            let old_adj: BTreeSet<usize> = ext.neighbors(0).iter().copied().collect();
            let mut new_adj: BTreeSet<usize> = endpoints.clone();
            new_adj.extend(ext.in_neighbors(0));
            let before = bfs_switched(&ext, 0, &old_adj);
            let after = bfs_switched(&ext, 0, &new_adj);
            let usage = |dist: &[Option<usize>]| -> f64 {
                match variant {
                    Variant::Max => dist.iter().map(|d| d.unwrap()).max().unwrap() as f64,
                    Variant::Sum => dist.iter().map(|d| d.unwrap()).sum::<usize>() as f64,
                }
            };
            let realized = cfg.alpha
                * (endpoints.len() as f64 - view.center_owned().len() as f64)
                + usage(&after)
                - usage(&before);
            assert!(
                realized <= dv + 1e-9,
                "{:?}: realized difference {} exceeds view delta {}",
                variant,
                realized,
                dv
            );
            done += 1;
        }
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 7 (worst-case delta bounds 1000 sampled extensions per variant): PASS in {:?}",
        elapsed
    );
}

struct GridRun {
    alpha: f64,
    k: usize,
    status: TerminalStatus,
    rounds: usize,
    last: RoundStats,
    final_graph: OwnedGraph,
}

fn run_tree_dynamics(n: usize, alpha: f64, k: usize, seed: u64, variant: Variant) -> GridRun {
    let g0 = random_tree(n, seed);
    let cfg = GameConfig::new(variant, alpha, k).unwrap();
    let opts = DynamicsOptions {
        round_cap: 50,
        sum_cap: DEFAULT_SUM_CAP,
    };
    let out = run(&g0, &cfg, seed, &opts).unwrap();
    GridRun {
        alpha,
        k,
        status: out.trace.status.clone(),
        rounds: out.trace.rounds.len(),
        last: out.trace.rounds.last().unwrap().clone(),
        final_graph: out.final_graph,
    }
}

/// The criterion-8 workload, shared with criterion 9: the small grid
/// (trees, n x alpha x k x 20 seeds) plus the n=100, alpha=1, k=7 batch.
fn max_dynamics_runs() -> &'static Vec<GridRun> {
    static RUNS: OnceLock<Vec<GridRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut specs: Vec<(usize, f64, usize, u64)> = Vec::new();
        for n in [20usize, 30, 50] {
            for alpha in [1.0f64, 2.0, 10.0] {
                for k in [2usize, 3, 1000] {
                    for rep in 0..20u64 {
                        specs.push((n, alpha, k, mix(&[n as u64, alpha as u64, k as u64, rep])));
                    }
                }
            }
        }
        for rep in 0..20u64 {
            specs.push((100, 1.0, 7, mix(&[100, 1, 7, rep])));
        }
        specs
            .par_iter()
            .map(|&(n, alpha, k, seed)| run_tree_dynamics(n, alpha, k, seed, Variant::Max))
            .collect()
    })
}

#[test]
fn criterion_8_experimental_replication() {
    let start = Instant::now();
    let runs = max_dynamics_runs();
    let (grid, k7) = runs.split_at(540);

    let converged = grid
        .iter()
        .filter(|r| r.status == TerminalStatus::Equilibrium && r.rounds <= 10)
        .count();
    assert!(
        converged as f64 >= 0.90 * grid.len() as f64,
        "only {}/{} runs reached equilibrium within 10 rounds",
        converged,
        grid.len()
    );

    let cycles = grid
        .iter()
        .filter(|r| matches!(r.status, TerminalStatus::CycleDetected { .. }))
        .count();
    assert!(
        (cycles as f64) < 0.01 * grid.len() as f64,
        "{} best-response cycles in {} runs",
        cycles,
        grid.len()
    );

    let mean_avg_view = k7.iter().map(|r| r.last.avg_view).sum::<f64>() / k7.len() as f64;
    let mean_min_view = k7.iter().map(|r| r.last.min_view as f64).sum::<f64>() / k7.len() as f64;
    assert!(
        mean_avg_view >= 95.0,
        "mean view size {} below 95 at n=100, alpha=1, k=7",
        mean_avg_view
    );
    assert!(
        mean_min_view >= 85.0,
        "mean minimum view size {} below 85 at n=100, alpha=1, k=7",
        mean_min_view
    );
    let elapsed = start.elapsed();
    println!(
        "criterion 8 (convergence {}/540 within 10 rounds, {} cycles, k=7 views {:.1}/{:.1}): PASS in {:?}",
        converged, cycles, mean_avg_view, mean_min_view, elapsed
    );
}

#[test]
fn criterion_9_equilibria_have_no_short_cycles() {
    let start = Instant::now();
    let mut checked = 0;
    for r in max_dynamics_runs() {
        if r.status != TerminalStatus::Equilibrium {
            continue;
        }
        // no cycle of length <= min(2k + 1, ceil(alpha + 2) - 1): its
        // owner would see it whole and profit from deleting her edge
        let bound = (2 * r.k + 1).min((r.alpha + 2.0).ceil() as usize - 1);
        if let Some(girth) = r.final_graph.girth() {
            assert!(
                girth > bound,
                "equilibrium at alpha={}, k={} has a {}-cycle (bound {})",
                r.alpha,
                r.k,
                girth,
                bound
            );
        }
        checked += 1;
    }
    assert!(checked > 400, "too few equilibria to check: {}", checked);
    let elapsed = start.elapsed();
    println!(
        "criterion 9 (girth bound on {} terminal equilibria): PASS in {:?}",
        checked, elapsed
    );
}

#[test]
fn criterion_10_sum_equilibria_see_everything() {
    let start = Instant::now();
    let mut specs: Vec<(usize, f64, usize, u64)> = Vec::new();
    for n in [8usize, 10, 12] {
        for alpha in [0.25f64, 0.5] {
            for k in [3usize, 4] {
                assert!(
                    k as f64 > 1.0 + 2.0 * alpha.sqrt(),
                    "grid cells must satisfy k > 1 + 2*sqrt(alpha)"
                );
                for rep in 0..5u64 {
                    specs.push((n, alpha, k, mix(&[n as u64, (alpha * 100.0) as u64, k as u64, rep])));
                }
            }
        }
    }
    let runs: Vec<GridRun> = specs
        .par_iter()
        .map(|&(n, alpha, k, seed)| run_tree_dynamics(n, alpha, k, seed, Variant::Sum))
        .collect();

    let mut equilibria = 0;
    for (r, &(n, ..)) in runs.iter().zip(&specs) {
        if r.status != TerminalStatus::Equilibrium {
            continue;
        }
        equilibria += 1;
        assert_eq!(
            r.last.min_view, n,
            "Sum equilibrium at alpha={}, k={} leaves a player with a partial view",
            r.alpha, r.k
        );
    }
    assert!(equilibria >= 30, "too few Sum equilibria to check: {}", equilibria);
    let elapsed = start.elapsed();
    println!(
        "criterion 10 ({} Sum equilibria all have full views): PASS in {:?}",
        equilibria, elapsed
    );
}
