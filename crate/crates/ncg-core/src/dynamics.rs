//! Round-robin best-response dynamics with equilibrium and cycle
//! detection, per-round statistics, and a parallel parameter sweep.
//!
//! Each round processes the players in id order; a player's view is
//! rebuilt immediately before her turn, so moves made earlier in the
//! round are visible. A move is applied only when it is strictly
//! improving, which also means a round with zero changes certifies an
//! equilibrium. End-of-round strategy profiles are hashed every round;
//! a repeated profile with changes in between certifies a best-response
//! cycle. Applied moves keep the whole graph connected: the switched
//! view stays connected from the player, and everything outside the
//! view reaches it through unchanged edges.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::best_response::{best_response, SolverError, DEFAULT_SUM_CAP};
use crate::game::{social_cost, star_cost, GameConfig, Variant, COST_EPS};
use crate::generators::{gnp_connected, random_tree, splitmix64, GenError};
use crate::graph::OwnedGraph;
use crate::view::View;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicsOptions {
    pub round_cap: usize,
    pub sum_cap: usize,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        DynamicsOptions {
            round_cap: 1000,
            sum_cap: DEFAULT_SUM_CAP,
        }
    }
}

/// Metrics of the end-of-round graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundStats {
    pub round: usize,
    pub changes: usize,
    pub social_cost: f64,
    pub diameter: usize,
    pub max_degree: usize,
    pub avg_degree: f64,
    pub min_bought: usize,
    pub max_bought: usize,
    pub avg_bought: f64,
    pub min_view: usize,
    pub max_view: usize,
    pub avg_view: f64,
    /// Highest player cost divided by lowest player cost.
    pub unfairness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TerminalStatus {
    Equilibrium,
    /// The end-of-round profile equals the profile recorded after
    /// `first_round` (0 denotes the initial configuration).
    CycleDetected { first_round: usize },
    RoundCapReached,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsTrace {
    pub config: GameConfig,
    pub seed: u64,
    pub rounds: Vec<RoundStats>,
    pub status: TerminalStatus,
    pub total_changes: usize,
}

#[derive(Debug, Clone)]
pub struct DynamicsOutcome {
    pub trace: DynamicsTrace,
    pub final_graph: OwnedGraph,
}

fn profile_hash(profile: &[(usize, usize)]) -> u64 {
    let mut h = DefaultHasher::new();
    profile.hash(&mut h);
    h.finish()
}

fn round_stats(g: &OwnedGraph, cfg: &GameConfig, round: usize, changes: usize) -> RoundStats {
    let n = g.n();
    let mut diameter = 0usize;
    let mut usage_total = 0.0f64;
    let mut min_cost = f64::INFINITY;
    let mut max_cost = f64::NEG_INFINITY;
    let mut view_sizes = Vec::with_capacity(n);
    for u in 0..n {
        let dist = g.bfs_distances(u);
        let mut ecc = 0usize;
        let mut sum = 0usize;
        let mut in_view = 0usize;
        for d in &dist {
            let d = d.expect("dynamics keeps the graph connected");
            ecc = ecc.max(d);
            sum += d;
            if d <= cfg.k {
                in_view += 1;
            }
        }
        diameter = diameter.max(ecc);
        let usage = match cfg.variant {
            Variant::Max => ecc as f64,
            Variant::Sum => sum as f64,
        };
        usage_total += usage;
        let cost = cfg.alpha * g.bought_count(u) as f64 + usage;
        min_cost = min_cost.min(cost);
        max_cost = max_cost.max(cost);
        view_sizes.push(in_view);
    }
    let bought: Vec<usize> = (0..n).map(|u| g.bought_count(u)).collect();
    RoundStats {
        round,
        changes,
        social_cost: cfg.alpha * g.edge_count() as f64 + usage_total,
        diameter,
        max_degree: (0..n).map(|u| g.degree(u)).max().unwrap_or(0),
        avg_degree: 2.0 * g.edge_count() as f64 / n as f64,
        min_bought: bought.iter().copied().min().unwrap_or(0),
        max_bought: bought.iter().copied().max().unwrap_or(0),
        avg_bought: bought.iter().sum::<usize>() as f64 / n as f64,
        min_view: view_sizes.iter().copied().min().unwrap_or(0),
        max_view: view_sizes.iter().copied().max().unwrap_or(0),
        avg_view: view_sizes.iter().sum::<usize>() as f64 / n as f64,
        unfairness: max_cost / min_cost,
    }
}

/// Runs round-robin best-response dynamics from `g0` until a zero-change
/// round, a repeated end-of-round profile, or the round cap.
pub fn run(
    g0: &OwnedGraph,
    cfg: &GameConfig,
    seed: u64,
    opts: &DynamicsOptions,
) -> Result<DynamicsOutcome, SolverError> {
    if !g0.is_connected() {
        return Err(SolverError::Disconnected);
    }
    let mut g = g0.clone();
    let initial = g.profile();
    let mut profiles: Vec<(u64, Vec<(usize, usize)>)> = vec![(profile_hash(&initial), initial)];
    let mut rounds = Vec::new();
    let mut total_changes = 0;
    let mut status = TerminalStatus::RoundCapReached;

    for round in 1..=opts.round_cap {
        let mut changes = 0;
        for u in 0..g.n() {
            let view = View::build(&g, u, cfg.k);
            let br = best_response(&view, cfg, opts.sum_cap)?;
            if br.delta_vs_current < -COST_EPS {
                g.set_strategy(u, br.strategy.endpoints())
                    .expect("best responses never re-buy foreign edges");
                changes += 1;
            }
        }
        total_changes += changes;
        rounds.push(round_stats(&g, cfg, round, changes));
        if changes == 0 {
            status = TerminalStatus::Equilibrium;
            break;
        }
        let profile = g.profile();
        let hash = profile_hash(&profile);
        if let Some(first) = profiles
            .iter()
            .position(|(h, p)| *h == hash && *p == profile)
        {
            status = TerminalStatus::CycleDetected { first_round: first };
            break;
        }
        profiles.push((hash, profile));
    }

    Ok(DynamicsOutcome {
        trace: DynamicsTrace {
            config: *cfg,
            seed,
            rounds,
            status,
            total_changes,
        },
        final_graph: g,
    })
}

fn default_round_cap() -> usize {
    1000
}

fn default_sum_cap() -> usize {
    DEFAULT_SUM_CAP
}

fn default_max_attempts() -> usize {
    100
}

/// Initial-configuration class of a sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassSpec {
    Tree {
        n: usize,
    },
    Gnp {
        n: usize,
        p: f64,
        #[serde(default = "default_max_attempts")]
        max_attempts: usize,
    },
}

impl ClassSpec {
    fn name(&self) -> &'static str {
        match self {
            ClassSpec::Tree { .. } => "tree",
            ClassSpec::Gnp { .. } => "gnp",
        }
    }

    fn n(&self) -> usize {
        match self {
            ClassSpec::Tree { n } | ClassSpec::Gnp { n, .. } => *n,
        }
    }

    fn p(&self) -> Option<f64> {
        match self {
            ClassSpec::Tree { .. } => None,
            ClassSpec::Gnp { p, .. } => Some(*p),
        }
    }

    fn build(&self, seed: u64) -> Result<OwnedGraph, GenError> {
        match *self {
            ClassSpec::Tree { n } => Ok(random_tree(n, seed)),
            ClassSpec::Gnp { n, p, max_attempts } => gnp_connected(n, p, seed, max_attempts),
        }
    }
}

/// Grid of dynamics experiments: one run per
/// (class, alpha, k, repetition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub variant: Variant,
    pub alphas: Vec<f64>,
    pub ks: Vec<usize>,
    pub repetitions: usize,
    #[serde(default = "default_round_cap")]
    pub round_cap: usize,
    #[serde(default = "default_sum_cap")]
    pub sum_cap: usize,
    pub classes: Vec<ClassSpec>,
}

impl SweepConfig {
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// One sweep run reduced to its final state. Failed runs carry
/// `status = "error"` and empty metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub class: String,
    pub n: usize,
    pub p: Option<f64>,
    pub alpha: f64,
    pub k: usize,
    pub rep: usize,
    pub seed: u64,
    pub status: String,
    pub rounds: Option<usize>,
    pub changes: Option<usize>,
    pub social_cost: Option<f64>,
    pub star_cost: Option<f64>,
    pub quality: Option<f64>,
    pub diameter: Option<usize>,
    pub max_degree: Option<usize>,
    pub avg_degree: Option<f64>,
    pub max_bought: Option<usize>,
    pub min_view: Option<usize>,
    pub avg_view: Option<f64>,
    pub unfairness: Option<f64>,
    /// Failure detail for error rows; not part of the CSV schema.
    #[serde(skip)]
    pub error: Option<String>,
}

pub const SWEEP_CSV_HEADER: &str = "class,n,p,alpha,k,rep,seed,status,rounds,changes,\
social_cost,star_cost,quality,diameter,max_degree,avg_degree,max_bought,min_view,avg_view,unfairness";

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        fn opt<T: std::fmt::Display>(x: &Option<T>) -> String {
            x.as_ref().map(|v| v.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.class,
            self.n,
            opt(&self.p),
            self.alpha,
            self.k,
            self.rep,
            self.seed,
            self.status,
            opt(&self.rounds),
            opt(&self.changes),
            opt(&self.social_cost),
            opt(&self.star_cost),
            opt(&self.quality),
            opt(&self.diameter),
            opt(&self.max_degree),
            opt(&self.avg_degree),
            opt(&self.max_bought),
            opt(&self.min_view),
            opt(&self.avg_view),
            opt(&self.unfairness),
        )
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

struct RunSpec {
    class: ClassSpec,
    alpha: f64,
    k: usize,
    rep: usize,
    seed: u64,
}

/// Runs the whole grid. Runs are independent and execute in parallel;
/// the output order is the deterministic grid order (class, alpha, k,
/// rep), and per-run seeds are derived from the grid position, so the
/// result is independent of scheduling.
pub fn sweep(config: &SweepConfig, base_seed: u64) -> Vec<SweepRow> {
    let mut specs = Vec::new();
    for (ci, class) in config.classes.iter().enumerate() {
        for (ai, &alpha) in config.alphas.iter().enumerate() {
            for (ki, &k) in config.ks.iter().enumerate() {
                for rep in 0..config.repetitions {
                    let mut seed = base_seed;
                    for part in [ci as u64, ai as u64, ki as u64, rep as u64] {
                        seed = splitmix64(seed ^ splitmix64(part.wrapping_add(0xa5a5)));
                    }
                    specs.push(RunSpec {
                        class: class.clone(),
                        alpha,
                        k,
                        rep,
                        seed,
                    });
                }
            }
        }
    }
    specs
        .par_iter()
        .map(|spec| run_spec(config, spec))
        .collect()
}

fn run_spec(config: &SweepConfig, spec: &RunSpec) -> SweepRow {
    let mut row = SweepRow {
        class: spec.class.name().to_string(),
        n: spec.class.n(),
        p: spec.class.p(),
        alpha: spec.alpha,
        k: spec.k,
        rep: spec.rep,
        seed: spec.seed,
        status: "error".to_string(),
        rounds: None,
        changes: None,
        social_cost: None,
        star_cost: None,
        quality: None,
        diameter: None,
        max_degree: None,
        avg_degree: None,
        max_bought: None,
        min_view: None,
        avg_view: None,
        unfairness: None,
        error: None,
    };

    let cfg = match GameConfig::new(config.variant, spec.alpha, spec.k) {
        Ok(cfg) => cfg,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let g0 = match spec.class.build(spec.seed) {
        Ok(g) => g,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let opts = DynamicsOptions {
        round_cap: config.round_cap,
        sum_cap: config.sum_cap,
    };
    let outcome = match run(&g0, &cfg, spec.seed, &opts) {
        Ok(o) => o,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };

    let last = outcome
        .trace
        .rounds
        .last()
        .expect("round cap is at least 1");
    let social = social_cost(&outcome.final_graph, &cfg)
        .expect("dynamics keeps the graph connected");
    let star = star_cost(outcome.final_graph.n(), &cfg);
    row.status = match outcome.trace.status {
        TerminalStatus::Equilibrium => "equilibrium",
        TerminalStatus::CycleDetected { .. } => "cycle_detected",
        TerminalStatus::RoundCapReached => "round_cap",
    }
    .to_string();
    row.rounds = Some(outcome.trace.rounds.len());
    row.changes = Some(outcome.trace.total_changes);
    row.social_cost = Some(social);
    row.star_cost = Some(star);
    row.quality = Some(social / star);
    row.diameter = Some(last.diameter);
    row.max_degree = Some(last.max_degree);
    row.avg_degree = Some(last.avg_degree);
    row.max_bought = Some(last.max_bought);
    row.min_view = Some(last.min_view);
    row.avg_view = Some(last.avg_view);
    row.unfairness = Some(last.unfairness);
    row
}
