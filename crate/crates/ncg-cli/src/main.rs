//! Command-line front end: generate or construct starting graphs, compute
//! best responses, verify equilibria, run dynamics, and sweep grids.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ncg_core::best_response::{best_response, verify_lke, LkeOutcome, DEFAULT_SUM_CAP};
use ncg_core::constructions::{
    build_cycle, build_open_torus, build_torus, heawood, torus_params_for, TorusParams,
};
use ncg_core::dynamics::{rows_to_csv, run, sweep, DynamicsOptions, SweepConfig, TerminalStatus};
use ncg_core::game::{social_cost, star_cost, GameConfig, Variant};
use ncg_core::generators::{gnp_connected, random_tree};
use ncg_core::graph::OwnedGraph;
use ncg_core::view::View;

#[derive(Parser)]
#[command(
    name = "ncg",
    version,
    about = "Network creation games under local knowledge: generate, construct, best-response, verify, simulate, sweep"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GameArgs {
    /// Edge price
    #[arg(long)]
    alpha: f64,
    /// View radius
    #[arg(long)]
    k: usize,
    /// Cost variant (max or sum)
    #[arg(long, default_value = "max")]
    variant: Variant,
    /// View-size cap for the exact Sum solver
    #[arg(long, default_value_t = DEFAULT_SUM_CAP)]
    sum_cap: usize,
}

impl GameArgs {
    fn config(&self) -> Result<GameConfig> {
        GameConfig::new(self.variant, self.alpha, self.k).context("invalid game parameters")
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random starting graph
    Generate {
        #[command(subcommand)]
        class: GenerateClass,
    },
    /// Build a deterministic instance family
    Construct {
        #[command(subcommand)]
        family: ConstructFamily,
    },
    /// Exact best response of one player on her view
    BestResponse {
        /// Graph file in edge-list format
        graph: PathBuf,
        #[arg(long)]
        player: usize,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Check whether a graph is a local-knowledge equilibrium
    Verify {
        graph: PathBuf,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Run round-robin best-response dynamics on a graph
    Simulate {
        graph: PathBuf,
        #[command(flatten)]
        game: GameArgs,
        /// Recorded in the trace for reproducibility bookkeeping
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        round_cap: usize,
        /// Write per-round statistics as JSON lines
        #[arg(long)]
        rounds_out: Option<PathBuf>,
    },
    /// Run a grid of dynamics experiments and write a CSV
    Sweep {
        /// JSON grid description
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for independent runs (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Subcommand)]
enum GenerateClass {
    /// Uniform random labeled tree with fair-coin edge ownership
    Tree {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Connected Erdos-Renyi graph (disconnected draws are retried)
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_attempts: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConstructFamily {
    /// Cycle where player i owns the edge to i+1
    Cycle {
        #[arg(long)]
        n: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Stretched torus with modular coordinates
    Torus {
        /// Dimensions (at least 2)
        #[arg(long)]
        d: usize,
        /// Path stretch (at least 2)
        #[arg(long)]
        ell: usize,
        /// Comma-separated side lengths, one per dimension
        #[arg(long, value_delimiter = ',')]
        delta: Vec<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Stretched torus without wraparound
    OpenTorus {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, value_delimiter = ',')]
        delta: Vec<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Derive equilibrium torus parameters from alpha and k, then build
    TorusFor {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        k: usize,
        /// Free size target for the last dimension
        #[arg(long)]
        delta_d: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// 14-vertex cubic girth-6 fixture
    Heawood {
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn emit_graph(g: &OwnedGraph, output: Option<&Path>) -> Result<()> {
    let text = g.to_edge_list_string();
    match output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{}", text),
    }
    Ok(())
}

fn load_graph(path: &Path) -> Result<OwnedGraph> {
    OwnedGraph::read_from_file(path).with_context(|| format!("reading {}", path.display()))
}

fn witness_json(player: usize, endpoints: Vec<usize>, delta: f64) -> String {
    serde_json::json!({
        "player": player,
        "endpoints": endpoints,
        "delta": delta,
    })
    .to_string()
}

fn run_command(command: Command) -> Result<()> {
    match command {
        Command::Generate { class } => match class {
            GenerateClass::Tree { n, seed, output } => {
                anyhow::ensure!(n >= 2, "a tree needs at least 2 vertices");
                emit_graph(&random_tree(n, seed), output.as_deref())
            }
            GenerateClass::Gnp {
                n,
                p,
                seed,
                max_attempts,
                output,
            } => {
                anyhow::ensure!(n >= 2, "need at least 2 vertices");
                anyhow::ensure!((0.0..=1.0).contains(&p), "p must be in [0, 1]");
                anyhow::ensure!(max_attempts >= 1, "need at least one attempt");
                let g = gnp_connected(n, p, seed, max_attempts)?;
                emit_graph(&g, output.as_deref())
            }
        },
        Command::Construct { family } => match family {
            ConstructFamily::Cycle { n, output } => emit_graph(&build_cycle(n)?, output.as_deref()),
            ConstructFamily::Torus {
                d,
                ell,
                delta,
                output,
            } => {
                let t = build_torus(&TorusParams::new(d, ell, delta)?)?;
                emit_graph(&t.graph, output.as_deref())
            }
            ConstructFamily::OpenTorus {
                d,
                ell,
                delta,
                output,
            } => {
                let t = build_open_torus(&TorusParams::new(d, ell, delta)?)?;
                emit_graph(&t.graph, output.as_deref())
            }
            ConstructFamily::TorusFor {
                alpha,
                k,
                delta_d,
                output,
            } => {
                let params = torus_params_for(alpha, k, delta_d)?;
                eprintln!(
                    "torus parameters: d={} ell={} delta={:?}",
                    params.d, params.ell, params.deltas
                );
                let t = build_torus(&params)?;
                emit_graph(&t.graph, output.as_deref())
            }
            ConstructFamily::Heawood { output } => emit_graph(&heawood(), output.as_deref()),
        },
        Command::BestResponse {
            graph,
            player,
            game,
        } => {
            let g = load_graph(&graph)?;
            let cfg = game.config()?;
            anyhow::ensure!(player < g.n(), "player {} out of range", player);
            let view = View::build(&g, player, cfg.k);
            let br = best_response(&view, &cfg, game.sum_cap)?;
            println!(
                "{}",
                witness_json(player, br.strategy.iter().collect(), br.delta_vs_current)
            );
            Ok(())
        }
        Command::Verify { graph, game } => {
            let g = load_graph(&graph)?;
            let cfg = game.config()?;
            match verify_lke(&g, &cfg, game.sum_cap)? {
                LkeOutcome::Equilibrium => println!("EQUILIBRIUM"),
                LkeOutcome::NotEquilibrium(w) => println!(
                    "{}",
                    witness_json(w.player, w.strategy.iter().collect(), w.delta)
                ),
            }
            Ok(())
        }
        Command::Simulate {
            graph,
            game,
            seed,
            round_cap,
            rounds_out,
        } => {
            let g = load_graph(&graph)?;
            let cfg = game.config()?;
            anyhow::ensure!(round_cap >= 1, "round cap must be at least 1");
            let opts = DynamicsOptions {
                round_cap,
                sum_cap: game.sum_cap,
            };
            let outcome = run(&g, &cfg, seed, &opts)?;
            if let Some(path) = rounds_out {
                let mut file = std::fs::File::create(&path)
                    .with_context(|| format!("writing {}", path.display()))?;
                for stats in &outcome.trace.rounds {
                    writeln!(file, "{}", serde_json::to_string(stats)?)?;
                }
            }
            let status = match outcome.trace.status {
                TerminalStatus::Equilibrium => "equilibrium".to_string(),
                TerminalStatus::CycleDetected { first_round } => {
                    format!("cycle_detected (matches end of round {})", first_round)
                }
                TerminalStatus::RoundCapReached => "round_cap".to_string(),
            };
            let social =
                social_cost(&outcome.final_graph, &cfg).expect("dynamics keeps the graph connected");
            let star = star_cost(outcome.final_graph.n(), &cfg);
            println!("status: {}", status);
            println!("rounds: {}", outcome.trace.rounds.len());
            println!("changes: {}", outcome.trace.total_changes);
            println!("social_cost: {}", social);
            println!("star_cost: {}", star);
            println!("quality: {}", social / star);
            println!(
                "diameter: {}",
                outcome.final_graph.diameter().expect("connected")
            );
            Ok(())
        }
        Command::Sweep {
            config,
            out,
            seed,
            jobs,
        } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let sweep_config = SweepConfig::from_json_str(&text)
                .with_context(|| format!("parsing {}", config.display()))?;
            let rows = match jobs {
                Some(n) => {
                    anyhow::ensure!(n >= 1, "need at least one worker");
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build()
                        .context("building worker pool")?
                        .install(|| sweep(&sweep_config, seed))
                }
                None => sweep(&sweep_config, seed),
            };
            std::fs::write(&out, rows_to_csv(&rows))
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(1)
        }
    }
}
