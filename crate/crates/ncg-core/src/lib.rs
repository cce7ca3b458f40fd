//! A laboratory for network creation games played under local knowledge:
//! every player sees only her k-neighborhood, buys incident edges at
//! price alpha, and pays a usage cost given by her eccentricity (Max) or
//! her sum of distances (Sum).
//!
//! The crate provides the owned-graph representation and metric
//! primitives ([`graph`], [`view`]), cost and worst-case switch
//! evaluation ([`game`]), exact best-response solvers and an equilibrium
//! verifier ([`best_response`]), deterministic instance families
//! ([`constructions`]), seeded random initial configurations
//! ([`generators`]), and round-robin best-response dynamics with a
//! parameter sweep ([`dynamics`]).

pub mod best_response;
pub mod constructions;
pub mod dynamics;
pub mod game;
pub mod generators;
pub mod graph;
pub mod view;

pub use best_response::{
    best_response, best_response_max, best_response_sum, min_dominating_set, verify_lke,
    BestResponse, DominatingInstance, LkeOutcome, SolverError, Witness, DEFAULT_SUM_CAP,
};
pub use game::{
    delta, is_improving, player_cost, social_cost, star_cost, DeltaOutcome, GameConfig, Strategy,
    Variant, COST_EPS,
};
pub use graph::{GraphError, OwnedGraph, ReadError, SimpleGraph};
pub use view::View;
