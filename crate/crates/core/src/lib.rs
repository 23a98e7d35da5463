//! Election simulation on community-structured social networks.
//!
//! * [`graph`]: caveman, relaxed-caveman and homophilic relaxed-caveman
//!   generators, strong party assignment and polls.
//! * [`metrics`]: influence assortment and influence gap for any number of
//!   parties, closed forms on cliques, and benchmark predictors.
//! * [`dynamics`]: the stochastic behavioural voter model.
//! * [`experiments`]: seeded parameter sweeps, correlation and regression.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod seed;

pub use error::{Error, Result};
pub use graph::{build_caveman, generate_hrc, Graph, HrcParams, PartyAssignment, PartyId};
pub use seed::Seed;
