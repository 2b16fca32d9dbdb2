//! Optimistic Stackelberg equilibria in congestion games.
//!
//! The crate provides the game model ([`game`]), equilibrium primitives
//! ([`equilibrium`]), a dynamic program for pure-leader commitments in
//! T-class singleton games ([`dp`]), MILP formulations with an in-house
//! branch-and-bound ([`milp`], [`lp`]), brute-force oracles ([`oracle`]) and
//! instance generators ([`generators`]). [`solution`] holds solver result
//! records and their re-verification.

pub mod dp;
pub mod equilibrium;
pub mod format;
pub mod game;
pub mod generators;
pub mod lp;
pub mod milp;
pub mod oracle;
pub mod solution;
mod validate;

pub use format::{load_game, save_game, FormatError};
pub use game::{
    Action, CostTable, Follower, FollowerClass, FollowerStructure, FollowersOutcome, Game, GameError, GameKind,
    LeaderStrategy, Rational, ValidationReport, Violation, ViolationKind,
};
