//! MILP formulations of the OSE problem, an LP-file writer and a
//! branch-and-bound solver over [`crate::lp`] relaxations.

mod bnb;
mod extract;
mod formulation;
mod lp_format;
mod model;

pub use bnb::{relative_gap, solve_milp, MilpParams, MilpSolution, MilpStatus, INTEGRALITY_TOL};
pub use extract::{encode_solution, extract_ose, heuristic_incumbent, ExtractedOse, DECODE_TOL};
pub use formulation::{build_milp, build_milp_general, build_milp_tclass};
pub use lp_format::emit_lp_format;
pub use model::{Entity, MilpConstraint, MilpModel, VarKind, Variable};

use thiserror::Error;

use crate::game::GameError;
use crate::lp::LpError;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("formulation needs a {0} game")]
    WrongKind(&'static str),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("solution has no incumbent")]
    NoIncumbent,
    #[error("decoded solution is inconsistent: {0}")]
    Decode(String),
}
