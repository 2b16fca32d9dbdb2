//! Random instances and instances built from 3SAT and K-PARTITION.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed.
//! Randomness comes from ChaCha8 with one stream per field (structure,
//! follower costs, leader costs), so changing how one field is drawn leaves
//! the others untouched.

mod cnf;
mod kpartition;
mod random;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use cnf::{gen_random_3sat, is_satisfiable, reduce_3sat, size_epsilon, CnfInstance, Literal};
pub use kpartition::{
    find_partition, gen_random_kpartition, kpartition_witness, reduce_kpartition, KPartitionInstance, KPartitionWitness,
};
pub use random::{gen_random_scg, gen_random_tclass, ScgParams, TclassParams};

/// Name recorded in instance metadata.
pub const RNG_NAME: &str = "chacha8";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    /// Some item exceeds half the total, so no partition can exist.
    #[error("trivially a no-instance: {0}")]
    TrivialNo(String),
}

pub(crate) const STREAM_STRUCTURE: u64 = 0;
pub(crate) const STREAM_FOLLOWER_COSTS: u64 = 1;
pub(crate) const STREAM_LEADER_COSTS: u64 = 2;

pub(crate) fn stream(seed: u64, field: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(field);
    rng
}
