//! Ring island-model steady-state genetic algorithm with pluggable
//! migrant-selection policies.
//!
//! The "multikulti" policies send, from each island to its ring successor,
//! the individual whose genotype is farthest (in Hamming distance) from a
//! representative of the receiving population: either its best individual
//! or its consensus sequence. The classic `best` and `random` policies are
//! provided for comparison, together with the MMDP and P-Peaks benchmarks,
//! fitness-entropy tracing and a replicated-run experiment harness.

pub mod archipelago;
pub mod bitgenome;
pub mod engine;
mod error;
pub mod expcli;
pub mod metrics;
pub mod migration;
pub mod problems;
pub mod seeding;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::archipelago::{run, Archipelago, RunResult, TraceRecord};
    pub use crate::bitgenome::Genotype;
    pub use crate::engine::{GaParams, Individual, Population};
    pub use crate::expcli::{ExperimentConfig, ProblemSpec};
    pub use crate::migration::{PolicyKind, PoolKind, RepresentativeKind};
    pub use crate::problems::{MmdpProblem, PPeaksProblem, Problem};
    pub use crate::{Error, Result};
}
