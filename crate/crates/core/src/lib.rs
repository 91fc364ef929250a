//! Linear entropy inequalities for invariant processes on regular trees.
//!
//! Inequalities are derived exactly from a regular base graph with walks
//! attached to its vertices ([`derive`]), stated over finite vertex-set types
//! of `T_d` ([`types`]) with rational coefficients ([`inequality`]). They are
//! then tested against random lifts ([`lift`]), tree-indexed Markov chains
//! ([`markov`]) and the exact coloring counts behind them ([`oracle`]).
//!
//! Floating-point code is generic over [`scalar::Real`]; the aliases below
//! fix it to `f64`.

pub mod derive;
pub mod entropy;
pub mod graph;
pub mod inequality;
pub mod lift;
pub mod markov;
pub mod oracle;
pub mod scalar;
pub mod types;

use thiserror::Error;

pub use derive::{blow_up, builtin, derive_inequality, known_inequality, Construction, DeriveError};
pub use graph::{BaseGraph, GraphError, Walk, WalkAssignment};
pub use inequality::{combine, EntropyInequality, InequalityError};
pub use lift::{LiftError, LiftGraph};
pub use markov::MarkovError;
pub use oracle::{ConsistentCollection, OracleError};
pub use scalar::Real;
pub use types::{SubsetType, TypeError};

/// Exact coefficients and probability masses.
pub type Rational = num_rational::BigRational;

pub type MarkovChain = markov::MarkovChain<f64>;
pub type Scan = markov::Scan<f64>;
pub type TypeEstimate = lift::TypeEstimate<f64>;

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Inequality(#[from] InequalityError),
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
