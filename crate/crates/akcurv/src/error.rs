//! Crate-wide error type.
//!
//! Numerical checks distinguish three failure species: bad inputs
//! (degenerate ω, non-SPD metric, unknown catalog id), violated structural
//! hypotheses (e.g. asking for an Einstein-only identity on a non-Einstein
//! entry — a refusal, not a numerical failure), and convention mismatches
//! (two independent routes to the same quantity disagree, which means a
//! sign or normalization bug and poisons everything downstream).

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("norm constraint violated: expected |ω|² = {expected}, got {got}")]
    NormConstraint { expected: f64, got: f64 },

    #[error("metric is not symmetric positive definite at point {point:?}")]
    NonSpdMetric { point: [f64; 4] },

    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: [f64; 4] },

    #[error("almost-complex structure incompatible at {point:?}: {violated}")]
    IncompatibleJ { point: [f64; 4], violated: String },

    #[error(
        "convention mismatch in {quantity}: {lhs} vs {rhs} (|Δ| = {delta:.3e} > {tol:.1e}); \
         two independent computations of the same scalar disagree, refusing to continue"
    )]
    ConventionMismatch {
        quantity: String,
        lhs: f64,
        rhs: f64,
        delta: f64,
        tol: f64,
    },

    #[error("hypothesis violated for entry {entry}: {hypothesis} (measured {measured:.3e})")]
    HypothesisViolation {
        entry: String,
        hypothesis: String,
        measured: f64,
    },

    #[error("grid too coarse: {nodes} nodes per period, need at least {min}")]
    GridTooCoarse { nodes: usize, min: usize },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("entry `{entry}` is pointwise-only (noncompact); integral sections unavailable")]
    PointwiseOnly { entry: String },

    #[error("need at least {min} resolution levels, got {got}")]
    InsufficientLevels { min: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
