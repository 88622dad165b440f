use thiserror::Error;

use crate::blocksim::CircuitError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("code distance must be odd and at least 3, got {0}")]
    InvalidDistance(u32),

    #[error("probability out of range (0, 1): {name} = {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("block size k must be even and at least 2, got {0}")]
    InvalidBlockSize(i64),

    #[error("geometric volume must be positive, got {0}")]
    InvalidVolume(f64),

    #[error(
        "no code distance up to {d_max} satisfies v*P_L < {budget:e} \
         (v = {v_geom}, smallest product {best_product:e})"
    )]
    DistanceInfeasible {
        v_geom: f64,
        budget: f64,
        d_max: u32,
        best_product: f64,
    },

    #[error("15-to-1 chain would exceed the limit of {max_levels} level(s) to reach {target:e}")]
    TooManyLevels { max_levels: usize, target: f64 },

    #[error("target {target:e} is at least the available error {available:e}; no distillation is needed")]
    DegenerateTarget { target: f64, available: f64 },

    #[error("no feasible schedule: {0}")]
    Infeasible(String),

    #[error("invalid search configuration: {0}")]
    InvalidSearch(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Circuit(#[from] CircuitError),

    #[error("{patterns} fault patterns exceed the enumeration limit of {limit}; use Monte Carlo")]
    TooLarge { patterns: u128, limit: u128 },
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
