//! Gate-level model of the `3k+8 -> k` block-code distillation circuit and
//! its Z-error analysis.
//!
//! Only Z faults at T sites are modelled. Clifford gates and measurements
//! are perfect, and a Z on a CNOT target is copied onto the control. Under
//! that model the map from fault patterns to check flips and output errors
//! is linear over GF(2). [`FrameTable`] exploits this for enumeration and
//! sampling, and [`simulate_frame`] is the op-by-op reference it is
//! checked against.

mod census;
mod circuit;
mod frame;
mod montecarlo;
mod text;

pub use census::{
    enumerate_faults, exact_statistics, validate_circuit, ExactStats, FaultCensus,
    ValidationReport, WeightCensus, ENUMERATION_LIMIT, EXACT_MAX_SITES,
};
pub use circuit::{
    generate_block_circuit, Circuit, CircuitError, CircuitErrorKind, MeasRole, Op, NUM_CHECKS,
    TRANSVERSAL_CHECK,
};
pub use frame::{simulate_frame, ErrorPattern, FrameResult, FrameTable};
pub use montecarlo::{run_monte_carlo, run_shards, SimCounts, SimStats, CHUNK_SHOTS};
pub use text::{parse_circuit, serialize_circuit};
