//! Cost model, distillation protocols, schedule optimizer and a stabilizer
//! frame simulator for block magic-state distillation on the surface code.

pub mod blocksim;
pub mod config;
pub mod error;
pub mod error_model;
pub mod planner;
pub mod protocols;
pub mod report;

pub use config::Config;
pub use error::{Error, Result};
pub use error_model::{CodeDistance, CostModel, GateErrorRate, PlumbingMode};
pub use planner::{optimize, Problem, Schedule, SearchConfig, StagePlan, Strategy};
pub use protocols::{BlockSize, Epsilon, ProtocolSpec};
