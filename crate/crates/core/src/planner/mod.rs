//! Distillation schedules and the minimum-volume search over them.
//!
//! A schedule is a top-down list of stages. Each stage has a target output
//! error `t`. It spends `eps * t / (1 + eps)` of that target on logical
//! failures, which picks its code distance. The rest is left for residual
//! distillation error, which fixes the input error it needs. Zero or more
//! block levels sit on top of a (possibly empty) concatenated 15-to-1 chain,
//! and the chain is extended until its required input error reaches the
//! raw injected error `p_in`.

mod search;
mod tables;

pub use search::{
    candidates, evaluate, optimize, optimize_over, search_grid, Candidate, SearchConfig, Strategy,
};
pub use tables::{emit_tables, write_csv, write_json, PgRule, TableRecord};

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::error_model::{min_distance, CodeDistance, CostModel, GateErrorRate};
use crate::protocols::{
    geometric_volume, rejection_probability, required_input_error, BlockSize, Epsilon, ProtocolSpec,
};

/// Edge of a plumbing piece in units of the code distance.
pub const PLUMBING_EDGE_OVER_D: f64 = 5.0 / 4.0;

/// Qubits-rounds of one plumbing piece at distance `d`, divided by `d^3`.
pub fn volume_constant(m: &CostModel) -> f64 {
    m.qubits_per_d2 * m.rounds_per_d * PLUMBING_EDGE_OVER_D.powi(3)
}

/// Geometric volume in plumbing pieces to qubits-rounds.
pub fn absolute_volume(v_geom: f64, d: CodeDistance, m: &CostModel) -> f64 {
    let d = f64::from(d.get());
    let edge = PLUMBING_EDGE_OVER_D * d;
    let rounds = m.rounds_per_d * edge;
    let qubits = m.qubits_per_d2 * edge * edge;
    v_geom * qubits * rounds
}

/// Error rates defining one planning problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub p_in: f64,
    pub p_out: f64,
    pub pg: GateErrorRate,
}

impl Problem {
    /// `pg` defaults to `p_in / 10`.
    pub fn new(p_in: f64, p_out: f64, pg: Option<f64>) -> Result<Self> {
        check_probability("p_in", p_in)?;
        check_probability("p_out", p_out)?;
        let pg = GateErrorRate::new(pg.unwrap_or(p_in / 10.0))?;
        if p_out >= p_in {
            return Err(Error::DegenerateTarget {
                target: p_out,
                available: p_in,
            });
        }
        Ok(Self { p_in, p_out, pg })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagePlan {
    pub spec: ProtocolSpec,
    pub distance: CodeDistance,
    pub eps: Epsilon,
    pub target_error: f64,
    pub required_input_error: f64,
    pub logical_budget: f64,
    /// Qubits-rounds of one instance of this structure.
    pub abs_volume: f64,
    /// Instances of this structure per final output state.
    pub multiplicity: f64,
}

impl StagePlan {
    pub fn geometric_volume(&self) -> f64 {
        geometric_volume(self.spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// `base_scale * p_g >= 1`; the fitted error curve does not apply.
    FitAboveThreshold { pg: f64 },
    /// Block size not of the form `2 + 4j`.
    TransversalSx { k: u32 },
    /// First-order rejection estimate is too large to trust.
    RejectionBeyondFirstOrder { stage: usize, probability: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// Top level first.
    pub stages: Vec<StagePlan>,
    pub p_in: f64,
    pub p_out: f64,
    pub pg: GateErrorRate,
    pub eps: Epsilon,
    pub total_volume_per_output: f64,
    pub include_retry_factor: bool,
    pub warnings: Vec<Warning>,
}

impl Schedule {
    pub fn levels(&self) -> usize {
        self.stages.len()
    }

    pub fn distances(&self) -> Vec<u32> {
        self.stages.iter().map(|s| s.distance.get()).collect()
    }

    pub fn block_sizes(&self) -> Vec<BlockSize> {
        self.stages
            .iter()
            .filter_map(|s| match s.spec {
                ProtocolSpec::Block(k) => Some(k),
                ProtocolSpec::FifteenToOne => None,
            })
            .collect()
    }

    pub fn fifteen_to_one_levels(&self) -> usize {
        self.stages
            .iter()
            .filter(|s| s.spec == ProtocolSpec::FifteenToOne)
            .count()
    }

    /// Volume summed over the stage list.
    pub fn summed_volume(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| s.multiplicity * s.abs_volume)
            .sum()
    }
}

/// Concatenated 15-to-1 distillation at a fixed `eps`.
pub fn plan_15to1_chain(
    problem: &Problem,
    eps: Epsilon,
    m: &CostModel,
    cfg: &SearchConfig,
) -> Result<Schedule> {
    plan_block_pipeline(problem, &[], eps, m, cfg)
}

/// Block levels (outermost first, at most two) over a 15-to-1 chain.
pub fn plan_block_pipeline(
    problem: &Problem,
    ks: &[BlockSize],
    eps: Epsilon,
    m: &CostModel,
    cfg: &SearchConfig,
) -> Result<Schedule> {
    if ks.len() > 2 {
        return Err(Error::InvalidSearch(format!(
            "at most two block levels are supported, got {}",
            ks.len()
        )));
    }
    let mut builder = Builder::new(problem, eps, m, cfg);
    for &k in ks {
        builder.push(ProtocolSpec::Block(k))?;
    }
    let mut chain = 0;
    while builder.target < problem.p_in {
        if chain == cfg.max_15to1_levels {
            return Err(Error::TooManyLevels {
                max_levels: cfg.max_15to1_levels,
                target: builder.target,
            });
        }
        builder.push(ProtocolSpec::FifteenToOne)?;
        chain += 1;
    }
    Ok(builder.finish())
}

struct Builder<'a> {
    problem: &'a Problem,
    eps: Epsilon,
    m: &'a CostModel,
    cfg: &'a SearchConfig,
    stages: Vec<StagePlan>,
    warnings: Vec<Warning>,
    /// Error required of the states the next stage down must produce.
    target: f64,
    /// States of that error needed per final output.
    demand: f64,
}

impl<'a> Builder<'a> {
    fn new(problem: &'a Problem, eps: Epsilon, m: &'a CostModel, cfg: &'a SearchConfig) -> Self {
        let mut warnings = Vec::new();
        if !m.fit_is_valid(problem.pg) {
            warnings.push(Warning::FitAboveThreshold {
                pg: problem.pg.value(),
            });
        }
        Self {
            problem,
            eps,
            m,
            cfg,
            stages: Vec::new(),
            warnings,
            target: problem.p_out,
            demand: 1.0,
        }
    }

    fn push(&mut self, spec: ProtocolSpec) -> Result<()> {
        let target = self.target;
        let logical_budget = self.eps.logical_budget(target);
        let v_geom = geometric_volume(spec);
        let distance = min_distance(
            v_geom,
            self.problem.pg,
            logical_budget,
            self.m,
            self.cfg.d_max,
        )?;
        let required = required_input_error(spec, target, self.eps)?;

        let mut runs = self.demand / f64::from(spec.n_outputs());
        let rejection = rejection_probability(spec, required.min(self.problem.p_in));
        if rejection.beyond_first_order {
            self.warnings.push(Warning::RejectionBeyondFirstOrder {
                stage: self.stages.len(),
                probability: rejection.probability,
            });
        }
        if self.cfg.include_retry_factor {
            runs /= 1.0 - rejection.probability;
        }
        if spec.transversal_warning() {
            if let ProtocolSpec::Block(k) = spec {
                self.warnings.push(Warning::TransversalSx { k: k.get() });
            }
        }

        self.stages.push(StagePlan {
            spec,
            distance,
            eps: self.eps,
            target_error: target,
            required_input_error: required,
            logical_budget,
            abs_volume: absolute_volume(v_geom, distance, self.m),
            multiplicity: runs,
        });
        self.target = required;
        self.demand = runs * f64::from(spec.n_inputs());
        Ok(())
    }

    fn finish(self) -> Schedule {
        let mut schedule = Schedule {
            stages: self.stages,
            p_in: self.problem.p_in,
            p_out: self.problem.p_out,
            pg: self.problem.pg,
            eps: self.eps,
            total_volume_per_output: 0.0,
            include_retry_factor: self.cfg.include_retry_factor,
            warnings: self.warnings,
        };
        schedule.total_volume_per_output = schedule.summed_volume();
        schedule
    }
}
