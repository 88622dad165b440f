//! Rendering of planner and simulator results for the command line.

use std::fmt::Write;

use serde::Serialize;

use crate::blocksim::{ExactStats, SimStats, ValidationReport};
use crate::error_model::CostModel;
use crate::planner::{volume_constant, Schedule, Strategy, Warning, PLUMBING_EDGE_OVER_D};
use crate::protocols::ProtocolSpec;

/// Two significant figures, scientific notation.
pub fn sig2(x: f64) -> String {
    format!("{x:.1e}")
}

/// Cost-model constants echoed alongside every result.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub prefactor: f64,
    pub base_scale: f64,
    pub plumbing_mode: String,
    pub qubits_per_d2: f64,
    pub rounds_per_d: f64,
    pub plumbing_edge_over_d: f64,
    /// Qubits-rounds per unit geometric volume per `d^3`.
    pub volume_constant: f64,
    pub version: &'static str,
}

impl Metadata {
    pub fn new(m: &CostModel) -> Self {
        Self {
            prefactor: m.prefactor,
            base_scale: m.base_scale,
            plumbing_mode: m.plumbing_mode.to_string(),
            qubits_per_d2: m.qubits_per_d2,
            rounds_per_d: m.rounds_per_d,
            plumbing_edge_over_d: PLUMBING_EDGE_OVER_D,
            volume_constant: volume_constant(m),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanReport<'a> {
    pub strategy: Strategy,
    pub schedule: &'a Schedule,
    pub levels: usize,
    pub distances: Vec<u32>,
    pub block_sizes: Vec<u32>,
    pub metadata: Metadata,
}

impl<'a> PlanReport<'a> {
    pub fn new(strategy: Strategy, schedule: &'a Schedule, m: &CostModel) -> Self {
        Self {
            strategy,
            schedule,
            levels: schedule.levels(),
            distances: schedule.distances(),
            block_sizes: schedule.block_sizes().iter().map(|k| k.get()).collect(),
            metadata: Metadata::new(m),
        }
    }
}

fn warning_text(w: &Warning) -> String {
    match w {
        Warning::FitAboveThreshold { pg } => {
            format!("gate error {} is above the fitted threshold", sig2(*pg))
        }
        Warning::TransversalSx { k } => {
            format!("k = {k} is not 2 mod 4; transversal S^x is not available")
        }
        Warning::RejectionBeyondFirstOrder { stage, probability } => format!(
            "stage {stage} rejects with probability {}, beyond first order",
            sig2(*probability)
        ),
    }
}

pub fn schedule_human(schedule: &Schedule, strategy: Strategy) -> String {
    let mut out = String::new();
    let w = |out: &mut String, s: String| writeln!(out, "{s}").unwrap();
    w(
        &mut out,
        format!(
            "strategy {}: p_in {} -> p_out {} (p_g {})",
            strategy.as_str(),
            sig2(schedule.p_in),
            sig2(schedule.p_out),
            sig2(schedule.pg.value())
        ),
    );
    w(
        &mut out,
        format!(
            "volume per output: {} qubits-rounds, levels {}, eps {}",
            sig2(schedule.total_volume_per_output),
            schedule.levels(),
            sig2(schedule.eps.value())
        ),
    );
    w(
        &mut out,
        format!(
            "{:>5}  {:<12} {:>4}  {:>8}  {:>8}  {:>8}  {:>8}",
            "level", "protocol", "d", "p_target", "p_input", "runs", "volume"
        ),
    );
    let n = schedule.levels();
    for (i, s) in schedule.stages.iter().enumerate() {
        let label = match s.spec {
            ProtocolSpec::FifteenToOne => "15-to-1".to_owned(),
            ProtocolSpec::Block(k) => format!("block k={}", k.get()),
        };
        w(
            &mut out,
            format!(
                "{:>5}  {:<12} {:>4}  {:>8}  {:>8}  {:>8}  {:>8}",
                n - i,
                label,
                s.distance.get(),
                sig2(s.target_error),
                sig2(s.required_input_error),
                sig2(s.multiplicity),
                sig2(s.abs_volume)
            ),
        );
    }
    for warning in &schedule.warnings {
        w(&mut out, format!("warning: {}", warning_text(warning)));
    }
    out
}

/// Monte Carlo estimate set against the exact sum where one was computed.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub k: usize,
    pub t_sites: usize,
    pub stats: SimStats,
    pub exact: Option<ExactComparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactComparison {
    pub acceptance: f64,
    pub output_error: Vec<f64>,
    /// `(estimate - exact) / stderr`, zero when the stderr vanishes.
    pub acceptance_z: f64,
    pub output_error_z: Vec<f64>,
}

fn z_score(est: f64, exact: f64, se: f64) -> f64 {
    if se > 0.0 {
        (est - exact) / se
    } else {
        0.0
    }
}

impl ExactComparison {
    pub fn new(stats: &SimStats, exact: &ExactStats) -> Self {
        Self {
            acceptance: exact.acceptance,
            output_error: exact.output_error.clone(),
            acceptance_z: z_score(stats.acceptance, exact.acceptance, stats.acceptance_stderr),
            output_error_z: stats
                .output_error_rate
                .iter()
                .zip(&stats.output_error_stderr)
                .zip(&exact.output_error)
                .map(|((&r, &se), &e)| z_score(r, e, se))
                .collect(),
        }
    }
}

pub fn sim_human(r: &SimReport) -> String {
    let s = &r.stats;
    let mut out = String::new();
    writeln!(
        out,
        "k {} ({} T sites), p {}, {} shots, seed {}",
        r.k,
        r.t_sites,
        sig2(s.p),
        s.shots,
        s.seed
    )
    .unwrap();
    writeln!(
        out,
        "acceptance {} +- {}",
        sig2(s.acceptance),
        sig2(s.acceptance_stderr)
    )
    .unwrap();
    writeln!(
        out,
        "output error (mean over outputs) {}",
        sig2(s.mean_output_error_rate())
    )
    .unwrap();
    if let Some(x) = &r.exact {
        let mean = x.output_error.iter().sum::<f64>() / x.output_error.len().max(1) as f64;
        writeln!(
            out,
            "exact: acceptance {} (z {:.1}), output error {}",
            sig2(x.acceptance),
            x.acceptance_z,
            sig2(mean)
        )
        .unwrap();
    }
    out
}

pub fn validation_human(v: &ValidationReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "k {}: {} T sites, rejection coefficient {}, harmful weight-2 per output {:?}",
        v.k, v.t_sites, v.rejection_coefficient, v.harmful_weight2_per_output
    )
    .unwrap();
    if v.passed {
        writeln!(out, "PASS").unwrap();
    } else {
        for f in &v.failures {
            writeln!(out, "FAIL: {f}").unwrap();
        }
    }
    out
}
