use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::{plan_block_pipeline, Problem, Schedule};
use crate::error::{Error, Result};
use crate::error_model::{CodeDistance, CostModel, DEFAULT_D_MAX};
use crate::protocols::{BlockSize, Epsilon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub eps_grid: Vec<Epsilon>,
    pub k_range: Vec<BlockSize>,
    pub max_15to1_levels: usize,
    pub d_max: CodeDistance,
    pub include_retry_factor: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            eps_grid: search_grid(2f64.powi(-5), 2f64.powi(5), 33),
            k_range: (1..=64).map(|j| BlockSize::new(2 * j).unwrap()).collect(),
            max_15to1_levels: 4,
            d_max: CodeDistance::new(DEFAULT_D_MAX).unwrap(),
            include_retry_factor: false,
        }
    }
}

/// `points` values spaced evenly in `log(eps)` from `lo` to `hi` inclusive.
pub fn search_grid(lo: f64, hi: f64, points: usize) -> Vec<Epsilon> {
    if points == 1 {
        return vec![Epsilon::new(lo).unwrap()];
    }
    let (a, b) = (lo.log2(), hi.log2());
    (0..points)
        .map(|i| {
            let x = a + (b - a) * i as f64 / (points - 1) as f64;
            Epsilon::new(2f64.powf(x)).unwrap()
        })
        .collect()
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps_grid.is_empty() {
            return Err(Error::InvalidSearch("eps grid is empty".into()));
        }
        if self.k_range.is_empty() {
            return Err(Error::InvalidSearch("k range is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[serde(rename = "15-1")]
    Only15To1,
    OneBlock,
    TwoBlock,
    #[serde(rename = "best")]
    BestOfAll,
}

impl Strategy {
    pub const TABLES: [Strategy; 3] = [Self::Only15To1, Self::OneBlock, Self::TwoBlock];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Only15To1 => "15-1",
            Self::OneBlock => "one_block",
            Self::TwoBlock => "two_block",
            Self::BestOfAll => "best",
        }
    }

    fn block_levels(self) -> &'static [usize] {
        match self {
            Self::Only15To1 => &[0],
            Self::OneBlock => &[1],
            Self::TwoBlock => &[2],
            Self::BestOfAll => &[0, 1, 2],
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "15-1" | "15to1" | "only_15to1" => Ok(Self::Only15To1),
            "one-block" | "one_block" | "block" => Ok(Self::OneBlock),
            "two-block" | "two_block" => Ok(Self::TwoBlock),
            "best" | "best_of_all" | "all" => Ok(Self::BestOfAll),
            other => Err(format!(
                "unknown strategy {other:?} (expected 15-1, one-block, two-block or best)"
            )),
        }
    }
}

/// One point of the search grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub eps: Epsilon,
    pub ks: Vec<BlockSize>,
}

/// Every grid point the strategy searches, in a fixed order.
pub fn candidates(strategy: Strategy, cfg: &SearchConfig) -> Vec<Candidate> {
    let mut out = Vec::new();
    for &levels in strategy.block_levels() {
        let block_lists: Vec<Vec<BlockSize>> = match levels {
            0 => vec![vec![]],
            1 => cfg.k_range.iter().map(|&k| vec![k]).collect(),
            _ => cfg
                .k_range
                .iter()
                .flat_map(|&k1| cfg.k_range.iter().map(move |&k2| vec![k1, k2]))
                .collect(),
        };
        for &eps in &cfg.eps_grid {
            out.extend(block_lists.iter().map(|ks| Candidate {
                eps,
                ks: ks.clone(),
            }));
        }
    }
    out
}

pub fn evaluate(
    problem: &Problem,
    candidate: &Candidate,
    m: &CostModel,
    cfg: &SearchConfig,
) -> Result<Schedule> {
    plan_block_pipeline(problem, &candidate.ks, candidate.eps, m, cfg)
}

/// Total order used to pick the winner: volume, then fewer levels, smaller
/// `sum(k)`, smaller top distance, smaller `eps`, and finally the block
/// sizes themselves.
pub(crate) fn compare(a: &Schedule, b: &Schedule) -> Ordering {
    fn sum_k(s: &Schedule) -> u64 {
        s.block_sizes().iter().map(|k| u64::from(k.get())).sum()
    }
    fn top_d(s: &Schedule) -> u32 {
        s.stages.first().map_or(0, |st| st.distance.get())
    }
    a.total_volume_per_output
        .total_cmp(&b.total_volume_per_output)
        .then_with(|| a.levels().cmp(&b.levels()))
        .then_with(|| sum_k(a).cmp(&sum_k(b)))
        .then_with(|| top_d(a).cmp(&top_d(b)))
        .then_with(|| {
            let dist = |s: &Schedule| s.eps.value().ln().abs();
            dist(a).total_cmp(&dist(b))
        })
        .then_with(|| a.eps.value().total_cmp(&b.eps.value()))
        .then_with(|| a.block_sizes().cmp(&b.block_sizes()))
}

/// Keeps the better schedule and, separately, the error of the earliest
/// candidate so that infeasibility reports do not depend on scheduling.
#[derive(Default)]
pub(crate) struct Best {
    pub(crate) schedule: Option<Schedule>,
    pub(crate) first_error: Option<(usize, Error)>,
}

impl Best {
    fn from_result(index: usize, result: Result<Schedule>) -> Self {
        match result {
            Ok(s) => Self {
                schedule: Some(s),
                first_error: None,
            },
            Err(e) => Self {
                schedule: None,
                first_error: Some((index, e)),
            },
        }
    }

    pub(crate) fn merge(self, other: Self) -> Self {
        let schedule = match (self.schedule, other.schedule) {
            (Some(a), Some(b)) => Some(if compare(&b, &a).is_lt() { b } else { a }),
            (a, b) => a.or(b),
        };
        let first_error = match (self.first_error, other.first_error) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
            (a, b) => a.or(b),
        };
        Self {
            schedule,
            first_error,
        }
    }

    pub(crate) fn into_result(self) -> Result<Schedule> {
        match (self.schedule, self.first_error) {
            (Some(s), _) => Ok(s),
            (None, Some((_, e))) => Err(Error::Infeasible(e.to_string())),
            (None, None) => Err(Error::InvalidSearch("search grid is empty".into())),
        }
    }
}

/// Exhaustive search for the minimum-volume schedule.
pub fn optimize(
    problem: &Problem,
    strategy: Strategy,
    m: &CostModel,
    cfg: &SearchConfig,
) -> Result<Schedule> {
    cfg.validate()?;
    m.validate()?;
    candidates(strategy, cfg)
        .par_iter()
        .enumerate()
        .map(|(i, c)| Best::from_result(i, evaluate(problem, c, m, cfg)))
        .reduce(Best::default, Best::merge)
        .into_result()
}

/// Sequential fold over an arbitrary candidate order. Used to check that
/// [`optimize`] does not depend on iteration order.
pub fn optimize_over(
    problem: &Problem,
    candidates: &[(usize, Candidate)],
    m: &CostModel,
    cfg: &SearchConfig,
) -> Result<Schedule> {
    candidates
        .iter()
        .map(|(i, c)| Best::from_result(*i, evaluate(problem, c, m, cfg)))
        .fold(Best::default(), Best::merge)
        .into_result()
}
