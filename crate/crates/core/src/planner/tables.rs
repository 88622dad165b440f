use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use super::{optimize, Problem, Schedule, SearchConfig, Strategy};
use crate::error::Result;
use crate::error_model::CostModel;

/// How the physical gate error is chosen for each `p_in`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PgRule {
    FractionOfPin(f64),
    Fixed(f64),
}

impl Default for PgRule {
    fn default() -> Self {
        Self::FractionOfPin(0.1)
    }
}

impl PgRule {
    pub fn pg(self, p_in: f64) -> f64 {
        match self {
            Self::FractionOfPin(f) => f * p_in,
            Self::Fixed(pg) => pg,
        }
    }
}

/// One (p_in, p_out, strategy) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRecord {
    pub p_in: f64,
    pub p_out: f64,
    pub strategy: Strategy,
    /// `None` for infeasible cells.
    pub volume_qubit_rounds: Option<f64>,
    pub levels: Option<usize>,
    /// Top level first.
    pub distances: Vec<u32>,
    pub eps: Option<f64>,
    pub k1: Option<u32>,
    pub k2: Option<u32>,
    /// Strictly smallest volume among the strategies of this cell.
    pub winner: bool,
}

impl TableRecord {
    fn from_result(p_in: f64, p_out: f64, strategy: Strategy, result: &Result<Schedule>) -> Self {
        let mut rec = Self {
            p_in,
            p_out,
            strategy,
            volume_qubit_rounds: None,
            levels: None,
            distances: Vec::new(),
            eps: None,
            k1: None,
            k2: None,
            winner: false,
        };
        if let Ok(s) = result {
            let ks = s.block_sizes();
            rec.volume_qubit_rounds = Some(s.total_volume_per_output);
            rec.levels = Some(s.levels());
            rec.distances = s.distances();
            rec.eps = Some(s.eps.value());
            rec.k1 = ks.first().map(|k| k.get());
            rec.k2 = ks.get(1).map(|k| k.get());
        }
        rec
    }

    pub fn is_feasible(&self) -> bool {
        self.volume_qubit_rounds.is_some()
    }
}

/// Records ordered with `p_out` outermost, then `p_in`, then strategy.
pub fn emit_tables(
    p_ins: &[f64],
    p_outs: &[f64],
    pg_rule: PgRule,
    strategies: &[Strategy],
    m: &CostModel,
    cfg: &SearchConfig,
) -> Result<Vec<TableRecord>> {
    cfg.validate()?;
    m.validate()?;
    let mut cells = Vec::new();
    for &p_out in p_outs {
        for &p_in in p_ins {
            cells.push(Problem::new(p_in, p_out, Some(pg_rule.pg(p_in))).map(|p| (p_in, p_out, p)));
        }
    }
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;

    let mut records: Vec<TableRecord> = cells
        .par_iter()
        .flat_map_iter(|(p_in, p_out, problem)| {
            strategies.iter().map(move |&strategy| {
                let result = optimize(problem, strategy, m, cfg);
                TableRecord::from_result(*p_in, *p_out, strategy, &result)
            })
        })
        .collect();

    for cell in records.chunks_mut(strategies.len().max(1)) {
        mark_winner(cell);
    }
    Ok(records)
}

fn mark_winner(cell: &mut [TableRecord]) {
    let volumes: Vec<f64> = cell.iter().filter_map(|r| r.volume_qubit_rounds).collect();
    let Some(min) = volumes.iter().copied().min_by(f64::total_cmp) else {
        return;
    };
    if volumes.iter().filter(|&&v| v == min).count() != 1 {
        return;
    }
    for r in cell.iter_mut() {
        r.winner = r.volume_qubit_rounds == Some(min);
    }
}

#[derive(Serialize)]
struct CsvRow {
    p_in: String,
    p_out: String,
    strategy: &'static str,
    volume_qubit_rounds: String,
    levels: String,
    distances: String,
    eps: String,
    k1: String,
    k2: String,
    winner: bool,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl From<&TableRecord> for CsvRow {
    fn from(r: &TableRecord) -> Self {
        Self {
            p_in: format!("{:e}", r.p_in),
            p_out: format!("{:e}", r.p_out),
            strategy: r.strategy.as_str(),
            volume_qubit_rounds: r
                .volume_qubit_rounds
                .map_or_else(|| "infeasible".to_owned(), |v| format!("{v:e}")),
            levels: opt(r.levels),
            distances: r
                .distances
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            eps: opt(r.eps),
            k1: opt(r.k1),
            k2: opt(r.k2),
            winner: r.winner,
        }
    }
}

/// CSV with columns `p_in, p_out, strategy, volume_qubit_rounds, levels,
/// distances, eps, k1, k2, winner`. Distances are `;`-separated, top first.
pub fn write_csv<W: Write>(records: &[TableRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow::from(r))
            .map_err(std::io::Error::other)?;
    }
    w.flush()
}

pub fn write_json<W: Write>(records: &[TableRecord], mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out)
}
