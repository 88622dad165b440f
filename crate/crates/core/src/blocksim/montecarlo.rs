use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::Range;

use super::circuit::Circuit;
use super::frame::FrameTable;
use crate::error::{Error, Result};

/// Shots per RNG stream. Chunk `i` draws from stream `i` of the seed, so any
/// partition of the chunks into shards reproduces the same counts.
pub const CHUNK_SHOTS: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SimCounts {
    pub shots: u64,
    pub accepted: u64,
    /// Accepted shots with a wrong output `n`.
    pub output_errors: Vec<u64>,
}

impl SimCounts {
    fn zero(k: usize) -> Self {
        Self {
            shots: 0,
            accepted: 0,
            output_errors: vec![0; k],
        }
    }

    pub fn merge(mut self, other: &Self) -> Self {
        if self.output_errors.len() < other.output_errors.len() {
            self.output_errors.resize(other.output_errors.len(), 0);
        }
        self.shots += other.shots;
        self.accepted += other.accepted;
        for (a, b) in self.output_errors.iter_mut().zip(&other.output_errors) {
            *a += b;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub k: usize,
    pub p: f64,
    pub shots: u64,
    pub seed: u64,
    pub accepted: u64,
    pub output_errors: Vec<u64>,
    pub acceptance: f64,
    pub acceptance_stderr: f64,
    /// Output error rate among accepted shots.
    pub output_error_rate: Vec<f64>,
    pub output_error_stderr: Vec<f64>,
}

impl SimStats {
    pub fn from_counts(counts: &SimCounts, p: f64, seed: u64) -> Self {
        let binomial_se = |rate: f64, n: u64| {
            if n == 0 {
                0.0
            } else {
                (rate * (1.0 - rate) / n as f64).sqrt()
            }
        };
        let acceptance = counts.accepted as f64 / counts.shots as f64;
        let rates: Vec<f64> = counts
            .output_errors
            .iter()
            .map(|&e| {
                if counts.accepted == 0 {
                    0.0
                } else {
                    e as f64 / counts.accepted as f64
                }
            })
            .collect();
        Self {
            k: counts.output_errors.len(),
            p,
            shots: counts.shots,
            seed,
            accepted: counts.accepted,
            output_errors: counts.output_errors.clone(),
            acceptance,
            acceptance_stderr: binomial_se(acceptance, counts.shots),
            output_error_stderr: rates
                .iter()
                .map(|&r| binomial_se(r, counts.accepted))
                .collect(),
            output_error_rate: rates,
        }
    }

    /// Output error rate pooled over all outputs.
    pub fn mean_output_error_rate(&self) -> f64 {
        self.output_error_rate.iter().sum::<f64>() / self.k.max(1) as f64
    }
}

fn run_chunk(
    table: &FrameTable,
    sampler: &Bernoulli,
    seed: u64,
    chunk: u64,
    shots: u64,
) -> SimCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut counts = SimCounts::zero(table.k());
    counts.shots = shots;
    for _ in 0..shots {
        let mut syndrome = 0u128;
        for site in 0..table.n_sites() {
            if sampler.sample(&mut rng) {
                syndrome ^= table.column(site);
            }
        }
        if FrameTable::accepted(syndrome) {
            counts.accepted += 1;
            let mut outputs = FrameTable::outputs(syndrome);
            while outputs != 0 {
                counts.output_errors[outputs.trailing_zeros() as usize] += 1;
                outputs &= outputs - 1;
            }
        }
    }
    counts
}

fn chunk_count(shots: u64) -> u64 {
    shots.div_ceil(CHUNK_SHOTS)
}

fn check_inputs(p: f64, shots: u64) -> Result<Bernoulli> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    Bernoulli::new(p).map_err(|_| Error::InvalidProbability {
        name: "p",
        value: p,
    })
}

/// Counts for the chunks in `chunks` of a logical run of `shots` shots.
pub fn run_shards(
    c: &Circuit,
    p: f64,
    shots: u64,
    seed: u64,
    chunks: Range<u64>,
) -> Result<SimCounts> {
    let sampler = check_inputs(p, shots)?;
    let table = FrameTable::new(c)?;
    let end = chunks.end.min(chunk_count(shots));
    let counts = (chunks.start..end)
        .into_par_iter()
        .map(|i| {
            let len = CHUNK_SHOTS.min(shots - i * CHUNK_SHOTS);
            run_chunk(&table, &sampler, seed, i, len)
        })
        .reduce(|| SimCounts::zero(table.k()), |a, b| a.merge(&b));
    Ok(counts)
}

/// `shots` independent samples of i.i.d. Bernoulli(`p`) site faults.
pub fn run_monte_carlo(c: &Circuit, p: f64, shots: u64, seed: u64) -> Result<SimStats> {
    let counts = run_shards(c, p, shots, seed, 0..chunk_count(shots))?;
    Ok(SimStats::from_counts(&counts, p, seed))
}
