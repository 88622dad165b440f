//! Plain `key = value` configuration for the cost model and the search.
//!
//! ```text
//! # comments and blank lines are ignored
//! error_model.prefactor = 0.1
//! error_model.base_scale = 100
//! error_model.plumbing_mode = paper_simplified
//! volume.qubits_per_d2 = 4
//! volume.rounds_per_d = 1
//! search.eps_min = 0.03125
//! search.eps_max = 32
//! search.eps_points = 33
//! search.k_min = 2
//! search.k_max = 128
//! search.max_15to1_levels = 4
//! search.d_max = 199
//! search.include_retry_factor = false
//! ```

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::error_model::{CodeDistance, CostModel, PlumbingMode};
use crate::planner::SearchConfig;
use crate::protocols::BlockSize;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "MFP_CONFIG";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    pub cost: CostModel,
    pub search: SearchConfig,
}

struct Grid {
    eps_min: f64,
    eps_max: f64,
    eps_points: usize,
    k_min: i64,
    k_max: i64,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cost = CostModel::default();
        let mut search = SearchConfig::default();
        let mut grid = Grid {
            eps_min: 2f64.powi(-5),
            eps_max: 2f64.powi(5),
            eps_points: 33,
            k_min: 2,
            k_max: 128,
        };
        let (mut eps_touched, mut k_touched) = (false, false);

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            fn num<T: FromStr>(value: &str, key: &str, line: usize) -> Result<T> {
                value.parse().map_err(|_| Error::Config {
                    line,
                    message: format!("invalid value {value:?} for {key}"),
                })
            }
            match key {
                "error_model.prefactor" => cost.prefactor = num(value, key, line)?,
                "error_model.base_scale" => cost.base_scale = num(value, key, line)?,
                "error_model.plumbing_mode" => {
                    cost.plumbing_mode = PlumbingMode::from_str(value).map_err(err)?
                }
                "volume.qubits_per_d2" => cost.qubits_per_d2 = num(value, key, line)?,
                "volume.rounds_per_d" => cost.rounds_per_d = num(value, key, line)?,
                "search.eps_min" => (grid.eps_min, eps_touched) = (num(value, key, line)?, true),
                "search.eps_max" => (grid.eps_max, eps_touched) = (num(value, key, line)?, true),
                "search.eps_points" => {
                    (grid.eps_points, eps_touched) = (num(value, key, line)?, true)
                }
                "search.k_min" => (grid.k_min, k_touched) = (num(value, key, line)?, true),
                "search.k_max" => (grid.k_max, k_touched) = (num(value, key, line)?, true),
                "search.max_15to1_levels" => search.max_15to1_levels = num(value, key, line)?,
                "search.d_max" => {
                    search.d_max =
                        CodeDistance::new(num(value, key, line)?).map_err(|e| err(e.to_string()))?
                }
                "search.include_retry_factor" => {
                    search.include_retry_factor = num(value, key, line)?
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }

        if eps_touched {
            if !(grid.eps_min > 0.0 && grid.eps_max >= grid.eps_min && grid.eps_points > 0) {
                return Err(Error::Config {
                    line: 0,
                    message: "eps grid needs 0 < eps_min <= eps_max and eps_points >= 1".into(),
                });
            }
            search.eps_grid =
                crate::planner::search_grid(grid.eps_min, grid.eps_max, grid.eps_points);
        }
        if k_touched {
            let lo = grid.k_min + grid.k_min.rem_euclid(2);
            search.k_range = (lo..=grid.k_max)
                .step_by(2)
                .map(BlockSize::new)
                .collect::<Result<_>>()
                .map_err(|e| Error::Config {
                    line: 0,
                    message: e.to_string(),
                })?;
        }
        cost.validate()?;
        search.validate()?;
        Ok(Self { cost, search })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }
}
