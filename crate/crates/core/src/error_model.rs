//! Surface-code logical error model and code-distance selection.
//!
//! The per-round logical error of a distance-`d` patch is taken from the
//! fitted curve `prefactor * (base_scale * p_g)^((d + 1) / 2)`. A plumbing
//! piece (a cube of edge `5d/4`) is bounded either by the simplified
//! `d * (base_scale * p_g)^((d + 1) / 2)` or by the explicit
//! `2 * 3 * (5d/4) * p_L` product it was derived from.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest distance searched unless configured otherwise.
pub const DEFAULT_D_MAX: u32 = 199;

/// Physical gate error rate `p_g`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateErrorRate(f64);

impl GateErrorRate {
    pub fn new(value: f64) -> Result<Self> {
        crate::error::check_probability("p_g", value).map(Self)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Odd surface-code distance, at least 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CodeDistance(u32);

impl CodeDistance {
    pub const MIN: CodeDistance = CodeDistance(3);

    pub fn new(value: u32) -> Result<Self> {
        if value >= 3 && value % 2 == 1 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidDistance(value))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// The next smaller legal distance, if any.
    pub fn prev(self) -> Option<Self> {
        (self.0 > 3).then(|| Self(self.0 - 2))
    }

    fn half_exponent(self) -> i32 {
        self.0.div_ceil(2) as i32
    }
}

impl fmt::Display for CodeDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlumbingMode {
    /// `d * (base_scale * p_g)^((d+1)/2)`.
    #[default]
    PaperSimplified,
    /// `2 * 3 * (5d/4) * p_L(d, p_g)`.
    DerivationExact,
}

impl FromStr for PlumbingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper_simplified" | "simplified" => Ok(Self::PaperSimplified),
            "derivation_exact" | "exact" => Ok(Self::DerivationExact),
            other => Err(format!(
                "unknown plumbing mode {other:?} (expected paper_simplified or derivation_exact)"
            )),
        }
    }
}

impl fmt::Display for PlumbingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PaperSimplified => "paper_simplified",
            Self::DerivationExact => "derivation_exact",
        })
    }
}

/// Fitted logical error functions plus the geometric-to-absolute volume
/// conversion constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub prefactor: f64,
    pub base_scale: f64,
    pub plumbing_mode: PlumbingMode,
    /// Physical qubits per `d x d` of defect-picture area.
    pub qubits_per_d2: f64,
    /// Error-detection rounds per unit `d` of time.
    pub rounds_per_d: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            prefactor: 0.1,
            base_scale: 100.0,
            plumbing_mode: PlumbingMode::PaperSimplified,
            qubits_per_d2: 4.0,
            rounds_per_d: 1.0,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("error_model.prefactor", self.prefactor),
            ("error_model.base_scale", self.base_scale),
            ("volume.qubits_per_d2", self.qubits_per_d2),
            ("volume.rounds_per_d", self.rounds_per_d),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config {
                    line: 0,
                    message: format!("{name} must be positive, got {value}"),
                });
            }
        }
        Ok(())
    }

    /// The fit is only meaningful below threshold, `base_scale * p_g < 1`.
    pub fn fit_is_valid(&self, pg: GateErrorRate) -> bool {
        self.base_scale * pg.value() < 1.0
    }

    fn suppression(&self, d: CodeDistance, pg: GateErrorRate) -> f64 {
        (self.base_scale * pg.value()).powi(d.half_exponent())
    }

    fn per_round_raw(&self, d: CodeDistance, pg: GateErrorRate) -> f64 {
        self.prefactor * self.suppression(d, pg)
    }

    fn plumbing_raw(&self, d: CodeDistance, pg: GateErrorRate) -> f64 {
        let d_f = f64::from(d.get());
        match self.plumbing_mode {
            PlumbingMode::PaperSimplified => d_f * self.suppression(d, pg),
            PlumbingMode::DerivationExact => {
                2.0 * 3.0 * (5.0 * d_f / 4.0) * self.per_round_raw(d, pg)
            }
        }
    }
}

/// Logical error per round of a square distance-`d` patch, clamped to 1.
pub fn logical_error_per_round(d: CodeDistance, pg: GateErrorRate, m: &CostModel) -> f64 {
    m.per_round_raw(d, pg).min(1.0)
}

/// Upper bound on the logical error of one plumbing piece, clamped to 1.
pub fn plumbing_piece_error(d: CodeDistance, pg: GateErrorRate, m: &CostModel) -> f64 {
    m.plumbing_raw(d, pg).min(1.0)
}

/// Smallest odd `d >= 3` with `v_geom * P_L(d, p_g) < budget`.
pub fn min_distance(
    v_geom: f64,
    pg: GateErrorRate,
    budget: f64,
    m: &CostModel,
    d_max: CodeDistance,
) -> Result<CodeDistance> {
    if !(v_geom > 0.0 && v_geom.is_finite()) {
        return Err(Error::InvalidVolume(v_geom));
    }
    if budget.is_nan() || budget <= 0.0 {
        return Err(Error::InvalidProbability {
            name: "budget",
            value: budget,
        });
    }
    let mut best_product = f64::INFINITY;
    for d in (3..=d_max.get()).step_by(2) {
        let d = CodeDistance(d);
        let product = v_geom * plumbing_piece_error(d, pg, m);
        if product < budget {
            return Ok(d);
        }
        best_product = best_product.min(product);
    }
    Err(Error::DistanceInfeasible {
        v_geom,
        budget,
        d_max: d_max.get(),
        best_product,
    })
}
