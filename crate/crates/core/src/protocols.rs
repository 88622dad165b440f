//! The two distillation protocols: concatenated 15-to-1 and the `3k+8 -> k`
//! block code. Each is described by its leading-order error map, the
//! inverse of that map, its geometric volume in plumbing pieces and its
//! first-order rejection probability.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{check_probability, Error, Result};

/// Rejection estimates above this are outside the `(3k+8)p << 1` regime.
pub const FIRST_ORDER_REJECTION_LIMIT: f64 = 0.3;

/// Number of outputs `k` of a block protocol. Always even and at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlockSize(u32);

impl BlockSize {
    pub fn new(k: i64) -> Result<Self> {
        if k >= 2 && k % 2 == 0 && k <= i64::from(u32::MAX) {
            Ok(Self(k as u32))
        } else {
            Err(Error::InvalidBlockSize(k))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Transversal `S^dag X` implements logical `SX` only for `k = 2 + 4j`.
    pub fn has_transversal_sx(self) -> bool {
        self.0 % 4 == 2
    }
}

impl fmt::Display for BlockSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k", rename_all = "snake_case")]
pub enum ProtocolSpec {
    FifteenToOne,
    Block(BlockSize),
}

impl ProtocolSpec {
    pub fn block(k: i64) -> Result<Self> {
        BlockSize::new(k).map(Self::Block)
    }

    pub fn n_inputs(self) -> u32 {
        match self {
            Self::FifteenToOne => 15,
            Self::Block(k) => 3 * k.get() + 8,
        }
    }

    pub fn n_outputs(self) -> u32 {
        match self {
            Self::FifteenToOne => 1,
            Self::Block(k) => k.get(),
        }
    }

    /// Leading-order coefficient `c` of the error map `c * p^order`.
    fn error_coefficient(self) -> f64 {
        match self {
            Self::FifteenToOne => 35.0,
            Self::Block(k) => f64::from(3 * k.get() + 1),
        }
    }

    fn error_order(self) -> i32 {
        match self {
            Self::FifteenToOne => 3,
            Self::Block(_) => 2,
        }
    }

    /// Set when `k` is even but not of the form `2 + 4j`.
    pub fn transversal_warning(self) -> bool {
        matches!(self, Self::Block(k) if !k.has_transversal_sx())
    }

    pub fn label(self) -> String {
        match self {
            Self::FifteenToOne => "15-1".to_owned(),
            Self::Block(k) => format!("block(k={k})"),
        }
    }
}

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Ratio of logical-circuitry error to residual distillation error.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidEpsilon(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Share of a target error that may be spent on logical failures,
    /// `eps * t / (1 + eps)`.
    pub fn logical_budget(self, target: f64) -> f64 {
        self.0 * target / (1.0 + self.0)
    }
}

/// Distilled output error for input error `p_in`, clamped to 1.
pub fn output_error(spec: ProtocolSpec, p_in: f64) -> f64 {
    (spec.error_coefficient() * p_in.powi(spec.error_order())).min(1.0)
}

/// Largest input error for which distillation alone leaves
/// `p_target / (1 + eps)`.
pub fn required_input_error(spec: ProtocolSpec, p_target: f64, eps: Epsilon) -> Result<f64> {
    check_probability("p_target", p_target)?;
    let scaled = p_target / (spec.error_coefficient() * (1.0 + eps.value()));
    let p = match spec {
        ProtocolSpec::FifteenToOne => scaled.cbrt(),
        ProtocolSpec::Block(_) => scaled.sqrt(),
    };
    if p >= 1.0 {
        return Err(Error::DegenerateTarget {
            target: p_target,
            available: p,
        });
    }
    Ok(p)
}

/// Geometric volume in plumbing pieces.
pub fn geometric_volume(spec: ProtocolSpec) -> f64 {
    match spec {
        ProtocolSpec::FifteenToOne => 192.0,
        ProtocolSpec::Block(k) => 96.0 * f64::from(k.get()) + 216.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RejectionEstimate {
    pub probability: f64,
    /// The first-order estimate exceeds [`FIRST_ORDER_REJECTION_LIMIT`].
    pub beyond_first_order: bool,
}

/// First-order probability that any input fault is detected.
pub fn rejection_probability(spec: ProtocolSpec, p_in: f64) -> RejectionEstimate {
    let probability = (f64::from(spec.n_inputs()) * p_in).min(1.0);
    RejectionEstimate {
        probability,
        beyond_first_order: probability > FIRST_ORDER_REJECTION_LIMIT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn block(k: i64) -> ProtocolSpec {
        ProtocolSpec::block(k).unwrap()
    }

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(ProtocolSpec::FifteenToOne.n_inputs(), 15);
        assert_eq!(ProtocolSpec::FifteenToOne.n_outputs(), 1);
        assert_eq!(block(4).n_inputs(), 20);
        assert_eq!(block(4).n_outputs(), 4);
        assert!(ProtocolSpec::block(3).is_err());
        assert!(ProtocolSpec::block(0).is_err());
        assert!(ProtocolSpec::block(-2).is_err());
        assert!(block(4).transversal_warning());
        assert!(!block(6).transversal_warning());
        assert!(!ProtocolSpec::FifteenToOne.transversal_warning());
    }

    #[test]
    fn output_error_examples() {
        assert!(rel(output_error(ProtocolSpec::FifteenToOne, 1e-3), 3.5e-8) < 1e-12);
        assert!(rel(output_error(block(4), 1e-2), 1.3e-3) < 1e-12);
        assert_eq!(output_error(ProtocolSpec::FifteenToOne, 0.0), 0.0);
        assert_eq!(output_error(block(2), 0.9), 1.0);
    }

    #[test]
    fn required_input_examples() {
        let p = required_input_error(ProtocolSpec::FifteenToOne, 1e-15, eps(1.0)).unwrap();
        assert!(rel(p, 2.43e-6) < 2e-3, "{p}");
        let p = required_input_error(ProtocolSpec::FifteenToOne, 2.4e-6, eps(1.0)).unwrap();
        assert!(rel(p, 3.25e-3) < 2e-3, "{p}");
        let p = required_input_error(block(4), 2.6e-7, eps(1.0)).unwrap();
        assert!(rel(p, 1e-4) < 1e-12, "{p}");
        // forward check
        assert!(rel(output_error(block(4), p) * 2.0, 2.6e-7) < 1e-12);
        assert!(required_input_error(block(4), 1.0, eps(1.0)).is_err());
    }

    #[test]
    fn volumes() {
        assert_eq!(geometric_volume(ProtocolSpec::FifteenToOne), 192.0);
        assert_eq!(geometric_volume(block(4)), 600.0);
        assert_eq!(geometric_volume(block(2)), 408.0);
        for k in (4..200).step_by(2) {
            assert_eq!(
                geometric_volume(block(k)) - geometric_volume(block(k - 2)),
                192.0
            );
        }
    }

    #[test]
    fn rejection_examples() {
        let r = rejection_probability(block(4), 1e-3);
        assert!(rel(r.probability, 0.02) < 1e-12);
        assert!(!r.beyond_first_order);
        assert!(
            rel(
                rejection_probability(ProtocolSpec::FifteenToOne, 1e-2).probability,
                0.15
            ) < 1e-12
        );
        assert_eq!(rejection_probability(block(2), 0.0).probability, 0.0);
        let big = rejection_probability(block(10), 0.02);
        assert!(big.beyond_first_order);
        assert_eq!(rejection_probability(block(10), 0.5).probability, 1.0);
    }

    fn any_spec() -> impl Strategy<Value = ProtocolSpec> {
        prop_oneof![
            Just(ProtocolSpec::FifteenToOne),
            (1i64..200).prop_map(|j| ProtocolSpec::block(2 * j).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn round_trip(spec in any_spec(), log_t in -20.0f64..-2.0, log_e in -5.0f64..5.0) {
            let t = 10f64.powf(log_t);
            let e = eps(2f64.powf(log_e));
            let p = required_input_error(spec, t, e).unwrap();
            let back = output_error(spec, p);
            prop_assert!(rel(back, t / (1.0 + e.value())) < 1e-12);
        }

        #[test]
        fn maps_are_monotone(spec in any_spec(), a in -12.0f64..-1.0, gap in 0.01f64..3.0) {
            let (lo, hi) = (10f64.powf(a - gap), 10f64.powf(a));
            prop_assert!(output_error(spec, lo) < output_error(spec, hi) || output_error(spec, lo) == 1.0);
            let e = eps(1.0);
            prop_assert!(required_input_error(spec, lo, e).unwrap() < required_input_error(spec, hi, e).unwrap());
        }
    }
}
