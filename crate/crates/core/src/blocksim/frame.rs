use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, MeasRole, Op, NUM_CHECKS};
use crate::error::{Error, Result};

/// Z faults at T sites; bit `i` set means a Z error at site `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErrorPattern {
    bits: Vec<bool>,
}

impl ErrorPattern {
    pub fn none(n_sites: usize) -> Self {
        Self {
            bits: vec![false; n_sites],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_sites(n_sites: usize, sites: &[usize]) -> Self {
        let mut p = Self::none(n_sites);
        for &s in sites {
            p.bits[s] ^= true;
        }
        p
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, site: usize) -> bool {
        self.bits[site]
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn xor(&self, other: &Self) -> Self {
        Self {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameResult {
    /// Flip of each check relative to the noiseless run, by check id.
    pub check_flips: Vec<bool>,
    /// Residual Z on each output after applying its byproduct correction.
    pub output_errors: Vec<bool>,
    pub accepted: bool,
}

impl FrameResult {
    pub fn xor(&self, other: &Self) -> Self {
        let x = |a: &[bool], b: &[bool]| a.iter().zip(b).map(|(a, b)| a ^ b).collect::<Vec<_>>();
        let check_flips = x(&self.check_flips, &other.check_flips);
        Self {
            accepted: check_flips.iter().all(|f| !f),
            output_errors: x(&self.output_errors, &other.output_errors),
            check_flips,
        }
    }
}

/// Propagates the Z frame of `e` through `c` one op at a time.
///
/// # Panics
///
/// If `e.len()` differs from the circuit's T-site count.
pub fn simulate_frame(c: &Circuit, e: &ErrorPattern) -> FrameResult {
    assert_eq!(
        e.len(),
        c.t_site_count(),
        "error pattern length does not match T-site count"
    );
    let mut z = vec![false; c.n_qubits()];
    let mut check_flips = vec![false; NUM_CHECKS];
    let mut byproduct = vec![false; c.k()];
    for op in c.ops() {
        match *op {
            Op::PrepPlus(q) | Op::PrepZero(q) | Op::PrepA(q) => z[q] = false,
            Op::T { qubit, site } => z[qubit] ^= e.get(site),
            Op::Cnot { control, target } => z[control] ^= z[target],
            Op::MeasX { qubit, role } => match role {
                MeasRole::Check(id) => check_flips[id as usize] ^= z[qubit],
                MeasRole::OutSupport(n) => byproduct[n] ^= z[qubit],
            },
            Op::Output { .. } => {}
        }
    }
    let output_errors = c
        .output_wires()
        .iter()
        .zip(&byproduct)
        .map(|(&w, &b)| z[w] ^ b)
        .collect();
    FrameResult {
        accepted: check_flips.iter().all(|f| !f),
        check_flips,
        output_errors,
    }
}

/// Linear map from fault sites to packed syndromes.
///
/// Bits `0..3` of a syndrome are the check flips, bit `3 + n` is the error
/// on output `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameTable {
    columns: Vec<u128>,
    k: usize,
}

impl FrameTable {
    pub const CHECK_MASK: u128 = (1 << NUM_CHECKS) - 1;

    pub fn new(c: &Circuit) -> Result<Self> {
        let k = c.k();
        if NUM_CHECKS + k > 128 {
            return Err(Error::InvalidArgument(format!(
                "{k} outputs do not fit a packed syndrome"
            )));
        }
        let n = c.t_site_count();
        let columns = (0..n)
            .map(|site| Self::pack(&simulate_frame(c, &ErrorPattern::from_sites(n, &[site]))))
            .collect();
        Ok(Self { columns, k })
    }

    pub fn pack(r: &FrameResult) -> u128 {
        let bits = r.check_flips.iter().chain(&r.output_errors);
        bits.enumerate()
            .fold(0u128, |acc, (i, &b)| acc | (u128::from(b) << i))
    }

    pub fn unpack(&self, syndrome: u128) -> FrameResult {
        let check_flips: Vec<bool> = (0..NUM_CHECKS).map(|i| syndrome >> i & 1 == 1).collect();
        FrameResult {
            accepted: syndrome & Self::CHECK_MASK == 0,
            check_flips,
            output_errors: (0..self.k)
                .map(|n| syndrome >> (NUM_CHECKS + n) & 1 == 1)
                .collect(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.columns.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn column(&self, site: usize) -> u128 {
        self.columns[site]
    }

    pub fn syndrome_of_sites(&self, sites: &[usize]) -> u128 {
        sites.iter().fold(0, |acc, &s| acc ^ self.columns[s])
    }

    pub fn syndrome(&self, e: &ErrorPattern) -> u128 {
        (0..e.len())
            .filter(|&s| e.get(s))
            .fold(0, |acc, s| acc ^ self.columns[s])
    }

    pub fn accepted(syndrome: u128) -> bool {
        syndrome & Self::CHECK_MASK == 0
    }

    /// Output bits of a syndrome, shifted down to bit 0.
    pub fn outputs(syndrome: u128) -> u128 {
        syndrome >> NUM_CHECKS
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocksim::generate_block_circuit;
    use proptest::prelude::*;

    #[test]
    fn noiseless_reference() {
        let c = generate_block_circuit(4).unwrap();
        let r = simulate_frame(&c, &ErrorPattern::none(20));
        assert!(r.accepted);
        assert!(r.output_errors.iter().all(|e| !e));
    }

    #[test]
    fn every_single_fault_is_rejected() {
        for k in [2, 4, 6] {
            let c = generate_block_circuit(k).unwrap();
            let n = c.t_site_count();
            for s in 0..n {
                assert!(
                    !simulate_frame(&c, &ErrorPattern::from_sites(n, &[s])).accepted,
                    "k={k} site {s}"
                );
            }
        }
    }

    #[test]
    fn layers_hit_the_intended_checks() {
        let k = 4;
        let c = generate_block_circuit(k as i64).unwrap();
        let n = c.t_site_count();
        let flips = |s| simulate_frame(&c, &ErrorPattern::from_sites(n, &[s])).check_flips;
        // state preparation and the first controlled layer trip the ancilla
        for s in 0..2 * k + 4 {
            assert!(flips(s)[0], "site {s}");
        }
        // the final layer is invisible to the ancilla and caught by the X stabilizers
        for s in 2 * k + 4..3 * k + 8 {
            let f = flips(s);
            assert!(!f[0] && (f[1] || f[2]), "site {s}");
        }
    }

    #[test]
    fn linearity_exhaustive_k2() {
        let c = generate_block_circuit(2).unwrap();
        let t = FrameTable::new(&c).unwrap();
        let n = c.t_site_count();
        for mask in 0u32..1 << n {
            let e = ErrorPattern::from_bits((0..n).map(|i| mask >> i & 1 == 1).collect());
            assert_eq!(FrameTable::pack(&simulate_frame(&c, &e)), t.syndrome(&e));
        }
    }

    proptest! {
        #[test]
        fn xor_homomorphism(
            k in prop_oneof![Just(4i64), Just(6), Just(8)],
            a in proptest::collection::vec(any::<bool>(), 32),
            b in proptest::collection::vec(any::<bool>(), 32),
        ) {
            let c = generate_block_circuit(k).unwrap();
            let n = c.t_site_count();
            let a = ErrorPattern::from_bits(a[..n].to_vec());
            let b = ErrorPattern::from_bits(b[..n].to_vec());
            let lhs = simulate_frame(&c, &a.xor(&b));
            let rhs = simulate_frame(&c, &a).xor(&simulate_frame(&c, &b));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
