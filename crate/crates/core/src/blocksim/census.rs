use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::frame::FrameTable;
use crate::error::{check_probability, Error, Result};

/// Most patterns [`enumerate_faults`] will visit for one weight.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;
/// Largest site count [`exact_statistics`] sums over.
pub const EXACT_MAX_SITES: usize = 24;
/// Cap on the example patterns kept per weight.
const MAX_EXAMPLES: usize = 64;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCensus {
    pub weight: usize,
    pub total: u64,
    pub detected: u64,
    pub undetected_benign: u64,
    /// Undetected patterns corrupting at least one output.
    pub undetected_harmful: u64,
    /// Undetected patterns corrupting output `n`.
    pub harmful_per_output: Vec<u64>,
    /// First few undetected patterns, as site lists.
    pub undetected_examples: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultCensus {
    pub n_sites: usize,
    pub k: usize,
    pub weights: Vec<WeightCensus>,
}

impl FaultCensus {
    pub fn weight(&self, w: usize) -> Option<&WeightCensus> {
        self.weights.iter().find(|c| c.weight == w)
    }
}

/// Classifies every fault pattern of weight `1..=max_weight`.
pub fn enumerate_faults(c: &Circuit, max_weight: usize) -> Result<FaultCensus> {
    if !(1..=3).contains(&max_weight) {
        return Err(Error::InvalidArgument(format!(
            "max_weight must be 1, 2 or 3, got {max_weight}"
        )));
    }
    let n = c.t_site_count();
    for w in 1..=max_weight {
        let patterns = binomial(n, w);
        if patterns > ENUMERATION_LIMIT {
            return Err(Error::TooLarge {
                patterns,
                limit: ENUMERATION_LIMIT,
            });
        }
    }
    let table = FrameTable::new(c)?;
    let weights = (1..=max_weight)
        .map(|w| census_of_weight(&table, w))
        .collect();
    Ok(FaultCensus {
        n_sites: n,
        k: c.k(),
        weights,
    })
}

fn census_of_weight(table: &FrameTable, w: usize) -> WeightCensus {
    let k = table.k();
    let mut census = WeightCensus {
        weight: w,
        total: 0,
        detected: 0,
        undetected_benign: 0,
        undetected_harmful: 0,
        harmful_per_output: vec![0; k],
        undetected_examples: Vec::new(),
    };
    let mut sites = Vec::with_capacity(w);
    visit_combinations(table.n_sites(), w, 0, &mut sites, &mut |sites| {
        census.total += 1;
        let syndrome = table.syndrome_of_sites(sites);
        if !FrameTable::accepted(syndrome) {
            census.detected += 1;
            return;
        }
        if census.undetected_examples.len() < MAX_EXAMPLES {
            census.undetected_examples.push(sites.to_vec());
        }
        let outputs = FrameTable::outputs(syndrome);
        if outputs == 0 {
            census.undetected_benign += 1;
            return;
        }
        census.undetected_harmful += 1;
        for (n, count) in census.harmful_per_output.iter_mut().enumerate() {
            *count += (outputs >> n & 1) as u64;
        }
    });
    census
}

fn visit_combinations(
    n: usize,
    w: usize,
    start: usize,
    sites: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if sites.len() == w {
        f(sites);
        return;
    }
    for s in start..n {
        sites.push(s);
        visit_combinations(n, w, s + 1, sites, f);
        sites.pop();
    }
}

/// Exact acceptance and output error at i.i.d. site error `p`, from a full
/// sum over all `2^N` patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactStats {
    pub p: f64,
    pub n_sites: usize,
    pub acceptance: f64,
    pub rejection: f64,
    /// `P(output n wrong | accepted)`.
    pub output_error: Vec<f64>,
    /// `P(output n wrong and accepted)`.
    pub output_error_joint: Vec<f64>,
    /// Accepted patterns by weight.
    pub accepted_by_weight: Vec<u64>,
    /// `harmful_by_weight[w][n]`: accepted patterns of weight `w` that
    /// corrupt output `n`.
    pub harmful_by_weight: Vec<Vec<u64>>,
}

/// Weight profile of the accepted patterns, independent of `p`.
#[derive(Debug, Clone)]
struct WeightProfile {
    n: usize,
    accepted: Vec<u64>,
    harmful: Vec<Vec<u64>>,
}

fn weight_profile(table: &FrameTable) -> WeightProfile {
    let n = table.n_sites();
    let k = table.k();
    let mut accepted = vec![0u64; n + 1];
    let mut harmful = vec![vec![0u64; k]; n + 1];
    // Gray-code walk: consecutive patterns differ in one site.
    let mut syndrome = 0u128;
    accepted[0] = 1;
    for i in 1u64..1 << n {
        syndrome ^= table.column(i.trailing_zeros() as usize);
        if FrameTable::accepted(syndrome) {
            let w = (i ^ (i >> 1)).count_ones() as usize;
            accepted[w] += 1;
            let mut outputs = FrameTable::outputs(syndrome);
            while outputs != 0 {
                harmful[w][outputs.trailing_zeros() as usize] += 1;
                outputs &= outputs - 1;
            }
        }
    }
    WeightProfile {
        n,
        accepted,
        harmful,
    }
}

impl WeightProfile {
    fn stats(&self, p: f64) -> ExactStats {
        let n = self.n;
        let weight_prob = |w: usize| p.powi(w as i32) * (1.0 - p).powi((n - w) as i32);
        let mut acceptance = 0.0;
        let mut rejection = 0.0;
        let k = self.harmful.first().map_or(0, Vec::len);
        let mut joint = vec![0.0; k];
        for w in 0..=n {
            let pw = weight_prob(w);
            acceptance += self.accepted[w] as f64 * pw;
            rejection += (binomial(n, w) as u64 - self.accepted[w]) as f64 * pw;
            for (j, h) in joint.iter_mut().zip(&self.harmful[w]) {
                *j += *h as f64 * pw;
            }
        }
        ExactStats {
            p,
            n_sites: n,
            acceptance,
            rejection,
            output_error: joint.iter().map(|j| j / acceptance).collect(),
            output_error_joint: joint,
            accepted_by_weight: self.accepted.clone(),
            harmful_by_weight: self.harmful.clone(),
        }
    }
}

pub fn exact_statistics(c: &Circuit, p: f64) -> Result<ExactStats> {
    if !(0.0..=1.0).contains(&p) {
        check_probability("p", p)?;
    }
    let n = c.t_site_count();
    if n > EXACT_MAX_SITES {
        return Err(Error::TooLarge {
            patterns: 1u128 << n.min(127),
            limit: 1u128 << EXACT_MAX_SITES,
        });
    }
    Ok(weight_profile(&FrameTable::new(c)?).stats(p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub k: usize,
    pub t_sites: usize,
    pub expected_t_sites: usize,
    pub weight1_escapes: Vec<usize>,
    /// Detected weight-1 patterns: the first-order rejection coefficient.
    pub rejection_coefficient: u64,
    pub expected_rejection_coefficient: u64,
    pub weight2_total: u64,
    pub harmful_weight2_per_output: Vec<u64>,
    pub expected_harmful_per_output: u64,
    /// Common per-output weight-2 count, when all outputs agree.
    pub measured_coefficient: Option<u64>,
    pub weight2_harmful_examples: Vec<Vec<usize>>,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Checks single-fault detection, the `3k+1` quadratic coefficient and the
/// `3k+8` first-order rejection coefficient.
pub fn validate_circuit(c: &Circuit) -> Result<ValidationReport> {
    let census = enumerate_faults(c, 2)?;
    let k = c.k();
    let w1 = census.weight(1).expect("weight 1 enumerated");
    let w2 = census.weight(2).expect("weight 2 enumerated");
    let expected_harmful = 3 * k as u64 + 1;
    let expected_rejection = 3 * k as u64 + 8;
    let weight1_escapes: Vec<usize> = w1.undetected_examples.iter().map(|s| s[0]).collect();

    let mut failures = Vec::new();
    if !weight1_escapes.is_empty() {
        failures.push(format!(
            "{} single faults escape detection: sites {:?}",
            w1.total - w1.detected,
            weight1_escapes
        ));
    }
    for (n, &count) in w2.harmful_per_output.iter().enumerate() {
        if count != expected_harmful {
            failures.push(format!(
                "output {n}: {count} undetected harmful weight-2 patterns, expected {expected_harmful}"
            ));
        }
    }
    if w1.detected != expected_rejection {
        failures.push(format!(
            "first-order rejection coefficient {} differs from 3k+8 = {expected_rejection}",
            w1.detected
        ));
    }
    let measured_coefficient = match w2.harmful_per_output.split_first() {
        Some((first, rest)) if rest.iter().all(|c| c == first) => Some(*first),
        _ => None,
    };

    Ok(ValidationReport {
        k,
        t_sites: c.t_site_count(),
        expected_t_sites: 3 * k + 8,
        weight1_escapes,
        rejection_coefficient: w1.detected,
        expected_rejection_coefficient: expected_rejection,
        weight2_total: w2.total,
        harmful_weight2_per_output: w2.harmful_per_output.clone(),
        expected_harmful_per_output: expected_harmful,
        measured_coefficient,
        weight2_harmful_examples: w2.undetected_examples.clone(),
        passed: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocksim::{generate_block_circuit, simulate_frame, ErrorPattern, MeasRole, Op};

    #[test]
    fn binomials() {
        assert_eq!(binomial(20, 2), 190);
        assert_eq!(binomial(38, 3), 8436);
        assert_eq!(binomial(3, 5), 0);
    }

    /// Independent brute force: classify weight-2 patterns with the op-by-op
    /// simulator rather than the packed table.
    fn brute_force_weight2(c: &Circuit) -> (u64, Vec<u64>) {
        let n = c.t_site_count();
        let mut undetected = 0;
        let mut harmful = vec![0; c.k()];
        for a in 0..n {
            for b in a + 1..n {
                let r = simulate_frame(c, &ErrorPattern::from_sites(n, &[a, b]));
                if r.accepted {
                    undetected += 1;
                    for (h, &e) in harmful.iter_mut().zip(&r.output_errors) {
                        *h += u64::from(e);
                    }
                }
            }
        }
        (undetected, harmful)
    }

    #[test]
    fn census_matches_brute_force() {
        for k in [2, 4, 6] {
            let c = generate_block_circuit(k).unwrap();
            let census = enumerate_faults(&c, 2).unwrap();
            let w2 = census.weight(2).unwrap();
            let (undetected, harmful) = brute_force_weight2(&c);
            assert_eq!(w2.undetected_benign + w2.undetected_harmful, undetected);
            assert_eq!(w2.harmful_per_output, harmful);
        }
    }

    #[test]
    fn census_examples() {
        let c4 = generate_block_circuit(4).unwrap();
        let census = enumerate_faults(&c4, 3).unwrap();
        let w1 = census.weight(1).unwrap();
        assert_eq!((w1.total, w1.detected), (20, 20));
        let w2 = census.weight(2).unwrap();
        assert_eq!(w2.total, 190);
        assert_eq!(w2.harmful_per_output, vec![13; 4]);
        for w in &census.weights {
            assert_eq!(
                w.detected + w.undetected_benign + w.undetected_harmful,
                w.total
            );
            assert_eq!(u128::from(w.total), binomial(20, w.weight));
        }
        let c2 = generate_block_circuit(2).unwrap();
        let w2 = enumerate_faults(&c2, 2).unwrap().weights[1].clone();
        assert_eq!(w2.harmful_per_output, vec![7; 2]);
        assert!(enumerate_faults(&c2, 4).is_err());
    }

    #[test]
    fn census_guard() {
        // C(3*200+8, 3) = 3.7e7 > 1e7
        let c = generate_block_circuit(200).unwrap();
        assert!(matches!(
            enumerate_faults(&c, 3),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn exact_small_cases() {
        let c = generate_block_circuit(4).unwrap();
        let s = exact_statistics(&c, 0.0).unwrap();
        assert_eq!(s.acceptance, 1.0);
        assert!(s.output_error.iter().all(|&e| e == 0.0));

        let s = exact_statistics(&c, 1e-3).unwrap();
        // Single faults are all caught, so acceptance is (1-p)^20 up to O(p^2).
        assert!(
            (s.acceptance - 0.999f64.powi(20)).abs() < 1e-4,
            "{}",
            s.acceptance
        );
        assert!((s.acceptance + s.rejection - 1.0).abs() < 1e-12);
        for &e in &s.output_error {
            assert!((e / 1.3e-5 - 1.0).abs() < 0.05, "{e}");
        }
        let t = FrameTable::new(&c).unwrap();
        let brute = (0u32..1 << 20)
            .filter(|&m| {
                let sites: Vec<usize> = (0..20).filter(|i| m >> i & 1 == 1).collect();
                FrameTable::accepted(t.syndrome_of_sites(&sites))
            })
            .count() as u64;
        assert_eq!(s.accepted_by_weight.iter().sum::<u64>(), brute);
        assert!(exact_statistics(&generate_block_circuit(6).unwrap(), 1e-3).is_err());
    }

    #[test]
    fn validation_passes_and_fails() {
        for k in [2, 4] {
            let r = validate_circuit(&generate_block_circuit(k).unwrap()).unwrap();
            assert!(r.passed, "{:?}", r.failures);
            assert_eq!(r.measured_coefficient, Some(3 * k as u64 + 1));
            assert_eq!(r.rejection_coefficient, 3 * k as u64 + 8);
        }
        // Drop qubit 0's stabilizer readout: its final-layer fault escapes.
        let c = generate_block_circuit(4).unwrap();
        let broken = c
            .without_ops(|op| {
                op == &Op::MeasX {
                    qubit: 0,
                    role: MeasRole::Check(1),
                }
            })
            .unwrap();
        let r = validate_circuit(&broken).unwrap();
        assert!(!r.passed);
        assert_eq!(r.weight1_escapes, vec![2 * 4 + 4]);
    }
}
