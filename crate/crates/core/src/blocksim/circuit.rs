use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Number of checks feeding the accept decision.
pub const NUM_CHECKS: usize = 3;
/// Check id of the transversal `T^dag X T` measurement.
pub const TRANSVERSAL_CHECK: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasRole {
    Check(u32),
    OutSupport(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    PrepPlus(usize),
    PrepZero(usize),
    PrepA(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    /// A T (or T^dag) gate consuming one input state; the only fault site.
    T {
        qubit: usize,
        site: usize,
    },
    /// X-basis measurement. A qubit may carry several roles, one per op.
    MeasX {
        qubit: usize,
        role: MeasRole,
    },
    Output {
        output: usize,
        qubit: usize,
    },
}

impl Op {
    fn qubits(&self) -> [Option<usize>; 2] {
        match *self {
            Op::PrepPlus(q) | Op::PrepZero(q) | Op::PrepA(q) => [Some(q), None],
            Op::Cnot { control, target } => [Some(control), Some(target)],
            Op::T { qubit, .. } | Op::MeasX { qubit, .. } | Op::Output { qubit, .. } => {
                [Some(qubit), None]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown opcode {0:?}")]
    UnknownOpcode(String),
    #[error("missing QUBITS header")]
    MissingHeader,
    #[error("qubit {qubit} out of range (circuit has {n_qubits})")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("CNOT control equals target ({0})")]
    DegenerateCnot(usize),
    #[error("duplicate site id {0}")]
    DuplicateSite(usize),
    #[error("site ids must be 0..{count} without gaps; {missing} is missing")]
    SiteGap { missing: usize, count: usize },
    #[error("expected {NUM_CHECKS} checks with ids 0..{NUM_CHECKS}, found {0:?}")]
    CheckCount(Vec<u32>),
    #[error("qubit {0} is used after being measured")]
    UseAfterMeasure(usize),
    #[error("duplicate measurement role on qubit {0}")]
    DuplicateRole(usize),
    #[error("output {0} declared twice")]
    DuplicateOutput(usize),
    #[error("output ids must be 0..{count} without gaps; {missing} is missing")]
    OutputGap { missing: usize, count: usize },
    #[error("output wire {0} must not be measured")]
    MeasuredOutput(usize),
    #[error("byproduct support of output {output} has {size} qubits, expected 3")]
    SupportSize { output: usize, size: usize },
    #[error("byproduct support refers to undeclared output {0}")]
    UnknownOutput(usize),
    #[error("circuit has no outputs")]
    NoOutputs,
    #[error("k must be even and at least 2, got {0}")]
    InvalidK(i64),
}

/// A circuit error, located at a source line when it came from text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct CircuitError {
    pub line: Option<usize>,
    pub kind: CircuitErrorKind,
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.kind),
            None => self.kind.fmt(f),
        }
    }
}

impl From<CircuitErrorKind> for CircuitError {
    fn from(kind: CircuitErrorKind) -> Self {
        Self { line: None, kind }
    }
}

/// Validated circuit plus the indices derived from its ops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Op>,
    t_site_count: usize,
    check_ids: Vec<u32>,
    byproduct_supports: Vec<Vec<usize>>,
    output_wires: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize, ops: Vec<Op>) -> Result<Self, CircuitError> {
        Self::with_lines(n_qubits, ops, None)
    }

    /// `lines[i]` is the source line of `ops[i]`, used for diagnostics.
    pub(crate) fn with_lines(
        n_qubits: usize,
        ops: Vec<Op>,
        lines: Option<&[usize]>,
    ) -> Result<Self, CircuitError> {
        let at = |i: usize, kind: CircuitErrorKind| CircuitError {
            line: lines.map(|l| l[i]),
            kind,
        };
        let mut measured = vec![false; n_qubits];
        let mut roles = BTreeSet::new();
        let mut sites = BTreeSet::new();
        let mut checks = BTreeSet::new();
        let mut outputs: Vec<Option<usize>> = Vec::new();
        let mut supports: Vec<(usize, usize, usize)> = Vec::new();

        for (i, op) in ops.iter().enumerate() {
            if let Op::Cnot { control, target } = *op {
                if control == target {
                    return Err(at(i, CircuitErrorKind::DegenerateCnot(control)));
                }
            }
            for q in op.qubits().into_iter().flatten() {
                if q >= n_qubits {
                    return Err(at(
                        i,
                        CircuitErrorKind::QubitOutOfRange { qubit: q, n_qubits },
                    ));
                }
                let is_meas = matches!(op, Op::MeasX { .. });
                if measured[q] && !is_meas {
                    return Err(at(i, CircuitErrorKind::UseAfterMeasure(q)));
                }
            }
            match *op {
                Op::T { site, .. } => {
                    if !sites.insert(site) {
                        return Err(at(i, CircuitErrorKind::DuplicateSite(site)));
                    }
                }
                Op::MeasX { qubit, role } => {
                    measured[qubit] = true;
                    if !roles.insert((qubit, role)) {
                        return Err(at(i, CircuitErrorKind::DuplicateRole(qubit)));
                    }
                    match role {
                        MeasRole::Check(id) => {
                            checks.insert(id);
                        }
                        MeasRole::OutSupport(n) => supports.push((i, n, qubit)),
                    }
                }
                Op::Output { output, qubit } => {
                    if outputs.len() <= output {
                        outputs.resize(output + 1, None);
                    }
                    if outputs[output].is_some() {
                        return Err(at(i, CircuitErrorKind::DuplicateOutput(output)));
                    }
                    outputs[output] = Some(qubit);
                }
                _ => {}
            }
        }

        let t_site_count = sites.len();
        if let Some(missing) = (0..t_site_count).find(|s| !sites.contains(s)) {
            return Err(CircuitErrorKind::SiteGap {
                missing,
                count: t_site_count,
            }
            .into());
        }
        let check_ids: Vec<u32> = checks.into_iter().collect();
        if check_ids != (0..NUM_CHECKS as u32).collect::<Vec<_>>() {
            return Err(CircuitErrorKind::CheckCount(check_ids).into());
        }
        if outputs.is_empty() {
            return Err(CircuitErrorKind::NoOutputs.into());
        }
        let count = outputs.len();
        let output_wires = outputs
            .iter()
            .enumerate()
            .map(|(n, w)| w.ok_or(CircuitErrorKind::OutputGap { missing: n, count }))
            .collect::<Result<Vec<_>, _>>()?;
        for &w in &output_wires {
            if measured[w] {
                return Err(CircuitErrorKind::MeasuredOutput(w).into());
            }
        }
        let mut byproduct_supports = vec![Vec::new(); count];
        for (i, n, q) in supports {
            if n >= count {
                return Err(at(i, CircuitErrorKind::UnknownOutput(n)));
            }
            byproduct_supports[n].push(q);
        }
        for (output, s) in byproduct_supports.iter().enumerate() {
            if s.len() != 3 {
                return Err(CircuitErrorKind::SupportSize {
                    output,
                    size: s.len(),
                }
                .into());
            }
        }

        Ok(Self {
            n_qubits,
            ops,
            t_site_count,
            check_ids,
            byproduct_supports,
            output_wires,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn t_site_count(&self) -> usize {
        self.t_site_count
    }

    pub fn check_ids(&self) -> &[u32] {
        &self.check_ids
    }

    pub fn byproduct_supports(&self) -> &[Vec<usize>] {
        &self.byproduct_supports
    }

    pub fn output_wires(&self) -> &[usize] {
        &self.output_wires
    }

    /// Number of outputs `k`.
    pub fn k(&self) -> usize {
        self.output_wires.len()
    }

    /// Copy with every op matching `pred` removed, not re-validated beyond
    /// the usual structural checks.
    pub fn without_ops(&self, pred: impl Fn(&Op) -> bool) -> Result<Self, CircuitError> {
        let ops = self.ops.iter().copied().filter(|op| !pred(op)).collect();
        Self::new(self.n_qubits, ops)
    }
}

/// Builds the `3k+8 -> k` circuit on the `[[k+4, k, 2]]` block code.
///
/// Qubit layout: block qubits `0..k+4` (numbered as in the stabilizers
/// `X_0 X_2 .. X_{k+2}` and `X_1 X_2 .. X_{k+1} X_{k+3}`), the check ancilla
/// `k+4`, and output wires `k+5..2k+5`.
///
/// 1. Block qubits `2..k+2` are prepared in `T|+> = |A>` (sites `0..k`) and
///    encoded with qubits 0 and 1 in `|+>` and `k+2`, `k+3` in `|0>`.
/// 2. Controlled `T^dag X T` from the ancilla on every block qubit: a T
///    layer (sites `k..2k+4`), CNOTs, then a `T^dag` layer
///    (sites `2k+4..3k+8`). The ancilla is check 0.
/// 3. Each logical qubit `n` is copied onto output `n` through its logical
///    Z support `{0, 1, n+2}`, then all block qubits are read out in the X
///    basis: checks 1 and 2 are the two X stabilizers, and the byproduct of
///    output `n` is the parity of `{n+2, k+2, k+3}`.
pub fn generate_block_circuit(k: i64) -> Result<Circuit, CircuitError> {
    if k < 2 || k % 2 != 0 {
        return Err(CircuitErrorKind::InvalidK(k).into());
    }
    let k = k as usize;
    let block = k + 4;
    let anc = block;
    let out = |n: usize| block + 1 + n;
    let n_qubits = 2 * k + 5;
    let mut ops = Vec::new();
    let mut site = 0..;
    let mut t = |qubit: usize| Op::T {
        qubit,
        site: site.next().unwrap(),
    };
    let cnot = |control, target| Op::Cnot { control, target };

    ops.push(Op::PrepPlus(anc));
    ops.extend([Op::PrepPlus(0), Op::PrepPlus(1)]);
    ops.extend((2..k + 2).map(Op::PrepPlus));
    ops.extend([Op::PrepZero(k + 2), Op::PrepZero(k + 3)]);

    ops.extend((2..k + 2).map(&mut t));
    for q in 2..k + 2 {
        ops.extend([cnot(q, k + 2), cnot(q, k + 3)]);
    }
    ops.extend((2..k + 3).map(|q| cnot(0, q)));
    ops.extend((2..k + 2).chain([k + 3]).map(|q| cnot(1, q)));

    ops.extend((0..block).map(&mut t));
    ops.extend((0..block).map(|q| cnot(anc, q)));
    ops.extend((0..block).map(&mut t));

    for n in 0..k {
        ops.push(Op::PrepZero(out(n)));
        ops.extend([cnot(0, out(n)), cnot(1, out(n)), cnot(n + 2, out(n))]);
        ops.push(Op::Output {
            output: n,
            qubit: out(n),
        });
    }

    let meas = |qubit, role| Op::MeasX { qubit, role };
    ops.push(meas(anc, MeasRole::Check(TRANSVERSAL_CHECK)));
    ops.push(meas(0, MeasRole::Check(1)));
    ops.push(meas(1, MeasRole::Check(2)));
    for n in 0..k {
        let q = n + 2;
        ops.extend([
            meas(q, MeasRole::Check(1)),
            meas(q, MeasRole::Check(2)),
            meas(q, MeasRole::OutSupport(n)),
        ]);
    }
    for (q, check) in [(k + 2, 1), (k + 3, 2)] {
        ops.push(meas(q, MeasRole::Check(check)));
        ops.extend((0..k).map(|n| meas(q, MeasRole::OutSupport(n))));
    }

    Circuit::new(n_qubits, ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_shape() {
        for k in (2..=12).step_by(2) {
            let c = generate_block_circuit(k).unwrap();
            let k = k as usize;
            assert_eq!(c.t_site_count(), 3 * k + 8);
            assert_eq!(c.k(), k);
            assert_eq!(c.n_qubits(), 2 * k + 5);
            assert_eq!(c.check_ids(), &[0, 1, 2]);
            for (n, s) in c.byproduct_supports().iter().enumerate() {
                assert_eq!(s, &vec![n + 2, k + 2, k + 3]);
            }
        }
        assert_eq!(generate_block_circuit(4).unwrap().t_site_count(), 20);
        assert_eq!(generate_block_circuit(2).unwrap().t_site_count(), 14);
    }

    #[test]
    fn invalid_k() {
        for k in [-2, 0, 1, 3, 7] {
            assert_eq!(
                generate_block_circuit(k).unwrap_err().kind,
                CircuitErrorKind::InvalidK(k)
            );
        }
    }

    #[test]
    fn structural_errors() {
        let base = generate_block_circuit(2).unwrap();
        let n = base.n_qubits();
        let mut ops = base.ops().to_vec();
        ops.push(Op::Cnot {
            control: 3,
            target: 3,
        });
        assert_eq!(
            Circuit::new(n, ops).unwrap_err().kind,
            CircuitErrorKind::DegenerateCnot(3)
        );

        let mut ops = base.ops().to_vec();
        ops.insert(0, Op::T { qubit: 0, site: 0 });
        assert_eq!(
            Circuit::new(n, ops).unwrap_err().kind,
            CircuitErrorKind::DuplicateSite(0)
        );

        let ops: Vec<Op> = base
            .ops()
            .iter()
            .copied()
            .filter(|op| !matches!(op, Op::T { site: 5, .. }))
            .collect();
        assert!(matches!(
            Circuit::new(n, ops).unwrap_err().kind,
            CircuitErrorKind::SiteGap { missing: 5, .. }
        ));

        let err = base
            .without_ops(|op| {
                matches!(
                    op,
                    Op::MeasX {
                        role: MeasRole::Check(2),
                        ..
                    }
                )
            })
            .unwrap_err();
        assert_eq!(err.kind, CircuitErrorKind::CheckCount(vec![0, 1]));

        let mut ops = base.ops().to_vec();
        ops.push(Op::Cnot {
            control: 0,
            target: 1,
        });
        assert_eq!(
            Circuit::new(n, ops).unwrap_err().kind,
            CircuitErrorKind::UseAfterMeasure(0)
        );

        assert!(matches!(
            Circuit::new(3, base.ops().to_vec()).unwrap_err().kind,
            CircuitErrorKind::QubitOutOfRange { .. }
        ));
    }
}
