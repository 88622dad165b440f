//! Line-oriented circuit format.
//!
//! ```text
//! QUBITS <n>
//! PREP+ <q> | PREP0 <q> | PREPA <q>
//! CNOT <control> <target>
//! T <q> <site_id>
//! MEASX <q> CHECK <check_id>
//! MEASX <q> OUT-SUPPORT <output_id>
//! OUTPUT <output_id> <q>
//! ```
//!
//! `#` starts a comment. Fields are whitespace separated decimal integers.

use std::fmt::Write;

use super::circuit::{Circuit, CircuitError, CircuitErrorKind, MeasRole, Op};

fn syntax(line: usize, msg: impl Into<String>) -> CircuitError {
    CircuitError {
        line: Some(line),
        kind: CircuitErrorKind::Syntax(msg.into()),
    }
}

fn int(line: usize, field: Option<&str>, what: &str) -> Result<usize, CircuitError> {
    let field = field.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    field
        .parse()
        .map_err(|_| syntax(line, format!("{what} {field:?} is not a decimal integer")))
}

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut n_qubits = None;
    let mut ops = Vec::new();
    let mut lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut fields = content.split_whitespace();
        let Some(opcode) = fields.next() else {
            continue;
        };
        if opcode == "QUBITS" {
            if n_qubits.is_some() {
                return Err(syntax(line, "duplicate QUBITS header"));
            }
            n_qubits = Some(int(line, fields.next(), "qubit count")?);
        } else {
            if n_qubits.is_none() {
                return Err(CircuitError {
                    line: Some(line),
                    kind: CircuitErrorKind::MissingHeader,
                });
            }
            let op = match opcode {
                "PREP+" => Op::PrepPlus(int(line, fields.next(), "qubit")?),
                "PREP0" => Op::PrepZero(int(line, fields.next(), "qubit")?),
                "PREPA" => Op::PrepA(int(line, fields.next(), "qubit")?),
                "CNOT" => Op::Cnot {
                    control: int(line, fields.next(), "control")?,
                    target: int(line, fields.next(), "target")?,
                },
                "T" => Op::T {
                    qubit: int(line, fields.next(), "qubit")?,
                    site: int(line, fields.next(), "site id")?,
                },
                "MEASX" => {
                    let qubit = int(line, fields.next(), "qubit")?;
                    let role = match fields.next() {
                        Some("CHECK") => {
                            let id = int(line, fields.next(), "check id")?;
                            MeasRole::Check(
                                u32::try_from(id)
                                    .map_err(|_| syntax(line, "check id too large"))?,
                            )
                        }
                        Some("OUT-SUPPORT") => {
                            MeasRole::OutSupport(int(line, fields.next(), "output id")?)
                        }
                        Some(other) => {
                            return Err(syntax(
                                line,
                                format!("expected CHECK or OUT-SUPPORT, got {other:?}"),
                            ))
                        }
                        None => return Err(syntax(line, "missing measurement role")),
                    };
                    Op::MeasX { qubit, role }
                }
                "OUTPUT" => Op::Output {
                    output: int(line, fields.next(), "output id")?,
                    qubit: int(line, fields.next(), "qubit")?,
                },
                other => {
                    return Err(CircuitError {
                        line: Some(line),
                        kind: CircuitErrorKind::UnknownOpcode(other.to_owned()),
                    })
                }
            };
            ops.push(op);
            lines.push(line);
        }
        if let Some(extra) = fields.next() {
            return Err(syntax(line, format!("unexpected trailing field {extra:?}")));
        }
    }

    let n_qubits = n_qubits.ok_or(CircuitError {
        line: None,
        kind: CircuitErrorKind::MissingHeader,
    })?;
    Circuit::with_lines(n_qubits, ops, Some(&lines))
}

pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "QUBITS {}", c.n_qubits()).unwrap();
    for op in c.ops() {
        match *op {
            Op::PrepPlus(q) => writeln!(out, "PREP+ {q}"),
            Op::PrepZero(q) => writeln!(out, "PREP0 {q}"),
            Op::PrepA(q) => writeln!(out, "PREPA {q}"),
            Op::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
            Op::T { qubit, site } => writeln!(out, "T {qubit} {site}"),
            Op::MeasX {
                qubit,
                role: MeasRole::Check(id),
            } => writeln!(out, "MEASX {qubit} CHECK {id}"),
            Op::MeasX {
                qubit,
                role: MeasRole::OutSupport(n),
            } => {
                writeln!(out, "MEASX {qubit} OUT-SUPPORT {n}")
            }
            Op::Output { output, qubit } => writeln!(out, "OUTPUT {output} {qubit}"),
        }
        .unwrap();
    }
    out
}
