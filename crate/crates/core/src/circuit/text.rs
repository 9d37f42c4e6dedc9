//! Line-oriented circuit format and QASM export.
//!
//! ```text
//! qubits 3
//! RY 3 1.5707963267948966e0
//! PRY 2 1.0471975511965976e0 3:0
//! CX 3 2
//! X 1
//! ```
//!
//! `RY` angles use the half-angle convention `R_y(a) = exp(-i a Y/2)`; `PRY`
//! angles use `R(a) = R_y(2a)`. Lines starting with `#` are comments.

use std::fmt::Write as _;

use super::{Circuit, Control, Gate};
use crate::error::{Error, Result};

const CONVENTION_NOTE: &str = "# RY t a: R_y(a) = exp(-i a Y/2) on qubit t\n\
# PRY t a q:b ...: R(a) = R_y(2a) on qubit t where every qubit q is in |b>\n\
# qubits are 1-based; qubit r has weight 2^(r-1) in the basis index\n";

pub fn write_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(CONVENTION_NOTE);
    writeln!(out, "qubits {}", c.n()).unwrap();
    for g in c.gates() {
        writeln!(out, "{g}").unwrap();
    }
    out
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let qubit = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad qubit '{s}'")));
        let angle = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad angle '{s}'")));

        if fields[0] == "qubits" {
            if circuit.is_some() || fields.len() != 2 {
                return Err(err("expected a single 'qubits n' header".into()));
            }
            circuit = Some(Circuit::new(qubit(fields[1])?));
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| err("gate before 'qubits' header".into()))?;
        let gate = match (fields[0], fields.len()) {
            ("RY", 3) => Gate::RotY { target: qubit(fields[1])?, angle: angle(fields[2])? },
            ("X", 2) => Gate::PauliX { target: qubit(fields[1])? },
            ("CX", 3) => Gate::CNot { control: qubit(fields[1])?, target: qubit(fields[2])? },
            ("PRY", len) if len >= 4 => {
                let controls = fields[3..]
                    .iter()
                    .map(|spec| {
                        let (q, b) = spec.split_once(':').ok_or_else(|| err(format!("bad control '{spec}'")))?;
                        let bit = match b {
                            "0" => 0,
                            "1" => 1,
                            _ => return Err(err(format!("bad control bit '{b}'"))),
                        };
                        Ok(Control { qubit: qubit(q)?, bit })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Gate::PatternRot { target: qubit(fields[1])?, controls, angle: angle(fields[2])? }
            }
            _ => return Err(err(format!("unrecognised gate line '{line}'"))),
        };
        c.push(gate).map_err(|e| err(e.to_string()))?;
    }
    circuit.ok_or(Error::Parse { line: 0, msg: "missing 'qubits n' header".into() })
}

/// OpenQASM 2 text for a circuit over `{RY, X, CX}`.
///
/// Qubit `r` is exported as `q[r-1]`. Pattern rotations are refused; they
/// must be transpiled first.
pub fn to_qasm(c: &Circuit) -> Result<String> {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    out.push_str("// qubit r (1-based, weight 2^(r-1) in the basis index) is exported as q[r-1]\n");
    writeln!(out, "qreg q[{}];", c.n()).unwrap();
    for g in c.gates() {
        match g {
            Gate::RotY { target, angle } => writeln!(out, "ry({angle:.16e}) q[{}];", target - 1),
            Gate::PauliX { target } => writeln!(out, "x q[{}];", target - 1),
            Gate::CNot { control, target } => writeln!(out, "cx q[{}],q[{}];", control - 1, target - 1),
            Gate::PatternRot { .. } => {
                return Err(Error::Export(
                    "pattern-controlled rotations have no native QASM form; run `transpile` first".into(),
                ))
            }
        }
        .unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::compute_angles;
    use crate::circuit::build_full;
    use crate::distribution::{build_mass_tree, DistributionSpec};

    #[test]
    fn round_trip_pattern_circuit() {
        let spec = DistributionSpec::pmf(vec![0.1, 0.2, 0.0, 0.05, 0.15, 0.3, 0.12, 0.08]).unwrap();
        let angles = compute_angles(&build_mass_tree(&spec).unwrap()).unwrap();
        let c = build_full(&angles).unwrap();
        let text = write_circuit(&c);
        let back = parse_circuit(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.gate_counts(), c.gate_counts());
    }

    #[test]
    fn parse_all_gate_kinds() {
        let c = parse_circuit("qubits 3\nRY 1 0.5\nX 2\nCX 3 1\nPRY 1 0.25 2:0 3:1\n").unwrap();
        assert_eq!(c.n(), 3);
        assert_eq!(c.len(), 4);
        assert_eq!(write_circuit(&c).lines().filter(|l| !l.starts_with('#')).count(), 5);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_circuit("RY 1 0.5\n").is_err());
        assert!(parse_circuit("qubits 2\nRY 3 0.5\n").is_err());
        assert!(parse_circuit("qubits 2\nRZ 1 0.5\n").is_err());
        assert!(parse_circuit("qubits 2\nPRY 1 0.5 2:2\n").is_err());
        assert!(parse_circuit("qubits 2\nqubits 2\n").is_err());
        assert!(parse_circuit("").is_err());
        match parse_circuit("qubits 2\n\nCX 1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn qasm_export() {
        let c = parse_circuit("qubits 2\nRY 2 0.5\nCX 2 1\nX 1\n").unwrap();
        let q = to_qasm(&c).unwrap();
        assert!(q.contains("qreg q[2];"));
        assert!(q.contains("ry(5.0000000000000000e-1) q[1];"));
        assert!(q.contains("cx q[1],q[0];"));
        assert!(q.contains("x q[0];"));
        let pattern = parse_circuit("qubits 2\nPRY 1 0.25 2:1\n").unwrap();
        let err = to_qasm(&pattern).unwrap_err();
        assert!(err.to_string().contains("transpile"));
    }
}
