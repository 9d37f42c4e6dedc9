//! Gate-level circuit IR and the Grover–Rudolph stage builders.
//!
//! Qubits are numbered `1..=n`; qubit `r` carries weight `2^(r-1)` in the
//! basis index. Gates are listed in the order they are applied.

mod text;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angles::AngleTree;
use crate::distribution::Word;
use crate::error::{Error, Result};

pub use text::{parse_circuit, to_qasm, write_circuit};

/// A control requiring `qubit` to be in `|bit⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub bit: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// `R_y(angle) = exp(-i angle Y / 2)`.
    RotY {
        target: usize,
        angle: f64,
    },
    PauliX {
        target: usize,
    },
    CNot {
        control: usize,
        target: usize,
    },
    /// `R(angle) = R_y(2 angle)` on `target`, applied only where every control matches.
    PatternRot {
        target: usize,
        controls: Vec<Control>,
        angle: f64,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::RotY { target, .. } | Gate::PauliX { target } => vec![*target],
            Gate::CNot { control, target } => vec![*control, *target],
            Gate::PatternRot { target, controls, .. } => {
                std::iter::once(*target).chain(controls.iter().map(|c| c.qubit)).collect()
            }
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qubits = self.qubits();
        if let Some(q) = qubits.iter().find(|&&q| q == 0 || q > n) {
            return Err(Error::Contract(format!("qubit {q} outside 1..={n}")));
        }
        let mut sorted = qubits.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qubits.len() {
            return Err(Error::Contract(format!("gate {self} repeats a qubit")));
        }
        match self {
            Gate::PatternRot { controls, angle, .. } => {
                if controls.is_empty() {
                    return Err(Error::Contract("pattern rotation needs at least one control".into()));
                }
                if controls.windows(2).any(|c| c[0].qubit >= c[1].qubit) {
                    return Err(Error::Contract("pattern controls must be sorted by qubit".into()));
                }
                if controls.iter().any(|c| c.bit > 1) {
                    return Err(Error::Contract("control bits must be 0 or 1".into()));
                }
                check_angle(*angle)
            }
            Gate::RotY { angle, .. } => check_angle(*angle),
            _ => Ok(()),
        }
    }
}

fn check_angle(angle: f64) -> Result<()> {
    if angle.is_finite() {
        Ok(())
    } else {
        Err(Error::Contract(format!("non-finite angle {angle}")))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::RotY { target, angle } => write!(f, "RY {target} {angle:.16e}"),
            Gate::PauliX { target } => write!(f, "X {target}"),
            Gate::CNot { control, target } => write!(f, "CX {control} {target}"),
            Gate::PatternRot { target, controls, angle } => {
                write!(f, "PRY {target} {angle:.16e}")?;
                for c in controls {
                    write!(f, " {}:{}", c.qubit, c.bit)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub rot_y: usize,
    pub pauli_x: usize,
    pub cnot: usize,
    pub pattern_rot: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.rot_y + self.pauli_x + self.cnot + self.pattern_rot
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::Contract(format!(
                "cannot append a {}-qubit circuit to a {}-qubit one",
                other.n, self.n
            )));
        }
        self.gates.extend(other.gates);
        Ok(())
    }

    /// Re-embeds the circuit into `n` qubits, moving qubit `r` to `r + offset`.
    pub fn embed(&self, n: usize, offset: usize) -> Result<Circuit> {
        let mv = |q: usize| q + offset;
        let mut out = Circuit::new(n);
        for gate in &self.gates {
            out.push(match gate {
                Gate::RotY { target, angle } => Gate::RotY { target: mv(*target), angle: *angle },
                Gate::PauliX { target } => Gate::PauliX { target: mv(*target) },
                Gate::CNot { control, target } => Gate::CNot { control: mv(*control), target: mv(*target) },
                Gate::PatternRot { target, controls, angle } => Gate::PatternRot {
                    target: mv(*target),
                    controls: controls.iter().map(|c| Control { qubit: mv(c.qubit), bit: c.bit }).collect(),
                    angle: *angle,
                },
            })?;
        }
        Ok(out)
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for gate in &self.gates {
            match gate {
                Gate::RotY { .. } => counts.rot_y += 1,
                Gate::PauliX { .. } => counts.pauli_x += 1,
                Gate::CNot { .. } => counts.cnot += 1,
                Gate::PatternRot { .. } => counts.pattern_rot += 1,
            }
        }
        counts
    }
}

/// The trailing `j` qubits `(q_1, ..., q_j) = (n-j+1, ..., n)` acted on by stage `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActiveRegister {
    pub n: usize,
    pub j: usize,
}

impl ActiveRegister {
    pub fn new(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::Range { what: "stage", value: j as u64, lo: 1, hi: n as u64 });
        }
        Ok(Self { n, j })
    }

    /// Absolute index of `q_r`.
    pub fn qubit(&self, r: usize) -> usize {
        assert!(r >= 1 && r <= self.j, "q_{r} outside a {}-qubit register", self.j);
        self.n - self.j + r
    }

    /// Controls `q_{1+r} = w_r` for a control word on `(q_2, ..., q_j)`.
    pub fn pattern(&self, w: &Word) -> Vec<Control> {
        assert_eq!(w.len() as usize, self.j - 1);
        (1..=w.len()).map(|r| Control { qubit: self.qubit(1 + r as usize), bit: w.bit(r) }).collect()
    }
}

/// Stage `j` of the direct construction.
///
/// Stage 1 is a single `R_y(2θ_∅)` on qubit `n`. Stage `j ≥ 2` holds one
/// pattern rotation `R(θ_w)` on `q_1` per control word `w ∈ Z_2^(j-1)`, in
/// increasing `k(w)`.
pub fn build_stage(j: usize, angles: &AngleTree) -> Result<Circuit> {
    let n = angles.n() as usize;
    let reg = ActiveRegister::new(n, j)?;
    let mut c = Circuit::new(n);
    if j == 1 {
        c.push(Gate::RotY { target: n, angle: 2.0 * angles.root() })?;
        return Ok(c);
    }
    let m = (j - 1) as u32;
    for (k, &theta) in angles.level(m).iter().enumerate() {
        let w = Word::new(k as u64, m)?;
        c.push(Gate::PatternRot { target: reg.qubit(1), controls: reg.pattern(&w), angle: theta })?;
    }
    Ok(c)
}

/// Stages `1..=n` in application order; `2^n - 1` gates.
pub fn build_full(angles: &AngleTree) -> Result<Circuit> {
    let n = angles.n() as usize;
    let mut c = Circuit::new(n);
    for j in 1..=n {
        c.extend(build_stage(j, angles)?)?;
    }
    Ok(c)
}

/// An `X` on `target` applied only where every control matches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternX {
    pub target: usize,
    pub controls: Vec<Control>,
}

/// Writes `CNOT(q_{r+1} → q_1)` as the `2^(j-2)` fully pattern-controlled `X`
/// gates whose control word on `(q_2, ..., q_j)` has bit `r` set.
pub fn expand_cnot_to_patterns(gate: &Gate, reg: ActiveRegister) -> Result<Vec<PatternX>> {
    let Gate::CNot { control, target } = *gate else {
        return Err(Error::Contract(format!("expected a CNOT, got {gate}")));
    };
    if reg.j < 2 {
        return Err(Error::Contract(format!("active register of size {} has no control qubits", reg.j)));
    }
    if target != reg.qubit(1) {
        return Err(Error::Contract(format!("CNOT target {target} is not q_1 = {}", reg.qubit(1))));
    }
    let first = reg.qubit(2);
    if control < first || control > reg.qubit(reg.j) {
        return Err(Error::Contract(format!("CNOT control {control} is outside the active register")));
    }
    // control = q_{r+1}
    let r = (control - reg.qubit(1)) as u32;
    let free = (reg.j - 2) as u32;
    (0..(1u64 << free))
        .map(|u| {
            let low = u & ((1 << (r - 1)) - 1);
            let high = (u >> (r - 1)) << r;
            let w = Word::new(low | (1 << (r - 1)) | high, free + 1)?;
            Ok(PatternX { target, controls: reg.pattern(&w) })
        })
        .collect()
}
