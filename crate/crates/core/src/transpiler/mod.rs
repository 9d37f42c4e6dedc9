//! Ancilla-free compilation of each stage into `{R_y, CNOT}`.
//!
//! Stage `j ≥ 2` is the multiplexor `UCRY(φ)` with `φ_w = 2θ_w` on the
//! active register, target `q_1` and controls `q_2..q_j`. It is emitted as a
//! Gray-code ladder: `R_y(α_{g_0})`, then for each Gray step a CNOT from the
//! flipped control followed by `R_y(α_{g_k})`, where `α` is the normalised
//! Walsh–Hadamard transform of `φ`. A closing CNOT returns the walk from
//! `g_{2^m-1}` to `g_0`; without it the branches with that control bit set
//! carry a residual `X` on the target.

mod gray;
mod walsh;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::angles::AngleTree;
use crate::circuit::{ActiveRegister, Circuit, Gate, GateCounts};
use crate::error::{Error, Result};
use crate::simulator::{self, StateVector};

pub use gray::{gray_plan, GrayPlan, MAX_GRAY_BITS};
pub use walsh::{fwht_in_place, inverse_walsh_hadamard, walsh_hadamard};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_DENSE_VERIFY_MAX_M: usize = 6;
pub const DEFAULT_SAMPLED_VERIFY_MAX_M: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderVariant {
    /// `2^m` CNOTs, ending with the CNOT that closes the Gray cycle.
    Closed,
    /// `2^m - 1` CNOTs, no closing CNOT.
    Open,
}

#[derive(Clone, Copy, Debug)]
pub struct TranspileOptions {
    pub tol: f64,
    /// Stages with at most this many controls are checked against the dense multiplexor.
    pub dense_verify_max_m: usize,
    /// Larger stages up to this size are checked on a random state instead.
    pub sampled_verify_max_m: usize,
}

impl Default for TranspileOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            dense_verify_max_m: DEFAULT_DENSE_VERIFY_MAX_M,
            sampled_verify_max_m: DEFAULT_SAMPLED_VERIFY_MAX_M,
        }
    }
}

/// Multiplexor angles `φ` and ladder angles `α` for one stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageAngles {
    pub phi: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl StageAngles {
    pub fn from_phi(phi: Vec<f64>) -> Result<Self> {
        let alpha = walsh_hadamard(&phi)?;
        Ok(Self { phi, alpha })
    }

    /// `φ_w = 2θ_w` over words of length `j - 1`.
    pub fn for_stage(j: usize, angles: &AngleTree) -> Result<Self> {
        if j < 2 || j > angles.n() as usize {
            return Err(Error::Range { what: "ladder stage", value: j as u64, lo: 2, hi: angles.n() as u64 });
        }
        Self::from_phi(angles.phi(j as u32 - 1))
    }
}

/// Ladder for `UCRY(φ)` on a standalone `(m+1)`-qubit register, target qubit 1.
pub fn ladder(phi: &[f64], variant: LadderVariant) -> Result<Circuit> {
    let m = checked_controls(phi.len())?;
    let plan = gray_plan(m as u32)?;
    let alpha = walsh_hadamard(phi)?;
    let mut c = Circuit::new(m + 1);
    c.push(Gate::RotY { target: 1, angle: alpha[plan.gamma[0] as usize] })?;
    for (k, flip) in plan.flips.iter().enumerate() {
        c.push(Gate::CNot { control: 1 + *flip as usize, target: 1 })?;
        c.push(Gate::RotY { target: 1, angle: alpha[plan.gamma[k + 1] as usize] })?;
    }
    if variant == LadderVariant::Closed {
        c.push(Gate::CNot { control: 1 + plan.closing_flip as usize, target: 1 })?;
    }
    Ok(c)
}

fn checked_controls(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Contract(format!("{len} angles do not form a multiplexor with at least one control")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Distance between a ladder and the multiplexor it should implement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StageDeviation {
    /// Largest entrywise deviation from `ucry_dense(φ)`.
    pub matrix: f64,
    /// Largest departure of any control branch from a pure `R_y` block,
    /// including leakage into other branches.
    pub branch_impurity: f64,
}

/// Compares the dense matrix of `ladder` against `ucry_dense(phi)`.
pub fn verify_stage(ladder: &Circuit, phi: &[f64], m: usize) -> Result<StageDeviation> {
    if ladder.n() != m + 1 {
        return Err(Error::Contract(format!("ladder has {} qubits, expected {}", ladder.n(), m + 1)));
    }
    let reference = simulator::ucry_dense(phi, m)?;
    let actual = simulator::unitary(ladder)?;
    let matrix = simulator::max_entry_deviation(&actual, &reference);

    let dim = 2usize << m;
    let mut impurity = 0.0f64;
    for u in 0..(1usize << m) {
        let b = 2 * u;
        let (a00, a01, a10, a11) = (actual[(b, b)], actual[(b, b + 1)], actual[(b + 1, b)], actual[(b + 1, b + 1)]);
        impurity = impurity.max((a00 - a11).norm()).max((a01 + a10).norm()).max(a00.im.abs()).max(a10.im.abs());
        for col in (0..dim).filter(|&c| c / 2 != u) {
            impurity = impurity.max(actual[(b, col)].norm()).max(actual[(b + 1, col)].norm());
        }
    }
    Ok(StageDeviation { matrix, branch_impurity: impurity })
}

/// Statevector check of a ladder against the direct multiplexor on a seeded random input.
fn sampled_deviation(ladder: &Circuit, phi: &[f64], seed: u64) -> f64 {
    let n = ladder.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<num_complex::Complex64> = (0..1usize << n)
        .map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let input = StateVector::from_amplitudes(raw.into_iter().map(|a| a / norm).collect()).unwrap();

    let mut via_ladder = input.clone();
    simulator::run_from(&mut via_ladder, ladder);
    let mut direct = input;
    let controls: Vec<usize> = (2..=n).collect();
    direct.apply_ucry(1, &controls, phi);
    via_ladder.max_deviation(&direct)
}

/// Stage `j` of the transpiled circuit on the full `n`-qubit register.
pub fn transpile_stage(j: usize, angles: &AngleTree) -> Result<Circuit> {
    transpile_stage_with(j, angles, &TranspileOptions::default())
}

pub fn transpile_stage_with(j: usize, angles: &AngleTree, opts: &TranspileOptions) -> Result<Circuit> {
    let n = angles.n() as usize;
    let reg = ActiveRegister::new(n, j)?;
    if j == 1 {
        let mut c = Circuit::new(n);
        c.push(Gate::RotY { target: n, angle: 2.0 * angles.root() })?;
        return Ok(c);
    }
    let m = j - 1;
    let stage = StageAngles::for_stage(j, angles)?;
    let local = ladder(&stage.phi, LadderVariant::Closed)?;
    let deviation = if m <= opts.dense_verify_max_m {
        Some(verify_stage(&local, &stage.phi, m)?.matrix)
    } else if m <= opts.sampled_verify_max_m {
        Some(sampled_deviation(&local, &stage.phi, j as u64))
    } else {
        None
    };
    if let Some(d) = deviation {
        if d.is_nan() || d > opts.tol {
            return Err(Error::Compilation { stage: j, deviation: d, tol: opts.tol });
        }
    }
    local.embed(n, reg.qubit(1) - 1)
}

pub fn transpile_full(angles: &AngleTree) -> Result<Circuit> {
    transpile_full_with(angles, &TranspileOptions::default())
}

pub fn transpile_full_with(angles: &AngleTree, opts: &TranspileOptions) -> Result<Circuit> {
    let n = angles.n() as usize;
    let mut c = Circuit::new(n);
    for j in 1..=n {
        c.extend(transpile_stage_with(j, angles, opts)?)?;
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariantReport {
    pub variant: LadderVariant,
    pub ry: usize,
    pub cx: usize,
    /// `None` when the stage is too large for a dense check.
    pub deviation: Option<StageDeviation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageReport {
    pub stage: usize,
    pub controls: usize,
    pub closed: VariantReport,
    pub open: VariantReport,
}

/// Per-stage comparison of the closed ladder (emitted) and the open ladder
/// without a closing CNOT.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub tol: f64,
    pub dense_verify_max_m: usize,
    pub stages: Vec<StageReport>,
    pub totals: GateCounts,
}

pub fn discrepancy_report(angles: &AngleTree, opts: &TranspileOptions) -> Result<DiscrepancyReport> {
    let n = angles.n() as usize;
    let mut stages = Vec::new();
    for j in 2..=n {
        let m = j - 1;
        let stage = StageAngles::for_stage(j, angles)?;
        let variant = |variant| -> Result<VariantReport> {
            let c = ladder(&stage.phi, variant)?;
            let counts = c.gate_counts();
            let deviation = if m <= opts.dense_verify_max_m { Some(verify_stage(&c, &stage.phi, m)?) } else { None };
            Ok(VariantReport { variant, ry: counts.rot_y, cx: counts.cnot, deviation })
        };
        stages.push(StageReport {
            stage: j,
            controls: m,
            closed: variant(LadderVariant::Closed)?,
            open: variant(LadderVariant::Open)?,
        });
    }
    let totals = GateCounts {
        rot_y: 1 + stages.iter().map(|s| s.closed.ry).sum::<usize>(),
        cnot: stages.iter().map(|s| s.closed.cx).sum(),
        ..Default::default()
    };
    Ok(DiscrepancyReport { tol: opts.tol, dense_verify_max_m: opts.dense_verify_max_m, stages, totals })
}
