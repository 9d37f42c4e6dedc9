//! Dense statevector simulation.
//!
//! Basis state `|z_1 ⋯ z_n⟩` lives at index `k = Σ z_r 2^(r-1)`, so qubit `r`
//! is bit `r - 1` of the index. Every gate is applied in place over amplitude
//! pairs in `O(2^n)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Control, Gate, PatternX};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_QUBITS: usize = 24;
/// Largest register [`unitary`] will materialise.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Largest control count accepted by [`ucry_dense`].
pub const MAX_DENSE_CONTROLS: usize = 10;

/// Identifier of the sampling generator, echoed into histogram output.
pub const GENERATOR_ID: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0⟩^⊗n`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::Contract(format!("{} amplitudes is not a power of two", amps.len())));
        }
        Ok(Self { n: amps.len().trailing_zeros() as usize, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨k|ψ⟩|²` for every `k`.
    pub fn born_probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Largest `|a_k - b_k|` between two states of the same size.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        assert_eq!(self.n, other.n);
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn apply(&mut self, gate: &Gate) {
        match gate {
            Gate::RotY { target, angle } => {
                let (s, c) = (0.5 * angle).sin_cos();
                self.rotate(*target, 0, 0, c, s);
            }
            Gate::PauliX { target } => self.flip(*target, 0, 0),
            Gate::CNot { control, target } => {
                let bit = 1 << (control - 1);
                self.flip(*target, bit, bit);
            }
            Gate::PatternRot { target, controls, angle } => {
                let (mask, value) = control_mask(controls);
                let (s, c) = angle.sin_cos();
                self.rotate(*target, mask, value, c, s);
            }
        }
    }

    pub fn apply_pattern_x(&mut self, gate: &PatternX) {
        let (mask, value) = control_mask(&gate.controls);
        self.flip(gate.target, mask, value);
    }

    /// Applies `R_y(phi[w])` to `target`, where `w` is read from `controls`
    /// with `controls[0]` as the least-significant bit.
    pub fn apply_ucry(&mut self, target: usize, controls: &[usize], phi: &[f64]) {
        assert_eq!(phi.len(), 1 << controls.len());
        let tbit = 1usize << (target - 1);
        let trig: Vec<(f64, f64)> = phi.iter().map(|p| (0.5 * p).sin_cos()).collect();
        for i0 in 0..self.amps.len() {
            if i0 & tbit != 0 {
                continue;
            }
            let w = controls.iter().enumerate().fold(0usize, |acc, (r, &q)| acc | (((i0 >> (q - 1)) & 1) << r));
            let (s, c) = trig[w];
            let i1 = i0 | tbit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = a0 * c - a1 * s;
            self.amps[i1] = a0 * s + a1 * c;
        }
    }

    /// `[[c, -s], [s, c]]` on `target` wherever `index & mask == value`.
    fn rotate(&mut self, target: usize, mask: usize, value: usize, c: f64, s: f64) {
        let tbit = 1usize << (target - 1);
        for i0 in 0..self.amps.len() {
            if i0 & tbit != 0 || i0 & mask != value {
                continue;
            }
            let i1 = i0 | tbit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = a0 * c - a1 * s;
            self.amps[i1] = a0 * s + a1 * c;
        }
    }

    fn flip(&mut self, target: usize, mask: usize, value: usize) {
        let tbit = 1usize << (target - 1);
        for i0 in 0..self.amps.len() {
            if i0 & tbit == 0 && i0 & mask == value {
                self.amps.swap(i0, i0 | tbit);
            }
        }
    }
}

fn control_mask(controls: &[Control]) -> (usize, usize) {
    controls.iter().fold((0, 0), |(mask, value), c| {
        let bit = 1usize << (c.qubit - 1);
        (mask | bit, value | if c.bit == 1 { bit } else { 0 })
    })
}

pub fn run(c: &Circuit) -> Result<StateVector> {
    run_with_cap(c, DEFAULT_MAX_QUBITS)
}

pub fn run_with_cap(c: &Circuit, max_qubits: usize) -> Result<StateVector> {
    if c.n() > max_qubits {
        return Err(Error::Resource { what: "simulation", size: c.n(), cap: max_qubits });
    }
    let mut state = StateVector::zero(c.n());
    run_from(&mut state, c);
    Ok(state)
}

pub fn run_from(state: &mut StateVector, c: &Circuit) {
    assert_eq!(state.n(), c.n(), "state and circuit sizes differ");
    for g in c.gates() {
        state.apply(g);
    }
}

/// Dense matrix of a circuit, column `k` being the image of `|k⟩`.
pub fn unitary(c: &Circuit) -> Result<DMatrix<Complex64>> {
    if c.n() > MAX_DENSE_QUBITS {
        return Err(Error::Resource { what: "dense unitary", size: c.n(), cap: MAX_DENSE_QUBITS });
    }
    let dim = 1usize << c.n();
    let mut u = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut s = StateVector::basis(c.n(), k);
        run_from(&mut s, c);
        u.set_column(k, &nalgebra::DVector::from_column_slice(s.amplitudes()));
    }
    Ok(u)
}

/// The multiplexor `UCRY(φ)` on an `(m+1)`-qubit register.
///
/// Local qubit 1 is the target and local qubit `1 + r` holds control bit `r`,
/// so index `t + 2 k(w)` belongs to control branch `w` and the matrix is
/// block diagonal with blocks `R_y(φ_w)`.
pub fn ucry_dense(phi: &[f64], m: usize) -> Result<DMatrix<Complex64>> {
    if m > MAX_DENSE_CONTROLS {
        return Err(Error::Resource { what: "dense multiplexor", size: m + 1, cap: MAX_DENSE_CONTROLS + 1 });
    }
    if phi.len() != 1 << m {
        return Err(Error::Contract(format!("{} angles for {m} controls", phi.len())));
    }
    let dim = 2usize << m;
    let mut u = DMatrix::zeros(dim, dim);
    for (w, p) in phi.iter().enumerate() {
        let (s, c) = (0.5 * p).sin_cos();
        let b = 2 * w;
        u[(b, b)] = Complex64::new(c, 0.0);
        u[(b, b + 1)] = Complex64::new(-s, 0.0);
        u[(b + 1, b)] = Complex64::new(s, 0.0);
        u[(b + 1, b + 1)] = Complex64::new(c, 0.0);
    }
    Ok(u)
}

pub fn max_entry_deviation(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub shots: u64,
    pub seed: u64,
    /// `counts[k]` occurrences of outcome `k`.
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.counts.iter().map(move |&c| c as f64 / self.shots as f64)
    }
}

/// Draws `shots` computational-basis outcomes by inverse-CDF sampling.
pub fn sample(state: &StateVector, shots: u64, seed: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::Contract("shots must be at least 1".into()));
    }
    let probs = state.born_probabilities();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let last_live =
        probs.iter().rposition(|&p| p > 0.0).ok_or_else(|| Error::Contract("state has zero norm".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let k = cumulative.partition_point(|&c| c <= u).min(last_live);
        counts[k] += 1;
    }
    Ok(Histogram { shots, seed, counts })
}
