//! Conditional rotation angles.
//!
//! For every word `w` of length `< n` the angle `θ_w ∈ [0, π/2]` splits the
//! mass of `w` between its children: `cos²θ_w = p_{0w} / p_w`. Branches with
//! `p_w = 0` get `θ_w = 0`; any value would do since nothing reaches them.
//!
//! Angles are kept in the `R(θ)` convention, `R(θ)|0⟩ = cos θ|0⟩ + sin θ|1⟩`.
//! The `R_y` half-angle form `φ_w = 2θ_w` is produced only by [`AngleTree::phi`].

use crate::distribution::{MassTree, Word};
use crate::error::{Error, Result};

/// Mass-tree refinement slack accepted before reporting a contract error.
const REFINEMENT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AngleTree {
    n: u32,
    theta: Vec<f64>,
}

impl AngleTree {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn theta(&self, w: &Word) -> f64 {
        assert!(w.len() < self.n, "no angle for word {w} in a depth-{} tree", self.n);
        self.theta[(1usize << w.len()) - 1 + w.index() as usize]
    }

    /// `θ_∅`.
    pub fn root(&self) -> f64 {
        self.theta[0]
    }

    /// Angles for words of length `m`, in increasing `k(w)`.
    pub fn level(&self, m: u32) -> &[f64] {
        assert!(m < self.n);
        let start = (1usize << m) - 1;
        &self.theta[start..start + (1usize << m)]
    }

    /// `φ_w = 2θ_w` for words of length `m`.
    pub fn phi(&self, m: u32) -> Vec<f64> {
        self.level(m).iter().map(|t| 2.0 * t).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Word, f64)> + '_ {
        (0..self.n).flat_map(move |m| {
            self.level(m).iter().enumerate().map(move |(k, &t)| (Word::new(k as u64, m).unwrap(), t))
        })
    }

    /// Builds a tree from explicit per-level angles. `levels[m]` must hold `2^m` values.
    pub fn from_levels(levels: &[Vec<f64>]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Contract("angle tree needs at least one level".into()));
        }
        let mut theta = Vec::with_capacity((1usize << levels.len()) - 1);
        for (m, level) in levels.iter().enumerate() {
            if level.len() != 1 << m {
                return Err(Error::Contract(format!("level {m} has {} angles, expected {}", level.len(), 1 << m)));
            }
            theta.extend_from_slice(level);
        }
        Ok(Self { n: levels.len() as u32, theta })
    }
}

pub fn compute_angles(tree: &MassTree) -> Result<AngleTree> {
    let n = tree.n();
    let mut theta = Vec::with_capacity((1usize << n) - 1);
    for m in 0..n {
        let parents = tree.level(m);
        let children = tree.level(m + 1);
        for (k, &p) in parents.iter().enumerate() {
            let (p0, p1) = (children[2 * k], children[2 * k + 1]);
            if p < 0.0 || p0 < 0.0 || p1 < 0.0 || !p.is_finite() {
                return Err(Error::Contract(format!("negative or non-finite mass below word index {k} at level {m}")));
            }
            if (p - (p0 + p1)).abs() > REFINEMENT_SLACK {
                return Err(Error::Contract(format!("mass tree does not refine at level {m}, index {k}")));
            }
            theta.push(if p == 0.0 { 0.0 } else { (p0 / p).clamp(0.0, 1.0).sqrt().acos() });
        }
    }
    Ok(AngleTree { n, theta })
}

/// `T_z(x) = cos x` for `z = 0`, `sin x` for `z = 1`.
pub fn t_factor(z: u8, x: f64) -> f64 {
    match z {
        0 => x.cos(),
        1 => x.sin(),
        _ => panic!("t_factor: bit must be 0 or 1, got {z}"),
    }
}

/// `Π_r T²_{z_r}(θ_{z_{r+1}⋯z_n})` for `b_n(k) = z_1⋯z_n`.
pub fn reconstruct_leaf_mass(angles: &AngleTree, k: u64) -> Result<f64> {
    let n = angles.n();
    let leaf = Word::new(k, n)?;
    Ok((1..=n)
        .map(|r| {
            let t = t_factor(leaf.bit(r), angles.theta(&leaf.drop_front(r)));
            t * t
        })
        .product())
}
