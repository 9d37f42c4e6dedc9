//! Grover–Rudolph state preparation.
//!
//! Given a distribution `{p_k}` on `2^n` outcomes, this crate builds the
//! circuit that prepares `Σ_k √p_k |k⟩` from `|0⟩^⊗n`:
//!
//! - [`distribution`] computes the dyadic mass tree `p_w` from a pmf or a density on `[0, 1]`,
//! - [`angles`] turns masses into conditional rotation angles `θ_w`,
//! - [`circuit`] lays the angles out as `2^n - 1` pattern-controlled rotations,
//! - [`transpiler`] rewrites each stage as a Gray-code ladder over `{R_y, CNOT}`,
//! - [`simulator`] runs either circuit and samples measurement outcomes.
//!
//! ```
//! use grover_rudolph::{angles, circuit, distribution, simulator};
//!
//! let masses = distribution::build_mass_tree(&distribution::DistributionSpec::triangular(3)).unwrap();
//! let theta = angles::compute_angles(&masses).unwrap();
//! let state = simulator::run(&circuit::build_full(&theta).unwrap()).unwrap();
//! let p = state.born_probabilities();
//! assert!((p[3] - 0.21875).abs() < 1e-12);
//! ```

pub mod angles;
pub mod circuit;
pub mod distribution;
pub mod error;
pub mod report;
pub mod simulator;
pub mod transpiler;

pub use error::{Error, Result};
