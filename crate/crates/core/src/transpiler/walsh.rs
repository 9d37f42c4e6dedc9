use crate::error::{Error, Result};

/// Unnormalised in-place Walsh–Hadamard butterfly.
pub fn fwht_in_place(values: &mut [f64]) {
    let len = values.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in values.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Contract(format!("transform length {len} is not a power of two")));
    }
    Ok(())
}

/// `α_v = 2^-m Σ_w (-1)^⟨v,w⟩ φ_w`.
pub fn walsh_hadamard(phi: &[f64]) -> Result<Vec<f64>> {
    check_len(phi.len())?;
    let mut alpha = phi.to_vec();
    fwht_in_place(&mut alpha);
    let scale = 1.0 / phi.len() as f64;
    alpha.iter_mut().for_each(|a| *a *= scale);
    Ok(alpha)
}

/// `φ_u = Σ_v (-1)^⟨u,v⟩ α_v`, the inverse of [`walsh_hadamard`].
pub fn inverse_walsh_hadamard(alpha: &[f64]) -> Result<Vec<f64>> {
    check_len(alpha.len())?;
    let mut phi = alpha.to_vec();
    fwht_in_place(&mut phi);
    Ok(phi)
}
