use crate::error::{Error, Result};

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// A panel is accepted once `|S_left + S_right - S_whole| <= 15 * tol`, with
/// the tolerance halved at every split. Reaching `max_depth` without meeting
/// the tolerance is an error.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Quadrature { lo: a, hi: b });
    }
    if delta.abs() <= 15.0 * tol {
        // Richardson correction
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature { lo: a, hi: b });
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 1.0, 1e-12, 40).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn smooth_function() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 40).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn kink_inside_panel() {
        let f = |x: f64| if x < 0.3 { x } else { 0.6 - x };
        let v = adaptive_simpson(&f, 0.0, 1.0, 1e-12, 40).unwrap();
        // 0.045 - 0.045 + ... : integral of x on [0,.3] plus (0.6 - x) on [.3,1]
        let exact = 0.045 + (0.6 * 0.7 - (1.0 - 0.09) / 2.0);
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
    }

    #[test]
    fn non_finite_integrand_fails() {
        let r = adaptive_simpson(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-12, 40);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn depth_exhaustion_fails() {
        let r = adaptive_simpson(&|x: f64| (50.0 * x).sin().abs(), 0.0, 1.0, 1e-14, 2);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
