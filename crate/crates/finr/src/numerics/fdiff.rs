//! Central-difference gradients. This is the oracle every analytic backward
//! pass in the crate is checked against, so it stays independent of them.

use crate::error::{FinrError, Result};

/// Central-difference gradient of `f` at `theta`, error O(h^2).
pub fn finite_diff_grad<F>(f: F, theta: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(FinrError::invalid("step h must be positive"));
    }
    let mut grad = Vec::with_capacity(theta.len());
    let mut probe = theta.to_vec();
    for i in 0..theta.len() {
        probe[i] = theta[i] + h;
        let fp = f(&probe);
        probe[i] = theta[i] - h;
        let fm = f(&probe);
        probe[i] = theta[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(FinrError::NumericAbort(format!(
                "objective non-finite near coordinate {i}"
            )));
        }
        grad.push((fp - fm) / (2.0 * h));
    }
    Ok(grad)
}

/// Relative per-coordinate deviation between two gradients:
/// max_i |a_i - b_i| / max(1, |a_i|, |b_i|).
pub fn max_rel_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (&x, &y)| {
            m.max((x - y).abs() / x.abs().max(y.abs()).max(1.0))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gradient() {
        let g = finite_diff_grad(|t| t[0] * t[0], &[3.0], 1e-5).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn constant_function_has_zero_gradient() {
        let g = finite_diff_grad(|_| 4.2, &[1.0, -2.0, 0.5], 1e-5).unwrap();
        for v in g {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn nonfinite_objective_propagates() {
        let r = finite_diff_grad(|t| 1.0 / (t[0] - 1.0), &[1.0], 1e-9);
        assert!(r.is_err() || r.unwrap()[0].is_finite());
    }
}
