//! Polynomial roots by Aberth–Ehrlich simultaneous iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 2000;

/// Evaluates `Σ c_k w^k` by Horner's rule (coefficients in ascending order).
pub fn horner(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

fn horner_with_derivative(coeffs: &[Complex64], w: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| (p * w + c, dp * w + p))
}

/// Relative backward error `|p(w)| / Σ|c_k||w|^k`.
pub fn backward_error(coeffs: &[Complex64], w: Complex64) -> f64 {
    let r = w.norm();
    let scale: f64 = coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    if scale == 0.0 {
        return 0.0;
    }
    horner(coeffs, w).norm() / scale
}

/// All complex roots of `Σ c_k w^k` (ascending order), with multiplicity.
///
/// Leading coefficients below `1e-14 · max|c_k|` are dropped and exact zero
/// low-order coefficients become exact roots at the origin. The iteration
/// stops once every correction is at rounding level or every root has a
/// backward error near machine precision.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if cmax == 0.0 {
        return Err(Error::DegenerateInput("zero polynomial".into()));
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-14 * cmax {
        deg -= 1;
    }
    let low = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let p = &coeffs[low..=deg];
    let d = p.len() - 1;
    if d == 0 {
        return Ok(roots);
    }

    // start on a circle of the geometric-mean root radius, off the real axis
    let radius = (p[0].norm() / p[d].norm()).powf(1.0 / d as f64);
    let mut w: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4))
        .collect();
    let mut done = vec![false; d];
    for _ in 0..MAX_SWEEPS {
        let mut moving = false;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (v, dv) = horner_with_derivative(p, w[i]);
            if v.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (w[i] - w[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !step.is_finite() {
                return Err(Error::Spec(format!("root iteration diverged (degree {d})")));
            }
            w[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * w[i].norm().max(f64::MIN_POSITIVE)
                || backward_error(p, w[i]) <= 4.0 * f64::EPSILON
            {
                done[i] = true;
            } else {
                moving = true;
            }
        }
        if !moving {
            roots.extend(w);
            return Ok(roots);
        }
    }
    if w.iter().all(|&x| backward_error(p, x) < 1e-12) {
        roots.extend(w);
        return Ok(roots);
    }
    Err(Error::Spec(format!("root iteration did not converge (degree {d})")))
}
