//! Laguerre systems, the multiple-kernel ↔ Laguerre change of basis and
//! Hardy–Sobolev decay probes.
//!
//! Multiple kernels are zero-based (`k_{0,a}` is the Szegő kernel), Laguerre
//! elements one-based (`B_{1,a} = e_a`). Row `k` of the transform matrices
//! (one-based) belongs to `k_{k−1,a}`.

use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dictionary::element;
use crate::error::{Error, Result};
use crate::kernels::{ln_binomial, ln_factorial, mobius, szego_normalized, ParamPoint};
use crate::signal::{boundary_points, energy, inner_slices, BoundarySignal, FourierCoeffs};

/// Values below this are treated as numerical noise by [`loglog_slope`].
pub const NOISE_FLOOR: f64 = 1e-13;

/// Boundary samples used by the decay probes.
pub const PROBE_SAMPLES: usize = 4096;

/// A test function given by its Taylor coefficients, with the smoothness
/// order it is meant to have.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevProfile {
    pub sigma: f64,
    pub coeffs: FourierCoeffs,
}

impl SobolevProfile {
    /// `c_k = (1 + k)^{−(σ + 0.55)}` for `k < n_samples/2`, zero above.
    pub fn power_law(sigma: f64, n_samples: usize) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::DegenerateInput(format!("smoothness order {sigma} must be positive")));
        }
        let p = sigma + 0.55;
        let coeffs = (0..n_samples)
            .map(|k| if k < n_samples / 2 { Complex64::new((1.0 + k as f64).powf(-p), 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        Ok(Self { sigma, coeffs: FourierCoeffs { coeffs } })
    }

    /// `Σ_k |(1 + k^σ) c_k|²` over the stored coefficients.
    pub fn sobolev_norm_sq(&self) -> f64 {
        self.coeffs
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| ((1.0 + (k as f64).powf(self.sigma)) * c.norm()).powi(2))
            .sum()
    }

    pub fn signal(&self) -> BoundarySignal {
        self.coeffs.inverse()
    }
}

/// `T` expresses multiple kernels through Laguerre elements and `T_inv`
/// the reverse: `k_{k−1,a} = Σ_j T[k][j] B_{j,a}`, `B_{k,a} = Σ_j T_inv[k][j] k_{j−1,a}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformPair {
    pub t: DMatrix<Complex64>,
    pub t_inv: DMatrix<Complex64>,
}

/// Lower-triangular change-of-basis matrices of order `n` at `a`.
///
/// With one-based `k ≥ j`:
/// `T[k][j] = (k−1)! C(k−1, j−1) a^{k−j} / (1−|a|²)^{k−1/2}` and
/// `T_inv[k][j] = (k−1)! / ((j−1)!² (k−j)!) (−a)^{k−j} (1−|a|²)^{j−1/2}`.
/// At `a = 0` both are diagonal.
pub fn transform_matrices(n: usize, a: Complex64) -> Result<TransformPair> {
    if n == 0 {
        return Err(Error::DegenerateInput("matrix order must be at least 1".into()));
    }
    let r = a.norm();
    if !(r < 1.0) {
        return Err(Error::Domain { modulus: r });
    }
    let ln_w = (1.0 - r * r).ln();
    let mut t = DMatrix::zeros(n, n);
    let mut t_inv = DMatrix::zeros(n, n);
    for k in 1..=n {
        for j in 1..=k {
            let d = (k - j) as i32;
            if a == Complex64::new(0.0, 0.0) && d > 0 {
                continue;
            }
            let fwd = ln_factorial(k - 1) + ln_binomial(k - 1, j - 1) - (k as f64 - 0.5) * ln_w;
            t[(k - 1, j - 1)] = a.powi(d) * fwd.exp();
            let inv = ln_factorial(k - 1) - 2.0 * ln_factorial(j - 1) - ln_factorial(k - j) + (j as f64 - 0.5) * ln_w;
            t_inv[(k - 1, j - 1)] = (-a).powi(d) * inv.exp();
        }
    }
    Ok(TransformPair { t, t_inv })
}

/// `|⟨f, e_{n,a}⟩|` for `n` in `range`, evaluated on the profile's grid.
pub fn sobolev_coefficient_decay(
    profile: &SobolevProfile,
    a: Complex64,
    range: RangeInclusive<usize>,
) -> Result<Vec<(usize, f64)>> {
    let f = profile.signal();
    range
        .map(|n| {
            let e = element(ParamPoint::new(n, a)?, f.len())?;
            Ok((n, inner_slices(f.samples(), e.samples.samples()).norm()))
        })
        .collect()
}

/// `‖f − Σ_{l≤n}⟨f, B_{l,a}⟩B_{l,a}‖` for `n = 1..=n_max` (entry `n − 1`).
pub fn laguerre_tail_errors(f: &BoundarySignal, a: Complex64, n_max: usize) -> Result<Vec<f64>> {
    let zs = boundary_points(f.len());
    let mut b = zs.iter().map(|&z| szego_normalized(a, z)).collect::<Result<Vec<_>>>()?;
    let tau: Vec<Complex64> = zs.iter().map(|&z| mobius(a, z)).collect();
    let mut r = f.samples().to_vec();
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let c = inner_slices(&r, &b);
        r.iter_mut().zip(&b).for_each(|(x, y)| *x -= c * y);
        out.push(energy(&r).sqrt());
        b.iter_mut().zip(&tau).for_each(|(x, t)| *x *= t);
    }
    Ok(out)
}

/// Laguerre tail after `n` terms for a profile.
pub fn laguerre_tail_error(profile: &SobolevProfile, a: Complex64, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(profile.signal().norm());
    }
    Ok(*laguerre_tail_errors(&profile.signal(), a, n)?.last().expect("n ≥ 1"))
}

/// Least-squares slope of `ln value` against `ln n`, skipping values below
/// [`NOISE_FLOOR`]. `None` with fewer than two usable points.
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, v)| n > 0 && v >= NOISE_FLOOR)
        .map(|&(n, v)| ((n as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
