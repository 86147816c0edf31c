//! Szegő kernels, multiple kernels, Takenaka–Malmquist and Laguerre systems.
//!
//! Conventions: `k_a(z) = 1/(1 − ā z)`, and the multiple kernel of order `n`
//! is the `n`-th derivative in `ā`,
//!
//! ```text
//! k_{n,a}(z) = n! zⁿ / (1 − ā z)^{n+1},
//! ```
//!
//! so `k_{0,a} = k_a`. Normalized elements are `e_{n,a} = k_{n,a}/‖k_{n,a}‖`
//! with the closed-form H² norm.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::BoundarySignal;

/// Multiplicity/derivative order `n` and disc parameter `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub n: usize,
    pub a: Complex64,
}

impl ParamPoint {
    pub fn new(n: usize, a: Complex64) -> Result<Self> {
        check_disc(a)?;
        Ok(Self { n, a })
    }

    pub fn szego(a: Complex64) -> Result<Self> {
        Self::new(0, a)
    }
}

fn check_disc(a: Complex64) -> Result<()> {
    let modulus = a.norm();
    if !(modulus < 1.0) {
        return Err(Error::Domain { modulus });
    }
    Ok(())
}

/// `k_a(z) = 1/(1 − ā z)`
pub fn szego_eval(a: Complex64, z: Complex64) -> Result<Complex64> {
    check_disc(a)?;
    Ok(1.0 / (1.0 - a.conj() * z))
}

/// `e_a(z) = √(1 − |a|²)/(1 − ā z)`
pub fn szego_normalized(a: Complex64, z: Complex64) -> Result<Complex64> {
    Ok(szego_eval(a, z)? * (1.0 - a.norm_sqr()).sqrt())
}

/// `k_{n,a}(z) = n! zⁿ/(1 − ā z)^{n+1}`
pub fn multi_kernel_eval(p: ParamPoint, z: Complex64) -> Result<Complex64> {
    let base = szego_eval(p.a, z)?;
    let w = z * base;
    let mut v = base;
    for _ in 0..p.n {
        v *= w;
    }
    Ok(v * ln_factorial(p.n).exp())
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Natural log of `‖k_{n,a}‖²`.
///
/// Sums `C(n,m) n! (2n−m)!/(n−m)! |a|^{2(n−m)} (1−|a|²)^{m−2n−1}` over
/// `m = 0..=n`, each term formed in log space and accumulated with a
/// log-sum-exp so that large `n` near the boundary does not overflow.
pub fn multi_kernel_log_norm_sq(p: ParamPoint) -> Result<f64> {
    check_disc(p.a)?;
    let n = p.n;
    let r2 = p.a.norm_sqr();
    let ln_r2 = r2.ln();
    let ln_comp = (1.0 - r2).ln();
    let terms: Vec<f64> = (0..=n)
        .filter_map(|m| {
            let pow = (n - m) as f64;
            let radial = if n == m {
                0.0
            } else if r2 == 0.0 {
                return None;
            } else {
                pow * ln_r2
            };
            Some(
                ln_binomial(n, m) + ln_factorial(n) + ln_factorial(2 * n - m) - ln_factorial(n - m)
                    + radial
                    + (m as f64 - 2.0 * n as f64 - 1.0) * ln_comp,
            )
        })
        .collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // Neumaier-compensated sum of the scaled terms.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in &terms {
        let x = (t - max).exp();
        let s = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - s) + x } else { (x - s) + sum };
        sum = s;
    }
    Ok(max + (sum + comp).ln())
}

/// `‖k_{n,a}‖²` in closed form.
pub fn multi_kernel_norm_sq(p: ParamPoint) -> Result<f64> {
    Ok(multi_kernel_log_norm_sq(p)?.exp())
}

/// Scale `n!/‖k_{n,a}‖` turning `zⁿ/(1−āz)^{n+1}` into `e_{n,a}`.
pub(crate) fn element_scale(p: ParamPoint) -> Result<f64> {
    Ok((ln_factorial(p.n) - 0.5 * multi_kernel_log_norm_sq(p)?).exp())
}

/// Normalized multiple kernel `e_{n,a}(z)`.
pub fn normalized_multi_kernel_eval(p: ParamPoint, z: Complex64) -> Result<Complex64> {
    let base = szego_eval(p.a, z)?;
    let w = z * base;
    let mut v = base;
    for _ in 0..p.n {
        v *= w;
    }
    Ok(v * element_scale(p)?)
}

/// Möbius factor `τ_a(z) = (z − a)/(1 − ā z)`.
pub fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (1.0 - a.conj() * z)
}

/// Zeros `a_1, a_2, …` (repeats allowed) defining a TM system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeSpec {
    zeros: Vec<Complex64>,
}

impl BlaschkeSpec {
    pub fn new(zeros: Vec<Complex64>) -> Result<Self> {
        for &a in &zeros {
            check_disc(a)?;
        }
        Ok(Self { zeros })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    /// Finite Blaschke product `Π τ_{a_l}(z)` over all zeros.
    pub fn product(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(Complex64::new(1.0, 0.0), |acc, &a| acc * mobius(a, z))
    }
}

/// `B_k(z) = e_{a_k}(z) Π_{l<k} τ_{a_l}(z)`, with `k` one-based.
pub fn tm_element(spec: &BlaschkeSpec, k: usize, z: Complex64) -> Result<Complex64> {
    let len = spec.zeros.len();
    if k == 0 || k > len {
        return Err(Error::IndexOutOfRange { index: k, len });
    }
    let head = spec.zeros[..k - 1].iter().fold(Complex64::new(1.0, 0.0), |acc, &a| acc * mobius(a, z));
    Ok(szego_normalized(spec.zeros[k - 1], z)? * head)
}

/// Laguerre element `B_{l,a}(z) = √(1−|a|²)/(1−āz) · τ_a(z)^{l−1}`, `l ≥ 1`.
pub fn laguerre_element(l: usize, a: Complex64, z: Complex64) -> Result<Complex64> {
    if l == 0 {
        return Err(Error::IndexOutOfRange { index: 0, len: usize::MAX });
    }
    let e = szego_normalized(a, z)?;
    let t = mobius(a, z);
    let mut v = e;
    for _ in 1..l {
        v *= t;
    }
    Ok(v)
}

/// Samples lower than this make the boundary phase meaningless.
pub const MEAN_FREQUENCY_FLOOR: f64 = 1e-12;

/// Mean frequency as the discrete winding number of the boundary phase,
/// `(1/2π) Σ_j Arg(f_{j+1}/f_j)` taken cyclically.
///
/// For boundary-nonvanishing finite-Blaschke-form signals this is the number
/// of zeros inside the disc.
pub fn mean_frequency(f: &BoundarySignal) -> Result<f64> {
    let s = f.samples();
    if let Some((index, v)) = s.iter().enumerate().find(|(_, v)| v.norm() < MEAN_FREQUENCY_FLOOR) {
        return Err(Error::NearZeroBoundary { index, modulus: v.norm() });
    }
    let n = s.len();
    let total: f64 = (0..n).map(|j| (s[(j + 1) % n] / s[j]).arg()).sum();
    Ok(total / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{inner, BoundarySignal};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn samples(n: usize, f: impl Fn(Complex64) -> Complex64) -> BoundarySignal {
        BoundarySignal::from_fn(n, f).unwrap()
    }

    const F1_ZEROS: [(f64, f64); 5] =
        [(-0.4750, 0.3050), (-0.1800, 0.7150), (0.2600, -0.7300), (0.5400, 0.3600), (-0.4850, -0.2150)];

    fn f1_zeros() -> BlaschkeSpec {
        BlaschkeSpec::new(F1_ZEROS.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    #[test]
    fn szego_kernel_values() {
        for z in [c(0.3, 0.1), c(-1.0, 0.0), c(0.0, 1.0)] {
            assert_eq!(szego_eval(c(0.0, 0.0), z).unwrap(), c(1.0, 0.0));
        }
        let v = szego_eval(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, 4.0 / 3.0, epsilon = 1e-15);
        assert!(matches!(szego_eval(c(1.0, 0.0), c(0.0, 0.0)), Err(Error::Domain { .. })));
        assert!(szego_eval(c(0.8, 0.7), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn normalized_szego_has_unit_norm_by_quadrature() {
        let f = samples(4096, |z| szego_normalized(c(0.0, 0.8), z).unwrap());
        assert!((f.norm() - 1.0).abs() < 1e-8);
        let f = samples(4096, |z| szego_normalized(c(0.5, 0.0), z).unwrap());
        let g = samples(256, |z| szego_normalized(c(0.5, 0.0), z).unwrap());
        assert!((f.energy() - 1.0).abs() < 1e-10);
        assert!((g.energy() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn multi_kernel_low_orders() {
        for a in [c(0.0, 0.0), c(0.3, -0.4), c(-0.9, 0.1)] {
            for z in [c(0.2, 0.5), c(0.0, -1.0)] {
                let k0 = multi_kernel_eval(ParamPoint::new(0, a).unwrap(), z).unwrap();
                assert_eq!(k0, szego_eval(a, z).unwrap());
            }
        }
        let z = c(0.3, -0.7);
        let k1 = multi_kernel_eval(ParamPoint::new(1, c(0.0, 0.0)).unwrap(), z).unwrap();
        assert!((k1 - z).norm() < 1e-15);
    }

    #[test]
    fn multi_kernel_matches_finite_difference_in_conj_a() {
        // k_{2,a}(z) = ∂²/∂ā² k_a(z); k_a depends on ā only, so differentiate
        // b ↦ 1/(1 − b z) at b = ā with a central second difference.
        let a = c(0.3, 0.4);
        let z = c(0.6, 0.0);
        let h = 1e-4;
        let g = |b: Complex64| 1.0 / (1.0 - b * z);
        let b = a.conj();
        let fd = (g(b + h) - 2.0 * g(b) + g(b - h)) / (h * h);
        let exact = multi_kernel_eval(ParamPoint::new(2, a).unwrap(), z).unwrap();
        assert!((fd - exact).norm() / exact.norm() < 1e-5, "fd {fd} exact {exact}");
    }

    #[test]
    fn norm_formula_small_cases() {
        assert_relative_eq!(multi_kernel_norm_sq(ParamPoint::new(0, c(0.6, 0.0)).unwrap()).unwrap(), 1.5625, epsilon = 1e-14);
        assert_relative_eq!(multi_kernel_norm_sq(ParamPoint::new(1, c(0.0, 0.0)).unwrap()).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(multi_kernel_norm_sq(ParamPoint::new(4, c(0.0, 0.0)).unwrap()).unwrap(), 576.0, epsilon = 1e-12);
        assert!(multi_kernel_norm_sq(ParamPoint { n: 2, a: c(1.0, 0.0) }).is_err());
    }

    #[test]
    fn norm_formula_matches_quadrature() {
        let p = ParamPoint::new(3, c(0.5, 0.0)).unwrap();
        let q = samples(8192, |z| multi_kernel_eval(p, z).unwrap()).energy();
        let closed = multi_kernel_norm_sq(p).unwrap();
        assert!((q - closed).abs() / closed < 1e-6, "quadrature {q} closed {closed}");
    }

    #[test]
    fn norm_formula_survives_large_orders_near_boundary() {
        let v = multi_kernel_log_norm_sq(ParamPoint::new(40, c(0.0, 0.999)).unwrap()).unwrap();
        assert!(v.is_finite() && v > 700.0);
    }

    #[test]
    fn tm_system_reduces_to_fourier_basis() {
        let spec = BlaschkeSpec::new(vec![c(0.0, 0.0); 6]).unwrap();
        let z = c(0.6, -0.3);
        for k in 1..=6 {
            let b = tm_element(&spec, k, z).unwrap();
            assert!((b - z.powu(k as u32 - 1)).norm() < 1e-14);
        }
        let single = BlaschkeSpec::new(vec![c(0.2, 0.5)]).unwrap();
        assert_eq!(tm_element(&single, 1, z).unwrap(), szego_normalized(c(0.2, 0.5), z).unwrap());
        assert!(matches!(tm_element(&single, 2, z), Err(Error::IndexOutOfRange { .. })));
        assert!(tm_element(&single, 0, z).is_err());
    }

    #[test]
    fn tm_system_is_orthonormal_by_quadrature() {
        let spec = f1_zeros();
        let basis: Vec<_> = (1..=5).map(|k| samples(1024, |z| tm_element(&spec, k, z).unwrap())).collect();
        for (i, bi) in basis.iter().enumerate() {
            for (j, bj) in basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((inner(bi, bj).unwrap() - expect).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn laguerre_elements() {
        let z = c(-0.2, 0.9);
        for l in 1..6 {
            let v = laguerre_element(l, c(0.0, 0.0), z).unwrap();
            assert!((v - z.powu(l as u32 - 1)).norm() < 1e-14);
        }
        let b = samples(2048, |z| laguerre_element(6, c(0.0, 0.7), z).unwrap());
        assert!((b.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn consecutive_gram_schmidt_of_multiple_kernels_gives_laguerre() {
        let a = c(0.5, 0.0);
        let n = 2048;
        let mut basis: Vec<BoundarySignal> = Vec::new();
        for order in 0..4 {
            let mut v = samples(n, |z| multi_kernel_eval(ParamPoint::new(order, a).unwrap(), z).unwrap());
            for b in &basis {
                let p = inner(&v, b).unwrap();
                v.axpy(-p, b).unwrap();
            }
            let nv = v.norm();
            basis.push(v.scale(c(1.0 / nv, 0.0)));
        }
        for (l, b) in basis.iter().enumerate() {
            let lag = samples(n, |z| laguerre_element(l + 1, a, z).unwrap());
            assert!((inner(b, &lag).unwrap().norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn reproducing_property_on_polynomials() {
        let n = 1024;
        let poly = |z: Complex64| c(1.0, -0.5) + z * c(0.3, 0.2) - z.powu(7) * 0.8 + z.powu(40) * c(0.0, 0.1);
        let f = samples(n, poly);
        for a in [c(0.1, 0.2), c(-0.6, 0.3), c(0.0, -0.85)] {
            let k = samples(n, |z| szego_eval(a, z).unwrap());
            assert!((inner(&f, &k).unwrap() - poly(a)).norm() < 1e-8);
        }
    }

    #[test]
    fn derivative_reproducing_property() {
        // ⟨f, k_{n,a}⟩ = f^{(n)}(a); check against finite differences of q ↦ ⟨f, k_q⟩ = f(q).
        let n = 1024;
        let poly = |z: Complex64| c(1.0, -0.5) + z * c(0.3, 0.2) - z.powu(3) * 0.8 + z.powu(6) * c(0.0, 0.4);
        let f = samples(n, poly);
        let a = c(0.2, -0.3);
        let h = 1e-3;
        let fd = [
            poly(a),
            (poly(a + h) - poly(a - h)) / (2.0 * h),
            (poly(a + h) - 2.0 * poly(a) + poly(a - h)) / (h * h),
            (poly(a + 2.0 * h) - 2.0 * poly(a + h) + 2.0 * poly(a - h) - poly(a - 2.0 * h)) / (2.0 * h * h * h),
        ];
        for (order, expect) in fd.iter().enumerate() {
            let k = samples(n, |z| multi_kernel_eval(ParamPoint::new(order, a).unwrap(), z).unwrap());
            let got = inner(&f, &k).unwrap();
            assert!((got - expect).norm() / expect.norm() < 1e-4, "order {order}: {got} vs {expect}");
        }
    }

    #[test]
    fn normalized_kernels_have_unit_discrete_norm_at_high_resolution() {
        let n = 4096;
        for order in 0..=8 {
            for a in [c(0.0, 0.0), c(0.5, 0.5), c(-0.9, 0.0), c(0.3, -0.7)] {
                let p = ParamPoint::new(order, a).unwrap();
                let e = samples(n, |z| normalized_multi_kernel_eval(p, z).unwrap());
                assert!((e.norm() - 1.0).abs() < 1e-6, "n={order} a={a}: {}", e.norm());
            }
        }
    }

    #[test]
    fn mean_frequency_examples() {
        let n = 1024;
        let mf = mean_frequency(&samples(n, |z| z.powu(5))).unwrap();
        assert!((mf - 5.0).abs() < 1e-9);
        let mf = mean_frequency(&samples(n, |z| szego_normalized(c(0.5, 0.0), z).unwrap())).unwrap();
        assert!(mf.abs() < 1e-9);
        let spec = f1_zeros();
        let mf = mean_frequency(&samples(n, |z| tm_element(&spec, 4, z).unwrap())).unwrap();
        assert!((mf - 3.0).abs() < 1e-9);
        for a in [c(0.2, 0.0), c(-0.7, 0.6), c(0.0, 0.95)] {
            let mf = mean_frequency(&samples(n, |z| mobius(a, z))).unwrap();
            assert!((mf - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mean_frequency_rejects_boundary_zeros() {
        let f = samples(8, |z| z - 1.0);
        assert!(matches!(mean_frequency(&f), Err(Error::NearZeroBoundary { index: 0, .. })));
    }
}
