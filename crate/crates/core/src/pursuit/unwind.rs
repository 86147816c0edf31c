use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_input, step, Decomposition, DictKind, Method, UnwindInfo};
use crate::dictionary::{argmax, element, Dictionary, ParamGrid};
use crate::error::{Error, Result};
use crate::kernels::{mobius, ParamPoint};
use crate::roots::{backward_error, poly_roots};
use crate::signal::{boundary_points, energy, inner_slices, BoundarySignal, FourierCoeffs};

/// How the Szegő parameter is chosen for the outer factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnwindSelection {
    /// `a = 0`: peel off the constant term of the outer factor.
    Origin,
    /// Maximal selection over the Szegő grid.
    Maximal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnwindConfig {
    pub selection: UnwindSelection,
    /// Grid scanned by maximal selection (its `n_max` is ignored).
    pub grid: ParamGrid,
    /// Roots with `|w| > 1 − delta` are left in the outer part.
    pub delta: f64,
    /// Accepted relative backward error of a root.
    pub backward_tol: f64,
}

impl Default for UnwindConfig {
    fn default() -> Self {
        Self { selection: UnwindSelection::Origin, grid: ParamGrid::default().szego(), delta: 1e-3, backward_tol: 1e-6 }
    }
}

/// Zeros of the remainder inside the disc, found from its Hardy part
/// truncated to degree `N/2 − 1`. The flag reports a root-finder failure.
pub(crate) fn interior_zeros(r: &[Complex64], cfg: &UnwindConfig) -> Result<(Vec<Complex64>, bool)> {
    let spectrum = FourierCoeffs::forward(&BoundarySignal::new(r.to_vec())?).coeffs;
    let mut coeffs = spectrum[..r.len() / 2].to_vec();
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if cmax == 0.0 {
        return Ok((Vec::new(), false));
    }
    for c in coeffs.iter_mut() {
        if c.norm() < 1e-14 * cmax {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    match poly_roots(&coeffs) {
        Ok(roots) => Ok((
            roots
                .into_iter()
                .filter(|w| w.norm() <= 1.0 - cfg.delta && backward_error(&coeffs, *w) <= cfg.backward_tol)
                .collect(),
            false,
        )),
        Err(Error::DegenerateInput(_)) => Ok((Vec::new(), false)),
        Err(_) => Ok((Vec::new(), true)),
    }
}

/// Unwinding expansion: each step factors the remainder as inner × outer
/// and takes one Szegő step on the outer factor.
pub fn unwind_run(f: &BoundarySignal, iters: usize, cfg: &UnwindConfig) -> Result<Decomposition> {
    let e0 = check_input(f, None, iters)?;
    let n = f.len();
    let zs = boundary_points(n);
    let dict = match cfg.selection {
        UnwindSelection::Maximal => Some(Dictionary::new(cfg.grid.szego(), n)?),
        UnwindSelection::Origin => None,
    };
    let fs = f.samples();
    let mut r = fs.to_vec();
    let mut prefix = vec![Complex64::new(1.0, 0.0); n];
    let mut approx = vec![Complex64::new(0.0, 0.0); n];
    let mut steps = Vec::with_capacity(iters);
    for _ in 0..iters {
        let (zeros, root_failure) = interior_zeros(&r, cfg)?;
        let inner: Vec<Complex64> =
            zs.iter().map(|&z| zeros.iter().fold(Complex64::new(1.0, 0.0), |acc, &w| acc * mobius(w, z))).collect();
        let outer: Vec<Complex64> = r.iter().zip(&inner).map(|(x, i)| x * i.conj()).collect();
        let a = match &dict {
            Some(d) => {
                let scores: Vec<f64> = d.scan(|_, e| inner_slices(&outer, e).norm());
                d.params()[argmax(&scores).ok_or(Error::DictionaryExhausted)?].a
            }
            None => Complex64::new(0.0, 0.0),
        };
        let param = ParamPoint { n: 0, a };
        let el = element(param, n)?.samples.into_samples();
        let c = inner_slices(&outer, &el);
        for j in 0..n {
            let tau = mobius(a, zs[j]);
            approx[j] += prefix[j] * inner[j] * c * el[j];
            prefix[j] *= inner[j] * tau;
            r[j] = (outer[j] - c * el[j]) / tau;
        }
        let residual: Vec<Complex64> = fs.iter().zip(&approx).map(|(x, y)| x - y).collect();
        let mut s = step(param, c, energy(&residual), e0);
        s.unwinding = Some(UnwindInfo { inner_zeros: zeros, root_failure });
        steps.push(s);
    }
    Ok(Decomposition {
        method: Method::Unwinding,
        dict: DictKind::Szego,
        steps,
        signal_energy: e0,
        approximation: BoundarySignal::new(approx)?,
    })
}
