//! Practical n-Best approximation by cyclic coordinate refinement.
//!
//! Each coordinate step holds the other `n − 1` kernels fixed and replaces
//! the remaining one by the dictionary element whose orthogonalized part
//! removes the most energy from the remainder.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dictionary::{argmax, DictKind, Dictionary};
use crate::error::{Error, Result};
use crate::kernels::{multi_kernel_log_norm_sq, ParamPoint};
use crate::pursuit::{Decomposition, GsState, DEPENDENCE_EPS};
use crate::signal::{energy, inner_slices, BoundarySignal};

/// Parameters of an n-term approximation with its projection error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NTuple {
    pub params: Vec<ParamPoint>,
    pub projection_error: f64,
}

impl NTuple {
    pub fn new(f: &BoundarySignal, params: Vec<ParamPoint>) -> Result<Self> {
        let projection_error = project(f, &params)?.relative_error;
        Ok(Self { params, projection_error })
    }

    /// The selections of a pursuit run, e.g. n-step POAFD.
    pub fn from_decomposition(f: &BoundarySignal, d: &Decomposition) -> Result<Self> {
        Self::new(f, d.params())
    }

    /// `n` distinct dictionary entries drawn with a seeded generator; on the
    /// Szegő dictionary the entries have distinct `a`.
    pub fn random(f: &BoundarySignal, dict: &Dictionary, n: usize, seed: u64) -> Result<Self> {
        if n == 0 || n > dict.len() {
            return Err(Error::DegenerateInput(format!("cannot draw {n} of {} candidates", dict.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..64 {
            let params: Vec<ParamPoint> =
                sample(&mut rng, dict.len(), n).into_iter().map(|i| dict.params()[i]).collect();
            match Self::new(f, params) {
                Ok(t) => return Ok(t),
                Err(Error::IllConditionedTuple { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::IllConditionedTuple { defect: 0.0 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    /// Coefficients against the raw kernels `k_{n,a}`.
    pub coeffs: Vec<Complex64>,
    /// Coefficients against the normalized elements `e_{n,a}`.
    pub normalized_coeffs: Vec<Complex64>,
    pub relative_error: f64,
}

/// Least-squares projection of `f` on the span of the tuple's kernels,
/// through a QR factorization by modified Gram–Schmidt.
pub fn project(f: &BoundarySignal, params: &[ParamPoint]) -> Result<Projection> {
    let e0 = f.energy();
    if e0 == 0.0 {
        return Err(Error::DegenerateInput("signal has zero energy".into()));
    }
    let n = params.len();
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut r = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (j, &p) in params.iter().enumerate() {
        let mut v = crate::dictionary::element(p, f.len())?.samples.into_samples();
        let e = energy(&v);
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = inner_slices(&v, qi);
                r[i][j] += c;
                v.iter_mut().zip(qi).for_each(|(x, y)| *x -= c * y);
            }
        }
        let rest = energy(&v);
        if !(rest >= DEPENDENCE_EPS * e) {
            return Err(Error::IllConditionedTuple { defect: if e > 0.0 { rest / e } else { 0.0 } });
        }
        let norm = rest.sqrt();
        r[j][j] = Complex64::new(norm, 0.0);
        v.iter_mut().for_each(|x| *x /= norm);
        q.push(v);
    }
    let fs = f.samples();
    let qf: Vec<Complex64> = q.iter().map(|qi| inner_slices(fs, qi)).collect();
    let mut resid = fs.to_vec();
    for (qi, c) in q.iter().zip(&qf) {
        resid.iter_mut().zip(qi).for_each(|(x, y)| *x -= c * y);
    }
    // back substitution R·x = Qᴴf
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = ((i + 1)..n).map(|j| r[i][j] * x[j]).sum();
        x[i] = (qf[i] - s) / r[i][i];
    }
    let coeffs = params
        .iter()
        .zip(&x)
        .map(|(&p, &c)| Ok(c / (0.5 * multi_kernel_log_norm_sq(p)?).exp()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Projection { coeffs, normalized_coeffs: x, relative_error: (energy(&resid) / e0).sqrt() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineResult {
    pub tuple: NTuple,
    /// Projection error before the first cycle and after each cycle.
    pub history: Vec<f64>,
    pub cycles: usize,
}

/// Cyclic coordinate refinement of `initial` over `dict`.
///
/// Stops after `max_cycles` or when a cycle improves the error by less than
/// `tol`. A replacement is kept only if it strictly lowers the error.
pub fn refine(f: &BoundarySignal, initial: &NTuple, dict: &Dictionary, max_cycles: usize, tol: f64) -> Result<RefineResult> {
    if f.len() != dict.n_samples() {
        return Err(Error::DimensionMismatch { left: f.len(), right: dict.n_samples() });
    }
    let mut params = initial.params.clone();
    let mut err = project(f, &params)?.relative_error;
    let mut history = vec![err];
    let mut cycles = 0;
    while cycles < max_cycles {
        cycles += 1;
        let start = err;
        for j in 0..params.len() {
            let others: Vec<ParamPoint> =
                params.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &p)| p).collect();
            let Some(best) = best_replacement(f, dict, &others)? else { continue };
            if best == params[j] {
                continue;
            }
            let mut cand = params.clone();
            cand[j] = best;
            let cand_err = match project(f, &cand) {
                Ok(p) => p.relative_error,
                Err(Error::IllConditionedTuple { .. }) => continue,
                Err(e) => return Err(e),
            };
            if cand_err < err {
                params = cand;
                err = cand_err;
            }
        }
        history.push(err);
        if start - err < tol {
            break;
        }
    }
    Ok(RefineResult { tuple: NTuple { params, projection_error: err }, history, cycles })
}

/// The candidate that removes the most energy from `f`'s remainder after
/// projecting out `others`.
fn best_replacement(f: &BoundarySignal, dict: &Dictionary, others: &[ParamPoint]) -> Result<Option<ParamPoint>> {
    let mut state = GsState::new();
    for &p in others {
        state.extend(p, &dict.eval_param(p)?).map_err(|e| match e {
            Error::LinearDependence { defect } => Error::IllConditionedTuple { defect },
            e => e,
        })?;
    }
    let r = state.remainder(f.samples());
    let gain = |e: &[Complex64]| {
        let n2 = energy(e);
        let p: f64 = state.basis().iter().map(|b| inner_slices(e, b).norm_sqr()).sum();
        let rest = n2 - p;
        if n2 > 0.0 && rest >= DEPENDENCE_EPS * n2 {
            inner_slices(&r, e).norm_sqr() / rest
        } else {
            f64::NEG_INFINITY
        }
    };
    let szego = dict.kind() == DictKind::Szego;
    let mut scores: Vec<f64> = dict.scan(|i, e| {
        let p = dict.params()[i];
        if others.iter().any(|o| o.a == p.a && (szego || o.n == p.n)) {
            f64::NEG_INFINITY
        } else {
            gain(e)
        }
    });
    let mut chosen: Vec<(usize, ParamPoint)> = Vec::new();
    if szego {
        // at an occupied `a` the candidate is the lowest free multiple kernel
        for (i, p) in dict.params().iter().enumerate() {
            if !others.iter().any(|o| o.a == p.a) {
                continue;
            }
            let mut m = 0;
            while others.iter().any(|o| o.a == p.a && o.n == m) {
                m += 1;
            }
            let cand = ParamPoint { n: m, a: p.a };
            scores[i] = gain(&dict.eval_param(cand)?);
            chosen.push((i, cand));
        }
    }
    Ok(argmax(&scores).map(|i| chosen.iter().find(|(k, _)| *k == i).map_or(dict.params()[i], |&(_, p)| p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::ParamGrid;
    use crate::pursuit::poafd_run;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(n: usize, a: Complex64) -> ParamPoint {
        ParamPoint::new(n, a).unwrap()
    }

    #[test]
    fn projection_recovers_span_members() {
        let params = [p(0, c(0.3, 0.1)), p(2, c(-0.2, 0.5)), p(1, c(0.0, 0.0))];
        let coeffs = [c(1.0, -0.5), c(0.25, 0.0), c(0.0, 2.0)];
        let n = 256;
        let els: Vec<_> = params.iter().map(|&q| crate::dictionary::element(q, n).unwrap()).collect();
        let mut samples = vec![c(0.0, 0.0); n];
        for (e, &k) in els.iter().zip(&coeffs) {
            for (s, v) in samples.iter_mut().zip(e.samples.samples()) {
                *s += k * v;
            }
        }
        let f = BoundarySignal::new(samples).unwrap();
        let proj = project(&f, &params).unwrap();
        assert!(proj.relative_error < 1e-9);
        for ((got, want), e) in proj.coeffs.iter().zip(&coeffs).zip(&els) {
            assert!((got * e.raw_norm - want).norm() < 1e-8);
        }
        assert!(matches!(
            project(&f, &[params[0], params[0]]),
            Err(Error::IllConditionedTuple { .. })
        ));
    }

    #[test]
    fn refine_never_worsens_and_is_stable() {
        let n = 64;
        let f = BoundarySignal::from_fn(n, |z| {
            1.0 / (1.0 - c(0.4, 0.3).conj() * z) + z * z / (1.0 - c(-0.5, 0.2).conj() * z).powu(2)
        })
        .unwrap();
        for n_max in [0, 3] {
            let dict = Dictionary::new(ParamGrid::new(20, 24, n_max).unwrap(), n).unwrap();
            let init = NTuple::from_decomposition(&f, &poafd_run(&f, &dict, 2).unwrap()).unwrap();
            let out = refine(&f, &init, &dict, 20, 1e-6).unwrap();
            assert!(out.tuple.projection_error <= init.projection_error + 1e-10);
            assert!(out.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            let again = refine(&f, &out.tuple, &dict, 1, 1e-6).unwrap();
            assert!((again.tuple.projection_error - out.tuple.projection_error).abs() < 1e-6);
            let fresh = project(&f, &out.tuple.params).unwrap().relative_error;
            assert!((fresh - out.tuple.projection_error).abs() < 1e-10);
        }
    }

    #[test]
    fn one_best_from_the_first_maximal_selection() {
        let n = 64;
        let f = BoundarySignal::from_fn(n, |z| z.powu(2) + c(0.3, 0.0) + 1.0 / (1.0 - c(0.2, 0.6).conj() * z)).unwrap();
        let dict = Dictionary::new(ParamGrid::new(10, 12, 0).unwrap(), n).unwrap();
        let d = poafd_run(&f, &dict, 1).unwrap();
        let t = NTuple::from_decomposition(&f, &d).unwrap();
        assert!((t.projection_error - d.final_relative_error()).abs() < 1e-12);
    }

    #[test]
    fn random_initialization_is_seeded() {
        let f = BoundarySignal::from_fn(32, |z| z + 0.5).unwrap();
        let dict = Dictionary::new(ParamGrid::new(6, 8, 2).unwrap(), 32).unwrap();
        let a = NTuple::random(&f, &dict, 3, 7).unwrap();
        let b = NTuple::random(&f, &dict, 3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.params.len(), 3);
    }
}
