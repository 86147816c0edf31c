use num_complex::Complex64;
use serde::Serialize;

use super::gs::{GsState, DEPENDENCE_EPS};
use super::{check_input, step, Decomposition, DictKind, Method};
use crate::dictionary::{argmax, Dictionary};
use crate::error::{Error, Result};
use crate::kernels::ParamPoint;
use crate::signal::{energy, inner_slices, BoundarySignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Oga,
    Poafd,
}

/// Orthogonal greedy algorithm: GA selection on the orthogonal remainder,
/// coefficients against the orthonormalized system.
pub fn oga_run(f: &BoundarySignal, dict: &Dictionary, iters: usize) -> Result<Decomposition> {
    orthogonal_pursuit(f, dict, iters, Rule::Oga)
}

/// Pre-orthogonal AFD. On the Szegő dictionary a repeated `a` brings in the
/// next multiple kernel at `a`.
pub fn poafd_run(f: &BoundarySignal, dict: &Dictionary, iters: usize) -> Result<Decomposition> {
    orthogonal_pursuit(f, dict, iters, Rule::Poafd)
}

/// Scores use the candidate rescaled to unit discrete norm, so that
/// elements whose grid norm drifts from the closed form (large `n`, `|a|`
/// near 1) are neither favoured nor penalized.
fn score(rule: Rule, corr: f64, norm_sq: f64, proj_sq: f64) -> f64 {
    let defect = if norm_sq > 0.0 { 1.0 - proj_sq / norm_sq } else { 0.0 };
    if !(defect >= DEPENDENCE_EPS) {
        return f64::NEG_INFINITY;
    }
    let corr = corr / norm_sq.sqrt();
    match rule {
        Rule::Oga => corr,
        Rule::Poafd => corr / defect.sqrt(),
    }
}

/// A Szegő candidate whose current element is a multiple kernel.
struct Repeated {
    idx: usize,
    param: ParamPoint,
    samples: Vec<Complex64>,
}

fn orthogonal_pursuit(f: &BoundarySignal, dict: &Dictionary, iters: usize, rule: Rule) -> Result<Decomposition> {
    let e0 = check_input(f, Some(dict), iters)?;
    let multiples = rule == Rule::Poafd && dict.kind() == DictKind::Szego;
    let fs = f.samples();
    let mut h = fs.to_vec();
    let mut state = GsState::new();
    let mut norm_sq = vec![0.0; dict.len()];
    let mut proj_sq = vec![0.0; dict.len()];
    let mut repeated: Vec<Repeated> = Vec::new();
    let mut element = vec![Complex64::new(0.0, 0.0); f.len()];
    let mut steps = Vec::with_capacity(iters);

    for k in 0..iters {
        let last = state.basis().last();
        let scanned: Vec<(f64, f64, f64)> = dict.scan(|_, e| {
            let n2 = if k == 0 { energy(e) } else { 0.0 };
            let p = last.map_or(0.0, |b| inner_slices(e, b).norm_sqr());
            (inner_slices(&h, e).norm(), n2, p)
        });
        let mut corr = Vec::with_capacity(dict.len());
        for (i, (c, n2, p)) in scanned.into_iter().enumerate() {
            if k == 0 {
                norm_sq[i] = n2;
            }
            proj_sq[i] += p;
            corr.push(c);
        }
        for r in &repeated {
            corr[r.idx] = inner_slices(&h, &r.samples).norm();
            norm_sq[r.idx] = energy(&r.samples);
            proj_sq[r.idx] = state.basis().iter().map(|b| inner_slices(&r.samples, b).norm_sqr()).sum();
        }
        let mut scores: Vec<f64> =
            (0..dict.len()).map(|i| score(rule, corr[i], norm_sq[i], proj_sq[i])).collect();

        let (idx, param) = loop {
            let idx = argmax(&scores).ok_or(Error::DictionaryExhausted)?;
            let param = match repeated.iter().find(|r| r.idx == idx) {
                Some(r) => {
                    element.copy_from_slice(&r.samples);
                    r.param
                }
                None => {
                    dict.element_into(idx, &mut element);
                    dict.params()[idx]
                }
            };
            match state.extend(param, &element) {
                Ok(_) => break (idx, param),
                Err(Error::LinearDependence { .. }) => scores[idx] = f64::NEG_INFINITY,
                Err(e) => return Err(e),
            }
        };

        let b = state.basis().last().expect("basis was just extended");
        let coeff = inner_slices(fs, b);
        let ch = inner_slices(&h, b);
        for (hj, bj) in h.iter_mut().zip(b) {
            *hj -= ch * bj;
        }
        steps.push(step(param, coeff, energy(&h), e0));

        if multiples {
            let next = ParamPoint { n: state.multiplicity(param.a), a: param.a };
            let samples = dict.eval_param(next)?;
            match repeated.iter_mut().find(|r| r.idx == idx) {
                Some(r) => {
                    r.param = next;
                    r.samples = samples;
                }
                None => repeated.push(Repeated { idx, param: next, samples }),
            }
        }
    }

    let approx: Vec<Complex64> = fs.iter().zip(&h).map(|(a, b)| a - b).collect();
    Ok(Decomposition {
        method: match rule {
            Rule::Oga => Method::Oga,
            Rule::Poafd => Method::Poafd,
        },
        dict: dict.kind(),
        steps,
        signal_energy: e0,
        approximation: BoundarySignal::new(approx)?,
    })
}

/// Correlation and retained energy fraction of one candidate against an
/// orthogonal remainder and an orthonormal system, for the candidate
/// rescaled to unit discrete norm `Ê = E/‖E‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateScore {
    pub param: ParamPoint,
    /// `|⟨h, Ê⟩|`
    pub corr: f64,
    /// `1 − Σ|⟨Ê, B_l⟩|²`
    pub defect: f64,
    /// `‖E‖²` on the grid.
    pub norm_sq: f64,
}

impl CandidateScore {
    pub fn is_admissible(&self) -> bool {
        self.defect >= DEPENDENCE_EPS
    }

    pub fn oga_score(&self) -> f64 {
        self.corr
    }

    pub fn poafd_score(&self) -> f64 {
        self.corr / self.defect.sqrt()
    }

    /// Energy removed from `h` when this candidate is orthogonalized and
    /// projected out.
    pub fn energy_gain(&self) -> f64 {
        self.corr * self.corr / self.defect
    }
}

/// Scores every dictionary candidate from scratch. On the Szegő dictionary
/// the candidate at an already selected `a` is the next multiple kernel.
pub fn candidate_scores(dict: &Dictionary, h: &[Complex64], state: &GsState) -> Result<Vec<CandidateScore>> {
    if h.len() != dict.n_samples() {
        return Err(Error::DimensionMismatch { left: h.len(), right: dict.n_samples() });
    }
    let szego = dict.kind() == DictKind::Szego;
    let measure = |param: ParamPoint, e: &[Complex64]| {
        let norm_sq = energy(e);
        let proj: f64 = state.basis().iter().map(|b| inner_slices(e, b).norm_sqr()).sum();
        CandidateScore {
            param,
            corr: if norm_sq > 0.0 { inner_slices(h, e).norm() / norm_sq.sqrt() } else { 0.0 },
            defect: if norm_sq > 0.0 { 1.0 - proj / norm_sq } else { 0.0 },
            norm_sq,
        }
    };
    let mut out: Vec<CandidateScore> = dict.scan(|i, e| measure(dict.params()[i], e));
    if szego {
        for (i, p) in dict.params().iter().enumerate() {
            let m = state.multiplicity(p.a);
            if m > 0 {
                let next = ParamPoint { n: m, a: p.a };
                out[i] = measure(next, &dict.eval_param(next)?);
            }
        }
    }
    Ok(out)
}
