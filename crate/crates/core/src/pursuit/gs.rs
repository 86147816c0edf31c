use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::ParamPoint;
use crate::signal::{energy, inner_slices, BoundarySignal};

/// Candidates whose orthogonal part keeps less than this fraction of their
/// energy are treated as dependent.
pub const DEPENDENCE_EPS: f64 = 1e-10;

/// The running orthonormal system with its selections.
#[derive(Debug, Clone, Default)]
pub struct GsState {
    basis: Vec<Vec<Complex64>>,
    selections: Vec<ParamPoint>,
    multiplicity: Vec<(Complex64, usize)>,
}

impl GsState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    pub fn selections(&self) -> &[ParamPoint] {
        &self.selections
    }

    /// How many times `a` has been selected so far.
    pub fn multiplicity(&self, a: Complex64) -> usize {
        self.multiplicity.iter().find(|(b, _)| *b == a).map_or(0, |&(_, m)| m)
    }

    /// `v` minus its projection on the basis (two passes of modified GS),
    /// together with the retained energy fraction `‖Qv‖²/‖v‖²`.
    pub fn orthogonalize(&self, v: &[Complex64]) -> (Vec<Complex64>, f64) {
        let mut q = v.to_vec();
        for _ in 0..2 {
            for b in &self.basis {
                let c = inner_slices(&q, b);
                for (qi, bi) in q.iter_mut().zip(b) {
                    *qi -= c * bi;
                }
            }
        }
        let e = energy(v);
        let defect = if e > 0.0 { energy(&q) / e } else { 0.0 };
        (q, defect)
    }

    /// Appends the normalized orthogonal part of `candidate`; returns the
    /// defect.
    pub fn extend(&mut self, param: ParamPoint, candidate: &[Complex64]) -> Result<f64> {
        if let Some(b) = self.basis.first() {
            if b.len() != candidate.len() {
                return Err(Error::DimensionMismatch { left: b.len(), right: candidate.len() });
            }
        }
        let (mut q, defect) = self.orthogonalize(candidate);
        if !(defect >= DEPENDENCE_EPS) {
            return Err(Error::LinearDependence { defect });
        }
        let s = 1.0 / energy(&q).sqrt();
        q.iter_mut().for_each(|v| *v *= s);
        self.basis.push(q);
        self.selections.push(param);
        match self.multiplicity.iter_mut().find(|(b, _)| *b == param.a) {
            Some((_, m)) => *m += 1,
            None => self.multiplicity.push((param.a, 1)),
        }
        Ok(defect)
    }

    /// `f` minus its orthogonal projection on the span.
    pub fn remainder(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.orthogonalize(f).0
    }

    /// Largest entry of `|G − I|` for the basis Gram matrix.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, bi) in self.basis.iter().enumerate() {
            for (j, bj) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner_slices(bi, bj) - target).norm());
            }
        }
        worst
    }
}

/// Orthonormalized `candidate` against `state`, with the defect
/// `1 − Σ|⟨candidate, B_l⟩|²` for unit candidates.
pub fn gs_extend(state: &GsState, candidate: &BoundarySignal) -> Result<(BoundarySignal, f64)> {
    let mut next = state.clone();
    let defect = next.extend(ParamPoint { n: 0, a: Complex64::new(0.0, 0.0) }, candidate.samples())?;
    let b = next.basis.pop().expect("extend pushed an element");
    Ok((BoundarySignal::new(b)?, defect))
}
