use num_complex::Complex64;

use super::{check_input, step, Decomposition, DictKind, Method};
use crate::dictionary::{argmax, Dictionary};
use crate::error::{Error, Result};
use crate::kernels::{mobius, ParamPoint};
use crate::signal::{inner_slices, BoundarySignal};

/// Core AFD through the generalized backward shift
/// `f_{k+1} = (f_k − ⟨f_k, e_a⟩e_a)·(1 − āz)/(z − a)` on the boundary samples.
pub fn afd_run(f: &BoundarySignal, dict: &Dictionary, iters: usize) -> Result<Decomposition> {
    let e0 = check_input(f, Some(dict), iters)?;
    if dict.kind() != DictKind::Szego {
        return Err(Error::Spec("core AFD runs on the Szegő dictionary only".into()));
    }
    let zs = dict.boundary();
    let fs = f.samples();
    let mut fk = fs.to_vec();
    let mut blaschke = vec![Complex64::new(1.0, 0.0); f.len()];
    let mut approx = vec![Complex64::new(0.0, 0.0); f.len()];
    let mut e = vec![Complex64::new(0.0, 0.0); f.len()];
    let mut steps = Vec::with_capacity(iters);
    for _ in 0..iters {
        let scores: Vec<f64> = dict.scan(|_, el| inner_slices(&fk, el).norm());
        let idx = argmax(&scores).ok_or(Error::DictionaryExhausted)?;
        let a = dict.params()[idx].a;
        dict.element_into(idx, &mut e);
        let c = inner_slices(&fk, &e);
        for j in 0..fk.len() {
            let tau = mobius(a, zs[j]);
            approx[j] += c * e[j] * blaschke[j];
            blaschke[j] *= tau;
            fk[j] = (fk[j] - c * e[j]) / tau;
        }
        let residual: Vec<Complex64> = fs.iter().zip(&approx).map(|(x, y)| x - y).collect();
        steps.push(step(ParamPoint { n: 0, a }, c, crate::signal::energy(&residual), e0));
    }
    Ok(Decomposition {
        method: Method::Afd,
        dict: DictKind::Szego,
        steps,
        signal_energy: e0,
        approximation: BoundarySignal::new(approx)?,
    })
}

#[cfg(test)]
/// The reduced remainders `f_1 = f, f_2, …` of an AFD run, for inspecting the
/// backward shift.
pub(crate) fn reduced_remainders(f: &BoundarySignal, dict: &Dictionary, params: &[Complex64]) -> Vec<Vec<Complex64>> {
    let zs = dict.boundary();
    let mut out = vec![f.samples().to_vec()];
    for &a in params {
        let prev = out.last().expect("non-empty");
        let el = dict.eval_param(ParamPoint { n: 0, a }).expect("grid parameter");
        let c = inner_slices(prev, &el);
        let next = prev.iter().zip(&el).zip(zs).map(|((p, e), &z)| (p - c * e) / mobius(a, z)).collect();
        out.push(next);
    }
    out
}
