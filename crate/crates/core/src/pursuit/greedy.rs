use num_complex::Complex64;

use super::{check_input, step, Decomposition, Method};
use crate::dictionary::{argmax, Dictionary};
use crate::error::{Error, Result};
use crate::signal::{energy, inner_slices, BoundarySignal};

/// Plain greedy algorithm: `g ← g − ⟨g, Ê⟩Ê` without re-projection, where
/// `Ê` is the selected element rescaled to unit discrete norm.
pub fn ga_run(f: &BoundarySignal, dict: &Dictionary, iters: usize) -> Result<Decomposition> {
    let e0 = check_input(f, Some(dict), iters)?;
    let mut g = f.samples().to_vec();
    let mut approx = vec![Complex64::new(0.0, 0.0); f.len()];
    let mut e = vec![Complex64::new(0.0, 0.0); f.len()];
    let mut steps = Vec::with_capacity(iters);
    for _ in 0..iters {
        let scores: Vec<f64> = dict.scan(|_, el| {
            let n2 = energy(el);
            if n2 > 0.0 {
                inner_slices(&g, el).norm() / n2.sqrt()
            } else {
                f64::NEG_INFINITY
            }
        });
        let idx = argmax(&scores).ok_or(Error::DictionaryExhausted)?;
        dict.element_into(idx, &mut e);
        let s = 1.0 / energy(&e).sqrt();
        e.iter_mut().for_each(|x| *x *= s);
        let c = inner_slices(&g, &e);
        for ((gj, aj), ej) in g.iter_mut().zip(approx.iter_mut()).zip(&e) {
            *gj -= c * ej;
            *aj += c * ej;
        }
        steps.push(step(dict.params()[idx], c, energy(&g), e0));
    }
    Ok(Decomposition {
        method: Method::Ga,
        dict: dict.kind(),
        steps,
        signal_energy: e0,
        approximation: BoundarySignal::new(approx)?,
    })
}
