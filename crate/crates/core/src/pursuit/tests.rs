use num_complex::Complex64;

use super::afd::reduced_remainders;
use super::unwind::interior_zeros;
use super::*;
use crate::dictionary::{element, ParamGrid};
use crate::experiments::ToySignalSpec;
use crate::kernels::{tm_element, BlaschkeSpec};
use crate::signal::{inner_slices, FourierCoeffs};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn dict(radial: usize, angular: usize, n_max: usize, n: usize) -> Dictionary {
    Dictionary::new(ParamGrid::new(radial, angular, n_max).unwrap(), n).unwrap()
}

fn f1() -> BoundarySignal {
    ToySignalSpec::f1().generate(100).unwrap()
}

#[test]
fn gs_extend_examples() {
    let n = 512;
    let e0 = element(ParamPoint::new(0, c(0.0, 0.0)).unwrap(), n).unwrap().samples;
    let e5 = element(ParamPoint::new(0, c(0.5, 0.0)).unwrap(), n).unwrap().samples;
    let empty = GsState::new();
    let (b, defect) = gs_extend(&empty, &e0).unwrap();
    assert_eq!(defect, 1.0);
    assert!((&b - &e0).norm() < 1e-15);

    let mut state = GsState::new();
    state.extend(ParamPoint::new(0, c(0.0, 0.0)).unwrap(), e0.samples()).unwrap();
    let (b, defect) = gs_extend(&state, &e5).unwrap();
    assert!((defect - 0.25).abs() < 1e-12);
    assert!(b.inner(&e0).unwrap().norm() < 1e-10);
    assert!((b.norm() - 1.0).abs() < 1e-12);

    let dep = e0.scale(c(0.0, 2.0));
    assert!(matches!(gs_extend(&state, &dep), Err(Error::LinearDependence { .. })));
}

#[test]
fn exact_dictionary_member_is_found_in_one_step() {
    let d = dict(10, 16, 0, 128);
    let b = d.params()[37];
    let e = element(b, 128).unwrap().samples;
    let f = e.scale(c(0.7, -0.2));
    for run in [ga_run(&f, &d, 1), oga_run(&f, &d, 1), poafd_run(&f, &d, 1), afd_run(&f, &d, 1)] {
        let run = run.unwrap();
        assert_eq!(run.steps[0].param, b);
        assert!(run.final_relative_error() < 1e-12, "{:?}", run.method);
    }
}

#[test]
fn span_of_two_elements_is_recovered() {
    // e_0 and e_{3,a} are orthogonal, and e_0 dominates the first selection
    let d = dict(10, 16, 3, 128);
    let p = [ParamPoint::new(0, c(0.0, 0.0)).unwrap(), d.params()[3 * 145 + 4 * 16 + 3]];
    let mut f = element(p[0], 128).unwrap().samples;
    f.axpy(c(0.3, 0.4), &element(p[1], 128).unwrap().samples).unwrap();
    for run in [oga_run(&f, &d, 2).unwrap(), poafd_run(&f, &d, 2).unwrap()] {
        assert_eq!(run.params(), p.to_vec(), "{:?}", run.method);
        assert!(run.final_relative_error() < 1e-8, "{:?}", run.method);
    }
}

#[test]
fn energy_identities_and_monotone_residuals() {
    let f = f1();
    for n_max in [0, 8] {
        let d = dict(100, 100, n_max, 100);
        for run in [oga_run(&f, &d, 6).unwrap(), poafd_run(&f, &d, 6).unwrap()] {
            let mut captured = 0.0;
            for s in &run.steps {
                captured += s.coeff.norm_sqr();
                let total = captured + s.residual_energy;
                assert!((total - run.signal_energy).abs() < 1e-8 * run.signal_energy, "{:?}", run.method);
            }
            assert!(run.steps.windows(2).all(|w| w[1].residual_energy <= w[0].residual_energy + 1e-14));
        }
        let ga = ga_run(&f, &d, 12).unwrap();
        assert!(ga.steps.windows(2).all(|w| w[1].residual_energy <= w[0].residual_energy + 1e-14));
    }
    // the grid norm of e_a differs from 1 by about 2|a|^N, which bounds the slack
    let afd = afd_run(&f, &dict(100, 100, 0, 100), 4).unwrap();
    let mut captured = 0.0;
    let mut slack = 1e-10;
    for s in &afd.steps {
        captured += s.coeff.norm_sqr();
        slack += 4.0 * s.param.a.norm().powi(100);
        assert!((captured + s.residual_energy - afd.signal_energy).abs() < slack * afd.signal_energy);
    }
}

#[test]
fn ga_remainder_is_orthogonal_to_last_selection() {
    let f = f1();
    let d = dict(100, 100, 8, 100);
    let run = ga_run(&f, &d, 4).unwrap();
    let mut g = f.samples().to_vec();
    for s in &run.steps {
        let e = element(s.param, 100).unwrap().samples;
        let e = e.scale(Complex64::from(1.0 / e.norm()));
        let c = inner_slices(&g, e.samples());
        assert!((c - s.coeff).norm() < 1e-12);
        g.iter_mut().zip(e.samples()).for_each(|(x, y)| *x -= c * y);
        assert!(inner_slices(&g, e.samples()).norm() < 1e-12);
    }
}

#[test]
fn afd_coefficients_match_tm_projections() {
    let f = f1();
    let d = dict(100, 100, 0, 100);
    let run = afd_run(&f, &d, 3).unwrap();
    let zeros: Vec<Complex64> = run.steps.iter().map(|s| s.param.a).collect();
    let spec = BlaschkeSpec::new(zeros.clone()).unwrap();
    let remainders = reduced_remainders(&f, &d, &zeros);
    for k in 1..=3 {
        let bk = BoundarySignal::from_fn(100, |z| tm_element(&spec, k, z).unwrap()).unwrap();
        let tm = f.inner(&bk).unwrap();
        let ea = element(ParamPoint::new(0, zeros[k - 1]).unwrap(), 100).unwrap().samples;
        let shifted = inner_slices(&remainders[k - 1], ea.samples());
        assert!((shifted - tm).norm() < 1e-6, "k={k}");
        assert!((run.steps[k - 1].coeff - shifted).norm() < 1e-12);
    }
}

#[test]
fn backward_shift_stays_in_the_hardy_space() {
    // at N = 1024 the aliased tail of f1 is far below the tolerance
    let n = 1024;
    let f = ToySignalSpec::f1().generate(n).unwrap();
    let d = dict(30, 30, 0, n);
    let run = afd_run(&f, &d, 3).unwrap();
    let zeros: Vec<Complex64> = run.steps.iter().map(|s| s.param.a).collect();
    for r in &reduced_remainders(&f, &d, &zeros)[1..] {
        let spec = FourierCoeffs::forward(&BoundarySignal::new(r.clone()).unwrap()).coeffs;
        let neg: f64 = spec[n / 2 + 1..].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let all: f64 = spec.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!(neg < 1e-6 * all, "{}", neg / all);
    }
}

#[test]
fn afd_agrees_with_poafd_on_szego() {
    let f = f1();
    let d = dict(100, 100, 0, 100);
    let afd = afd_run(&f, &d, 3).unwrap();
    let poafd = poafd_run(&f, &d, 3).unwrap();
    assert!((afd.final_relative_error() - poafd.final_relative_error()).abs() < 5e-3);
    assert!(matches!(afd_run(&f, &dict(10, 10, 2, 100), 1), Err(Error::Spec(_))));
}

#[test]
fn complete_poafd_decays_on_f1() {
    let f = f1();
    let run = poafd_run(&f, &dict(100, 100, 8, 100), 30).unwrap();
    assert!(run.final_relative_error() < 1e-2, "{}", run.final_relative_error());
}

#[test]
fn szego_poafd_reuses_parameters_as_multiple_kernels() {
    // the one-point grid {0} makes POAFD walk through z^0, z^1, z^2
    let f = BoundarySignal::from_fn(64, |z| 1.0 + 2.0 * z + c(0.0, 3.0) * z * z).unwrap();
    let run = poafd_run(&f, &dict(1, 1, 0, 64), 3).unwrap();
    let orders: Vec<usize> = run.steps.iter().map(|s| s.param.n).collect();
    assert_eq!(orders, vec![0, 1, 2]);
    assert!(run.steps.iter().all(|s| s.param.a == c(0.0, 0.0)));
    assert!(run.final_relative_error() < 1e-12);
}

#[test]
fn hm_rate_bound() {
    let d = dict(20, 16, 3, 128);
    let picks = [(5, c(0.6, -0.3)), (77, c(-0.4, 0.0)), (300, c(0.1, 0.9)), (900, c(0.25, 0.0))];
    let mut f = BoundarySignal::zeros(128).unwrap();
    let mut m = 0.0;
    for &(i, k) in &picks {
        f.axpy(k, &element(d.params()[i], 128).unwrap().samples).unwrap();
        m += k.norm();
    }
    let norm = f.norm();
    for run in [ga_run(&f, &d, 8).unwrap(), oga_run(&f, &d, 8).unwrap(), poafd_run(&f, &d, 8).unwrap()] {
        for (k, s) in run.steps.iter().enumerate() {
            let residual = s.relative_error * norm;
            assert!(residual <= m / ((k + 1) as f64).sqrt() + 1e-8, "{:?} step {}", run.method, k + 1);
        }
    }
}

#[test]
fn score_domination_over_the_grid() {
    let f = f1();
    for n_max in [0, 8] {
        let d = dict(40, 40, n_max, 100);
        let run = oga_run(&f, &d, 3).unwrap();
        let mut state = GsState::new();
        for s in &run.steps {
            state.extend(s.param, &d.eval_param(s.param).unwrap()).unwrap();
        }
        assert!(state.gram_deviation() < 1e-8);
        let h = state.remainder(f.samples());
        for s in candidate_scores(&d, &h, &state).unwrap() {
            if s.is_admissible() {
                assert!(s.poafd_score() >= s.oga_score());
            }
        }
    }
}

#[test]
fn unwinding_pure_inner_function() {
    let f = BoundarySignal::from_fn(64, |z| z.powu(3)).unwrap();
    let run = unwind_run(&f, 1, &UnwindConfig::default()).unwrap();
    let info = run.steps[0].unwinding.as_ref().unwrap();
    assert_eq!(info.inner_zeros.len(), 3);
    assert!(!info.root_failure);
    assert!(run.final_relative_error() < 1e-12);
}

#[test]
fn unwinding_outer_signal_is_an_afd_step() {
    // no zeros in the disc
    let f = BoundarySignal::from_fn(100, |z| (z - c(1.8, 0.4)) * (z + c(0.0, 2.5))).unwrap();
    let (zeros, failed) = interior_zeros(f.samples(), &UnwindConfig::default()).unwrap();
    assert!(zeros.is_empty() && !failed);
    let grid = ParamGrid::new(30, 30, 0).unwrap();
    let cfg = UnwindConfig { selection: UnwindSelection::Maximal, grid, ..UnwindConfig::default() };
    let u = unwind_run(&f, 1, &cfg).unwrap();
    let a = afd_run(&f, &Dictionary::new(grid, 100).unwrap(), 1).unwrap();
    assert_eq!(u.steps[0].param, a.steps[0].param);
    assert!((u.steps[0].coeff - a.steps[0].coeff).norm() < 1e-14);
    assert!((u.final_relative_error() - a.final_relative_error()).abs() < 1e-12);
}

#[test]
fn unwinding_recovers_interior_zeros() {
    let w = [c(0.3, 0.2), c(-0.5, 0.1)];
    let f = BoundarySignal::from_fn(128, |z| (z - w[0]) * (z - w[1]) * (1.0 + 0.2 * z)).unwrap();
    let (zeros, _) = interior_zeros(f.samples(), &UnwindConfig::default()).unwrap();
    assert_eq!(zeros.len(), 2);
    for t in w {
        assert!(zeros.iter().any(|z| (z - t).norm() < 1e-10));
    }
}

#[test]
fn input_validation() {
    let f = f1();
    let d = dict(5, 5, 0, 64);
    assert!(matches!(ga_run(&f, &d, 1), Err(Error::DimensionMismatch { .. })));
    let d = dict(5, 5, 0, 100);
    assert!(matches!(poafd_run(&f, &d, 0), Err(Error::DegenerateInput(_))));
    let zero = BoundarySignal::zeros(100).unwrap();
    assert!(matches!(oga_run(&zero, &d, 1), Err(Error::DegenerateInput(_))));
    assert_eq!("POAFD".parse::<Method>().unwrap(), Method::Poafd);
    assert!("omp".parse::<Method>().is_err());
}
