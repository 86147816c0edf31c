//! Matching-pursuit engines sharing one Gram–Schmidt core.
//!
//! All engines scan the dictionary in parallel and reduce serially with
//! [`argmax`](crate::dictionary::argmax), so results do not depend on the
//! worker count.

mod afd;
mod greedy;
mod gs;
mod poafd;
mod unwind;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use crate::dictionary::DictKind;
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::kernels::ParamPoint;
use crate::signal::BoundarySignal;

pub use afd::afd_run;
pub use greedy::ga_run;
pub use gs::{gs_extend, GsState, DEPENDENCE_EPS};
pub use poafd::{candidate_scores, oga_run, poafd_run, CandidateScore};
pub use unwind::{unwind_run, UnwindConfig, UnwindSelection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ga,
    Oga,
    Afd,
    Poafd,
    Unwinding,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ga => "ga",
            Method::Oga => "oga",
            Method::Afd => "afd",
            Method::Poafd => "poafd",
            Method::Unwinding => "unwinding",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ga" => Ok(Method::Ga),
            "oga" => Ok(Method::Oga),
            "afd" => Ok(Method::Afd),
            "poafd" => Ok(Method::Poafd),
            "unwinding" | "unwind" => Ok(Method::Unwinding),
            _ => Err(Error::Parse(format!("unknown method `{s}`"))),
        }
    }
}

/// Extra bookkeeping of an unwinding step.
#[derive(Debug, Clone, PartialEq)]
pub struct UnwindInfo {
    /// Zeros of the remainder that were factored out before the step.
    pub inner_zeros: Vec<Complex64>,
    /// Root finding failed and the step fell back to a plain Szegő step.
    pub root_failure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub param: ParamPoint,
    pub coeff: Complex64,
    pub residual_energy: f64,
    pub relative_error: f64,
    pub unwinding: Option<UnwindInfo>,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub method: Method,
    pub dict: DictKind,
    pub steps: Vec<Step>,
    pub signal_energy: f64,
    approximation: BoundarySignal,
}

impl Decomposition {
    /// The partial sum after the last step.
    pub fn reconstruct(&self) -> &BoundarySignal {
        &self.approximation
    }

    pub fn relative_errors(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.relative_error).collect()
    }

    pub fn final_relative_error(&self) -> f64 {
        self.steps.last().map_or(1.0, |s| s.relative_error)
    }

    pub fn params(&self) -> Vec<ParamPoint> {
        self.steps.iter().map(|s| s.param).collect()
    }
}

/// Dispatches to the engine for `method`.
pub fn run(
    method: Method,
    f: &BoundarySignal,
    dict: &Dictionary,
    iters: usize,
    unwind: &UnwindConfig,
) -> Result<Decomposition> {
    match method {
        Method::Ga => ga_run(f, dict, iters),
        Method::Oga => oga_run(f, dict, iters),
        Method::Afd => afd_run(f, dict, iters),
        Method::Poafd => poafd_run(f, dict, iters),
        Method::Unwinding => unwind_run(f, iters, unwind),
    }
}

fn check_input(f: &BoundarySignal, dict: Option<&Dictionary>, iters: usize) -> Result<f64> {
    if iters == 0 {
        return Err(Error::DegenerateInput("iteration count must be at least 1".into()));
    }
    if let Some(d) = dict {
        if d.n_samples() != f.len() {
            return Err(Error::DimensionMismatch { left: f.len(), right: d.n_samples() });
        }
    }
    let energy = f.energy();
    if energy == 0.0 {
        return Err(Error::DegenerateInput("signal has zero energy".into()));
    }
    Ok(energy)
}

fn step(param: ParamPoint, coeff: Complex64, residual_energy: f64, signal_energy: f64) -> Step {
    Step {
        param,
        coeff,
        residual_energy,
        relative_error: (residual_energy / signal_energy).sqrt(),
        unwinding: None,
    }
}

#[cfg(test)]
mod tests;
