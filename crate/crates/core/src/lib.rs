//! Adaptive Fourier decomposition (AFD) and its matching-pursuit relatives
//! over the Szegő and complete Szegő dictionaries of the Hardy space H²(D).
//!
//! Signals are represented by their boundary values on a uniform grid of
//! the unit circle; every inner product is the Riemann sum
//! `(1/N) Σ f_j conj(g_j)`.

pub mod dictionary;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod laguerre;
pub mod nbest;
pub mod pursuit;
pub mod roots;
pub mod signal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
