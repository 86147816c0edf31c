//! Boundary-sampled signals, the discrete H² inner product and the
//! analytic-signal construction for real data.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Angle of the `j`-th grid point (zero based) on an `n` point grid.
pub fn grid_angle(n: usize, j: usize) -> f64 {
    2.0 * PI * j as f64 / n as f64
}

/// The `n` boundary points `e^{i t_j}`.
pub fn boundary_points(n: usize) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::from_polar(1.0, grid_angle(n, j))).collect()
}

/// A signal sampled at `t_j = 2πj/N`, `j = 0..N-1`, on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySignal {
    samples: Vec<Complex64>,
}

impl BoundarySignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::DegenerateInput(format!(
                "a boundary signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        Ok(Self { samples })
    }

    /// Samples `f(e^{i t_j})` of a function given on the closed disc.
    pub fn from_fn(n: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(boundary_points(n).into_iter().map(f).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn inner(&self, other: &BoundarySignal) -> Result<Complex64> {
        inner(self, other)
    }

    /// `(1/N) Σ |f_j|²`
    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> BoundarySignal {
        BoundarySignal { samples: self.samples.iter().map(|s| s * c).collect() }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: Complex64, other: &BoundarySignal) -> Result<()> {
        check_len(self.len(), other.len())?;
        for (s, o) in self.samples.iter_mut().zip(&other.samples) {
            *s += c * o;
        }
        Ok(())
    }

    /// Projection onto the non-negative frequencies strictly below Nyquist,
    /// i.e. the grid version of the Szegő projection L² → H².
    pub fn hardy_projection(&self) -> BoundarySignal {
        let mut coeffs = FourierCoeffs::forward(self);
        let n = coeffs.coeffs.len();
        for (k, c) in coeffs.coeffs.iter_mut().enumerate() {
            if 2 * k >= n {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        coeffs.inverse()
    }

    /// Reads the `t,re,im` or `re,im` CSV format.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        let has_t = match cols.as_slice() {
            ["t", "re", "im"] => true,
            ["re", "im"] => false,
            _ => {
                return Err(Error::Parse(format!(
                    "expected header `t,re,im` or `re,im`, found `{}`",
                    cols.join(",")
                )))
            }
        };
        let mut ts = Vec::new();
        let mut samples = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .ok_or_else(|| Error::Parse(format!("row {}: missing column {}", line + 1, i)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))
            };
            let off = usize::from(has_t);
            if has_t {
                ts.push(field(0)?);
            }
            samples.push(Complex64::new(field(off)?, field(off + 1)?));
        }
        if has_t {
            let n = ts.len();
            for (j, t) in ts.iter().enumerate() {
                if (t - grid_angle(n, j)).abs() > 1e-6 {
                    return Err(Error::Parse(format!(
                        "row {}: t = {t} is not on the uniform grid 2πj/{n}",
                        j + 1
                    )));
                }
            }
        }
        Self::new(samples)
    }

    /// Writes the `t,re,im` CSV format.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["t", "re", "im"])?;
        let n = self.len();
        for (j, s) in self.samples.iter().enumerate() {
            wtr.write_record(&[
                grid_angle(n, j).to_string(),
                s.re.to_string(),
                s.im.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

impl<'a> Sub for &'a BoundarySignal {
    type Output = BoundarySignal;

    /// Panics on length mismatch; use [`BoundarySignal::axpy`] for a checked version.
    fn sub(self, rhs: Self) -> BoundarySignal {
        assert_eq!(self.len(), rhs.len(), "length mismatch in signal subtraction");
        BoundarySignal { samples: self.samples.iter().zip(&rhs.samples).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Add for &'a BoundarySignal {
    type Output = BoundarySignal;

    fn add(self, rhs: Self) -> BoundarySignal {
        assert_eq!(self.len(), rhs.len(), "length mismatch in signal addition");
        BoundarySignal { samples: self.samples.iter().zip(&rhs.samples).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Mul for &'a BoundarySignal {
    type Output = BoundarySignal;

    /// Pointwise product.
    fn mul(self, rhs: Self) -> BoundarySignal {
        assert_eq!(self.len(), rhs.len(), "length mismatch in signal product");
        BoundarySignal { samples: self.samples.iter().zip(&rhs.samples).map(|(a, b)| a * b).collect() }
    }
}

fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// `(1/N) Σ f_j conj(g_j)` on raw sample slices of equal length.
pub(crate) fn inner_slices(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in f.iter().zip(g) {
        acc += a * b.conj();
    }
    acc / f.len() as f64
}

pub(crate) fn energy(samples: &[Complex64]) -> f64 {
    samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64
}

/// Discrete H² inner product `(1/N) Σ f_j conj(g_j)`.
pub fn inner(f: &BoundarySignal, g: &BoundarySignal) -> Result<Complex64> {
    check_len(f.len(), g.len())?;
    Ok(inner_slices(&f.samples, &g.samples))
}

/// `‖f − approx‖ / ‖f‖` under the discrete norm.
pub fn relative_error(f: &BoundarySignal, approx: &BoundarySignal) -> Result<f64> {
    check_len(f.len(), approx.len())?;
    let norm = f.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateInput("relative error of a zero-norm signal".into()));
    }
    let diff: f64 = f
        .samples
        .iter()
        .zip(&approx.samples)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / f.len() as f64;
    Ok(diff.sqrt() / norm)
}

/// Discrete Fourier coefficients `c_k = (1/N) Σ_j f_j e^{-i k t_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    pub coeffs: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn forward(signal: &BoundarySignal) -> Self {
        let n = signal.len();
        let mut buf = signal.samples.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Self { coeffs: buf }
    }

    pub fn inverse(&self) -> BoundarySignal {
        let mut buf = self.coeffs.clone();
        FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
        BoundarySignal { samples: buf }
    }

    /// `Σ |c_k|²`
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Gabor analytic signal `g⁺ = ½(g + iHg + c₀)` of real samples.
///
/// On the grid this keeps `c₀` and the positive frequencies, halves the
/// Nyquist bin of an even-length grid and drops the negative frequencies,
/// so that `2 Re g⁺ − c₀ = g`.
pub fn analytic_signal(g: &[f64]) -> Result<BoundarySignal> {
    let signal = BoundarySignal::new(g.iter().map(|&x| Complex64::new(x, 0.0)).collect())?;
    let mut coeffs = FourierCoeffs::forward(&signal);
    let n = coeffs.coeffs.len();
    for (k, c) in coeffs.coeffs.iter_mut().enumerate() {
        if 2 * k == n {
            *c *= 0.5;
        } else if 2 * k > n {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    Ok(coeffs.inverse())
}
