//! Polar parameter grids, dictionary enumeration and evaluated elements.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{element_scale, multi_kernel_log_norm_sq, ParamPoint};
use crate::signal::{boundary_points, inner_slices, BoundarySignal};

/// Polar discretization `a = ((x−1)/X) e^{i2π(y−1)/Y}` of the disc together
/// with the multiplicity cap of the complete dictionary (`0` = plain Szegő).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub radial: usize,
    pub angular: usize,
    pub n_max: usize,
}

impl Default for ParamGrid {
    fn default() -> Self {
        Self { radial: 100, angular: 100, n_max: 8 }
    }
}

impl ParamGrid {
    pub fn new(radial: usize, angular: usize, n_max: usize) -> Result<Self> {
        if radial == 0 || angular == 0 {
            return Err(Error::DegenerateInput(format!("grid {radial}x{angular} is empty")));
        }
        Ok(Self { radial, angular, n_max })
    }

    /// Same grid restricted to the plain Szegő dictionary.
    pub fn szego(self) -> Self {
        Self { n_max: 0, ..self }
    }

    /// Distinct disc points in (x asc, y asc) order; the x = 1 ring is the
    /// single point `a = 0`.
    pub fn disc_points(&self) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(self.distinct_points());
        pts.push(Complex64::new(0.0, 0.0));
        for x in 2..=self.radial {
            let r = (x - 1) as f64 / self.radial as f64;
            for y in 1..=self.angular {
                let theta = 2.0 * PI * (y - 1) as f64 / self.angular as f64;
                pts.push(Complex64::from_polar(r, theta));
            }
        }
        pts
    }

    /// `(X−1)·Y + 1`
    pub fn distinct_points(&self) -> usize {
        (self.radial - 1) * self.angular + 1
    }

    pub fn candidate_count(&self) -> usize {
        (self.n_max + 1) * self.distinct_points()
    }
}

/// `XxY` as used on the command line.
impl FromStr for ParamGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (x, y) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Parse(format!("grid `{s}` is not of the form XxY")))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| Error::Parse(format!("grid `{s}`: {e}")));
        ParamGrid::new(parse(x)?, parse(y)?, ParamGrid::default().n_max)
    }
}

impl fmt::Display for ParamGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.radial, self.angular)
    }
}

/// All `(n, a)` with `n ≤ n_max` in (n asc, x asc, y asc) order.
pub fn enumerate(grid: &ParamGrid) -> Vec<ParamPoint> {
    let pts = grid.disc_points();
    (0..=grid.n_max).flat_map(|n| pts.iter().map(move |&a| ParamPoint { n, a })).collect()
}

/// An evaluated normalized element `e_{n,a}` on the boundary grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DictElement {
    pub param: ParamPoint,
    pub samples: BoundarySignal,
    /// `‖k_{n,a}‖` from the closed form.
    pub raw_norm: f64,
}

/// Writes `e_{n,a}(z_j)` into `out`.
///
/// Every evaluation path (streamed or cached) goes through this routine so
/// that element samples are bit-identical.
pub(crate) fn fill_element(p: ParamPoint, points: &[Complex64], scale: f64, out: &mut [Complex64]) {
    let ca = p.a.conj();
    for (o, &z) in out.iter_mut().zip(points) {
        let base = 1.0 / (1.0 - ca * z);
        let w = z * base;
        let mut v = base;
        for _ in 0..p.n {
            v *= w;
        }
        *o = v * scale;
    }
}

/// Evaluates `e_{n,a}` on an `n_samples` grid.
pub fn element(p: ParamPoint, n_samples: usize) -> Result<DictElement> {
    let points = boundary_points(n_samples);
    let scale = element_scale(p)?;
    let mut out = vec![Complex64::new(0.0, 0.0); n_samples];
    fill_element(p, &points, scale, &mut out);
    Ok(DictElement {
        param: p,
        samples: BoundarySignal::new(out)?,
        raw_norm: (0.5 * multi_kernel_log_norm_sq(p)?).exp(),
    })
}

/// Which dictionary a grid describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DictKind {
    Szego,
    Complete,
}

impl DictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DictKind::Szego => "szego",
            DictKind::Complete => "complete",
        }
    }
}

impl fmt::Display for DictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DictKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "szego" => Ok(DictKind::Szego),
            "complete" => Ok(DictKind::Complete),
            _ => Err(Error::Parse(format!("unknown dictionary `{s}` (expected szego or complete)"))),
        }
    }
}

/// A grid dictionary bound to a sample count, either streamed (elements
/// evaluated on demand) or cached (all elements precomputed).
#[derive(Debug, Clone)]
pub struct Dictionary {
    grid: ParamGrid,
    points: Vec<ParamPoint>,
    scales: Vec<f64>,
    boundary: Vec<Complex64>,
    cache: Option<Vec<Complex64>>,
}

impl Dictionary {
    pub fn new(grid: ParamGrid, n_samples: usize) -> Result<Self> {
        if n_samples < 2 {
            return Err(Error::DegenerateInput(format!("{n_samples} boundary samples")));
        }
        let points = enumerate(&grid);
        let scales = points.iter().map(|&p| element_scale(p)).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, points, scales, boundary: boundary_points(n_samples), cache: None })
    }

    /// Precomputes every element (memory: candidates × samples complex values).
    pub fn cached(mut self) -> Self {
        let n = self.boundary.len();
        let mut cache = vec![Complex64::new(0.0, 0.0); self.points.len() * n];
        cache.par_chunks_mut(n).enumerate().for_each(|(i, chunk)| {
            fill_element(self.points[i], &self.boundary, self.scales[i], chunk);
        });
        self.cache = Some(cache);
        self
    }

    pub fn is_cached(&self) -> bool {
        self.cache.is_some()
    }

    pub fn grid(&self) -> &ParamGrid {
        &self.grid
    }

    /// `n_max = 0` is the plain Szegő dictionary.
    pub fn kind(&self) -> DictKind {
        if self.grid.n_max == 0 {
            DictKind::Szego
        } else {
            DictKind::Complete
        }
    }

    pub fn params(&self) -> &[ParamPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_samples(&self) -> usize {
        self.boundary.len()
    }

    pub fn boundary(&self) -> &[Complex64] {
        &self.boundary
    }

    /// Samples of candidate `idx` written into `out`.
    pub fn element_into(&self, idx: usize, out: &mut [Complex64]) {
        match &self.cache {
            Some(cache) => {
                let n = self.boundary.len();
                out.copy_from_slice(&cache[idx * n..(idx + 1) * n]);
            }
            None => fill_element(self.points[idx], &self.boundary, self.scales[idx], out),
        }
    }

    pub fn element(&self, idx: usize) -> Result<DictElement> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_samples()];
        self.element_into(idx, &mut out);
        let p = self.points[idx];
        Ok(DictElement {
            param: p,
            samples: BoundarySignal::new(out)?,
            raw_norm: (0.5 * multi_kernel_log_norm_sq(p)?).exp(),
        })
    }

    /// Samples of an arbitrary (possibly off-grid) parameter on this
    /// dictionary's boundary grid.
    pub fn eval_param(&self, p: ParamPoint) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_samples()];
        fill_element(p, &self.boundary, element_scale(p)?, &mut out);
        Ok(out)
    }

    /// Index of an exact grid parameter, if present.
    pub fn index_of(&self, p: ParamPoint) -> Option<usize> {
        self.points.iter().position(|q| q.n == p.n && q.a == p.a)
    }

    /// Evaluates `score(idx, samples)` for every candidate in parallel.
    ///
    /// The result is index-aligned, so any reduction over it is independent
    /// of the worker count.
    pub fn scan<T, F>(&self, score: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &[Complex64]) -> T + Sync,
    {
        let n = self.n_samples();
        (0..self.len())
            .into_par_iter()
            .map_init(
                || vec![Complex64::new(0.0, 0.0); n],
                |buf, idx| {
                    self.element_into(idx, buf);
                    score(idx, buf)
                },
            )
            .collect()
    }
}

/// Index of the largest finite score; ties go to the smallest index, which
/// is the (n asc, x asc, y asc) enumeration order.
pub fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if !s.is_finite() {
            continue;
        }
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

/// `|⟨f, e_{n,a}⟩|` over the whole grid, in enumeration order.
#[derive(Debug, Clone, Serialize)]
pub struct BvcTable {
    pub entries: Vec<(ParamPoint, f64)>,
}

impl BvcTable {
    /// Largest score with order `n` on the ring of radius `r` (within 1e-12).
    pub fn max_on_ring(&self, n: usize, r: f64) -> Option<f64> {
        self.entries
            .iter()
            .filter(|(p, _)| p.n == n && (p.a.norm() - r).abs() < 1e-12)
            .map(|&(_, s)| s)
            .fold(None, |acc, s| Some(acc.map_or(s, |m: f64| m.max(s))))
    }

    /// Largest score over all orders on the ring of radius `r`.
    pub fn max_over_orders_on_ring(&self, r: f64) -> Option<f64> {
        self.entries
            .iter()
            .filter(|(p, _)| (p.a.norm() - r).abs() < 1e-12)
            .map(|&(_, s)| s)
            .fold(None, |acc, s| Some(acc.map_or(s, |m: f64| m.max(s))))
    }

    /// Largest score for order `n` over the whole disc grid.
    pub fn max_for_order(&self, n: usize) -> Option<f64> {
        self.entries
            .iter()
            .filter(|(p, _)| p.n == n)
            .map(|&(_, s)| s)
            .fold(None, |acc, s| Some(acc.map_or(s, |m: f64| m.max(s))))
    }
}

/// Full score table `|⟨f, e_{n,a}⟩|` used to display boundary-vanishing
/// decay in `n` and in `|a|`.
pub fn bvc_probe(f: &BoundarySignal, grid: &ParamGrid) -> Result<BvcTable> {
    let dict = Dictionary::new(*grid, f.len())?;
    let fs = f.samples();
    let scores: Vec<f64> = dict.scan(|_, e| inner_slices(fs, e).norm());
    Ok(BvcTable { entries: dict.params().iter().copied().zip(scores).collect() })
}
