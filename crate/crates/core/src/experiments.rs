//! Toy signals and the experiment runners behind the `experiment` and
//! `denoise` commands.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dictionary::{DictKind, Dictionary, ParamGrid};
use crate::error::{Error, Result};
use crate::kernels::{mobius, szego_normalized};
use crate::nbest::{refine, NTuple};
use crate::pursuit::{ga_run, oga_run, poafd_run, unwind_run, Decomposition, UnwindConfig};
use crate::signal::{grid_angle, relative_error, BoundarySignal};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    /// `Σ c_k e_{b_k} Π_{l<k} τ_{b_l}` from `(b_k, c_k)` pairs.
    BlaschkeForm { pairs: Vec<(Complex64, Complex64)> },
    /// `(z⁴ − d₁)(d₂ − z)⁵ / ((d₃ − z)³ (d₄ − z)²)`
    Rational { d: [Complex64; 4] },
    /// `e^{i t²/π}`
    Chirp,
}

/// Additive complex Gaussian noise; real and imaginary parts are
/// independent with standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToySignalSpec {
    pub kind: SignalKind,
    pub noise: Option<NoiseSpec>,
}

impl ToySignalSpec {
    pub fn blaschke_form(pairs: Vec<(Complex64, Complex64)>) -> Self {
        Self { kind: SignalKind::BlaschkeForm { pairs }, noise: None }
    }

    /// Five-term signal of the first experiment.
    pub fn f1() -> Self {
        Self::blaschke_form(vec![
            (c(-0.4750, 0.3050), c(-0.5861, -0.04445)),
            (c(-0.1800, 0.7150), c(0.2428, -0.6878)),
            (c(0.2600, -0.7300), c(0.4423, -0.3309)),
            (c(0.5400, 0.3600), c(-0.2703, -0.8217)),
            (c(-0.4850, -0.2150), c(-0.8085, 0.3774)),
        ])
    }

    pub fn f2() -> Self {
        Self::blaschke_form(vec![
            (c(-0.5850, 0.2930), c(-0.3861, -0.0515)),
            (c(0.4806, 0.2513), c(-0.2802, -0.7235)),
            (c(0.2505, -0.6823), c(0.4505, -0.4325)),
            (c(-0.2005, 0.6950), c(0.2539, -0.7136)),
            (c(-0.4512, -0.1825), c(-0.7562, 0.4265)),
        ])
    }

    /// Four terms, as listed for the n-Best experiment.
    pub fn f3() -> Self {
        Self::blaschke_form(vec![
            (c(-0.4750, 0.3050), c(-0.5861, -0.4444)),
            (c(0.3600, -0.6300), c(0.4423, -0.3308)),
            (c(0.5400, 0.4600), c(-0.2702, -0.8217)),
            (c(-0.4850, -0.2150), c(-0.7085, 0.3773)),
        ])
    }

    pub fn f4() -> Self {
        Self {
            kind: SignalKind::Rational {
                d: [c(3.1017, -2.5305), c(-6.1205, 2.3674), c(-5.4678, -2.2502), c(-4.4217, 7.6913)],
            },
            noise: None,
        }
    }

    pub fn chirp() -> Self {
        Self { kind: SignalKind::Chirp, noise: None }
    }

    pub fn with_noise(mut self, sigma: f64, seed: u64) -> Self {
        self.noise = Some(NoiseSpec { sigma, seed });
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SignalKind::BlaschkeForm { pairs } => {
                if let Some((b, _)) = pairs.iter().find(|(b, _)| !(b.norm() < 1.0)) {
                    return Err(Error::Spec(format!("Blaschke-form parameter {b} is not inside the disc")));
                }
            }
            SignalKind::Rational { d } => {
                if let Some(x) = d.iter().find(|x| !(x.norm() > 1.0)) {
                    return Err(Error::Spec(format!("rational parameter {x} must lie outside the closed disc")));
                }
            }
            SignalKind::Chirp => {}
        }
        if let Some(n) = self.noise {
            if !(n.sigma >= 0.0 && n.sigma.is_finite()) {
                return Err(Error::Spec(format!("noise sigma {} must be finite and non-negative", n.sigma)));
            }
        }
        Ok(())
    }

    /// Samples on an `n`-point boundary grid, noise included.
    pub fn generate(&self, n: usize) -> Result<BoundarySignal> {
        self.validate()?;
        let clean = match &self.kind {
            SignalKind::BlaschkeForm { pairs } => BoundarySignal::from_fn(n, |z| {
                let mut prod = c(1.0, 0.0);
                let mut acc = c(0.0, 0.0);
                for &(b, k) in pairs {
                    acc += k * szego_normalized(b, z).expect("validated") * prod;
                    prod *= mobius(b, z);
                }
                acc
            })?,
            SignalKind::Rational { d } => BoundarySignal::from_fn(n, |z| {
                (z.powu(4) - d[0]) * (d[1] - z).powu(5) / ((d[2] - z).powu(3) * (d[3] - z).powu(2))
            })?,
            SignalKind::Chirp => {
                let samples = (0..n)
                    .map(|j| {
                        let t = grid_angle(n, j);
                        Complex64::from_polar(1.0, t * t / std::f64::consts::PI)
                    })
                    .collect();
                BoundarySignal::new(samples)?
            }
        };
        match self.noise {
            Some(noise) if noise.sigma > 0.0 => add_noise(&clean, noise),
            _ => Ok(clean),
        }
    }
}

/// `f` plus seeded complex Gaussian noise.
pub fn add_noise(f: &BoundarySignal, noise: NoiseSpec) -> Result<BoundarySignal> {
    let dist = Normal::new(0.0, noise.sigma).map_err(|e| Error::Spec(format!("noise: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let samples = f
        .samples()
        .iter()
        .map(|&s| {
            let re = dist.sample(&mut rng);
            let im = dist.sample(&mut rng);
            s + c(re, im)
        })
        .collect();
    BoundarySignal::new(samples)
}

/// Root mean square of the samples, `‖f‖` under the discrete norm.
pub fn rms(f: &BoundarySignal) -> f64 {
    f.norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Ex1,
    Ex3,
    Ex4,
    Ex5,
    Ex6,
}

impl ExperimentId {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Ex1 => "ex1",
            ExperimentId::Ex3 => "ex3",
            ExperimentId::Ex4 => "ex4",
            ExperimentId::Ex5 => "ex5",
            ExperimentId::Ex6 => "ex6",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ex1" => Ok(ExperimentId::Ex1),
            "ex3" => Ok(ExperimentId::Ex3),
            "ex4" => Ok(ExperimentId::Ex4),
            "ex5" => Ok(ExperimentId::Ex5),
            "ex6" => Ok(ExperimentId::Ex6),
            _ => Err(Error::Parse(format!("unknown experiment `{s}` (expected ex1, ex3, ex4, ex5 or ex6)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Grid of the complete dictionary; the Szegő runs use the same grid
    /// with `n_max = 0`.
    pub grid: ParamGrid,
    pub samples: usize,
    pub seed: u64,
    /// Absolute noise level for EX6; `None` means `0.2 · RMS` of the chirp.
    pub sigma: Option<f64>,
    /// POAFD iterations of the denoising run.
    pub denoise_iters: usize,
    /// Cycle cap for n-Best runs whose cycle count the tables leave open.
    pub max_cycles: usize,
    pub tol: f64,
    /// Precompute dictionary elements instead of streaming them.
    pub cache: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: ParamGrid::default(),
            samples: 100,
            seed: 42,
            sigma: None,
            denoise_iters: 16,
            max_cycles: 50,
            tol: 1e-6,
            cache: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub method: String,
    pub dict: DictKind,
    pub iters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub rows: Vec<ReportRow>,
}

/// Boundary data for one plot: the signal and an approximation of it.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub label: String,
    pub signal: BoundarySignal,
    pub approx: BoundarySignal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub id: String,
    pub config: Option<ExperimentConfig>,
    pub tables: Vec<Table>,
    #[serde(skip)]
    pub plots: Vec<PlotData>,
    /// Named scalars besides the tables (noise level, seed, …).
    pub values: Vec<(String, f64)>,
    /// Files written by [`emit_report`], relative to the output directory.
    pub files: Vec<String>,
}

impl ExperimentReport {
    pub fn empty(id: &str) -> Self {
        Self { id: id.to_string(), config: None, tables: Vec::new(), plots: Vec::new(), values: Vec::new(), files: Vec::new() }
    }

    pub fn rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.tables.iter().flat_map(|t| t.rows.iter())
    }

    /// First row matching method and dictionary.
    pub fn find(&self, method: &str, dict: DictKind) -> Option<&ReportRow> {
        self.rows().find(|r| r.method == method && r.dict == dict)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }
}

fn row(method: &str, dict: DictKind, iters: usize, cycles: Option<usize>, err: f64) -> ReportRow {
    ReportRow { method: method.to_string(), dict, iters, cycles, relative_error: err }
}

fn plot(label: String, f: &BoundarySignal, d: &Decomposition) -> PlotData {
    PlotData { label, signal: f.clone(), approx: d.reconstruct().clone() }
}

struct Dicts {
    szego: Dictionary,
    complete: Dictionary,
}

impl Dicts {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let build = |g: ParamGrid| -> Result<Dictionary> {
            let d = Dictionary::new(g, cfg.samples)?;
            Ok(if cfg.cache { d.cached() } else { d })
        };
        Ok(Self { szego: build(cfg.grid.szego())?, complete: build(cfg.grid)? })
    }

    fn get(&self, kind: DictKind) -> &Dictionary {
        match kind {
            DictKind::Szego => &self.szego,
            DictKind::Complete => &self.complete,
        }
    }
}

/// n-Best from the n-step POAFD tuple; returns the refined decomposition as
/// plot data as well.
fn n_best(
    f: &BoundarySignal,
    dict: &Dictionary,
    n: usize,
    cycles: usize,
    tol: f64,
) -> Result<(NTuple, usize, BoundarySignal)> {
    let init = NTuple::from_decomposition(f, &poafd_run(f, dict, n)?)?;
    let out = refine(f, &init, dict, cycles, tol)?;
    let approx = projection_samples(f, &out.tuple)?;
    Ok((out.tuple, out.cycles, approx))
}

fn projection_samples(f: &BoundarySignal, t: &NTuple) -> Result<BoundarySignal> {
    let proj = crate::nbest::project(f, &t.params)?;
    let mut s = vec![c(0.0, 0.0); f.len()];
    for (&p, &k) in t.params.iter().zip(&proj.normalized_coeffs) {
        let e = crate::dictionary::element(p, f.len())?;
        for (x, v) in s.iter_mut().zip(e.samples.samples()) {
            *x += k * v;
        }
    }
    BoundarySignal::new(s)
}

/// Runs one experiment; nothing is written to disk.
pub fn run_experiment(id: ExperimentId, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::empty(id.as_str());
    report.config = Some(*cfg);
    match id {
        ExperimentId::Ex1 => {
            let f = ToySignalSpec::f1().generate(cfg.samples)?;
            let dicts = Dicts::new(cfg)?;
            for kind in [DictKind::Szego, DictKind::Complete] {
                let dict = dicts.get(kind);
                let mut rows = Vec::new();
                for (name, d) in [("ga", ga_run(&f, dict, 3)?), ("oga", oga_run(&f, dict, 3)?), ("poafd", poafd_run(&f, dict, 3)?)] {
                    rows.push(row(name, kind, 3, None, d.final_relative_error()));
                    report.plots.push(plot(format!("{name}_{kind}"), &f, &d));
                }
                let (t, cycles, approx) = n_best(&f, dict, 3, cfg.max_cycles, cfg.tol)?;
                rows.push(row("3best", kind, 3, Some(cycles), t.projection_error));
                report.plots.push(PlotData { label: format!("3best_{kind}"), signal: f.clone(), approx });
                report.tables.push(Table { name: kind.to_string(), rows });
            }
        }
        ExperimentId::Ex3 => {
            let f = ToySignalSpec::f2().generate(cfg.samples)?;
            let dicts = Dicts::new(cfg)?;
            let mut rows = Vec::new();
            for (kind, k) in [(DictKind::Szego, 18), (DictKind::Complete, 9)] {
                let d = poafd_run(&f, dicts.get(kind), k)?;
                for (i, s) in d.steps.iter().enumerate() {
                    rows.push(row("poafd", kind, i + 1, None, s.relative_error));
                }
                report.plots.push(plot(format!("poafd_{kind}"), &f, &d));
            }
            report.tables.push(Table { name: "poafd".into(), rows });
        }
        ExperimentId::Ex4 => {
            let f = ToySignalSpec::f3().generate(cfg.samples)?;
            let dicts = Dicts::new(cfg)?;
            let mut rows = Vec::new();
            for (kind, n, cycles) in [(DictKind::Szego, 8, 5), (DictKind::Complete, 4, 3)] {
                let dict = dicts.get(kind);
                let d = poafd_run(&f, dict, n)?;
                rows.push(row("poafd", kind, n, None, d.final_relative_error()));
                let (t, used, approx) = n_best(&f, dict, n, cycles, cfg.tol)?;
                rows.push(row(&format!("{n}best"), kind, n, Some(used), t.projection_error));
                report.plots.push(PlotData { label: format!("{n}best_{kind}"), signal: f.clone(), approx });
            }
            report.tables.push(Table { name: "nbest".into(), rows });
        }
        ExperimentId::Ex5 => {
            let f = ToySignalSpec::f4().generate(cfg.samples)?;
            let dicts = Dicts::new(cfg)?;
            let unwind_cfg = UnwindConfig { grid: cfg.grid.szego(), ..UnwindConfig::default() };
            let u = unwind_run(&f, 2, &unwind_cfg)?;
            let p = poafd_run(&f, &dicts.complete, 2)?;
            let (t, cycles, approx) = n_best(&f, &dicts.complete, 2, cfg.max_cycles, cfg.tol)?;
            let root_failures = u.steps.iter().filter(|s| s.unwinding.as_ref().is_some_and(|w| w.root_failure)).count();
            report.values.push(("unwinding_root_failures".into(), root_failures as f64));
            report.tables.push(Table {
                name: "f4".into(),
                rows: vec![
                    row("unwinding", DictKind::Szego, 2, None, u.final_relative_error()),
                    row("poafd", DictKind::Complete, 2, None, p.final_relative_error()),
                    row("2best", DictKind::Complete, 2, Some(cycles), t.projection_error),
                ],
            });
            report.plots.push(plot("unwinding_szego".into(), &f, &u));
            report.plots.push(plot("poafd_complete".into(), &f, &p));
            report.plots.push(PlotData { label: "2best_complete".into(), signal: f.clone(), approx });
        }
        ExperimentId::Ex6 => {
            let clean = ToySignalSpec::chirp().generate(cfg.samples)?;
            let sigma = cfg.sigma.unwrap_or(0.2 * rms(&clean));
            let dict = Dicts::new(cfg)?.complete;
            let clean_run = poafd_run(&clean, &dict, cfg.denoise_iters)?;
            let d = denoise_with(&clean, sigma, cfg.seed, cfg.denoise_iters, &dict)?;
            report.tables = d.tables;
            report.tables[0].rows.push(row("poafd_clean", DictKind::Complete, cfg.denoise_iters, None, clean_run.final_relative_error()));
            report.values = d.values;
            report.plots = d.plots;
            report.plots.push(plot("poafd_clean".into(), &clean, &clean_run));
        }
    }
    Ok(report)
}

/// Adds seeded noise to `clean`, denoises it by complete-dictionary POAFD and
/// reports both errors against `clean`.
pub fn denoise(clean: &BoundarySignal, sigma: f64, seed: u64, iters: usize, grid: ParamGrid) -> Result<ExperimentReport> {
    let dict = Dictionary::new(grid, clean.len())?;
    denoise_with(clean, sigma, seed, iters, &dict)
}

fn denoise_with(clean: &BoundarySignal, sigma: f64, seed: u64, iters: usize, dict: &Dictionary) -> Result<ExperimentReport> {
    let noisy = add_noise(clean, NoiseSpec { sigma, seed })?;
    let d = poafd_run(&noisy, dict, iters)?;
    let noisy_err = relative_error(clean, &noisy)?;
    let denoised_err = relative_error(clean, d.reconstruct())?;
    let mut report = ExperimentReport::empty("denoise");
    report.tables.push(Table {
        name: "denoise".into(),
        rows: vec![
            row("noisy_input", dict.kind(), 0, None, noisy_err),
            row("poafd_denoised", dict.kind(), iters, None, denoised_err),
        ],
    });
    report.values = vec![("sigma".into(), sigma), ("seed".into(), seed as f64)];
    report.plots.push(PlotData { label: "noisy".into(), signal: clean.clone(), approx: noisy });
    report.plots.push(PlotData { label: format!("poafd_{}", dict.kind()), signal: clean.clone(), approx: d.reconstruct().clone() });
    Ok(report)
}

fn table_csv(rows: &[ReportRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "dict", "iters", "cycles", "relative_error"])?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.dict.to_string(),
            r.iters.to_string(),
            r.cycles.map_or(String::new(), |c| c.to_string()),
            r.relative_error.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn plot_csv(p: &PlotData) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "signal_re", "signal_im", "approx_re", "approx_im"])?;
    let n = p.signal.len();
    for (j, (s, a)) in p.signal.samples().iter().zip(p.approx.samples()).enumerate() {
        w.write_record([
            grid_angle(n, j).to_string(),
            s.re.to_string(),
            s.im.to_string(),
            a.re.to_string(),
            a.im.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Writes `<id>_table.csv` (or `<id>_table_<name>.csv` when there are several
/// tables), `<id>_plot_<label>.csv` and `<id>_report.json` into `dir`.
pub fn emit_report(report: &mut ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let id = &report.id;
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    for t in &report.tables {
        let name = if report.tables.len() == 1 { format!("{id}_table.csv") } else { format!("{id}_table_{}.csv", t.name) };
        files.push((name, table_csv(&t.rows)?));
    }
    for p in &report.plots {
        files.push((format!("{id}_plot_{}.csv", p.label), plot_csv(p)?));
    }
    report.files = files.iter().map(|(n, _)| n.clone()).collect();
    report.files.push(format!("{id}_report.json"));
    let mut json = serde_json::to_vec_pretty(&*report)?;
    json.push(b'\n');
    files.push((format!("{id}_report.json"), json));
    let mut paths = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        paths.push(path);
    }
    Ok(paths)
}
