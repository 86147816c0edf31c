use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use hardy_afd::dictionary::{DictKind, Dictionary, ParamGrid};
use hardy_afd::experiments::{self, emit_report, ExperimentConfig, ExperimentId};
use hardy_afd::laguerre::{laguerre_tail_errors, loglog_slope, transform_matrices, SobolevProfile, PROBE_SAMPLES};
use hardy_afd::nbest::{refine, NTuple};
use hardy_afd::pursuit::{self, poafd_run, Decomposition, Method, UnwindConfig};
use hardy_afd::signal::BoundarySignal;
use hardy_afd::Result;

#[derive(Parser)]
#[command(name = "afd", version, about = "Adaptive Fourier decomposition in the Hardy space of the disc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct DictOpts {
    /// Parameter grid of the disc, radial x angular.
    #[arg(long, default_value = "100x100")]
    grid: ParamGrid,
    /// Highest multiple-kernel order; 0 selects the plain Szegő dictionary.
    #[arg(long, default_value_t = 8)]
    nmax: usize,
}

impl DictOpts {
    fn grid(&self) -> ParamGrid {
        ParamGrid { n_max: self.nmax, ..self.grid }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Poafd,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a boundary signal with one of the pursuit methods.
    Decompose {
        #[command(flatten)]
        opts: DictOpts,
        #[arg(long)]
        method: Method,
        #[arg(long, default_value = "complete")]
        dict: DictKind,
        #[arg(long)]
        iters: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Practical n-Best approximation by cyclic refinement.
    Nbest {
        #[command(flatten)]
        opts: DictOpts,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "complete")]
        dict: DictKind,
        #[arg(long, default_value_t = 50)]
        cycles: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value = "poafd")]
        init: Init,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Laguerre tail errors of a Sobolev-type test signal.
    LaguerreRate {
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_parser = parse_complex, default_value = "0,0")]
        a: Complex64,
        /// Number of Laguerre terms.
        #[arg(long, default_value_t = 64)]
        nmax: usize,
        /// Boundary samples of the test signal.
        #[arg(long, default_value_t = PROBE_SAMPLES)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Change-of-basis matrices between multiple kernels and Laguerre elements.
    Transform {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_complex)]
        a: Complex64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one of the reproduction experiments.
    Experiment {
        id: ExperimentId,
        #[command(flatten)]
        opts: DictOpts,
        /// Boundary samples of the generated signals.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add seeded noise to a signal and denoise it with complete POAFD.
    Denoise {
        #[command(flatten)]
        opts: DictOpts,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}

fn dictionary(opts: &DictOpts, kind: DictKind, n_samples: usize) -> Result<Dictionary> {
    let grid = match kind {
        DictKind::Szego => opts.grid.szego(),
        DictKind::Complete => opts.grid(),
    };
    Dictionary::new(grid, n_samples)
}

fn read_signal(path: &Path) -> Result<BoundarySignal> {
    BoundarySignal::read_csv(File::open(path)?)
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn c_json(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn decomposition_json(d: &Decomposition, grid: &ParamGrid) -> Value {
    let steps: Vec<Value> = d
        .steps
        .iter()
        .map(|s| {
            let mut v = json!({
                "n": s.param.n,
                "a_re": s.param.a.re,
                "a_im": s.param.a.im,
                "coeff_re": s.coeff.re,
                "coeff_im": s.coeff.im,
                "residual_energy": s.residual_energy,
                "relative_error": s.relative_error,
            });
            if let Some(u) = &s.unwinding {
                v["inner_zeros"] = u.inner_zeros.iter().map(|&z| c_json(z)).collect();
                v["root_failure"] = json!(u.root_failure);
            }
            v
        })
        .collect();
    json!({
        "method": d.method,
        "dict": d.dict,
        "grid": grid.to_string(),
        "n_max": grid.n_max,
        "signal_energy": d.signal_energy,
        "steps": steps,
    })
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Decompose { opts, method, dict, iters, input, out } => {
            let f = read_signal(input)?;
            let dict = dictionary(opts, *dict, f.len())?;
            let unwind = UnwindConfig { grid: opts.grid.szego(), ..UnwindConfig::default() };
            let d = pursuit::run(*method, &f, &dict, *iters, &unwind)?;
            write_json(out, &decomposition_json(&d, dict.grid()))
        }
        Command::Nbest { opts, n, dict, cycles, tol, init, seed, input, out } => {
            let f = read_signal(input)?;
            let dict = dictionary(opts, *dict, f.len())?;
            let start = match init {
                Init::Poafd => NTuple::from_decomposition(&f, &poafd_run(&f, &dict, *n)?)?,
                Init::Random => NTuple::random(&f, &dict, *n, *seed)?,
            };
            let r = refine(&f, &start, &dict, *cycles, *tol)?;
            let params: Vec<Value> =
                r.tuple.params.iter().map(|p| json!({ "n": p.n, "a_re": p.a.re, "a_im": p.a.im })).collect();
            write_json(
                out,
                &json!({
                    "dict": dict.kind(),
                    "grid": dict.grid().to_string(),
                    "n_max": dict.grid().n_max,
                    "initial_error": start.projection_error,
                    "relative_error": r.tuple.projection_error,
                    "cycles": r.cycles,
                    "history": r.history,
                    "params": params,
                }),
            )
        }
        Command::LaguerreRate { sigma, a, nmax, samples, out } => {
            let profile = SobolevProfile::power_law(*sigma, *samples)?;
            let tails = laguerre_tail_errors(&profile.signal(), *a, *nmax)?;
            let mut w = csv::Writer::from_writer(BufWriter::new(File::create(out)?));
            w.write_record(["n", "tail_error"])?;
            for (k, e) in tails.iter().enumerate() {
                w.write_record([(k + 1).to_string(), e.to_string()])?;
            }
            w.flush()?;
            let points: Vec<(usize, f64)> = tails.iter().enumerate().map(|(k, &e)| (k + 1, e)).collect();
            if let Some(slope) = loglog_slope(&points[points.len() / 8..]) {
                println!("log-log slope {slope:.4}");
            }
            Ok(())
        }
        Command::Transform { n, a, out } => {
            let pair = transform_matrices(*n, *a)?;
            let rows = |m: &nalgebra::DMatrix<Complex64>| -> Value {
                (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| c_json(m[(i, j)])).collect::<Value>()).collect()
            };
            write_json(out, &json!({ "n": n, "a": c_json(*a), "t": rows(&pair.t), "t_inv": rows(&pair.t_inv) }))
        }
        Command::Experiment { id, opts, samples, seed, out } => {
            let cfg = ExperimentConfig {
                grid: opts.grid(),
                samples: *samples,
                seed: *seed,
                ..ExperimentConfig::default()
            };
            let mut report = experiments::run_experiment(*id, &cfg)?;
            emit_report(&mut report, out)?;
            print_rows(&report);
            Ok(())
        }
        Command::Denoise { opts, input, sigma, seed, iters, out } => {
            let clean = read_signal(input)?;
            let mut report = experiments::denoise(&clean, *sigma, *seed, *iters, opts.grid())?;
            emit_report(&mut report, out)?;
            print_rows(&report);
            Ok(())
        }
    }
}

fn print_rows(report: &experiments::ExperimentReport) {
    for t in &report.tables {
        for r in &t.rows {
            let cycles = r.cycles.map_or(String::new(), |c| format!(" cycles={c}"));
            println!("{:<10} {:<16} {:<9} K={:<3}{} {:.4}", t.name, r.method, r.dict, r.iters, cycles, r.relative_error);
        }
    }
}
