//! Command-line front end.
//!
//! Every command is also a library function so that it can be driven and
//! tested in-process. Exit codes: 0 success, 1 malformed input, 2 numerical
//! failure, 3 I/O failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{forward_vtable, FourierPotential};
use crate::contour::ZeroSearchOptions;
use crate::error::{Error, Result};
use crate::formats::{self, Meta, SpectralDataFile};
use crate::inverse::{reconstruct, AnalyticProvider, ReconstructionResult, Sample, SpectralPoint};
use crate::limits;
use crate::scattering::connection_coefficients;
use crate::solutions::{residual_of, FundamentalSystem, Solution};
use crate::spectrum::{spectrum_report, SpectrumReport, TableCoefficients, DEFAULT_BOX};
use crate::DEFAULT_ORDER;

/// Default number of half-integer points probed by forward and inverse runs.
pub const DEFAULT_NMAX: usize = 12;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SPECTRAL_SL_THREADS";

pub const SPECTRAL_DATA_FILE: &str = "spectral-data.json";
pub const SPECTRUM_REPORT_FILE: &str = "spectrum-report.json";

#[derive(Debug, Parser)]
#[command(
    name = "spectral-sl",
    version,
    about = "Forward and inverse spectral solver"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Args, Serialize, Deserialize)]
pub struct RunConfig {
    /// Truncation order A of the coefficient table.
    #[arg(short = 'A', long = "order", global = true, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    /// Largest n for the half-integer points n/2.
    #[arg(long = "nmax", global = true, default_value_t = DEFAULT_NMAX)]
    pub n_max: usize,
    /// Newton tolerance of the eigenvalue search.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Seed for randomly drawn self-test potentials.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            n_max: DEFAULT_NMAX,
            tol: 1e-12,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 || self.n_max > self.order {
            return Err(Error::InvalidInput(format!(
                "need 1 ≤ nmax ≤ order, got nmax = {}, order = {}",
                self.n_max, self.order
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }

    fn search_options(&self) -> ZeroSearchOptions {
        ZeroSearchOptions {
            tol: self.tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral data and spectrum report for a potential.
    Forward {
        potential: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Reconstruct β and q from spectral data.
    Inverse {
        /// Spectral-data file, or with --self-test an optional potential file.
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run forward and inverse in-process and report the errors.
        #[arg(long)]
        self_test: bool,
    },
    /// Eigenvalues and singularities only.
    Spectrum {
        potential: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample one solution along a line of x values as CSV.
    Eval {
        potential: PathBuf,
        /// Spectral parameter, e.g. `0.5+1.25i`.
        #[arg(long = "lambda", allow_hyphen_values = true)]
        lambda: String,
        /// `lo:hi:n`, n evenly spaced points including both ends.
        #[arg(long = "x-range", allow_hyphen_values = true)]
        x_range: String,
        #[arg(long, default_value = "f1+")]
        solution: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral data only.
    ExportSpectralData {
        potential: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_) | Error::InvalidInput(_) => 1,
        Error::Io(_) => 3,
        _ => 2,
    }
}

/// Points at which `cmd_forward` tabulates `C11` and `C12`.
///
/// In order: the `S0` rectangle `[0.1, 6]²` at step 0.05; for each
/// `n ≤ n_max` three spokes of 40 log-spaced radii in `[1e-6, 1e-1]` leaving
/// `n/2` at angles π/8, π/4 and 3π/8; 5×5 patches of spacing 0.01 around every eigenvalue
/// and its negative; and 5×5 patches around `R e^{iπ/4}`, `R = 250·2^k`.
pub fn sample_grid(n_max: usize, eigenvalues: &[SpectralPoint]) -> Vec<Complex64> {
    let mut pts = Vec::new();
    for i in 0..119 {
        for j in 0..119 {
            pts.push(Complex64::new(0.1 + 0.05 * i as f64, 0.1 + 0.05 * j as f64));
        }
    }
    let dir = limits::diagonal();
    for n in 1..=n_max {
        let centre = Complex64::new(n as f64 / 2.0, 0.0);
        for angle in [1.0, 2.0, 3.0] {
            let ray = Complex64::from_polar(1.0, angle * std::f64::consts::PI / 8.0);
            for j in 0..40 {
                let r = 10f64.powf(-6.0 + 5.0 * j as f64 / 39.0);
                pts.push(centre + ray * r);
            }
        }
    }
    let patch = |pts: &mut Vec<Complex64>, centre: Complex64| {
        for a in -2..=2 {
            for b in -2..=2 {
                pts.push(centre + Complex64::new(0.01 * a as f64, 0.01 * b as f64));
            }
        }
    };
    for e in eigenvalues {
        patch(&mut pts, e.lam);
        patch(&mut pts, -e.lam);
    }
    for r in crate::inverse::FAR_FIELD_RADII {
        patch(&mut pts, dir * r);
    }
    pts
}

/// Spectral data and spectrum report of `p`.
pub fn forward(
    p: &FourierPotential,
    cfg: &RunConfig,
) -> Result<(SpectralDataFile, SpectrumReport)> {
    cfg.validate()?;
    let table = forward_vtable(p, cfg.order);
    let coeffs = TableCoefficients::new(&table, p.beta());
    let report = spectrum_report(
        &coeffs,
        p.beta(),
        cfg.n_max,
        &DEFAULT_BOX,
        &cfg.search_options(),
    )?;
    let points: Vec<SpectralPoint> = report.eigenvalues.iter().map(SpectralPoint::from).collect();

    let grid = sample_grid(cfg.n_max, &points);
    let evaluated: Vec<Option<Sample>> = grid
        .par_iter()
        .map(
            |&lam| match connection_coefficients(&table, p.beta(), lam) {
                Ok(c) => Ok(Some(Sample {
                    lam,
                    c11: c.c11,
                    c12: c.c12,
                })),
                // points that land on a pole of the series are left out
                Err(Error::PoleProximity { .. }) => Ok(None),
                Err(e) => Err(e),
            },
        )
        .collect::<Result<_>>()?;
    let samples: Vec<Sample> = evaluated.into_iter().flatten().collect();

    let data = SpectralDataFile::new(
        &points,
        &samples,
        Meta {
            beta_hint: Some(p.beta()),
            n_max: cfg.n_max,
            order: cfg.order,
        },
    );
    Ok((data, report))
}

/// Reconstruction from a spectral-data file.
pub fn inverse(data: &SpectralDataFile) -> Result<ReconstructionResult> {
    let provider = data.provider()?;
    reconstruct(&provider, data.meta.n_max, data.meta.order)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => formats::write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_forward(potential: &Path, out_dir: &Path, cfg: &RunConfig) -> Result<()> {
    let p = formats::read_potential(potential)?;
    let (data, report) = forward(&p, cfg)?;
    std::fs::create_dir_all(out_dir)?;
    formats::write_atomic(
        &out_dir.join(SPECTRAL_DATA_FILE),
        formats::to_json(&data)?.as_bytes(),
    )?;
    formats::write_atomic(
        &out_dir.join(SPECTRUM_REPORT_FILE),
        formats::to_json(&report)?.as_bytes(),
    )?;
    Ok(())
}

pub fn cmd_inverse(data: &Path, out: Option<&Path>) -> Result<()> {
    let file = formats::read_spectral_data(data)?;
    let result = inverse(&file)?;
    write_or_print(out, &formats::to_json(&result)?)
}

pub fn cmd_spectrum(potential: &Path, out: Option<&Path>, cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let p = formats::read_potential(potential)?;
    let table = forward_vtable(&p, cfg.order);
    let report = spectrum_report(
        &TableCoefficients::new(&table, p.beta()),
        p.beta(),
        cfg.n_max,
        &DEFAULT_BOX,
        &cfg.search_options(),
    )?;
    write_or_print(out, &formats::to_json(&report)?)
}

pub fn cmd_export_spectral_data(
    potential: &Path,
    out: Option<&Path>,
    cfg: &RunConfig,
) -> Result<()> {
    let p = formats::read_potential(potential)?;
    let (data, _) = forward(&p, cfg)?;
    write_or_print(out, &formats::to_json(&data)?)
}

/// Parses `lo:hi:n`.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidInput(format!("x-range {s:?} is not lo:hi:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) || n == 0 {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect())
}

pub fn parse_lambda(s: &str) -> Result<Complex64> {
    let lam: Complex64 = s
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse λ from {s:?}")))?;
    if !lam.is_finite() {
        return Err(Error::InvalidInput(format!("λ = {lam} is not finite")));
    }
    Ok(lam)
}

/// CSV rows `x,re,im,d_re,d_im,ode_residual_abs` for the glued solution.
pub fn eval_csv(
    p: &FourierPotential,
    lam: Complex64,
    xs: &[f64],
    kind: Solution,
    cfg: &RunConfig,
) -> Result<String> {
    let table = forward_vtable(p, cfg.order);
    let sys = FundamentalSystem::new(&table, p.beta(), lam);
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["x", "re", "im", "d_re", "d_im", "ode_residual_abs"])
        .map_err(csv_err)?;
    for &x in xs {
        let jet = sys.extended(kind, x)?;
        let r = residual_of(&jet, p, lam, x).norm();
        w.write_record([
            x.to_string(),
            jet.value.re.to_string(),
            jet.value.im.to_string(),
            jet.d1.re.to_string(),
            jet.d1.im.to_string(),
            r.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn cmd_eval(
    potential: &Path,
    lambda: &str,
    x_range: &str,
    solution: &str,
    out: Option<&Path>,
    cfg: &RunConfig,
) -> Result<()> {
    let p = formats::read_potential(potential)?;
    let lam = parse_lambda(lambda)?;
    let xs = parse_range(x_range)?;
    let kind: Solution = solution.parse()?;
    write_or_print(out, &eval_csv(&p, lam, &xs, kind, cfg)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTestReport {
    pub potential: formats::PotentialFile,
    /// Largest relative error of `q_n` through the analytic provider.
    pub analytic_q_error: f64,
    pub analytic_beta_error: f64,
    /// Same through the exported spectral-data file.
    pub sampled_q_error: f64,
    pub sampled_beta_error: f64,
}

/// `|a - b| / |b|`, or `|a|` when `b = 0`.
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    if b == Complex64::new(0.0, 0.0) {
        a.norm()
    } else {
        (a - b).norm() / b.norm()
    }
}

fn q_error(result: &ReconstructionResult, p: &FourierPotential) -> f64 {
    result
        .q
        .iter()
        .enumerate()
        .map(|(i, q)| relative_error(*q, p.harmonic(i + 1)))
        .fold(0.0, f64::max)
}

/// Random potential with up to five harmonics of modulus at most 1 and
/// `β ∈ {0.5, 1, 2}`.
pub fn random_potential(seed: u64) -> FourierPotential {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=5);
    let q = (0..n)
        .map(|_| {
            let r: f64 = rng.gen_range(0.0..1.0);
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(r, t)
        })
        .collect();
    let beta = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
    FourierPotential::new(beta, q).expect("valid by construction")
}

pub fn self_test(p: &FourierPotential, cfg: &RunConfig) -> Result<SelfTestReport> {
    cfg.validate()?;
    let provider = AnalyticProvider::new(p, cfg.order, &DEFAULT_BOX, &cfg.search_options())?;
    let analytic = reconstruct(&provider, cfg.n_max, cfg.order)?;
    let (data, _) = forward(p, cfg)?;
    // through the serialised form, as a file round trip would
    let data: SpectralDataFile = formats::from_json(&formats::to_json(&data)?)?;
    let sampled = inverse(&data)?;
    Ok(SelfTestReport {
        potential: p.into(),
        analytic_q_error: q_error(&analytic, p),
        analytic_beta_error: (analytic.beta - p.beta()).abs() / p.beta(),
        sampled_q_error: q_error(&sampled, p),
        sampled_beta_error: (sampled.beta - p.beta()).abs() / p.beta(),
    })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{THREADS_ENV}={v:?} is not a count")))?;
        // a pool may already exist when run in-process more than once
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    let cfg = cli.config;
    cfg.validate()?;
    match cli.command {
        Command::Forward { potential, out } => cmd_forward(&potential, &out, &cfg),
        Command::Inverse {
            input,
            out,
            self_test: true,
        } => {
            let p = match input {
                Some(path) => formats::read_potential(&path)?,
                None => random_potential(cfg.seed),
            };
            let report = self_test(&p, &cfg)?;
            write_or_print(out.as_deref(), &formats::to_json(&report)?)
        }
        Command::Inverse { input, out, .. } => {
            let input = input.ok_or_else(|| {
                Error::InvalidInput("inverse needs a spectral-data file".to_string())
            })?;
            cmd_inverse(&input, out.as_deref())
        }
        Command::Spectrum { potential, out } => cmd_spectrum(&potential, out.as_deref(), &cfg),
        Command::Eval {
            potential,
            lambda,
            x_range,
            solution,
            out,
        } => cmd_eval(
            &potential,
            &lambda,
            &x_range,
            &solution,
            out.as_deref(),
            &cfg,
        ),
        Command::ExportSpectralData { potential, out } => {
            cmd_export_spectral_data(&potential, out.as_deref(), &cfg)
        }
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("-2:2:1").unwrap(), vec![-2.0]);
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("a:1:2").is_err());
    }

    #[test]
    fn lambda_parsing() {
        assert_eq!(
            parse_lambda("0.5+1.25i").unwrap(),
            Complex64::new(0.5, 1.25)
        );
        assert_eq!(parse_lambda("-1-2i").unwrap(), Complex64::new(-1.0, -2.0));
        assert_eq!(parse_lambda("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert!(parse_lambda("one").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Schema("x".into())), 1);
        assert_eq!(exit_code(&Error::Io("x".into())), 3);
        assert_eq!(exit_code(&Error::NoData), 2);
    }

    #[test]
    fn free_eval_rows() {
        let p = FourierPotential::zero(1.0).unwrap();
        let lam = Complex64::new(0.7, 0.2);
        let xs = parse_range("0:2:5").unwrap();
        let csv = eval_csv(&p, lam, &xs, Solution::F1Plus, &RunConfig::default()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,re,im,d_re,d_im,ode_residual_abs");
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 5);
        for r in rows {
            let expect = (Complex64::i() * lam * r[0]).exp();
            assert!((Complex64::new(r[1], r[2]) - expect).norm() < 1e-14);
            assert!(r[5] < 1e-13);
        }
    }

    #[test]
    fn grid_layout() {
        let g = sample_grid(2, &[]);
        assert_eq!(g.len(), 119 * 119 + 2 * 120 + 5 * 25);
        let dir = limits::diagonal();
        assert!(g.contains(&(dir * 1000.0)));
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::default();
        cfg.validate().unwrap();
        cfg.n_max = 40;
        assert!(cfg.validate().is_err());
    }
}
