//! The `gkz` command line: problem files in, JSON or CSV reports out.
//!
//! Exit codes: 0 on success, 2 on validation errors (bad flags, malformed
//! or inconsistent input), 3 on numeric-domain errors. Diagnostics go to
//! the error stream only.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::GkzError;
use crate::eval::{evaluate_gg, evaluate_gkz, Evaluation, QuadratureConfig};
use crate::lattice::IntegerMatrix;
use crate::model::{solve_spectral_affine, ArgumentVector, GkzData, SpectralVector};
use crate::oscillator::{
    lattice_box, random_rational_vector, symbolic_gamma, verify_annihilation, AnnihilationRecord,
};
use crate::verify::verify_all;
use crate::whittaker::{eval_whittaker_max, eval_whittaker_min};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "gkz",
    version,
    about = "GKZ and Gelfand-Graev hypergeometric integrals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the relation lattice basis of A.
    Lattice { file: PathBuf },
    /// Evaluate the integral at the problem's spectral vector and arguments.
    Eval {
        file: PathBuf,
        #[arg(long)]
        points_per_dim: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Which normalisation to report.
        #[arg(long, value_enum, default_value_t = Kind::Gg)]
        kind: Kind,
    },
    /// Residuals of every equation of the holonomic system.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Whittaker functions of gl(rank + 1).
    Whittaker {
        #[arg(long = "type", value_enum)]
        kind: WhittakerType,
        #[arg(long)]
        rank: usize,
        /// Comma separated spectrum, rank + 1 real values.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        lambda: Vec<f64>,
        /// Evaluation point: one value for `max`, rank + 1 values for `min`.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            conflicts_with = "grid"
        )]
        x: Option<Vec<f64>>,
        /// `lo:hi:n`; for `min` the grid moves x_1 with the other coordinates at 0.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long)]
        points_per_dim: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Exact annihilation certificates for every l in [-lmax, lmax]^n.
    WeylCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lmax: i64,
        /// Use formal symbols for gamma instead of random rationals.
        #[arg(long)]
        symbolic: bool,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    /// `Phi_gamma(u)`.
    Gg,
    /// `prod u_i^{-gamma_i} Phi_gamma(u)`.
    Gkz,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum WhittakerType {
    Min,
    Max,
}

#[derive(Deserialize, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Lattice,
    Eval,
    Verify,
    Whittaker,
    WeylCheck,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Task::Lattice => "lattice",
            Task::Eval => "eval",
            Task::Verify => "verify",
            Task::Whittaker => "whittaker",
            Task::WeylCheck => "weyl-check",
        };
        f.write_str(s)
    }
}

/// JSON problem file.
#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    #[serde(default)]
    pub lattice: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub gamma: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub c: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub u: Option<Vec<f64>>,
    #[serde(default)]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(default)]
    pub task: Option<Task>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Validation(format!("malformed problem file: {e}")))
    }

    /// Validated GKZ data. An empty `A` needs an explicit lattice.
    pub fn data(&self) -> Result<GkzData, CliError> {
        let lattice = self.lattice.as_ref().map(|l| matrix(l)).transpose()?;
        if self.a.is_empty() {
            let lattice = lattice.ok_or_else(|| {
                CliError::Validation("an empty A requires an explicit lattice".into())
            })?;
            return Ok(GkzData::without_torus(lattice)?);
        }
        Ok(GkzData::new(matrix(&self.a)?, lattice)?)
    }

    /// `gamma` as given, or the minimum-norm solution of `A gamma = c`.
    pub fn spectral(&self, data: &GkzData) -> Result<SpectralVector, CliError> {
        match (&self.gamma, &self.c) {
            (Some(g), None) => Ok(SpectralVector::new(complexes(g))),
            (None, Some(c)) => Ok(solve_spectral_affine(data, &complexes(c))?.0),
            _ => Err(CliError::Validation(
                "exactly one of \"gamma\" or \"c\" is required".into(),
            )),
        }
    }

    pub fn arguments(&self) -> Result<ArgumentVector, CliError> {
        let u = self
            .u
            .clone()
            .ok_or_else(|| CliError::Validation("field \"u\" is required".into()))?;
        Ok(ArgumentVector::new(u)?)
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        self.quadrature.clone().unwrap_or_default()
    }
}

fn matrix(rows: &[Vec<i64>]) -> Result<IntegerMatrix, CliError> {
    Ok(IntegerMatrix::new(rows)?)
}

fn complexes(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Validation(String),
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<GkzError> for CliError {
    fn from(e: GkzError) -> Self {
        if e.is_domain() {
            CliError::Domain(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

/// Floats in scientific notation with 17 significant digits.
struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", sci(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON text with fixed float formatting.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("serialising in-memory values cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Serialize)]
struct EvalReport {
    value: [f64; 2],
    err: f64,
}

impl From<Evaluation> for EvalReport {
    fn from(e: Evaluation) -> Self {
        EvalReport {
            value: [e.value.re, e.value.im],
            err: e.err,
        }
    }
}

/// Points of `lo:hi:n`, strictly monotone.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Validation(format!("grid \"{spec}\": {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected lo:hi:n"));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| bad("lo is not a number"))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| bad("hi is not a number"))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| bad("n is not a count"))?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(bad("bounds must be finite"));
    }
    match n {
        0 => Err(bad("empty grid")),
        1 => Ok(vec![lo]),
        _ if lo == hi => Err(bad("duplicate grid points")),
        _ => Ok((0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect()),
    }
}

/// CSV with columns `x,value_re,value_im,err`.
pub fn grid_csv(points: &[f64], values: &[Evaluation]) -> String {
    let mut s = String::from("x,value_re,value_im,err\n");
    for (x, e) in points.iter().zip(values) {
        s.push_str(&format!(
            "{},{},{},{}\n",
            sci(*x),
            sci(e.value.re),
            sci(e.value.im),
            sci(e.err)
        ));
    }
    s
}

fn load(path: &Path, task: Task) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let p = ProblemFile::parse(&text)?;
    match p.task {
        Some(t) if t != task => Err(CliError::Validation(format!(
            "problem file is for task {t}, not {task}"
        ))),
        _ => Ok(p),
    }
}

fn overrides(
    mut cfg: QuadratureConfig,
    points: Option<usize>,
    tol: Option<f64>,
) -> Result<QuadratureConfig, CliError> {
    if let Some(p) = points {
        cfg.points_per_dim = p;
    }
    if let Some(t) = tol {
        cfg.tail_tolerance = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(command: Command) -> Result<String, CliError> {
    match command {
        Command::Lattice { file } => {
            let p = load(&file, Task::Lattice)?;
            Ok(to_json(&p.data()?.lattice_rows()) + "\n")
        }
        Command::Eval {
            file,
            points_per_dim,
            tol,
            kind,
        } => {
            let p = load(&file, Task::Eval)?;
            let data = p.data()?;
            let gamma = p.spectral(&data)?;
            let u = p.arguments()?;
            let cfg = overrides(p.quadrature(), points_per_dim, tol)?;
            let e = match kind {
                Kind::Gg => evaluate_gg(&data, &gamma, &u, &cfg)?,
                Kind::Gkz => evaluate_gkz(&data, &gamma, &u, &cfg)?,
            };
            Ok(to_json(&EvalReport::from(e)) + "\n")
        }
        Command::Verify { file, step } => {
            let p = load(&file, Task::Verify)?;
            let data = p.data()?;
            let gamma = p.spectral(&data)?;
            let u = p.arguments()?;
            let reports = verify_all(&data, &gamma, &u, step, &p.quadrature())?;
            Ok(to_json(&reports) + "\n")
        }
        Command::Whittaker {
            kind,
            rank,
            lambda,
            x,
            grid,
            points_per_dim,
            tol,
        } => {
            if rank == 0 {
                return Err(CliError::Validation("rank must be at least 1".into()));
            }
            if lambda.len() != rank + 1 {
                return Err(CliError::Validation(format!(
                    "--lambda needs {} values",
                    rank + 1
                )));
            }
            let lambda: Vec<Complex64> = lambda.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let cfg = overrides(QuadratureConfig::default(), points_per_dim, tol)?;
            let one = |xs: &[f64]| -> Result<Evaluation, CliError> {
                Ok(match kind {
                    WhittakerType::Max => eval_whittaker_max(rank, &lambda, xs[0], &cfg)?,
                    WhittakerType::Min => eval_whittaker_min(rank, &lambda, xs, &cfg)?,
                })
            };
            let width = match kind {
                WhittakerType::Max => 1,
                WhittakerType::Min => rank + 1,
            };
            match (x, grid) {
                (Some(xs), None) => {
                    if xs.len() != width {
                        return Err(CliError::Validation(format!("--x needs {width} values")));
                    }
                    Ok(to_json(&EvalReport::from(one(&xs)?)) + "\n")
                }
                (None, Some(spec)) => {
                    let points = parse_grid(&spec)?;
                    let mut values = Vec::with_capacity(points.len());
                    for &p in &points {
                        let mut xs = vec![0.0; width];
                        xs[0] = p;
                        values.push(one(&xs)?);
                    }
                    Ok(grid_csv(&points, &values))
                }
                _ => Err(CliError::Validation(
                    "exactly one of --x or --grid is required".into(),
                )),
            }
        }
        Command::WeylCheck {
            n,
            lmax,
            symbolic,
            samples,
            seed,
        } => {
            if n == 0 || lmax < 0 {
                return Err(CliError::Validation(
                    "--n must be positive and --lmax non-negative".into(),
                ));
            }
            let gammas: Vec<Vec<BigRational>> = if symbolic {
                Vec::new()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..samples)
                    .map(|_| random_rational_vector(n, &mut rng))
                    .collect()
            };
            let sym = symbolic_gamma(n);
            let mut records = Vec::new();
            for l in lattice_box(n, lmax) {
                let annihilated = if symbolic {
                    verify_annihilation(&l, &sym)?
                } else {
                    let mut all = true;
                    for g in &gammas {
                        all &= verify_annihilation(&l, g)?;
                    }
                    all
                };
                records.push(AnnihilationRecord { l, n, annihilated });
            }
            Ok(to_json(&records) + "\n")
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(text) => match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                EXIT_VALIDATION
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("-1:1:3").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_grid("0.5:0.5:1").unwrap(), vec![0.5]);
        assert!(parse_grid("0:0:3").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(to_json(&[0.1f64]), "[1.0000000000000001e-1]");
        let back: Vec<f64> = serde_json::from_str(&to_json(&[std::f64::consts::PI])).unwrap();
        assert_eq!(back[0], std::f64::consts::PI);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = ProblemFile::parse(r#"{"A": [[1]], "bogus": 1}"#).unwrap_err();
        assert_eq!(e.code(), EXIT_VALIDATION);
        let e = ProblemFile::parse("{\"A\": [[1]],\n \"u\": [1,]}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn gamma_and_c_are_exclusive() {
        let p = ProblemFile::parse(r#"{"A": [[1]], "gamma": [[1, 0]], "c": [[1, 0]], "u": [1]}"#)
            .unwrap();
        let d = p.data().unwrap();
        assert!(p.spectral(&d).is_err());
    }

    #[test]
    fn task_names() {
        let p = ProblemFile::parse(r#"{"A": [[1]], "task": "weyl-check"}"#).unwrap();
        assert_eq!(p.task, Some(Task::WeylCheck));
    }
}
