//! Command-line front end: spectra, eigenfunction dumps, deformations,
//! verification reports and WKB tables.
//!
//! Settings resolve as command-line flags over a JSON config file over
//! defaults. Every output file is written to a temporary sibling and renamed
//! into place.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{wkb_count, wkb_invert};
use crate::error::Error;
use crate::morse_ref::PotentialParams;
use crate::oracle::auto_x_max;
use crate::sampled::centered_grid;
use crate::special_fn::{OrderKind, WhittakerOptions};
use crate::spectrum::{compute_spectrum_with, symmetric_potential, EigenLevel, Eigenstate, Parity, SpectrumOptions};
use crate::transforms::{Deformation, DeletionSet};
use crate::verify::{oracle_spectrum, run_suite, Suite, VerifyOptions, FD_POINTS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_LEVEL: i32 = 4;
pub const EXIT_INADMISSIBLE: i32 = 5;

/// Caps the worker threads; `0` or unset leaves the choice to rayon.
pub const THREADS_ENV: &str = "WMORSE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "wmorse", version, about = "Symmetric Morse spectra from zeros of Whittaker W functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Lowest levels with a finite-difference cross-check.
    Spectrum,
    /// `x,psi,dpsi` samples of one normalized eigenfunction.
    Eigenfunction,
    /// Run a verification suite and write its report.
    Verify,
    /// Crum (`--L`) or Krein–Adler (`--krein-adler`) deformation.
    Deform,
    /// Bohr–Sommerfeld count at each computed level and its inverse.
    Wkb,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    #[arg(long, global = true)]
    pub level: Option<usize>,
    /// Crum order.
    #[arg(long = "L", visible_alias = "crum", global = true)]
    pub l: Option<usize>,
    /// Comma-separated deletion set.
    #[arg(long, value_delimiter = ',', num_args = 1.., global = true)]
    pub krein_adler: Option<Vec<usize>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xmax: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub suite: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub root_tol: f64,
    pub ode_tol: f64,
    /// Accepted and validated; the composite Gauss rules are fixed-order.
    pub quad_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_tol: 1e-10,
            ode_tol: 1e-11,
            quad_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Half-width of the sampled interval; automatic when absent.
    pub x_max: Option<f64>,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    /// Standard output when absent (a directory for `deform`).
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub g: f64,
    pub k: f64,
    pub n_levels: usize,
    pub level: usize,
    pub crum: Option<usize>,
    pub krein_adler: Option<Vec<usize>>,
    pub suite: String,
    pub tolerances: Tolerances,
    pub grid: GridConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            g: 1.0,
            k: 0.0,
            n_levels: 8,
            level: 0,
            crum: None,
            krein_adler: None,
            suite: "all".into(),
            tolerances: Tolerances::default(),
            grid: GridConfig {
                x_max: None,
                n_samples: 401,
            },
            output: OutputConfig {
                path: None,
                format: Format::Json,
            },
        }
    }
}

/// Config-file layout; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub g: Option<f64>,
    pub k: Option<f64>,
    pub n_levels: Option<usize>,
    pub level: Option<usize>,
    #[serde(rename = "L")]
    pub crum: Option<usize>,
    pub krein_adler: Option<Vec<usize>>,
    pub suite: Option<String>,
    pub tolerances: Option<PartialTolerances>,
    pub grid: Option<PartialGrid>,
    pub output: Option<PartialOutput>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialTolerances {
    pub root_tol: Option<f64>,
    pub ode_tol: Option<f64>,
    pub quad_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialGrid {
    pub x_max: Option<f64>,
    pub n_samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialOutput {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Solver(Error),
    #[error("{0}")]
    Level(String),
    #[error("{0}")]
    Inadmissible(Error),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => EXIT_CONFIG,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Level(_) => EXIT_LEVEL,
            CliError::Inadmissible(_) => EXIT_INADMISSIBLE,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InadmissibleSet { .. } => CliError::Inadmissible(e),
            Error::IndexOutOfSpectrum { .. } => CliError::Level(e.to_string()),
            Error::InvalidParameter(msg) => CliError::Config(msg),
            other => CliError::Solver(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

impl RunConfig {
    /// Defaults, then the config file named by `--config`, then flags.
    pub fn resolve(flags: &Flags) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let file: ConfigFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_file(file);
        }
        cfg.apply_flags(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, f: ConfigFile) {
        set(&mut self.g, f.g);
        set(&mut self.k, f.k);
        set(&mut self.n_levels, f.n_levels);
        set(&mut self.level, f.level);
        self.crum = f.crum.or(self.crum);
        self.krein_adler = f.krein_adler.or(self.krein_adler.take());
        set(&mut self.suite, f.suite);
        if let Some(t) = f.tolerances {
            set(&mut self.tolerances.root_tol, t.root_tol);
            set(&mut self.tolerances.ode_tol, t.ode_tol);
            set(&mut self.tolerances.quad_tol, t.quad_tol);
        }
        if let Some(g) = f.grid {
            self.grid.x_max = g.x_max.or(self.grid.x_max);
            set(&mut self.grid.n_samples, g.n_samples);
        }
        if let Some(o) = f.output {
            self.output.path = o.path.or(self.output.path.take());
            set(&mut self.output.format, o.format);
        }
    }

    fn apply_flags(&mut self, f: &Flags) {
        set(&mut self.g, f.g);
        set(&mut self.k, f.k);
        set(&mut self.n_levels, f.levels);
        set(&mut self.level, f.level);
        self.crum = f.l.or(self.crum);
        self.krein_adler = f.krein_adler.clone().or(self.krein_adler.take());
        set(&mut self.suite, f.suite.clone());
        self.grid.x_max = f.xmax.or(self.grid.x_max);
        set(&mut self.grid.n_samples, f.samples);
        self.output.path = f.out.clone().or(self.output.path.take());
        set(&mut self.output.format, f.format);
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.g > 0.0 && self.g.is_finite()) {
            return bad(format!("g = {} must be positive", self.g));
        }
        if !self.k.is_finite() {
            return bad(format!("k = {} must be finite", self.k));
        }
        if self.n_levels == 0 {
            return bad("levels must be at least 1".into());
        }
        let t = &self.tolerances;
        for (name, v) in [("root_tol", t.root_tol), ("ode_tol", t.ode_tol), ("quad_tol", t.quad_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if self.grid.n_samples < 64 {
            return bad(format!("samples = {} below the minimum of 64", self.grid.n_samples));
        }
        if let Some(x) = self.grid.x_max {
            if !(x > 0.0 && x.is_finite()) {
                return bad(format!("xmax = {x} must be positive"));
            }
        }
        if self.crum == Some(0) {
            return bad("L must be at least 1".into());
        }
        self.suite.parse::<Suite>().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn params(&self) -> CliResult<PotentialParams> {
        PotentialParams::new(self.g, self.k).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn spectrum_options(&self) -> SpectrumOptions {
        SpectrumOptions {
            root_tol: self.tolerances.root_tol,
            whittaker: self.whittaker_options(),
            ..SpectrumOptions::default()
        }
    }

    pub fn whittaker_options(&self) -> WhittakerOptions {
        WhittakerOptions {
            ode_tol: self.tolerances.ode_tol,
            ..WhittakerOptions::default()
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("wmorse: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let cfg = RunConfig::resolve(&cli.flags)?;
    match cli.command {
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Eigenfunction => cmd_eigenfunction(&cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::Deform => cmd_deform(&cfg),
        Command::Wkb => cmd_wkb(&cfg),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{THREADS_ENV}={value:?} is not a thread count")))?;
    if n > 0 {
        // a pool installed earlier in this process stays in effect
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, or to standard output when `path` is `None`.
pub fn write_atomic(path: Option<&Path>, contents: &str) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Output(e.to_string());
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes()).map_err(io)?;
            out.flush().map_err(io)
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
            tmp.write_all(contents.as_bytes()).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            tmp.persist(path)
                .map_err(|e| CliError::Output(format!("{}: {}", path.display(), e.error)))?;
            Ok(())
        }
    }
}

/// Seventeen significant digits: lossless for `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

fn kind_name(k: OrderKind) -> &'static str {
    match k {
        OrderKind::Real => "real",
        OrderKind::Imaginary => "imaginary",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsOut {
    pub g: f64,
    pub k: f64,
    pub h: f64,
}

impl From<&PotentialParams> for ParamsOut {
    fn from(p: &PotentialParams) -> Self {
        Self { g: p.g, k: p.k, h: p.h() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelOut {
    pub index: usize,
    pub parity: String,
    pub order_kind: String,
    pub order_value: f64,
    pub energy: f64,
    pub residual: f64,
}

impl From<&EigenLevel> for LevelOut {
    fn from(l: &EigenLevel) -> Self {
        Self {
            index: l.index,
            parity: parity_name(l.parity).into(),
            order_kind: kind_name(l.order.kind).into(),
            order_value: l.order.value,
            energy: l.energy,
            residual: l.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleOut {
    pub index: usize,
    pub fd_energy: f64,
    /// `|E − E_fd| / max(|E_fd|, 1)`.
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: ParamsOut,
    pub levels: Vec<LevelOut>,
    pub oracle_comparison: Vec<OracleOut>,
}

pub fn spectrum_report(cfg: &RunConfig) -> CliResult<SpectrumReport> {
    let p = cfg.params()?;
    let levels = compute_spectrum_with(&p, cfg.n_levels, &cfg.spectrum_options())?;
    let e_max = levels[levels.len() - 1].energy;
    let fd_points = FD_POINTS.max(8 * levels.len());
    let fd = oracle_spectrum(&p, e_max, levels.len(), fd_points)?;
    Ok(SpectrumReport {
        params: (&p).into(),
        levels: levels.iter().map(LevelOut::from).collect(),
        oracle_comparison: levels
            .iter()
            .zip(fd)
            .map(|(l, e)| OracleOut {
                index: l.index,
                fd_energy: e,
                rel_error: (l.energy - e).abs() / e.abs().max(1.0),
            })
            .collect(),
    })
}

pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut s = String::from("index,parity,order_kind,order_value,energy,residual,fd_energy,rel_error\n");
    for (l, o) in report.levels.iter().zip(&report.oracle_comparison) {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            l.index,
            l.parity,
            l.order_kind,
            fmt_f64(l.order_value),
            fmt_f64(l.energy),
            fmt_f64(l.residual),
            fmt_f64(o.fd_energy),
            fmt_f64(o.rel_error)
        );
    }
    s
}

fn cmd_spectrum(cfg: &RunConfig) -> CliResult<()> {
    let report = spectrum_report(cfg)?;
    let text = match cfg.output.format {
        Format::Json => to_json(&report)?,
        Format::Csv => spectrum_csv(&report),
    };
    write_atomic(cfg.output.path.as_deref(), &text)
}

fn sample_half_width(cfg: &RunConfig, p: &PotentialParams, e_max: f64) -> CliResult<f64> {
    match cfg.grid.x_max {
        Some(x) => Ok(x),
        None => {
            let p = *p;
            Ok(auto_x_max(move |x: f64| symmetric_potential(&p, x).unwrap_or(f64::MAX), e_max)?)
        }
    }
}

/// `x,f,df` rows at seventeen significant digits.
pub fn samples_csv(header: &str, xs: &[f64], columns: &[&[f64]]) -> String {
    let mut s = String::with_capacity(xs.len() * 24 * (1 + columns.len()));
    s.push_str(header);
    s.push('\n');
    for (i, x) in xs.iter().enumerate() {
        s.push_str(&fmt_f64(*x));
        for c in columns {
            s.push(',');
            s.push_str(&fmt_f64(c[i]));
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledOut {
    pub level: LevelOut,
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
}

fn cmd_eigenfunction(cfg: &RunConfig) -> CliResult<()> {
    if cfg.level >= cfg.n_levels {
        return Err(CliError::Level(format!(
            "level {} is not below levels = {}",
            cfg.level, cfg.n_levels
        )));
    }
    if cfg.grid.n_samples.is_multiple_of(2) {
        return Err(CliError::Config(format!(
            "samples = {} must be odd so that x = 0 is sampled",
            cfg.grid.n_samples
        )));
    }
    let p = cfg.params()?;
    let levels = compute_spectrum_with(&p, cfg.level + 1, &cfg.spectrum_options())?;
    let level = levels[cfg.level];
    let x_max = sample_half_width(cfg, &p, level.energy)?;
    let state = Eigenstate::with_options(&p, level, cfg.whittaker_options())?;
    let f = state.sample(centered_grid(x_max, cfg.grid.n_samples)?)?;
    let text = match cfg.output.format {
        Format::Csv => samples_csv("x,psi,dpsi", &f.grid, &[&f.values, &f.derivs]),
        Format::Json => to_json(&SampledOut {
            level: (&level).into(),
            x: f.grid,
            psi: f.values,
            dpsi: f.derivs,
        })?,
    };
    write_atomic(cfg.output.path.as_deref(), &text)
}

pub fn verify_csv(report: &crate::verify::VerifyReport) -> String {
    let mut s = String::from("name,status,measured,threshold\n");
    for c in &report.checks {
        let measured = c.measured.map(fmt_f64).unwrap_or_default();
        let status = if c.passed() { "pass" } else { "fail" };
        let _ = writeln!(s, "\"{}\",{status},{measured},{}", c.name.replace('"', "'"), fmt_f64(c.threshold));
    }
    s
}

fn cmd_verify(cfg: &RunConfig) -> CliResult<()> {
    let suite: Suite = cfg.suite.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
    let mut opts = VerifyOptions::default();
    if let Some(l) = cfg.crum {
        opts.crum_orders = vec![l];
    }
    let report = run_suite(suite, &opts);
    for c in report.checks.iter().filter(|c| !c.passed()) {
        eprintln!("FAIL {}", c.name);
    }
    let text = match cfg.output.format {
        Format::Json => to_json(&report)?,
        Format::Csv => verify_csv(&report),
    };
    write_atomic(cfg.output.path.as_deref(), &text)?;
    if report.passed {
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed()).count();
        Err(CliError::Verify(format!("{failed} of {} checks failed", report.checks.len())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformedLevelOut {
    pub index: usize,
    pub energy: f64,
    /// Parity of the deformed eigenfunction.
    pub parity: String,
    /// `∏ (E − E_d)`, the squared norm of the deformed eigenfunction.
    pub norm_factor: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformManifest {
    pub params: ParamsOut,
    pub mode: String,
    pub deleted: Vec<usize>,
    #[serde(rename = "L")]
    pub order: usize,
    /// `k − L`: the large-`|x|` form is `ρ²/4 − (k − L)ρ`.
    pub asymptotic_k: f64,
    pub potential_file: String,
    pub levels: Vec<DeformedLevelOut>,
}

fn deletion_set(cfg: &RunConfig) -> CliResult<(String, DeletionSet)> {
    match (&cfg.krein_adler, cfg.crum) {
        (Some(_), Some(_)) => Err(CliError::Config("give either --L/--crum or --krein-adler, not both".into())),
        (Some(labels), None) => Ok(("krein-adler".into(), DeletionSet::new(labels)?)),
        (None, Some(l)) => Ok(("crum".into(), DeletionSet::crum(l)?)),
        (None, None) => Err(CliError::Config("deform needs --L/--crum or --krein-adler".into())),
    }
}

fn cmd_deform(cfg: &RunConfig) -> CliResult<()> {
    let (mode, dset) = deletion_set(cfg)?;
    if let Some(m) = dset.violation() {
        return Err(CliError::Inadmissible(Error::InadmissibleSet { m }));
    }
    if cfg.grid.n_samples.is_multiple_of(2) {
        return Err(CliError::Config(format!(
            "samples = {} must be odd so that x = 0 is sampled",
            cfg.grid.n_samples
        )));
    }
    let p = cfg.params()?;
    let top = dset.labels().iter().copied().max().unwrap_or(0);
    let total = cfg.n_levels + dset.len();
    let spectrum = compute_spectrum_with(&p, total.max(top + 1), &cfg.spectrum_options())?;
    let d = Deformation::new(&p, dset, &spectrum)?;
    let kept: Vec<EigenLevel> = spectrum
        .iter()
        .filter(|l| !d.dset().contains(l.index))
        .take(cfg.n_levels)
        .copied()
        .collect();
    let e_max = kept.iter().map(|l| l.energy).fold(f64::NEG_INFINITY, f64::max);
    let x_max = sample_half_width(cfg, &p, e_max)?;
    let grid = centered_grid(x_max, cfg.grid.n_samples)?;

    let dir = cfg.output.path.clone().unwrap_or_else(|| PathBuf::from("deform_out"));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;

    let v = d.potential(grid.clone())?;
    write_atomic(Some(&dir.join("potential.csv")), &samples_csv("x,V_deformed", &v.grid, &[&v.values]))?;

    let mut levels = Vec::with_capacity(kept.len());
    for level in &kept {
        let state = Eigenstate::with_options(&p, *level, cfg.whittaker_options())?;
        let f = d.eigenfunction(&state, grid.clone())?;
        let file = format!("level_{}.csv", level.index);
        write_atomic(Some(&dir.join(&file)), &samples_csv("x,psi,dpsi", &f.grid, &[&f.values, &f.derivs]))?;
        let parity = if d.parity_sign(level.index) > 0.0 { Parity::Even } else { Parity::Odd };
        levels.push(DeformedLevelOut {
            index: level.index,
            energy: level.energy,
            parity: parity_name(parity).into(),
            norm_factor: d.norm_factor(level.energy),
            file,
        });
    }
    let manifest = DeformManifest {
        params: (&p).into(),
        mode,
        deleted: d.dset().labels().to_vec(),
        order: d.order(),
        asymptotic_k: d.asymptotic_k(),
        potential_file: "potential.csv".into(),
        levels,
    };
    write_atomic(Some(&dir.join("manifest.json")), &to_json(&manifest)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkbRow {
    pub index: usize,
    pub nu: f64,
    /// Bohr–Sommerfeld count at the computed `ν`.
    pub count: f64,
    /// `ν` at which the count equals `index`.
    pub nu_wkb: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkbReport {
    pub params: ParamsOut,
    pub rows: Vec<WkbRow>,
}

fn cmd_wkb(cfg: &RunConfig) -> CliResult<()> {
    let p = cfg.params()?;
    let levels = compute_spectrum_with(&p, cfg.n_levels, &cfg.spectrum_options())?;
    let rows = levels
        .iter()
        .filter(|l| l.order.kind == OrderKind::Imaginary && l.order.value > 0.0)
        .map(|l| {
            Ok(WkbRow {
                index: l.index,
                nu: l.order.value,
                count: wkb_count(&p, l.order.value)?,
                nu_wkb: wkb_invert(&p, l.index)?,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let report = WkbReport { params: (&p).into(), rows };
    let text = match cfg.output.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("index,nu,count,nu_wkb\n");
            for r in &report.rows {
                let _ = writeln!(s, "{},{},{},{}", r.index, fmt_f64(r.nu), fmt_f64(r.count), fmt_f64(r.nu_wkb));
            }
            s
        }
    };
    write_atomic(cfg.output.path.as_deref(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(args: &[&str]) -> Flags {
        let mut all = vec!["wmorse", "spectrum"];
        all.extend_from_slice(args);
        Cli::try_parse_from(all).unwrap().flags
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"g": 2.0, "k": 1.0, "n_levels": 3, "tolerances": {"root_tol": 1e-9}}"#).unwrap();
        let p = path.to_str().unwrap();
        let cfg = RunConfig::resolve(&flags(&["--config", p, "--k", "-0.5"])).unwrap();
        assert_eq!(cfg.g, 2.0);
        assert_eq!(cfg.k, -0.5);
        assert_eq!(cfg.n_levels, 3);
        assert_eq!(cfg.tolerances.root_tol, 1e-9);
        assert_eq!(cfg.tolerances.ode_tol, 1e-11);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"gg": 2.0}"#).unwrap();
        let e = RunConfig::resolve(&flags(&["--config", path.to_str().unwrap()])).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn validation_exit_codes() {
        assert_eq!(RunConfig::resolve(&flags(&["--g", "0"])).unwrap_err().exit_code(), EXIT_CONFIG);
        assert_eq!(RunConfig::resolve(&flags(&["--samples", "10"])).unwrap_err().exit_code(), EXIT_CONFIG);
        assert_eq!(RunConfig::resolve(&flags(&["--suite", "nope"])).unwrap_err().exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn crum_alias_and_list_flags() {
        let f = flags(&["--crum", "2", "--krein-adler", "1,2"]);
        assert_eq!(f.l, Some(2));
        assert_eq!(f.krein_adler, Some(vec![1, 2]));
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -6.25, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, f64::MAX] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
