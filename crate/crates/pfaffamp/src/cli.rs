//! The `pfaffamp` command line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use pfaffamp_core::models::{tfim_r_matrix_bogoliubov, tfim_r_matrix_exact_small, TfimSpec};
use pfaffamp_core::postmeasure::{
    default_window, delta_from_eta, extrapolate_inverse_size, fit_decay_exponent, fit_exponential_decay, named_setting,
    ScanRow, SETTING_NAMES,
};
use pfaffamp_core::probentropy::{max_probability_search, probability, ProbabilityPath, ENUMERATION_LIMIT};
use pfaffamp_core::{parse_configuration, random_state, EvalPath, GaussianPureState, PauliBasis, SpinConfiguration};
use serde::Serialize;

use crate::batch;
use crate::error::{CliError, Result};
use crate::formats::{load_state, parse_basis};
use crate::report::{
    path_name, probability_records, read_scan_csv, write_csv, write_probability_csv, write_scan_csv, AmplitudeRecord,
    ExtrapolatedReport, FitReport, ProbabilityRecord,
};
use crate::validate::{self, Mutation, ValidateConfig};

const CONVENTIONS: &str = "\
Conventions:
  Angles are radians (pass --degrees to give degrees); they are reduced mod 2pi.
  A site basis (phi, theta, alpha) measures along (sin theta cos phi, sin theta sin phi, cos theta).
  Configuration strings list the sites in order, site 1 first: '+', 'u' or '1' is the
  outcome +1 along the local axis, '-', 'd' or '0' the outcome -1. Whitespace and commas are ignored.
  In state files sites are numbered from 0.
Exit codes: 0 success, 1 validation failure, 2 usage or input error, 3 numeric guard.";

#[derive(Debug, Parser)]
#[command(
    name = "pfaffamp",
    version,
    about = "Amplitudes, probabilities and post-measurement entanglement of fermionic Gaussian pure states in local Pauli bases",
    after_help = CONVENTIONS
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Amplitudes <S|R> of configuration strings, as JSON lines or CSV.
    #[command(after_help = CONVENTIONS)]
    Amplitude(AmplitudeArgs),
    /// Outcome probabilities; with --enumerate, the full table plus a `total` footer row.
    #[command(after_help = CONVENTIONS)]
    Probability(ProbabilityArgs),
    /// Shannon-Renyi entropies (natural log) of the outcome distribution, and optionally
    /// the maximal product-state overlap.
    #[command(after_help = CONVENTIONS)]
    Entropy(EntropyArgs),
    /// Renyi entanglement between A1 and A2 after measuring the rest of the ring, scanned over d.
    ///
    /// The ring is laid out as A1, B1 (d sites), A2, B2 starting from site 1. Output columns:
    /// L, d, alpha, entropy, P_outcome.
    #[command(after_help = CONVENTIONS)]
    Postmeasure(PostmeasureArgs),
    /// Power-law fit E ~ d^-eta of decay-scan CSV files, with Delta_1 and the exponential
    /// alternative; several sizes are extrapolated linearly in 1/L.
    #[command(after_help = CONVENTIONS)]
    Fit(FitArgs),
    /// Runs the invariant suite on random instances and reports the worst residual of each check.
    #[command(after_help = CONVENTIONS)]
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Periodic transverse-field Ising ring H = -J sum X X + h sum Z.
    Tfim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Bogoliubov modes of the free-fermion chain (any even L).
    Bogoliubov,
    /// Exact diagonalisation (L <= 12).
    Exact,
}

/// Exactly one state source.
#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct StateSource {
    /// JSON state file {"kind":"matrix","L":..,"entries":[[i,j,re,im],...]}.
    #[arg(long, value_name = "FILE")]
    pub state: Option<PathBuf>,
    /// Model ground state; needs --L.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Random state with i.i.d. complex Gaussian entries; needs --L.
    #[arg(long = "random-seed", value_name = "SEED")]
    pub random_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub source: StateSource,
    /// Number of sites.
    #[arg(long = "L", value_name = "L")]
    pub len: Option<usize>,
    /// Transverse field h.
    #[arg(long = "h", default_value_t = 1.0, allow_negative_numbers = true)]
    pub field: f64,
    /// Ising coupling J.
    #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
    pub coupling: f64,
    /// How the model R matrix is obtained.
    #[arg(long, value_enum, default_value_t = Route::Bogoliubov)]
    pub route: Route,
    /// Standard deviation of |r_ij| for --random-seed.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

impl StateArgs {
    pub fn build(&self) -> Result<GaussianPureState> {
        let need_len = || self.len.ok_or_else(|| CliError::Usage("--L is required with --model and --random-seed".into()));
        if let Some(path) = &self.source.state {
            let s = load_state(path)?;
            if let Some(l) = self.len {
                if l != s.len() {
                    return Err(pfaffamp_core::Error::LengthMismatch { expected: l, found: s.len() }.into());
                }
            }
            return Ok(s);
        }
        if let Some(ModelKind::Tfim) = self.source.model {
            let spec = TfimSpec::new(need_len()?, self.coupling, self.field)?;
            let r = match self.route {
                Route::Bogoliubov => tfim_r_matrix_bogoliubov(&spec)?,
                Route::Exact => tfim_r_matrix_exact_small(&spec)?,
            };
            return Ok(GaussianPureState::new(r));
        }
        if let Some(seed) = self.source.random_seed {
            if !(self.scale.is_finite() && self.scale >= 0.0) {
                return Err(CliError::Usage(format!("--scale must be finite and >= 0, got {}", self.scale)));
            }
            return Ok(random_state(need_len()?, seed, self.scale));
        }
        Err(CliError::Usage("one of --state, --model or --random-seed is required".into()))
    }
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    /// Measurement basis: z, x, y, uniform:PHI,THETA[,ALPHA], per-site:P,T,A;P,T,A;... or @FILE.json.
    #[arg(long, default_value = "z", allow_hyphen_values = true)]
    pub basis: String,
    /// Read every angle given on the command line or in a basis file as degrees.
    #[arg(long)]
    pub degrees: bool,
}

impl BasisArgs {
    pub fn build(&self, len: usize) -> Result<PauliBasis> {
        parse_basis(&self.basis, len, self.degrees)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (standard output if omitted).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    fn open(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AmplitudePath {
    /// m-form when possible (any angle).
    Auto,
    /// Pfaffian with positive powers of cos and sin.
    M,
    /// Pfaffian with tan entries; refuses theta near 0 or pi.
    Tan,
    /// Domain walls; needs a uniform (phi, pi/2, 0) basis.
    DomainWall,
}

impl From<AmplitudePath> for EvalPath {
    fn from(p: AmplitudePath) -> Self {
        match p {
            AmplitudePath::Auto => EvalPath::Auto,
            AmplitudePath::M => EvalPath::MForm,
            AmplitudePath::Tan => EvalPath::TanForm,
            AmplitudePath::DomainWall => EvalPath::DomainWall,
        }
    }
}

#[derive(Debug, Args)]
pub struct AmplitudeArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Configuration string, e.g. "++-+" (repeatable).
    #[arg(long = "config", required = true, allow_hyphen_values = true)]
    pub configs: Vec<String>,
    #[arg(long, value_enum, default_value_t = AmplitudePath::Auto)]
    pub path: AmplitudePath,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbPath {
    /// |amplitude|^2.
    AmplitudeSquared,
    /// Determinant ratio, no Pfaffian.
    DetRatio,
}

impl From<ProbPath> for ProbabilityPath {
    fn from(p: ProbPath) -> Self {
        match p {
            ProbPath::AmplitudeSquared => ProbabilityPath::AmplitudeSquared,
            ProbPath::DetRatio => ProbabilityPath::DetRatio,
        }
    }
}

/// Cap on full enumeration; defaults to the built-in limit.
#[derive(Debug, Args)]
pub struct EnumerationArgs {
    /// Largest L for which all 2^L outcomes are enumerated.
    #[arg(long = "enumeration-limit", default_value_t = ENUMERATION_LIMIT, value_parser = clap::value_parser!(u32).range(1..=40).map(|v| v as usize))]
    pub limit: usize,
}

#[derive(Debug, Args)]
pub struct ProbabilityArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Configuration string (repeatable).
    #[arg(long = "config", allow_hyphen_values = true, required_unless_present = "enumerate", conflicts_with = "enumerate")]
    pub configs: Vec<String>,
    /// All 2^L outcomes in index order ('-' before '+', site 1 most significant).
    #[arg(long)]
    pub enumerate: bool,
    #[command(flatten)]
    pub enumeration: EnumerationArgs,
    #[arg(long, value_enum, default_value_t = ProbPath::AmplitudeSquared)]
    pub path: ProbPath,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Renyi indices (comma separated); 1 is Shannon.
    #[arg(long = "alpha", value_delimiter = ',', default_value = "1")]
    pub alphas: Vec<f64>,
    #[command(flatten)]
    pub enumeration: EnumerationArgs,
    /// Also search for the product state of largest overlap.
    #[arg(long)]
    pub geometric: bool,
    /// Grid points per angle for the search seeds.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    /// Random restarts for the search.
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    /// Seed of the random restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PostmeasureArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Measurement basis and outcome on B1 and B2.
    #[arg(long, default_value = "x-all-plus", value_parser = clap::builder::PossibleValuesParser::new(SETTING_NAMES))]
    pub pattern: String,
    /// Renyi indices (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub alphas: Vec<f64>,
    /// Smallest separation d.
    #[arg(long, default_value_t = 1)]
    pub dmin: usize,
    /// Largest separation d (default L/8).
    #[arg(long)]
    pub dmax: Option<usize>,
    /// Sites in A1.
    #[arg(long, default_value_t = 2)]
    pub a1: usize,
    /// Sites in A2.
    #[arg(long, default_value_t = 2)]
    pub a2: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Decay-scan CSV (repeatable); rows are grouped by L.
    #[arg(long = "input", required = true, value_name = "FILE")]
    pub inputs: Vec<PathBuf>,
    /// Renyi index whose rows are fitted.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Inclusive window DMIN:DMAX (default 4:L/8 for each L).
    #[arg(long)]
    pub window: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Seed (repeatable); every check runs once per seed.
    #[arg(long = "seed", default_values_t = [1u64])]
    pub seeds: Vec<u64>,
    /// Random instances per check and system size.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Largest system size.
    #[arg(long = "max-l", default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=12).map(|v| v as usize))]
    pub max_len: usize,
    #[arg(long, value_enum, hide = true)]
    pub mutate: Option<Mutation>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_configs(texts: &[String], len: usize) -> Result<Vec<SpinConfiguration>> {
    texts
        .iter()
        .map(|t| {
            let c = parse_configuration(t)?;
            if c.len() != len {
                return Err(pfaffamp_core::Error::LengthMismatch { expected: len, found: c.len() }.into());
            }
            Ok(c)
        })
        .collect()
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_amplitude(a: &AmplitudeArgs) -> Result<()> {
    let state = a.state.build()?;
    let basis = a.basis.build(state.len())?;
    let configs = parse_configs(&a.configs, state.len())?;
    let path = EvalPath::from(a.path);
    let values = batch::amplitudes(&state, &basis, &configs, path)?;
    let name = a.path.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
    let records: Vec<AmplitudeRecord> = configs.iter().zip(values).map(|(c, v)| AmplitudeRecord::new(c, v, &name)).collect();
    let mut out = a.output.open()?;
    match a.format {
        Format::Json => {
            for r in &records {
                serde_json::to_writer(&mut out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => write_csv(&mut out, &records)?,
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ProbabilityJson<'a> {
    #[serde(rename = "L")]
    len: usize,
    path: &'static str,
    records: &'a [ProbabilityRecord],
    #[serde(skip_serializing_if = "Option::is_none")]
    total: Option<f64>,
}

fn cmd_probability(a: &ProbabilityArgs) -> Result<()> {
    let state = a.state.build()?;
    let basis = a.basis.build(state.len())?;
    let path = ProbabilityPath::from(a.path);
    let (records, total) = if a.enumerate {
        let table = batch::probability_table(&state, &basis, path, a.enumeration.limit)?;
        (probability_records(&table, path), Some(table.total()))
    } else {
        let configs = parse_configs(&a.configs, state.len())?;
        let records = configs
            .iter()
            .map(|c| {
                Ok(ProbabilityRecord {
                    config: c.to_string(),
                    probability: probability(&state, &basis, c, path)?,
                    path: path_name(path).into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        (records, None)
    };
    let mut out = a.output.open()?;
    match a.format {
        Format::Csv => write_probability_csv(&mut out, &records, total)?,
        Format::Json => write_json(
            &mut out,
            &ProbabilityJson { len: state.len(), path: path_name(path), records: &records, total },
        )?,
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct EntropyValue {
    alpha: f64,
    entropy: f64,
}

#[derive(Serialize)]
struct GeometricJson {
    p_max: f64,
    geometric_entanglement: f64,
    config: String,
    /// `[phi, theta, alpha]` per site.
    basis: Vec<[f64; 3]>,
}

#[derive(Serialize)]
struct EntropyJson {
    #[serde(rename = "L")]
    len: usize,
    log: &'static str,
    entropies: Vec<EntropyValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    geometric: Option<GeometricJson>,
}

fn cmd_entropy(a: &EntropyArgs) -> Result<()> {
    let state = a.state.build()?;
    let basis = a.basis.build(state.len())?;
    for &alpha in &a.alphas {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(CliError::Usage(format!("Renyi index must be finite and >= 0, got {alpha}")));
        }
    }
    let table = batch::probability_table(&state, &basis, ProbabilityPath::AmplitudeSquared, a.enumeration.limit)?;
    let entropies = a.alphas.iter().map(|&alpha| EntropyValue { alpha, entropy: table.entropy(alpha) }).collect();
    let geometric = if a.geometric {
        let m = max_probability_search(&state, a.grid, a.restarts, a.seed)?;
        Some(GeometricJson {
            p_max: m.probability,
            geometric_entanglement: m.geometric_entanglement(),
            config: m.config.to_string(),
            basis: m.basis.sites().iter().map(|s| [s.phi, s.theta, s.alpha]).collect(),
        })
    } else {
        None
    };
    let mut out = a.output.open()?;
    write_json(&mut out, &EntropyJson { len: state.len(), log: "natural", entropies, geometric })?;
    out.flush()?;
    Ok(())
}

fn cmd_postmeasure(a: &PostmeasureArgs) -> Result<()> {
    let state = a.state.build()?;
    let setting = named_setting(&a.pattern).ok_or_else(|| CliError::Usage(format!("unknown pattern {}", a.pattern)))?;
    let dmax = a.dmax.unwrap_or(state.len() / 8).max(a.dmin);
    let ds: Vec<usize> = (a.dmin..=dmax).collect();
    let rows = batch::decay_scan(&state, setting, &a.alphas, &ds, a.a1, a.a2)?;
    let mut out = a.output.open()?;
    match a.format {
        Format::Csv => write_scan_csv(&mut out, &rows)?,
        Format::Json => {
            let records: Vec<crate::report::ScanRecord> = rows.iter().map(|&r| r.into()).collect();
            write_json(&mut out, &records)?
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_window(text: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Usage(format!("window must look like 4:16, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    let window = a.window.as_deref().map(parse_window).transpose()?;
    let mut by_size: BTreeMap<usize, Vec<ScanRow>> = BTreeMap::new();
    for path in &a.inputs {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        for row in read_scan_csv(file)? {
            by_size.entry(row.len).or_default().push(row);
        }
    }
    if by_size.is_empty() {
        return Err(CliError::Usage("the scan files contain no rows".into()));
    }
    let mut reports = Vec::new();
    for (&len, rows) in &by_size {
        let w = window.unwrap_or_else(|| default_window(len));
        let fit = fit_decay_exponent(rows, a.alpha, w)?;
        let exp = fit_exponential_decay(rows, a.alpha, w)?;
        reports.push(FitReport::new(len, fit, exp));
    }
    let mut out = a.output.open()?;
    if reports.len() == 1 {
        write_json(&mut out, &reports[0])?;
    } else {
        let points: Vec<(usize, f64)> = reports.iter().map(|r| (r.len, r.eta)).collect();
        let eta = extrapolate_inverse_size(&points)?;
        write_json(&mut out, &ExtrapolatedReport { alpha: a.alpha, eta, delta1: delta_from_eta(eta, a.alpha), sizes: reports })?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_validate(a: &ValidateArgs) -> Result<()> {
    let cfg = ValidateConfig { seeds: a.seeds.clone(), trials: a.trials, max_len: a.max_len, mutation: a.mutate };
    let results = validate::run(&cfg);
    let mut out = a.output.open()?;
    for r in &results {
        writeln!(
            out,
            "seed {:<6} {:<28} instances {:>5}  max residual {:.3e}  tolerance {:.0e}  {}",
            r.seed,
            r.name,
            r.instances,
            r.residual,
            r.tolerance,
            if r.passed() { "ok" } else { "FAIL" }
        )?;
    }
    out.flush()?;
    match results.iter().find(|r| !r.passed()) {
        Some(r) => Err(CliError::Validation { check: r.name.into(), residual: r.residual, tolerance: r.tolerance }),
        None => Ok(()),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Amplitude(a) => cmd_amplitude(a),
        Command::Probability(a) => cmd_probability(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Postmeasure(a) => cmd_postmeasure(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

/// Runs `cli`, prints any error to standard error and returns the exit code.
pub fn run_and_report(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pfaffamp: {e}");
            e.exit_code()
        }
    }
}
