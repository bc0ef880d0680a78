//! Command runners behind the `tenfold` binary.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input error, 3 numeric failure.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classifier::{classify, SymmetryClass};
use crate::ensembles::{sample_campaign, EnsembleSpec};
use crate::error::Error;
use crate::io::{
    parse_symmetry_data, read_archive, write_archive, write_manifest, Archive, Manifest, SCHEMA_VERSION, TOOLKIT_VERSION,
};
use crate::linalg::{hermitian_eigenvalues, RNG_ALGORITHM};
use crate::spectra::spectral_report;
use crate::verify::{run_verify, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Classify,
    Sample,
    Stats,
    Verify,
}

/// Seeded, reproducible runs of the toolkit.
#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "tenfold", version)]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Symmetry-data JSON (classify) or sample archive (stats).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file; sample archives ending in `.json` are single JSON files, anything else a CSV directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// Overrides every tolerance of the verification suite.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Restricts verification to one module.
    #[arg(long)]
    pub module_filter: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            output: None,
            seed: 0,
            class: None,
            n: None,
            p: None,
            q: None,
            sigma: 1.0,
            samples: 1,
            tol: None,
            module_filter: None,
        }
    }
}

/// An error tagged with the sub-operation that raised it.
#[derive(Debug)]
pub struct CliError {
    pub stage: &'static str,
    pub error: Error,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        if self.error.is_input_error() {
            EXIT_INPUT
        } else {
            EXIT_NUMERIC
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T> Stage<T> for crate::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|error| CliError { stage, error })
    }
}

fn input_error(stage: &'static str, msg: impl Into<String>) -> CliError {
    CliError { stage, error: Error::Schema(msg.into()) }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
    /// Files written, data first, manifest last.
    pub files: Vec<PathBuf>,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match config.command {
        Command::Classify => cmd_classify(config),
        Command::Sample => cmd_sample(config),
        Command::Stats => cmd_stats(config),
        Command::Verify => cmd_verify(config),
    }
}

fn manifest(config: &RunConfig, stream_ids: Vec<u64>) -> Manifest {
    Manifest {
        schema_version: SCHEMA_VERSION.into(),
        toolkit_version: TOOLKIT_VERSION.into(),
        command: format!("{:?}", config.command).to_lowercase(),
        config: serde_json::to_value(config).expect("serializable"),
        seed: Some(config.seed),
        stream_ids,
        rng: RNG_ALGORITHM.into(),
        threads: rayon::current_num_threads(),
        unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    }
}

/// Writes a JSON document to `--output` with its manifest, or returns it for stdout.
fn emit(config: &RunConfig, doc: &Value, stream_ids: Vec<u64>, summary: &mut Vec<String>) -> Result<Vec<PathBuf>, CliError> {
    let text = serde_json::to_string_pretty(doc).expect("serializable") + "\n";
    match &config.output {
        Some(path) => {
            fs::write(path, text).map_err(Error::from).stage("write output")?;
            let m = write_manifest(path, &manifest(config, stream_ids)).stage("write manifest")?;
            summary.push(format!("wrote {}", path.display()));
            Ok(vec![path.clone(), m])
        }
        None => {
            summary.push(text.trim_end().to_string());
            Ok(Vec::new())
        }
    }
}

fn read_input(config: &RunConfig, stage: &'static str) -> Result<PathBuf, CliError> {
    config.input.clone().ok_or_else(|| input_error(stage, "--input is required"))
}

pub fn cmd_classify(config: &RunConfig) -> Result<Outcome, CliError> {
    let path = read_input(config, "read input")?;
    let text = fs::read_to_string(&path).map_err(Error::from).stage("read input")?;
    let data = parse_symmetry_data(&text).stage("parse symmetry data")?;
    let report = classify(&data).stage("classify")?;
    let mut summary: Vec<String> = report
        .blocks
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let eps = b.epsilon.map(|e| format!(", eps {e:+}")).unwrap_or_default();
            format!("block {k}: dim {}, irrep dim {}, multiplicity {}, class {}{eps}", b.block_dim, b.irrep_dim, b.multiplicity, b.class)
        })
        .collect();
    let doc = json!({ "schema_version": SCHEMA_VERSION, "command": "classify", "report": report });
    let files = emit(config, &doc, Vec::new(), &mut summary)?;
    Ok(Outcome { exit_code: EXIT_OK, summary, files })
}

fn parse_class(config: &RunConfig) -> Result<SymmetryClass, CliError> {
    let label = config.class.as_deref().ok_or_else(|| input_error("parse config", "--class is required"))?;
    label.parse().stage("parse config")
}

fn ensemble_spec(config: &RunConfig) -> Result<EnsembleSpec, CliError> {
    let class = parse_class(config)?;
    let spec = if class.is_chiral() {
        let (p, q) = config.p.zip(config.q).ok_or_else(|| input_error("parse config", format!("{class} needs --p and --q")))?;
        EnsembleSpec::chiral(class, p, q)
    } else {
        EnsembleSpec::new(class, config.n.ok_or_else(|| input_error("parse config", format!("{class} needs --n")))?)
    }
    .with_sigma(config.sigma);
    spec.validate().stage("validate ensemble spec")?;
    if config.samples == 0 {
        return Err(CliError { stage: "validate ensemble spec", error: Error::SpecInvalid("samples must be positive".into()) });
    }
    Ok(spec)
}

pub fn cmd_sample(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = ensemble_spec(config)?;
    let output = config.output.clone().ok_or_else(|| input_error("parse config", "--output is required"))?;
    let samples = sample_campaign(&spec, config.seed, config.samples).stage("sample")?;
    let archive = Archive::from_samples(spec, config.seed, &samples);
    let mut files = write_archive(&output, &archive).stage("write archive")?;
    files.push(write_manifest(&output, &manifest(config, archive.stream_ids.clone())).stage("write manifest")?);
    let summary = vec![format!(
        "wrote {} {} matrices of dimension {} to {}",
        samples.len(),
        spec.class,
        spec.matrix_dim(),
        output.display()
    )];
    Ok(Outcome { exit_code: EXIT_OK, summary, files })
}

fn spectra_of(archive: &Archive) -> crate::Result<Vec<Vec<f64>>> {
    archive.matrices.par_iter().map(hermitian_eigenvalues).collect()
}

pub fn cmd_stats(config: &RunConfig) -> Result<Outcome, CliError> {
    let archive = match &config.input {
        Some(path) => read_archive(path).stage("read archive")?,
        None => {
            let spec = ensemble_spec(config)?;
            Archive::from_samples(spec, config.seed, &sample_campaign(&spec, config.seed, config.samples).stage("sample")?)
        }
    };
    let spectra = spectra_of(&archive).stage("eigenvalues")?;
    let report = spectral_report(archive.class, &spectra).stage("spectral statistics")?;
    let mut summary = vec![format!(
        "{} x {}: KS beta=1 {:.4}, beta=2 {:.4}, beta=4 {:.4} (best {}), symmetry defect {:.3e}",
        report.class,
        report.n_samples,
        report.ks_beta1,
        report.ks_beta2,
        report.ks_beta4,
        report.best_beta(),
        report.symmetry_violation
    )];
    if let Some(low) = &report.low_energy {
        summary.push(format!("first-bin density / bulk density = {:.3}", low.first_bin_ratio()));
    }
    let doc = json!({ "schema_version": SCHEMA_VERSION, "command": "stats", "report": report });
    let files = emit(config, &doc, archive.stream_ids.clone(), &mut summary)?;
    Ok(Outcome { exit_code: EXIT_OK, summary, files })
}

pub fn cmd_verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let verify = VerifyConfig { seed: config.seed, tol_override: config.tol, module_filter: config.module_filter.clone() };
    let result = run_verify(&verify).stage("verify")?;
    let mut summary: Vec<String> = result
        .checks
        .iter()
        .map(|c| {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            format!("[{verdict}] {}: {} (deviation {:.3e}, tolerance {:.1e})", c.module, c.name, c.deviation, c.tolerance)
        })
        .collect();
    let failed = result.checks.iter().filter(|c| !c.passed).count();
    summary.push(format!("{} checks, {failed} failed", result.checks.len()));
    let doc = json!({ "schema_version": SCHEMA_VERSION, "command": "verify", "summary": result });
    let files = if config.output.is_some() { emit(config, &doc, Vec::new(), &mut summary)? } else { Vec::new() };
    Ok(Outcome { exit_code: if result.passed { EXIT_OK } else { EXIT_VERIFY_FAILED }, summary, files })
}

/// Worker count from `TENFOLD_THREADS`, if set.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(input_error("parse environment", format!("TENFOLD_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}
