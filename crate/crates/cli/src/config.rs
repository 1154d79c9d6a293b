//! Argument parsing and config-file merging.
//!
//! Precedence: command-line flags, then the `--config` file, then defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use invsq::boundstates::PhaseModel;
use invsq::potential::PotentialParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Phase,
    Figure1,
    PotentialDump,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    /// Atomic units.
    #[default]
    Natural,
    /// Lengths in x₀, wavenumbers in 1/x₀, energies in 1/x₀².
    X0,
}

#[derive(Debug, Parser)]
#[command(name = "invsq", version, about = "Eckart-regularized inverse-square potential: spectra, phase shifts, checks")]
pub struct Cli {
    pub command: Command,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long = "mu-tilde", allow_negative_numbers = true)]
    pub mu_tilde: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Number of bound states.
    #[arg(long)]
    pub states: Option<usize>,
    /// Lowest scattering energy (atomic units).
    #[arg(long = "e-min", allow_negative_numbers = true)]
    pub e_min: Option<f64>,
    #[arg(long = "e-max", allow_negative_numbers = true)]
    pub e_max: Option<f64>,
    #[arg(long = "e-steps")]
    pub e_steps: Option<usize>,
    #[arg(long = "mu-min", allow_negative_numbers = true)]
    pub mu_min: Option<f64>,
    #[arg(long = "mu-max", allow_negative_numbers = true)]
    pub mu_max: Option<f64>,
    /// Points in the figure1 μ sweep.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Points in the potential dump.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub units: Option<Units>,
    /// Inner offset used by the closed forms: eckart or power-law.
    #[arg(long = "phase-model")]
    pub phase_model: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file, or JSON with a "config" object (as emitted by --format json).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run configuration; embedded in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub mu: f64,
    pub mu_tilde: f64,
    pub x0: f64,
    pub lambda: f64,
    pub states: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub e_steps: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    pub steps: usize,
    pub points: usize,
    pub format: Format,
    pub units: Units,
    pub phase_model: PhaseModel,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        RunConfig {
            command,
            mu: 1.25,
            mu_tilde: 0.2,
            x0: 1e-3,
            lambda: 1.0,
            states: 6,
            e_min: 5e-5,
            e_max: 50.0,
            e_steps: 50,
            mu_min: 0.3,
            mu_max: 3.0,
            steps: 400,
            points: 200,
            format: Format::Csv,
            units: Units::Natural,
            phase_model: PhaseModel::Eckart,
            out: None,
        }
    }

    pub fn params(&self) -> Result<PotentialParams, CliError> {
        PotentialParams::new(self.mu, self.mu_tilde, self.x0, self.lambda).map_err(CliError::guard)
    }

    fn check(&self) -> Result<(), CliError> {
        self.params()?;
        let usage = |m: String| Err(CliError::Usage(m));
        if self.states == 0 {
            return usage("--states must be at least 1".into());
        }
        if self.command == Command::Phase && !(self.e_min > 0.0 && self.e_max > self.e_min) {
            return usage(format!(
                "phase sweep needs 0 < e-min < e-max (got {}, {})",
                self.e_min, self.e_max
            ));
        }
        if self.e_steps < 2 || self.steps < 2 || self.points < 2 {
            return usage("--e-steps, --steps and --points must be at least 2".into());
        }
        if self.command == Command::Figure1 && !(self.mu_min > 0.25 && self.mu_max > self.mu_min) {
            return usage(format!(
                "figure1 sweep needs 1/4 < mu-min < mu-max (strong-coupling regime requires mu > 1/4; got {}, {})",
                self.mu_min, self.mu_max
            ));
        }
        Ok(())
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("config key '{key}': cannot parse '{value}'")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value.trim(), true).map_err(|_| CliError::Usage(format!("config key '{key}': invalid value '{value}'")))
}

/// Apply a flat key=value file; `#` starts a comment.
fn apply_key_values(cfg: &mut RunConfig, text: &str) -> Result<(), CliError> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        match key.as_str() {
            "mu" => cfg.mu = parse_value(&key, value)?,
            "mu-tilde" => cfg.mu_tilde = parse_value(&key, value)?,
            "x0" => cfg.x0 = parse_value(&key, value)?,
            "lambda" => cfg.lambda = parse_value(&key, value)?,
            "states" => cfg.states = parse_value(&key, value)?,
            "e-min" => cfg.e_min = parse_value(&key, value)?,
            "e-max" => cfg.e_max = parse_value(&key, value)?,
            "e-steps" => cfg.e_steps = parse_value(&key, value)?,
            "mu-min" => cfg.mu_min = parse_value(&key, value)?,
            "mu-max" => cfg.mu_max = parse_value(&key, value)?,
            "steps" => cfg.steps = parse_value(&key, value)?,
            "points" => cfg.points = parse_value(&key, value)?,
            "format" => cfg.format = parse_enum(&key, value)?,
            "units" => cfg.units = parse_enum(&key, value)?,
            "phase-model" => cfg.phase_model = value.trim().parse().map_err(CliError::guard)?,
            "out" => cfg.out = Some(PathBuf::from(value.trim())),
            // the subcommand always comes from the command line
            "command" => {}
            other => return Err(CliError::Usage(format!("unknown config key '{other}'"))),
        }
    }
    Ok(())
}

fn load_config_file(cfg: &mut RunConfig, path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let mut inner = value
            .get("config")
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("config {}: no \"config\" object", path.display())))?;
        if let Some(obj) = inner.as_object_mut() {
            obj.insert("command".into(), serde_json::to_value(cfg.command).expect("command serializes"));
        }
        let out = cfg.out.take();
        *cfg = serde_json::from_value(inner).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        cfg.out = out;
        Ok(())
    } else {
        apply_key_values(cfg, &text)
    }
}

pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::defaults(cli.command);
    if let Some(path) = &cli.config {
        load_config_file(&mut cfg, path)?;
    }
    macro_rules! overlay {
        ($($field:ident),*) => { $( if let Some(v) = cli.$field { cfg.$field = v; } )* };
    }
    overlay!(mu, mu_tilde, x0, lambda, states, e_min, e_max, e_steps, mu_min, mu_max, steps, points, format, units);
    if let Some(m) = &cli.phase_model {
        cfg.phase_model = m.parse().map_err(CliError::guard)?;
    }
    if cli.out.is_some() {
        cfg.out = cli.out;
    }
    cfg.check()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        let mut argv = vec!["invsq"];
        argv.extend_from_slice(args);
        resolve(Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?)
    }

    #[test]
    fn happy_path() {
        let cfg = parse(&["spectrum", "--mu", "1.25", "--mu-tilde", "0.2", "--x0", "1e-3", "--lambda", "1", "--states", "6"]).unwrap();
        assert_eq!(cfg.states, 6);
        assert_eq!(cfg.command, Command::Spectrum);
    }

    #[test]
    fn weak_coupling_names_the_guard() {
        let err = parse(&["spectrum", "--mu", "0.2"]).unwrap_err();
        assert!(err.to_string().contains("strong-coupling regime requires"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn mu_tilde_guard() {
        let err = parse(&["spectrum", "--mu-tilde", "0.3"]).unwrap_err();
        assert!(err.to_string().contains("0 < μ̃ < 1/4"), "{err}");
    }

    #[test]
    fn flags_override_key_value_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "# run\nmu = 2.0\nstates=3\nphase_model = power-law\n").unwrap();
        let cfg = parse(&["spectrum", "--config", path.to_str().unwrap(), "--states", "4"]).unwrap();
        assert_eq!(cfg.mu, 2.0);
        assert_eq!(cfg.states, 4);
        assert_eq!(cfg.phase_model, PhaseModel::PowerLaw);
    }

    #[test]
    fn unknown_config_key_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "mew = 2.0\n").unwrap();
        let err = parse(&["spectrum", "--config", path.to_str().unwrap()]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
