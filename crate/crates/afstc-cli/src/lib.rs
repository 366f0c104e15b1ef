//! Experiment runner around the `afstc` library.
//!
//! An [`ExperimentSpec`] names a network shape, a scheme, an SNR grid, and a
//! set of requested outputs (simulated and/or analytic curves). Running a
//! session produces one CSV per output — identical column layout for every
//! curve kind, so plotting tools can overlay them blindly — plus a
//! `summary.json` with the resolved specs, estimated diversity orders, and
//! dB-gain comparisons between curves at a target error rate.
//!
//! Specs come from three layers, each overriding the previous: a built-in
//! [`Preset`](presets::Preset) reproducing one of the reference figures, a
//! JSON config file, and command-line flags.

mod csvio;
mod curves;
pub mod presets;
pub mod report;

pub use csvio::{read_curve_csv, write_curve_csv};
pub use curves::curve_for_output;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use afstc::analysis::{AnalysisError, Provenance};
use afstc::montecarlo::{SimError, SimPlan};
use afstc::network::{modulation_constants, ModulationFamily, ModulationSpec, NetworkConfig};
use afstc::powerctl::SchemeId;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use report::{build_summary, ExperimentReport, Summary};

/// Which curve a CSV should hold.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum OutputKind {
    /// Monte Carlo SER with binomial confidence intervals.
    Simulated,
    /// Quadrature of the conditional SER against the selection SNR density.
    Exact,
    /// High-SNR closed form from the density's origin coefficients.
    Asymptotic,
    /// Closed-form upper bound for equal antenna counts.
    UpperBound,
    /// Factorized moment-generating-function estimate (source selection).
    Mgf,
}

impl OutputKind {
    /// Provenance tag the produced curve carries.
    pub fn provenance(self) -> Provenance {
        match self {
            OutputKind::Simulated => Provenance::Simulated,
            OutputKind::Exact => Provenance::Exact,
            OutputKind::Asymptotic => Provenance::Asymptotic,
            OutputKind::UpperBound => Provenance::UpperBound,
            OutputKind::Mgf => Provenance::Mgf,
        }
    }

    /// Stable name used in filenames and the summary (same spelling as the
    /// CSV `provenance` column).
    pub fn name(self) -> &'static str {
        self.provenance().name()
    }
}

/// One experiment: a simulation plan plus the outputs to derive from it and
/// where to write them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Network, scheme, modulation, grid, budgets, and seed.
    #[serde(flatten)]
    pub plan: SimPlan,
    /// Curves to produce; at least one.
    pub outputs: Vec<OutputKind>,
    /// Directory the CSVs and summary are written into.
    pub out_path: PathBuf,
}

impl ExperimentSpec {
    /// Filename stem identifying this experiment: scheme plus shape, e.g.
    /// `opp-relay_R2_Ns2_Nd1`.
    pub fn label(&self) -> String {
        format!(
            "{}_R{}_Ns{}_Nd{}",
            self.plan.scheme,
            self.plan.config.num_relays,
            self.plan.config.src_antennas,
            self.plan.config.dst_antennas
        )
    }

    /// CSV path for one output of this experiment.
    pub fn csv_path(&self, kind: OutputKind) -> PathBuf {
        self.out_path.join(format!("{}_{}.csv", self.label(), kind.name()))
    }
}

/// Why an experiment run stopped, mapped onto the process exit codes:
/// invalid spec → 2, capability → 3, everything else → 1.
#[derive(Debug, Error)]
pub enum CliError {
    /// A spec field violates an invariant. Exit code 2.
    #[error("invalid experiment spec: {field}: {reason}")]
    InvalidSpec {
        /// Offending field.
        field: String,
        /// What was wrong with it.
        reason: String,
    },
    /// The requested combination has no supported implementation. Exit 3.
    #[error("unsupported capability: {0}")]
    Capability(String),
    /// Filesystem or serialization failure. Exit code 1.
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    /// A numeric routine failed at run time (quadrature and friends). Exit 1.
    #[error("run failure: {0}")]
    Run(String),
}

impl CliError {
    /// Process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidSpec { .. } => 2,
            CliError::Capability(_) => 3,
            CliError::Io(_) | CliError::Run(_) => 1,
        }
    }
}

impl From<SimError> for CliError {
    fn from(err: SimError) -> Self {
        match err {
            SimError::InvalidPlan { field, reason } => CliError::InvalidSpec {
                field: field.to_string(),
                reason,
            },
            SimError::Capability(msg) => CliError::Capability(msg),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(err: AnalysisError) -> Self {
        match err {
            AnalysisError::Capability(msg) => CliError::Capability(msg),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Run(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Run(err.to_string())
    }
}

/// Checks every invariant that makes a spec *well-formed* (exit code 2
/// territory). Capability limits — shapes or outputs the library cannot
/// serve — surface later, when the curves are produced.
pub fn validate_spec(spec: &ExperimentSpec) -> Result<(), CliError> {
    if spec.outputs.is_empty() {
        return Err(CliError::InvalidSpec {
            field: "outputs".into(),
            reason: "at least one output must be requested".into(),
        });
    }
    let mut seen = BTreeSet::new();
    for &kind in &spec.outputs {
        if !seen.insert(kind) {
            return Err(CliError::InvalidSpec {
                field: "outputs".into(),
                reason: format!("duplicate output `{}`", kind.name()),
            });
        }
    }
    spec.plan
        .config
        .validate()
        .map_err(|e| CliError::InvalidSpec {
            field: "config".into(),
            reason: e.to_string(),
        })?;
    if spec.plan.snr_db_grid.is_empty() {
        return Err(CliError::InvalidSpec {
            field: "snr_db_grid".into(),
            reason: "must contain at least one SNR point".into(),
        });
    }
    if spec.plan.snr_db_grid.iter().any(|v| !v.is_finite()) {
        return Err(CliError::InvalidSpec {
            field: "snr_db_grid".into(),
            reason: "entries must be finite".into(),
        });
    }
    for pair in spec.plan.snr_db_grid.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(CliError::InvalidSpec {
                field: "snr_db_grid".into(),
                reason: format!("must be strictly increasing, got {} after {}", pair[1], pair[0]),
            });
        }
    }
    if spec.plan.min_errors < 50 {
        return Err(CliError::InvalidSpec {
            field: "min_errors".into(),
            reason: format!("must be at least 50, got {}", spec.plan.min_errors),
        });
    }
    if spec.plan.max_trials < spec.plan.min_errors {
        return Err(CliError::InvalidSpec {
            field: "max_trials".into(),
            reason: format!(
                "must be at least min_errors ({}), got {}",
                spec.plan.min_errors, spec.plan.max_trials
            ),
        });
    }
    Ok(())
}

/// A batch of experiments evaluated together: the curve files they produce
/// plus one summary comparing them.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    /// The experiments, in presentation order.
    pub specs: Vec<ExperimentSpec>,
    /// `(candidate, reference)` index pairs the gain report compares.
    pub pairs: Vec<(usize, usize)>,
    /// Error-rate level the gains are read off at.
    pub target_ber: f64,
}

/// Runs one experiment: produces every requested curve and writes one CSV
/// per output into `spec.out_path`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, CliError> {
    validate_spec(spec)?;
    std::fs::create_dir_all(&spec.out_path)?;
    let mut produced = Vec::with_capacity(spec.outputs.len());
    for &kind in &spec.outputs {
        let outcome = curve_for_output(spec, kind)?;
        let path = spec.csv_path(kind);
        write_curve_csv(&path, &outcome.curve, &spec.plan)?;
        produced.push((kind, path, outcome));
    }
    Ok(ExperimentReport::new(spec.clone(), produced))
}

/// Runs a whole session and writes `summary.json` next to the curve CSVs.
///
/// Returns the summary (also persisted). Any error leaves already-written
/// CSVs in place but produces no summary, and the process exit code should
/// then come from [`CliError::exit_code`].
pub fn run_session(session: &Session) -> Result<Summary, CliError> {
    if session.specs.is_empty() {
        return Err(CliError::InvalidSpec {
            field: "specs".into(),
            reason: "a session needs at least one experiment".into(),
        });
    }
    for spec in &session.specs {
        validate_spec(spec)?;
    }
    let mut reports = Vec::with_capacity(session.specs.len());
    for spec in &session.specs {
        reports.push(run_experiment(spec)?);
    }
    let summary = build_summary(&reports, &session.pairs, session.target_ber);
    let path = summary_path(session);
    std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}

/// Where a session's summary lands: `summary.json` in the first experiment's
/// output directory (sessions share one directory in practice).
pub fn summary_path(session: &Session) -> PathBuf {
    session.specs[0].out_path.join("summary.json")
}

/// Default modulation when neither config nor preset names one.
pub fn default_modulation() -> ModulationSpec {
    modulation_constants(ModulationFamily::Mpsk, 2).expect("BPSK constants always exist")
}

/// Partial experiment description: a JSON config file or the command-line
/// flags, both of which may leave any field to another layer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialSpec {
    /// Network shape and variances.
    pub config: Option<NetworkConfig>,
    /// Scheme to run.
    pub scheme: Option<SchemeId>,
    /// Constellation.
    pub modulation: Option<ModulationSpec>,
    /// SNR grid in dB.
    pub snr_db_grid: Option<Vec<f64>>,
    /// Per-point error target.
    pub min_errors: Option<u64>,
    /// Per-point trial budget.
    pub max_trials: Option<u64>,
    /// Root seed.
    pub seed: Option<u64>,
    /// Requested outputs.
    pub outputs: Option<Vec<OutputKind>>,
    /// Output directory.
    pub out_path: Option<PathBuf>,
}

impl PartialSpec {
    /// Overlays `self` onto an existing spec: present fields replace the
    /// spec's values, absent fields keep them.
    pub fn apply_to(&self, spec: &mut ExperimentSpec) {
        if let Some(config) = &self.config {
            spec.plan.config = config.clone();
        }
        if let Some(scheme) = self.scheme {
            spec.plan.scheme = scheme;
        }
        if let Some(modulation) = self.modulation {
            spec.plan.modulation = modulation;
        }
        if let Some(grid) = &self.snr_db_grid {
            spec.plan.snr_db_grid = grid.clone();
        }
        if let Some(min_errors) = self.min_errors {
            spec.plan.min_errors = min_errors;
        }
        if let Some(max_trials) = self.max_trials {
            spec.plan.max_trials = max_trials;
        }
        if let Some(seed) = self.seed {
            spec.plan.seed = seed;
        }
        if let Some(outputs) = &self.outputs {
            spec.outputs = outputs.clone();
        }
        if let Some(out_path) = &self.out_path {
            spec.out_path = out_path.clone();
        }
    }

    /// Builds a complete spec from this layer alone, erroring on any field
    /// no layer supplied (only `config` and `scheme` are truly mandatory;
    /// the rest have defaults).
    pub fn into_spec(self) -> Result<ExperimentSpec, CliError> {
        let config = self.config.ok_or_else(|| CliError::InvalidSpec {
            field: "config".into(),
            reason: "a network configuration is required (config file or preset)".into(),
        })?;
        let scheme = self.scheme.ok_or_else(|| CliError::InvalidSpec {
            field: "scheme".into(),
            reason: "a scheme is required (config file, preset, or --scheme)".into(),
        })?;
        let snr_db_grid = self.snr_db_grid.ok_or_else(|| CliError::InvalidSpec {
            field: "snr_db_grid".into(),
            reason: "an SNR grid is required (config file, preset, or --snr-db)".into(),
        })?;
        Ok(ExperimentSpec {
            plan: SimPlan {
                config,
                scheme,
                modulation: self.modulation.unwrap_or_else(default_modulation),
                snr_db_grid,
                min_errors: self.min_errors.unwrap_or(200),
                max_trials: self.max_trials.unwrap_or(10_000_000),
                seed: self.seed.unwrap_or(0x5EED),
            },
            outputs: self.outputs.unwrap_or_else(|| vec![OutputKind::Simulated]),
            out_path: self.out_path.unwrap_or_else(|| PathBuf::from("afstc-out")),
        })
    }
}

/// Assembles the session from the three layers: preset (if any), then the
/// config file, then flags, later layers overriding earlier ones.
pub fn assemble(
    preset: Option<presets::Preset>,
    file: Option<PartialSpec>,
    flags: PartialSpec,
) -> Result<Session, CliError> {
    match preset {
        Some(preset) => {
            let mut session = presets::expand(preset);
            for spec in &mut session.specs {
                if let Some(file) = &file {
                    file.apply_to(spec);
                }
                flags.apply_to(spec);
            }
            Ok(session)
        }
        None => {
            let mut merged = file.ok_or_else(|| CliError::InvalidSpec {
                field: "config".into(),
                reason: "either --config or --preset is required".into(),
            })?;
            let overlay = |dst: &mut PartialSpec, src: &PartialSpec| {
                macro_rules! take {
                    ($field:ident) => {
                        if src.$field.is_some() {
                            dst.$field = src.$field.clone();
                        }
                    };
                }
                take!(config);
                take!(scheme);
                take!(modulation);
                take!(snr_db_grid);
                take!(min_errors);
                take!(max_trials);
                take!(seed);
                take!(outputs);
                take!(out_path);
            };
            overlay(&mut merged, &flags);
            Ok(Session {
                specs: vec![merged.into_spec()?],
                pairs: Vec::new(),
                target_ber: 1e-4,
            })
        }
    }
}

/// Loads a [`PartialSpec`] from a JSON config file.
pub fn load_config_file(path: &Path) -> Result<PartialSpec, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::InvalidSpec {
        field: "config".into(),
        reason: format!("{}: {e}", path.display()),
    })
}

/// Parses the `--snr-db start:step:stop` grid syntax into an inclusive grid.
pub fn parse_snr_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let invalid = |reason: String| CliError::InvalidSpec {
        field: "snr_db_grid".into(),
        reason,
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(invalid(format!("expected start:step:stop, got `{text}`")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| invalid(format!("`{text}`: {e}")))?;
    let (start, step, stop) = (nums[0], nums[1], nums[2]);
    if !start.is_finite() || !step.is_finite() || !stop.is_finite() {
        return Err(invalid("grid endpoints and step must be finite".into()));
    }
    if step <= 0.0 {
        return Err(invalid(format!("step must be positive, got {step}")));
    }
    if stop < start {
        return Err(invalid(format!("stop {stop} lies before start {start}")));
    }
    let count = ((stop - start) / step).round() as usize;
    let grid: Vec<f64> = (0..=count).map(|i| start + i as f64 * step).collect();
    if (grid[count] - stop).abs() > 1e-9 * step.max(1.0) {
        return Err(invalid(format!(
            "step {step} does not divide the span from {start} to {stop}"
        )));
    }
    Ok(grid)
}

