//! The machine-readable session summary: resolved specs, diversity-order
//! estimates, and dB-gain comparisons at a target error rate.

use std::path::PathBuf;

use afstc::analysis::{estimate_diversity_order, SerCurve};
use serde::Serialize;

use crate::curves::CurveOutcome;
use crate::{ExperimentSpec, OutputKind};

/// Everything one experiment produced, before summarization.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    /// The resolved spec the curves were produced from.
    pub spec: ExperimentSpec,
    /// Produced outputs in request order: kind, CSV path, curve.
    pub produced: Vec<(OutputKind, PathBuf, CurveOutcome)>,
}

impl ExperimentReport {
    /// Bundles a spec with its produced outputs.
    pub fn new(spec: ExperimentSpec, produced: Vec<(OutputKind, PathBuf, CurveOutcome)>) -> Self {
        Self { spec, produced }
    }

    /// The curve backing gain comparisons: the simulated one when present,
    /// otherwise the first produced output.
    pub fn comparison_curve(&self) -> Option<&SerCurve> {
        self.produced
            .iter()
            .find(|(kind, _, _)| *kind == OutputKind::Simulated)
            .or_else(|| self.produced.first())
            .map(|(_, _, outcome)| &outcome.curve)
    }
}

/// Tool identity stamped into every summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolInfo {
    /// Binary name.
    pub name: &'static str,
    /// Crate version.
    pub version: &'static str,
}

/// One produced output in the summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSummary {
    /// Which curve this is.
    pub kind: OutputKind,
    /// CSV file name (relative to the experiment's output directory).
    pub csv: String,
    /// Log-log slope estimate from the curve's deep end, when the curve
    /// supports one (`null` otherwise — e.g. too few positive points).
    pub diversity_order: Option<f64>,
    /// Trials spent per grid point (simulated outputs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials_used: Option<Vec<u64>>,
    /// Simulation wall time in seconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// One experiment in the summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    /// Scheme-plus-shape label, also the CSV filename stem.
    pub label: String,
    /// The full resolved spec, for provenance.
    pub spec: ExperimentSpec,
    /// Produced outputs in request order.
    pub outputs: Vec<OutputSummary>,
}

/// One gain comparison at the target error rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainEntry {
    /// Label of the (expected-better) candidate experiment.
    pub candidate: String,
    /// Label of the reference experiment.
    pub reference: String,
    /// SNR where the candidate's curve crosses the target, dB.
    pub candidate_snr_db: Option<f64>,
    /// SNR where the reference's curve crosses the target, dB.
    pub reference_snr_db: Option<f64>,
    /// `reference_snr_db − candidate_snr_db`: positive when the candidate
    /// needs less SNR. `null` when either curve misses the target.
    pub gain_db: Option<f64>,
}

/// Gain comparisons plus the level they were read at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainReport {
    /// Error rate the crossings are interpolated at.
    pub target_ber: f64,
    /// One entry per compared pair.
    pub entries: Vec<GainEntry>,
}

/// The whole `summary.json` document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// Tool identity.
    pub tool: ToolInfo,
    /// Every experiment with its outputs.
    pub experiments: Vec<ExperimentSummary>,
    /// Pairwise gains at the target error rate.
    pub gain_report: GainReport,
}

/// SNR (dB) where the curve crosses `target`, by log-linear interpolation
/// on the first segment that brackets it from above. Zero-valued points
/// cannot appear in a log interpolation and end the search (the curve has
/// fallen below anything measurable). `None` when the curve never crosses.
pub fn snr_at_target(curve: &SerCurve, target: f64) -> Option<f64> {
    if !(target > 0.0) {
        return None;
    }
    for pair in curve.points.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.value <= 0.0 || b.value < 0.0 {
            return None;
        }
        if a.value >= target && b.value <= target {
            if b.value == 0.0 {
                return None;
            }
            if a.value == b.value {
                return Some(a.snr_db);
            }
            let t = (target.log10() - a.value.log10()) / (b.value.log10() - a.value.log10());
            return Some(a.snr_db + t * (b.snr_db - a.snr_db));
        }
    }
    None
}

/// Builds the summary document from finished experiments.
pub fn build_summary(
    reports: &[ExperimentReport],
    pairs: &[(usize, usize)],
    target_ber: f64,
) -> Summary {
    let experiments = reports
        .iter()
        .map(|report| ExperimentSummary {
            label: report.spec.label(),
            spec: report.spec.clone(),
            outputs: report
                .produced
                .iter()
                .map(|(kind, path, outcome)| OutputSummary {
                    kind: *kind,
                    csv: path
                        .file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    diversity_order: estimate_diversity_order(&outcome.curve).ok(),
                    trials_used: outcome.trials_used.clone(),
                    wall_time_s: outcome.wall_time,
                })
                .collect(),
        })
        .collect();

    let entries = pairs
        .iter()
        .filter(|&&(c, r)| c < reports.len() && r < reports.len())
        .map(|&(c, r)| {
            let candidate_snr_db = reports[c]
                .comparison_curve()
                .and_then(|curve| snr_at_target(curve, target_ber));
            let reference_snr_db = reports[r]
                .comparison_curve()
                .and_then(|curve| snr_at_target(curve, target_ber));
            GainEntry {
                candidate: reports[c].spec.label(),
                reference: reports[r].spec.label(),
                candidate_snr_db,
                reference_snr_db,
                gain_db: match (candidate_snr_db, reference_snr_db) {
                    (Some(c), Some(r)) => Some(r - c),
                    _ => None,
                },
            }
        })
        .collect();

    Summary {
        tool: ToolInfo {
            name: "afstc-cli",
            version: env!("CARGO_PKG_VERSION"),
        },
        experiments,
        gain_report: GainReport {
            target_ber,
            entries,
        },
    }
}
