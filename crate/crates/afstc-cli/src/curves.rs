//! Producing one curve per requested output kind.

use afstc::analysis::{
    ser_asymptotic, ser_exact_full_opportunism, ser_exact_opportunistic,
    ser_mgf_opportunistic_source, ser_upper_bound_equal_antennas, GammaRatioParams, SerCurve,
    SerPoint, ZetaParams,
};
use afstc::montecarlo::{config_at_snr, run_sim};
use afstc::network::NetworkConfig;
use afstc::powerctl::SchemeId;

use crate::{CliError, ExperimentSpec, OutputKind};

/// Channel draws behind each per-relay MGF estimate. Fixed rather than
/// user-tunable: at 10⁵ draws the estimator's own Monte Carlo error is well
/// under the factorization bias that dominates its accuracy.
const MGF_SAMPLES: usize = 100_000;

/// A produced curve plus the effort counters the simulation engine reports
/// (absent for analytic outputs).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveOutcome {
    /// The curve, tagged with the output's provenance.
    pub curve: SerCurve,
    /// Trials spent per grid point (simulated output only).
    pub trials_used: Option<Vec<u64>>,
    /// Engine wall time in seconds (simulated output only).
    pub wall_time: Option<f64>,
}

/// Evaluates one output kind over the experiment's SNR grid.
///
/// ## Errors
///
/// [`CliError::Capability`] when the library has no such curve for the
/// scheme/shape (exact forms exist for the selection schemes only, the
/// upper bound needs equal antenna counts, the MGF estimate models source
/// selection); [`CliError::Run`] for numeric failures.
pub fn curve_for_output(spec: &ExperimentSpec, kind: OutputKind) -> Result<CurveOutcome, CliError> {
    let plan = &spec.plan;
    match kind {
        OutputKind::Simulated => {
            let result = run_sim(plan)?;
            Ok(CurveOutcome {
                curve: result.curve,
                trials_used: Some(result.trials_used),
                wall_time: Some(result.wall_time),
            })
        }
        OutputKind::Exact => match plan.scheme {
            SchemeId::OpportunisticRelay => analytic(spec, kind, |config| {
                Ok(ser_exact_opportunistic(
                    &GammaRatioParams::from_config(config),
                    &plan.modulation,
                )?)
            }),
            SchemeId::FullOpportunism => analytic(spec, kind, |config| {
                Ok(ser_exact_full_opportunism(
                    &ZetaParams::from_config(config),
                    &plan.modulation,
                )?)
            }),
            other => Err(CliError::Capability(format!(
                "no exact SER closed form exists for the `{other}` scheme; \
                 exact curves cover opp-relay and full-opp"
            ))),
        },
        OutputKind::Asymptotic => analytic(spec, kind, |config| {
            Ok(ser_asymptotic(config, &plan.modulation, plan.scheme)?)
        }),
        OutputKind::UpperBound => analytic(spec, kind, |config| {
            Ok(ser_upper_bound_equal_antennas(config, &plan.modulation)?)
        }),
        OutputKind::Mgf => {
            if plan.scheme != SchemeId::OpportunisticSource {
                return Err(CliError::Capability(format!(
                    "the MGF estimate models the source-selection scheme; \
                     requested for `{}`",
                    plan.scheme
                )));
            }
            analytic(spec, kind, |config| {
                Ok(ser_mgf_opportunistic_source(config, &plan.modulation, MGF_SAMPLES)?.value)
            })
        }
    }
}

/// Evaluates a per-config formula across the grid into a zero-CI curve.
fn analytic(
    spec: &ExperimentSpec,
    kind: OutputKind,
    f: impl Fn(&NetworkConfig) -> Result<f64, CliError>,
) -> Result<CurveOutcome, CliError> {
    let points = spec
        .plan
        .snr_db_grid
        .iter()
        .map(|&snr_db| {
            let config = config_at_snr(&spec.plan.config, snr_db);
            Ok(SerPoint {
                snr_db,
                value: f(&config)?,
                ci_halfwidth: 0.0,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(CurveOutcome {
        curve: SerCurve {
            provenance: kind.provenance(),
            points,
        },
        trials_used: None,
        wall_time: None,
    })
}
