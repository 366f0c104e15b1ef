//! Seeded, reproducible Monte Carlo simulation of the full two-phase link.
//!
//! One trial is one code block: draw `T` BPSK symbols and a channel
//! realization, run the scheme's power allocator, push the block through
//! [`simulate_transmission`], decode with [`decode_ml`], and count symbol
//! errors. Per-point error rates come with binomial confidence intervals.
//!
//! # Reproducibility across worker counts
//!
//! Every (SNR point, chunk) pair owns an independent ChaCha12 stream keyed
//! by a splitmix64 hash of `(seed, snr_index, chunk_id)`. Trials are issued
//! in waves of [`CHUNKS_PER_WAVE`] chunks; all chunks of a wave run
//! (possibly in parallel), their counts merge in chunk order, and the
//! stopping rule is evaluated only at wave boundaries. The set of executed
//! chunks — and hence every random draw — is a pure function of the plan,
//! so results are bit-identical for any thread count, including one.
//!
//! Wave sizes start small and double up to a cap, so cheap low-SNR points
//! stop after a few thousand trials while deep points keep streaming work
//! to all workers.

use std::time::Instant;

use ndarray::Array1;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{Provenance, SerCurve, SerPoint};
use crate::network::{sample_channel, ModulationFamily, ModulationSpec, NetworkConfig};
use crate::powerctl::{allocate, SchemeId};
use crate::stc::{build_codebook, decode_ml, simulate_transmission, CodeBook, StcError};

/// Chunks per scheduling wave; also the maximum useful worker count.
const CHUNKS_PER_WAVE: u64 = 64;

/// Trials per chunk in wave 0; doubles each wave up to [`MAX_CHUNK_TRIALS`].
const BASE_CHUNK_TRIALS: u64 = 32;

/// Trials per chunk once the ramp-up is over.
const MAX_CHUNK_TRIALS: u64 = 16_384;

/// Everything a simulation run needs, and nothing it has to guess.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPlan {
    /// Network shape, variances, and noise powers. `total_power` is
    /// overridden per grid point via `P = 𝒩₁·10^(snr_db/10)`.
    pub config: NetworkConfig,
    /// Power-allocation/selection strategy to simulate.
    pub scheme: SchemeId,
    /// Constellation; the decoder is exact for BPSK only, which is what the
    /// engine accepts.
    pub modulation: ModulationSpec,
    /// Strictly increasing transmit SNR grid in dB.
    pub snr_db_grid: Vec<f64>,
    /// Stop a point once this many symbol errors are seen (≥ 50).
    pub min_errors: u64,
    /// Hard trial budget per point (≥ `min_errors`).
    pub max_trials: u64,
    /// Root seed; every random draw derives from it deterministically.
    pub seed: u64,
}

/// A finished simulation: the curve plus per-point effort counters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Simulated SER per grid point, with 95% binomial confidence
    /// half-widths `1.96·√(p̂(1−p̂)/n_symbols)`.
    pub curve: SerCurve,
    /// Trials actually spent on each grid point.
    pub trials_used: Vec<u64>,
    /// Wall-clock duration of the whole run, in seconds.
    pub wall_time: f64,
}

/// Why a simulation plan was refused.
#[derive(Debug, Error)]
pub enum SimError {
    /// A plan field violates an invariant.
    #[error("invalid simulation plan: {field}: {reason}")]
    InvalidPlan {
        /// Offending field.
        field: &'static str,
        /// What was wrong with it.
        reason: String,
    },
    /// The requested shape or modulation has no simulator support.
    #[error("unsupported capability: {0}")]
    Capability(String),
}

impl From<StcError> for SimError {
    fn from(err: StcError) -> Self {
        SimError::Capability(err.to_string())
    }
}

/// splitmix64 finalizer; decorrelates consecutive keys.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream key for one chunk of one SNR point.
fn substream_seed(seed: u64, snr_index: usize, chunk_id: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ snr_index as u64) ^ chunk_id)
}

/// Trials each chunk of the given wave runs before budget clamping.
fn wave_chunk_trials(wave: usize) -> u64 {
    (BASE_CHUNK_TRIALS << wave.min(16)).min(MAX_CHUNK_TRIALS)
}

fn validate_plan(plan: &SimPlan) -> Result<(), SimError> {
    if plan.min_errors < 50 {
        return Err(SimError::InvalidPlan {
            field: "min_errors",
            reason: format!("must be at least 50, got {}", plan.min_errors),
        });
    }
    if plan.max_trials < plan.min_errors {
        return Err(SimError::InvalidPlan {
            field: "max_trials",
            reason: format!(
                "must be at least min_errors ({}), got {}",
                plan.min_errors, plan.max_trials
            ),
        });
    }
    for pair in plan.snr_db_grid.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(SimError::InvalidPlan {
                field: "snr_db_grid",
                reason: format!("must be strictly increasing, got {} after {}", pair[1], pair[0]),
            });
        }
    }
    if plan.snr_db_grid.iter().any(|v| !v.is_finite()) {
        return Err(SimError::InvalidPlan {
            field: "snr_db_grid",
            reason: "entries must be finite".into(),
        });
    }
    if !(plan.modulation.family == ModulationFamily::Mpsk && plan.modulation.m == 2) {
        return Err(SimError::Capability(format!(
            "the per-symbol ML decoder is exact only for BPSK over the real \
             orthogonal designs; M={} {:?} was requested",
            plan.modulation.m, plan.modulation.family
        )));
    }
    Ok(())
}

/// One coded block through the channel; returns the number of symbol errors.
fn run_trial(
    config: &NetworkConfig,
    codebook: &CodeBook,
    scheme: SchemeId,
    modulation: &ModulationSpec,
    rng: &mut ChaCha12Rng,
) -> u64 {
    let t = config.block_len;
    let scale = 1.0 / (t as f64).sqrt();
    let s = Array1::from_iter((0..t).map(|_| {
        Complex64::new(if rng.gen::<bool>() { scale } else { -scale }, 0.0)
    }));
    let chan = sample_channel(config, rng);
    let alloc = allocate(scheme, config, &chan);
    let trace = simulate_transmission(config, codebook, &alloc, &chan, &s, rng)
        .expect("shapes were validated when the plan was accepted");
    let decoded = decode_ml(&trace, codebook, config, &alloc, &chan, modulation);
    decoded
        .iter()
        .zip(s.iter())
        .filter(|(d, tx)| (d.re >= 0.0) != (tx.re >= 0.0))
        .count() as u64
}

/// Simulates one SNR point; returns (symbol errors, trials).
fn run_point(
    config: &NetworkConfig,
    codebook: &CodeBook,
    plan: &SimPlan,
    snr_index: usize,
) -> (u64, u64) {
    let mut errors = 0u64;
    let mut trials = 0u64;
    let mut wave = 0usize;
    while errors < plan.min_errors && trials < plan.max_trials {
        let wave_total = (wave_chunk_trials(wave) * CHUNKS_PER_WAVE).min(plan.max_trials - trials);
        let base = wave_total / CHUNKS_PER_WAVE;
        let extra = wave_total % CHUNKS_PER_WAVE;
        let first_chunk = wave as u64 * CHUNKS_PER_WAVE;
        let wave_errors: u64 = (0..CHUNKS_PER_WAVE)
            .into_par_iter()
            .map(|c| {
                let n = base + u64::from(c < extra);
                if n == 0 {
                    return 0;
                }
                let mut rng = ChaCha12Rng::seed_from_u64(substream_seed(
                    plan.seed,
                    snr_index,
                    first_chunk + c,
                ));
                (0..n)
                    .map(|_| run_trial(config, codebook, plan.scheme, &plan.modulation, &mut rng))
                    .sum()
            })
            .sum();
        errors += wave_errors;
        trials += wave_total;
        wave += 1;
    }
    (errors, trials)
}

/// The configuration a grid point runs under: the total transmit budget
/// rescaled so that `10·log₁₀(P/𝒩₁)` equals `snr_db`. This is the SNR axis
/// every curve in the workspace is plotted against.
pub fn config_at_snr(config: &NetworkConfig, snr_db: f64) -> NetworkConfig {
    let mut scaled = config.clone();
    scaled.total_power = config.noise1 * 10f64.powf(snr_db / 10.0);
    scaled
}

/// Runs the plan and returns the simulated SER curve.
///
/// Each grid point re-scales the transmit budget to `P = 𝒩₁·10^(snr_db/10)`
/// and simulates blocks until `min_errors` symbol errors accumulate or
/// `max_trials` blocks are spent, whichever comes first (checked at wave
/// boundaries, so points may overshoot `min_errors` slightly). Results are
/// bit-identical for a fixed plan regardless of thread count.
///
/// # Errors
///
/// [`SimError::InvalidPlan`] for violated plan invariants, and
/// [`SimError::Capability`] when no codebook exists for the shape or the
/// modulation is not BPSK (the decoder's per-symbol decomposition is exact
/// only for real constellations, and simulating through a mismatched
/// decoder would measure receiver loss, not scheme performance).
pub fn run_sim(plan: &SimPlan) -> Result<SimResult, SimError> {
    let start = Instant::now();
    validate_plan(plan)?;
    let codebook = build_codebook(
        plan.config.src_antennas,
        plan.config.num_relays,
        plan.config.block_len,
    )?;

    let mut points = Vec::with_capacity(plan.snr_db_grid.len());
    let mut trials_used = Vec::with_capacity(plan.snr_db_grid.len());
    for (snr_index, &snr_db) in plan.snr_db_grid.iter().enumerate() {
        let config = config_at_snr(&plan.config, snr_db);
        let (errors, trials) = run_point(&config, &codebook, plan, snr_index);
        let n_symbols = (trials * config.block_len as u64) as f64;
        let p_hat = errors as f64 / n_symbols;
        let ci_halfwidth = 1.96 * (p_hat * (1.0 - p_hat) / n_symbols).sqrt();
        points.push(SerPoint {
            snr_db,
            value: p_hat,
            ci_halfwidth,
        });
        trials_used.push(trials);
    }

    Ok(SimResult {
        curve: SerCurve {
            provenance: Provenance::Simulated,
            points,
        },
        trials_used,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Draws `n_draws` samples of the scheme's post-selection SNR — the
/// instantaneous post-combining SNR under the scheme's own allocation — for
/// distributional validation against the closed-form densities.
pub fn empirical_snr_distribution(
    config: &NetworkConfig,
    scheme: SchemeId,
    n_draws: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(splitmix64(seed));
    (0..n_draws)
        .map(|_| {
            let chan = sample_channel(config, &mut rng);
            let alloc = allocate(scheme, config, &chan);
            crate::stc::instantaneous_snr(config, &alloc, &chan)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::modulation_constants;

    fn bpsk() -> ModulationSpec {
        modulation_constants(ModulationFamily::Mpsk, 2).unwrap()
    }

    fn base_plan() -> SimPlan {
        SimPlan {
            config: NetworkConfig::homogeneous(2, 2, 1, 4, 1.0, 1.0, 1.0, 1.0, 4.0),
            scheme: SchemeId::OpportunisticRelay,
            modulation: bpsk(),
            snr_db_grid: vec![6.0],
            min_errors: 200,
            max_trials: 100_000,
            seed: 42,
        }
    }

    #[test]
    fn plan_invariants_are_enforced() {
        let mut plan = base_plan();
        plan.min_errors = 49;
        assert!(matches!(
            run_sim(&plan),
            Err(SimError::InvalidPlan { field: "min_errors", .. })
        ));

        let mut plan = base_plan();
        plan.max_trials = 100;
        assert!(matches!(
            run_sim(&plan),
            Err(SimError::InvalidPlan { field: "max_trials", .. })
        ));

        let mut plan = base_plan();
        plan.snr_db_grid = vec![10.0, 10.0];
        assert!(matches!(
            run_sim(&plan),
            Err(SimError::InvalidPlan { field: "snr_db_grid", .. })
        ));
    }

    #[test]
    fn non_bpsk_and_unknown_shapes_are_capability_errors() {
        let mut plan = base_plan();
        plan.modulation = modulation_constants(ModulationFamily::Mpsk, 4).unwrap();
        assert!(matches!(run_sim(&plan), Err(SimError::Capability(_))));

        let mut plan = base_plan();
        plan.config = NetworkConfig::homogeneous(3, 1, 1, 4, 1.0, 1.0, 1.0, 1.0, 4.0);
        let err = run_sim(&plan).unwrap_err();
        let SimError::Capability(msg) = err else {
            panic!("expected a capability error, got {err:?}");
        };
        assert!(msg.contains("no codebook"), "unexpected message: {msg}");
    }

    #[test]
    fn identical_plans_give_identical_curves() {
        let plan = base_plan();
        let first = run_sim(&plan).unwrap();
        let second = run_sim(&plan).unwrap();
        assert_eq!(first.curve, second.curve);
        assert_eq!(first.trials_used, second.trials_used);
    }

    #[test]
    fn thread_count_does_not_change_the_result() {
        let plan = base_plan();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_sim(&plan).unwrap());
        let several = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_sim(&plan).unwrap());
        assert_eq!(single.curve, several.curve);
        assert_eq!(single.trials_used, several.trials_used);
    }

    #[test]
    fn error_free_regime_exhausts_the_budget_and_reports_zero() {
        let mut plan = base_plan();
        plan.snr_db_grid = vec![80.0];
        plan.min_errors = 50;
        plan.max_trials = 2_000;
        let result = run_sim(&plan).unwrap();
        let point = result.curve.points[0];
        assert!(point.value <= 1.0 / plan.max_trials as f64);
        assert_eq!(result.trials_used[0], plan.max_trials);
        assert_eq!(point.ci_halfwidth, 0.0);
    }

    #[test]
    fn confidence_interval_matches_the_binomial_formula() {
        let plan = base_plan();
        let result = run_sim(&plan).unwrap();
        let point = result.curve.points[0];
        let n_symbols = (result.trials_used[0] * plan.config.block_len as u64) as f64;
        let expected = 1.96 * (point.value * (1.0 - point.value) / n_symbols).sqrt();
        assert!((point.ci_halfwidth - expected).abs() < 1e-15);
        assert!(point.value > 0.0, "6 dB should produce errors");
    }

    #[test]
    fn error_rate_falls_with_snr() {
        let mut plan = base_plan();
        plan.snr_db_grid = vec![0.0, 14.0];
        let result = run_sim(&plan).unwrap();
        let p = &result.curve.points;
        assert!(
            p[0].value > p[1].value + p[0].ci_halfwidth + p[1].ci_halfwidth,
            "expected a clear drop: {} vs {}",
            p[0].value,
            p[1].value
        );
        result.curve.validate().unwrap();
    }

    #[test]
    fn snr_samples_are_reproducible_and_positive() {
        let config = NetworkConfig::homogeneous(2, 2, 1, 4, 1.0, 1.0, 1.0, 1.0, 8.0);
        let a = empirical_snr_distribution(&config, SchemeId::FullOpportunism, 500, 3);
        let b = empirical_snr_distribution(&config, SchemeId::FullOpportunism, 500, 3);
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| v > 0.0));
        let c = empirical_snr_distribution(&config, SchemeId::FullOpportunism, 500, 4);
        assert_ne!(a, c);
    }
}
