//! The four power-allocation/selection strategies, each mapping a channel
//! realization (under its own CSI assumption) to a concrete power split.
//!
//! All strategies spend half the budget per phase (`τ = 1/2`, the reference
//! convention for comparisons); they differ in how each phase's budget is
//! spread:
//!
//! * **DSTC uniform** — no CSI anywhere: power is spread evenly over source
//!   antennas and relays.
//! * **Opportunistic relay** — destination-side CSI picks the single relay
//!   maximizing the post-detection SNR; the source stays uniform.
//! * **Full opportunism** — source-side CSI additionally concentrates the
//!   phase-1 budget on the best antenna toward the selected relay.
//! * **Opportunistic source** — the source picks its best antenna while the
//!   relays, uninformed, stay uniform.
//!
//! [`optimal_tau`] and [`average_snr_two_phase`] cover the remaining degree
//! of freedom — how to split the budget *between* the phases — in closed
//! form for homogeneous networks.

use crate::network::{ChannelRealization, NetworkConfig, PowerAllocation};
use crate::numutil::harmonic;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by the closed-form power-splitting operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerCtlError {
    /// The closed forms only exist when all relays share hop variances.
    #[error(
        "closed-form phase splitting needs a homogeneous network (every relay \
         sharing one σ_f² and one σ_g²); this configuration's variances differ"
    )]
    HeterogeneousNetwork,
    /// A phase fraction outside the open unit interval.
    #[error("tau must lie strictly inside (0, 1), got {tau}")]
    TauOutOfRange {
        /// The offending value.
        tau: f64,
    },
}

/// The four transmission strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeId {
    /// Uniform power everywhere, no CSI used.
    #[serde(rename = "dstc")]
    DstcUniform,
    /// Best single relay, uniform source antennas.
    #[serde(rename = "opp-relay")]
    OpportunisticRelay,
    /// Best relay and best source antenna.
    #[serde(rename = "full-opp")]
    FullOpportunism,
    /// Best source antenna, uniform relays.
    #[serde(rename = "opp-source")]
    OpportunisticSource,
}

impl SchemeId {
    /// All schemes, in presentation order.
    pub const ALL: [SchemeId; 4] = [
        SchemeId::DstcUniform,
        SchemeId::OpportunisticRelay,
        SchemeId::FullOpportunism,
        SchemeId::OpportunisticSource,
    ];

    /// Stable string name (used on the command line and in CSV output).
    pub fn name(self) -> &'static str {
        match self {
            SchemeId::DstcUniform => "dstc",
            SchemeId::OpportunisticRelay => "opp-relay",
            SchemeId::FullOpportunism => "full-opp",
            SchemeId::OpportunisticSource => "opp-source",
        }
    }
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SchemeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dstc" => Ok(SchemeId::DstcUniform),
            "opp-relay" => Ok(SchemeId::OpportunisticRelay),
            "full-opp" => Ok(SchemeId::FullOpportunism),
            "opp-source" => Ok(SchemeId::OpportunisticSource),
            other => Err(format!(
                "unknown scheme `{other}`; expected one of dstc, opp-relay, full-opp, opp-source"
            )),
        }
    }
}

/// Per-realization selection statistics the strategies decide on.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionMetrics {
    /// Per-relay SNR value achieved when relay `i` gets the whole phase-2
    /// budget under a uniform source:
    /// `λ_i = P₁P₂‖f_i‖²‖g_i‖² / (P₂Ns‖g_i‖²N₁ + NsNdN₂(σ_{f_i}²P₁+N₁))`.
    pub lambda_per_relay: Vec<f64>,
    /// Strongest incoming source link per relay, `ξ_r = maxₙ |f_{n,r}|²`.
    pub xi_per_relay: Vec<f64>,
    /// Per-antenna SNR slope under uniform relay powers (plain relay gains):
    /// `θ_n = Σ_r |f_{n,r}|²ρ_r²‖g_r‖² / (Σ_k ρ_k²‖g_k‖²N₁ + NdN₂)`.
    pub theta_per_antenna: Vec<f64>,
    /// Gain-normalized antenna metric deciding the opportunistic source,
    /// `θ̃_n = Σ_r |f_{n,r}|²‖g_r‖² / (σ_{ξ_r}²P₁ + N₁)`.
    pub theta_tilde_per_antenna: Vec<f64>,
    /// Mean of `ξ_r`: the strongest of `Ns` exponentials has mean
    /// `σ_{f_r}²·H_{Ns}` with `H_{Ns} = Σ_{k=1}^{Ns} 1/k`.
    pub sigma_xi_sq: Vec<f64>,
}

/// Lowest index among the maxima (strict-greater scan).
fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// The reference phase split: half the budget per phase.
pub(crate) const EQUAL_SPLIT: f64 = 0.5;

fn squared_column_norm(chan: &ChannelRealization, r: usize) -> f64 {
    chan.f.column(r).iter().map(|z| z.norm_sqr()).sum()
}

fn squared_row_norm(chan: &ChannelRealization, r: usize) -> f64 {
    chan.g.row(r).iter().map(|z| z.norm_sqr()).sum()
}

/// Computes every selection statistic for one channel realization under the
/// equal phase split.
pub fn selection_metrics(config: &NetworkConfig, chan: &ChannelRealization) -> SelectionMetrics {
    let relays = config.num_relays;
    let ns = config.src_antennas;
    let nd = config.dst_antennas as f64;
    let p1 = EQUAL_SPLIT * config.total_power;
    let p2 = (1.0 - EQUAL_SPLIT) * config.total_power;
    let n1 = config.noise1;
    let n2 = config.noise2;

    let f_norm: Vec<f64> = (0..relays).map(|r| squared_column_norm(chan, r)).collect();
    let g_norm: Vec<f64> = (0..relays).map(|r| squared_row_norm(chan, r)).collect();

    let lambda_per_relay: Vec<f64> = (0..relays)
        .map(|i| {
            p1 * p2 * f_norm[i] * g_norm[i]
                / (p2 * ns as f64 * g_norm[i] * n1
                    + ns as f64 * nd * n2 * (config.sigma_f_sq[i] * p1 + n1))
        })
        .collect();

    let xi_per_relay: Vec<f64> = (0..relays)
        .map(|r| {
            chan.f
                .column(r)
                .iter()
                .map(|z| z.norm_sqr())
                .fold(0.0, f64::max)
        })
        .collect();

    let h_ns = harmonic(ns as u32);
    let sigma_xi_sq: Vec<f64> = config.sigma_f_sq.iter().map(|&s| s * h_ns).collect();

    // θ_n under uniform relay powers with the plain average-power gains.
    let rho_sq: Vec<f64> = (0..relays)
        .map(|r| (p2 / relays as f64) / (config.sigma_f_sq[r] * p1 + n1))
        .collect();
    let theta_denominator: f64 =
        (0..relays).map(|k| rho_sq[k] * g_norm[k]).sum::<f64>() * n1 + nd * n2;
    let theta_per_antenna: Vec<f64> = (0..ns)
        .map(|n| {
            (0..relays)
                .map(|r| chan.f[(n, r)].norm_sqr() * rho_sq[r] * g_norm[r])
                .sum::<f64>()
                / theta_denominator
        })
        .collect();

    let theta_tilde_per_antenna: Vec<f64> = (0..ns)
        .map(|n| {
            (0..relays)
                .map(|r| chan.f[(n, r)].norm_sqr() * g_norm[r] / (sigma_xi_sq[r] * p1 + n1))
                .sum::<f64>()
        })
        .collect();

    SelectionMetrics {
        lambda_per_relay,
        xi_per_relay,
        theta_per_antenna,
        theta_tilde_per_antenna,
        sigma_xi_sq,
    }
}

/// Uniform reference strategy: `τ = 1/2`, `P_{1,n} = P₁/Ns`,
/// `P_{2,r} = P₂/R`. Uses no channel knowledge.
pub fn allocate_dstc_uniform(config: &NetworkConfig) -> PowerAllocation {
    let p1 = EQUAL_SPLIT * config.total_power;
    let p2 = (1.0 - EQUAL_SPLIT) * config.total_power;
    PowerAllocation {
        tau: EQUAL_SPLIT,
        p1_per_antenna: vec![p1 / config.src_antennas as f64; config.src_antennas],
        p2_per_relay: vec![p2 / config.num_relays as f64; config.num_relays],
    }
}

/// Best-relay strategy: the source spreads `P₁` uniformly, and the relay
/// with the largest achievable SNR `λ_i` transmits the whole phase-2 budget
/// while the others stay silent. Returns the allocation and the selected
/// relay's index.
///
/// Ties (including the degenerate all-zero channel, where every `λ_i` is
/// zero) resolve to the lowest index.
pub fn allocate_opportunistic_relay(
    config: &NetworkConfig,
    chan: &ChannelRealization,
) -> (PowerAllocation, usize) {
    let metrics = selection_metrics(config, chan);
    let best = argmax_first(&metrics.lambda_per_relay);
    let p1 = EQUAL_SPLIT * config.total_power;
    let p2 = (1.0 - EQUAL_SPLIT) * config.total_power;
    let mut p2_per_relay = vec![0.0; config.num_relays];
    p2_per_relay[best] = p2;
    (
        PowerAllocation {
            tau: EQUAL_SPLIT,
            p1_per_antenna: vec![p1 / config.src_antennas as f64; config.src_antennas],
            p2_per_relay,
        },
        best,
    )
}

/// Fully opportunistic strategy: pick the relay maximizing
/// `ξ_j‖g_j‖² / (P₂‖g_j‖²N₁ + NdN₂(σ_{ξ_j}²P₁+N₁))` with
/// `ξ_j = maxₙ|f_{n,j}|²`, then send the whole phase-1 budget from the
/// strongest antenna toward that relay (`n* = argmaxₙ |f_{n,r*}|²`). The
/// two-step rule solves the joint antenna/relay assignment exactly, because
/// for a fixed relay the SNR is monotone in the chosen antenna's gain.
/// Returns the allocation, the selected relay, and the selected antenna.
pub fn allocate_full_opportunism(
    config: &NetworkConfig,
    chan: &ChannelRealization,
) -> (PowerAllocation, usize, usize) {
    let relays = config.num_relays;
    let nd = config.dst_antennas as f64;
    let p1 = EQUAL_SPLIT * config.total_power;
    let p2 = (1.0 - EQUAL_SPLIT) * config.total_power;
    let metrics = selection_metrics(config, chan);

    let relay_metric: Vec<f64> = (0..relays)
        .map(|j| {
            let g_norm = squared_row_norm(chan, j);
            p1 * metrics.xi_per_relay[j] * g_norm
                / (p2 * g_norm * config.noise1
                    + nd * config.noise2 * (metrics.sigma_xi_sq[j] * p1 + config.noise1))
        })
        .collect();
    let best_relay = argmax_first(&relay_metric);

    let antenna_gains: Vec<f64> = (0..config.src_antennas)
        .map(|n| chan.f[(n, best_relay)].norm_sqr())
        .collect();
    let best_antenna = argmax_first(&antenna_gains);

    let mut p1_per_antenna = vec![0.0; config.src_antennas];
    p1_per_antenna[best_antenna] = p1;
    let mut p2_per_relay = vec![0.0; relays];
    p2_per_relay[best_relay] = p2;
    (
        PowerAllocation {
            tau: EQUAL_SPLIT,
            p1_per_antenna,
            p2_per_relay,
        },
        best_relay,
        best_antenna,
    )
}

/// Source-side strategy: the relays stay uniform (they have no CSI) while
/// the source concentrates `P₁` on the antenna maximizing
/// `θ̃_n = Σ_r |f_{n,r}|²‖g_r‖² / (σ_{ξ_r}²P₁ + N₁)`. Returns the
/// allocation and the selected antenna's index.
pub fn allocate_opportunistic_source(
    config: &NetworkConfig,
    chan: &ChannelRealization,
) -> (PowerAllocation, usize) {
    let metrics = selection_metrics(config, chan);
    let best = argmax_first(&metrics.theta_tilde_per_antenna);
    let p1 = EQUAL_SPLIT * config.total_power;
    let p2 = (1.0 - EQUAL_SPLIT) * config.total_power;
    let mut p1_per_antenna = vec![0.0; config.src_antennas];
    p1_per_antenna[best] = p1;
    (
        PowerAllocation {
            tau: EQUAL_SPLIT,
            p1_per_antenna,
            p2_per_relay: vec![p2 / config.num_relays as f64; config.num_relays],
        },
        best,
    )
}

/// Allocates for any scheme, discarding the selection indices.
pub fn allocate(scheme: SchemeId, config: &NetworkConfig, chan: &ChannelRealization) -> PowerAllocation {
    match scheme {
        SchemeId::DstcUniform => allocate_dstc_uniform(config),
        SchemeId::OpportunisticRelay => allocate_opportunistic_relay(config, chan).0,
        SchemeId::FullOpportunism => allocate_full_opportunism(config, chan).0,
        SchemeId::OpportunisticSource => allocate_opportunistic_source(config, chan).0,
    }
}

/// Optimal fraction of the budget to spend in phase 1, maximizing the
/// average SNR of a homogeneous network:
///
/// `τ = (√(1+δ) − 1)/δ`,
/// `δ = (N₂σ_f² − N₁σ_g²)·P / (N₁σ_g²·P + N₁N₂)`,
///
/// evaluated as `1/(√(1+δ) + 1)` so the balanced case `δ → 0` yields exactly
/// `1/2` without cancellation.
///
/// ## Errors
///
/// [`PowerCtlError::HeterogeneousNetwork`] when relays have differing hop
/// variances (the closed form assumes one σ_f², one σ_g²).
pub fn optimal_tau(config: &NetworkConfig) -> Result<f64, PowerCtlError> {
    let (sigma_f_sq, sigma_g_sq) = config
        .homogeneous_variances()
        .ok_or(PowerCtlError::HeterogeneousNetwork)?;
    let p = config.total_power;
    let n1 = config.noise1;
    let n2 = config.noise2;
    let delta = (n2 * sigma_f_sq - n1 * sigma_g_sq) * p / (n1 * sigma_g_sq * p + n1 * n2);
    Ok(1.0 / ((1.0 + delta).sqrt() + 1.0))
}

/// Average destination SNR of a homogeneous network as a function of the
/// phase split (the ratio-of-means approximation of the expected SNR):
///
/// `SNR(τ) = τ(1−τ)P²σ_f²σ_g² / (τ(N₂σ_f² − N₁σ_g²)P + N₁σ_g²P + N₁N₂)`.
///
/// ## Errors
///
/// [`PowerCtlError::TauOutOfRange`] when `τ ∉ (0,1)`;
/// [`PowerCtlError::HeterogeneousNetwork`] when the variances differ.
pub fn average_snr_two_phase(config: &NetworkConfig, tau: f64) -> Result<f64, PowerCtlError> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(PowerCtlError::TauOutOfRange { tau });
    }
    let (sigma_f_sq, sigma_g_sq) = config
        .homogeneous_variances()
        .ok_or(PowerCtlError::HeterogeneousNetwork)?;
    let p = config.total_power;
    let n1 = config.noise1;
    let n2 = config.noise2;
    Ok(tau * (1.0 - tau) * p * p * sigma_f_sq * sigma_g_sq
        / (tau * (n2 * sigma_f_sq - n1 * sigma_g_sq) * p + n1 * sigma_g_sq * p + n1 * n2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::sample_channel;
    use ndarray::Array2;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn config_2x2(p: f64) -> NetworkConfig {
        NetworkConfig::homogeneous(2, 2, 2, 4, 1.0, 1.0, 1.0, 1.0, p)
    }

    #[test]
    fn scheme_names_round_trip() {
        for scheme in SchemeId::ALL {
            assert_eq!(scheme.name().parse::<SchemeId>().unwrap(), scheme);
            let json = serde_json::to_string(&scheme).unwrap();
            assert_eq!(json, format!("\"{}\"", scheme.name()));
        }
        assert!("bogus".parse::<SchemeId>().is_err());
    }

    #[test]
    fn uniform_allocation_splits_evenly() {
        let alloc = allocate_dstc_uniform(&config_2x2(4.0));
        assert_eq!(alloc.tau, 0.5);
        assert_eq!(alloc.p1_per_antenna, vec![1.0, 1.0]);
        assert_eq!(alloc.p2_per_relay, vec![1.0, 1.0]);

        let four = NetworkConfig::homogeneous(4, 1, 1, 4, 1.0, 1.0, 1.0, 1.0, 8.0);
        let alloc = allocate_dstc_uniform(&four);
        assert_eq!(alloc.p2_per_relay, vec![1.0; 4]);
    }

    #[test]
    fn every_scheme_spends_the_whole_budget() {
        let config = config_2x2(7.3);
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..50 {
            let chan = sample_channel(&config, &mut rng);
            for scheme in SchemeId::ALL {
                let alloc = allocate(scheme, &config, &chan);
                let spent: f64 = alloc.p1_per_antenna.iter().sum::<f64>()
                    + alloc.p2_per_relay.iter().sum::<f64>();
                assert!(
                    (spent - config.total_power).abs() / config.total_power < 1e-12,
                    "{scheme}: spent {spent} of {}",
                    config.total_power
                );
                alloc.validate(&config).unwrap();
            }
        }
    }

    #[test]
    fn dominant_relay_is_selected() {
        let config = config_2x2(4.0);
        let chan = ChannelRealization {
            f: Array2::from_shape_vec(
                (2, 2),
                vec![
                    Complex64::new(0.5, 0.0),
                    Complex64::new(2.0, 0.0),
                    Complex64::new(0.5, 0.0),
                    Complex64::new(2.0, 0.0),
                ],
            )
            .unwrap(),
            g: Array2::from_elem((2, 2), Complex64::new(1.0, 0.0)),
        };
        let (alloc, selected) = allocate_opportunistic_relay(&config, &chan);
        assert_eq!(selected, 1);
        assert_eq!(alloc.p2_per_relay, vec![0.0, 2.0]);
        assert_eq!(alloc.p1_per_antenna, vec![1.0, 1.0]);
    }

    #[test]
    fn exact_ties_pick_the_first_relay() {
        let config = config_2x2(4.0);
        let chan = ChannelRealization {
            f: Array2::from_elem((2, 2), Complex64::new(0.7, 0.2)),
            g: Array2::from_elem((2, 2), Complex64::new(-0.3, 0.9)),
        };
        let (_, selected) = allocate_opportunistic_relay(&config, &chan);
        assert_eq!(selected, 0);

        // Degenerate all-zero channel: every metric ties at zero.
        let dead = ChannelRealization {
            f: Array2::from_elem((2, 2), Complex64::new(0.0, 0.0)),
            g: Array2::from_elem((2, 2), Complex64::new(0.0, 0.0)),
        };
        let (_, selected) = allocate_opportunistic_relay(&config, &dead);
        assert_eq!(selected, 0);
        let (_, r, n) = allocate_full_opportunism(&config, &dead);
        assert_eq!((r, n), (0, 0));
    }

    #[test]
    fn single_antenna_reduces_full_opportunism_to_relay_selection() {
        let config = NetworkConfig::homogeneous(3, 1, 2, 4, 1.3, 0.8, 1.0, 2.0, 6.0);
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        for _ in 0..100 {
            let chan = sample_channel(&config, &mut rng);
            let (_, relay_only) = allocate_opportunistic_relay(&config, &chan);
            let (_, relay_full, antenna) = allocate_full_opportunism(&config, &chan);
            assert_eq!(relay_full, relay_only);
            assert_eq!(antenna, 0);
        }
    }

    #[test]
    fn single_relay_full_opportunism_selects_best_antenna() {
        let config = NetworkConfig::homogeneous(1, 2, 2, 4, 1.0, 1.0, 1.0, 1.0, 4.0);
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..50 {
            let chan = sample_channel(&config, &mut rng);
            let (_, relay, antenna) = allocate_full_opportunism(&config, &chan);
            assert_eq!(relay, 0);
            let expected = if chan.f[(0, 0)].norm_sqr() >= chan.f[(1, 0)].norm_sqr() {
                0
            } else {
                1
            };
            assert_eq!(antenna, expected);
        }
    }

    #[test]
    fn single_antenna_source_selection_is_uniform() {
        let config = NetworkConfig::homogeneous(2, 1, 2, 4, 1.0, 1.0, 1.0, 1.0, 4.0);
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let chan = sample_channel(&config, &mut rng);
        let (alloc, antenna) = allocate_opportunistic_source(&config, &chan);
        assert_eq!(antenna, 0);
        assert_eq!(alloc, allocate_dstc_uniform(&config));
    }

    #[test]
    fn dominant_antenna_is_selected_at_the_source() {
        let config = config_2x2(4.0);
        let chan = ChannelRealization {
            f: Array2::from_shape_vec(
                (2, 2),
                vec![
                    Complex64::new(3.0, 0.0),
                    Complex64::new(2.5, 0.0),
                    Complex64::new(0.2, 0.0),
                    Complex64::new(0.1, 0.0),
                ],
            )
            .unwrap(),
            g: Array2::from_elem((2, 2), Complex64::new(1.0, 0.0)),
        };
        let (alloc, antenna) = allocate_opportunistic_source(&config, &chan);
        assert_eq!(antenna, 0);
        assert_eq!(alloc.p1_per_antenna, vec![2.0, 0.0]);
        assert_eq!(alloc.p2_per_relay, vec![1.0, 1.0]);
    }

    #[test]
    fn entrywise_dominance_orders_the_relay_metric() {
        let config = config_2x2(4.0);
        let mut rng = ChaCha12Rng::seed_from_u64(47);
        for _ in 0..100 {
            let chan = sample_channel(&config, &mut rng);
            let metrics = selection_metrics(&config, &chan);
            let f0: f64 = chan.f.column(0).iter().map(|z| z.norm_sqr()).sum();
            let f1: f64 = chan.f.column(1).iter().map(|z| z.norm_sqr()).sum();
            let g0: f64 = chan.g.row(0).iter().map(|z| z.norm_sqr()).sum();
            let g1: f64 = chan.g.row(1).iter().map(|z| z.norm_sqr()).sum();
            if f0 >= f1 && g0 >= g1 {
                assert!(metrics.lambda_per_relay[0] >= metrics.lambda_per_relay[1]);
            }
            if f1 >= f0 && g1 >= g0 {
                assert!(metrics.lambda_per_relay[1] >= metrics.lambda_per_relay[0]);
            }
        }
    }

    #[test]
    fn joint_rescaling_preserves_the_relay_ordering() {
        // Scaling channels by c, variances by c², and the budget by 1/c²
        // leaves every λ_i unchanged.
        let config = config_2x2(4.0);
        let mut rng = ChaCha12Rng::seed_from_u64(53);
        let chan = sample_channel(&config, &mut rng);
        for c in [0.1f64, 3.0, 42.0] {
            let scaled_config = NetworkConfig::homogeneous(
                2,
                2,
                2,
                4,
                c * c,
                c * c,
                1.0,
                1.0,
                4.0 / (c * c),
            );
            let scaled_chan = ChannelRealization {
                f: chan.f.mapv(|z| z * c),
                g: chan.g.mapv(|z| z * c),
            };
            let base = selection_metrics(&config, &chan);
            let scaled = selection_metrics(&scaled_config, &scaled_chan);
            for r in 0..2 {
                let rel = (base.lambda_per_relay[r] - scaled.lambda_per_relay[r]).abs()
                    / base.lambda_per_relay[r];
                assert!(rel < 1e-12, "relay {r}, c={c}: rel {rel}");
            }
        }
    }

    #[test]
    fn strongest_link_mean_matches_harmonic_closed_form() {
        // E[maxₙ |f_{n,r}|²] = σ_f²·(1 + 1/2 + … + 1/Ns).
        for ns in [1usize, 2, 3] {
            let config = NetworkConfig::homogeneous(1, ns, 1, 4, 1.7, 1.0, 1.0, 1.0, 4.0);
            let metrics_sigma = selection_metrics(
                &config,
                &ChannelRealization {
                    f: Array2::from_elem((ns, 1), Complex64::new(1.0, 0.0)),
                    g: Array2::from_elem((1, 1), Complex64::new(1.0, 0.0)),
                },
            )
            .sigma_xi_sq[0];

            let mut rng = ChaCha12Rng::seed_from_u64(59 + ns as u64);
            let draws = 200_000;
            let mut mean = 0.0;
            for _ in 0..draws {
                let chan = sample_channel(&config, &mut rng);
                mean += chan
                    .f
                    .column(0)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .fold(0.0, f64::max);
            }
            mean /= draws as f64;
            let rel = (mean - metrics_sigma).abs() / metrics_sigma;
            assert!(rel < 0.02, "Ns={ns}: MC {mean} vs closed form {metrics_sigma}");
        }
    }

    #[test]
    fn balanced_network_splits_phases_evenly() {
        let config = config_2x2(10.0);
        assert_eq!(optimal_tau(&config).unwrap(), 0.5);

        // Tiny imbalance stays within 1e-8 of one half.
        let nearly = NetworkConfig::homogeneous(2, 2, 2, 4, 1.0 + 1e-11, 1.0, 1.0, 1.0, 10.0);
        let tau = optimal_tau(&nearly).unwrap();
        assert!((tau - 0.5).abs() < 1e-8, "tau = {tau}");
    }

    #[test]
    fn heterogeneous_networks_are_rejected_by_closed_forms() {
        let mut config = config_2x2(10.0);
        config.sigma_g_sq[1] = 2.0;
        assert_eq!(
            optimal_tau(&config),
            Err(PowerCtlError::HeterogeneousNetwork)
        );
        assert_eq!(
            average_snr_two_phase(&config, 0.5),
            Err(PowerCtlError::HeterogeneousNetwork)
        );
    }

    #[test]
    fn average_snr_vanishes_at_the_split_edges() {
        let config = config_2x2(10.0);
        assert!(average_snr_two_phase(&config, 1e-9).unwrap() < 1e-6);
        assert!(average_snr_two_phase(&config, 1.0 - 1e-9).unwrap() < 1e-6);
        assert!(matches!(
            average_snr_two_phase(&config, 0.0),
            Err(PowerCtlError::TauOutOfRange { .. })
        ));
        assert!(matches!(
            average_snr_two_phase(&config, 1.0),
            Err(PowerCtlError::TauOutOfRange { .. })
        ));
    }

    #[test]
    fn balanced_average_snr_peaks_at_one_half() {
        let config = config_2x2(10.0);
        let mid = average_snr_two_phase(&config, 0.5).unwrap();
        assert!(mid >= average_snr_two_phase(&config, 0.3).unwrap());
        assert!(mid >= average_snr_two_phase(&config, 0.7).unwrap());
    }
}
