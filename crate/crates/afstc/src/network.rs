//! Network description, channel statistics, random channel generation, and
//! modulation constants.
//!
//! A relay network is described by a [`NetworkConfig`]: `Ns` source antennas,
//! `R` single-antenna amplify-and-forward relays, `Nd` destination antennas,
//! per-relay Rayleigh-fading variances for both hops, per-phase noise levels,
//! and the total transmit power budget. [`sample_channel`] draws one
//! independent realization of all the fading coefficients;
//! [`relay_gain`] computes the amplification factor each relay applies so
//! that its average transmit power meets its allocation; and
//! [`modulation_constants`] supplies the `(c, g)` pair that parameterizes the
//! symbol-error-rate expressions for M-PSK and M-QAM constellations.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Error raised when a configuration value violates its contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    /// A field failed validation; carries the field name and the reason.
    #[error("invalid `{field}`: {reason}")]
    InvalidField {
        /// Name of the offending field.
        field: &'static str,
        /// Human-readable description of the violation.
        reason: String,
    },
}

/// Static description of a two-hop amplify-and-forward relay network.
///
/// Phase 1 broadcasts a space-time block from the `src_antennas` source
/// antennas over `block_len` symbol periods; phase 2 has each of the
/// `num_relays` relays amplify and forward a linearly transformed copy of its
/// observation to the `dst_antennas` destination antennas. Fading is
/// frequency-flat Rayleigh: the source→relay coefficients of relay `r` have
/// variance `sigma_f_sq[r]` and the relay→destination coefficients variance
/// `sigma_g_sq[r]`. `noise1` and `noise2` are the per-phase additive noise
/// variances, and `total_power` is the network-wide transmit budget split
/// across the two phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Number of single-antenna relays, `R`.
    pub num_relays: usize,
    /// Number of source antennas, `Ns`.
    pub src_antennas: usize,
    /// Number of destination antennas, `Nd`.
    pub dst_antennas: usize,
    /// Space-time block length in symbol periods, `T` (full rate: `K = T`).
    pub block_len: usize,
    /// Per-relay variance of the source→relay coefficients, `σ_{f_r}²`.
    pub sigma_f_sq: Vec<f64>,
    /// Per-relay variance of the relay→destination coefficients, `σ_{g_r}²`.
    pub sigma_g_sq: Vec<f64>,
    /// Noise variance at the relays (phase 1), `N₁`.
    pub noise1: f64,
    /// Noise variance at the destination (phase 2), `N₂`.
    pub noise2: f64,
    /// Total transmit power budget, `P`.
    pub total_power: f64,
}

impl NetworkConfig {
    /// Builds a homogeneous network: every relay shares the same hop
    /// variances `sigma_f_sq` and `sigma_g_sq`.
    #[allow(clippy::too_many_arguments)]
    pub fn homogeneous(
        num_relays: usize,
        src_antennas: usize,
        dst_antennas: usize,
        block_len: usize,
        sigma_f_sq: f64,
        sigma_g_sq: f64,
        noise1: f64,
        noise2: f64,
        total_power: f64,
    ) -> Self {
        Self {
            num_relays,
            src_antennas,
            dst_antennas,
            block_len,
            sigma_f_sq: vec![sigma_f_sq; num_relays],
            sigma_g_sq: vec![sigma_g_sq; num_relays],
            noise1,
            noise2,
            total_power,
        }
    }

    /// Checks every structural invariant, returning the first violation.
    ///
    /// ## Errors
    ///
    /// [`ConfigError::InvalidField`] naming the offending field when a count
    /// is zero, a variance list has the wrong length, a variance or power is
    /// not strictly positive and finite, or the block length cannot carry a
    /// full-rate orthogonal design (`T < Ns` or `T < R`).
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::InvalidField {
                    field,
                    reason: format!("must be a positive finite number, got {value}"),
                })
            }
        }

        if self.num_relays == 0 {
            return Err(ConfigError::InvalidField {
                field: "num_relays",
                reason: "must be at least 1".into(),
            });
        }
        if self.src_antennas == 0 {
            return Err(ConfigError::InvalidField {
                field: "src_antennas",
                reason: "must be at least 1".into(),
            });
        }
        if self.dst_antennas == 0 {
            return Err(ConfigError::InvalidField {
                field: "dst_antennas",
                reason: "must be at least 1".into(),
            });
        }
        if self.block_len < self.src_antennas {
            return Err(ConfigError::InvalidField {
                field: "block_len",
                reason: format!(
                    "full-rate design needs T >= Ns, got T={} < Ns={}",
                    self.block_len, self.src_antennas
                ),
            });
        }
        if self.block_len < self.num_relays {
            return Err(ConfigError::InvalidField {
                field: "block_len",
                reason: format!(
                    "full-rate design needs T >= R, got T={} < R={}",
                    self.block_len, self.num_relays
                ),
            });
        }
        if self.sigma_f_sq.len() != self.num_relays {
            return Err(ConfigError::InvalidField {
                field: "sigma_f_sq",
                reason: format!(
                    "needs one entry per relay ({}), got {}",
                    self.num_relays,
                    self.sigma_f_sq.len()
                ),
            });
        }
        if self.sigma_g_sq.len() != self.num_relays {
            return Err(ConfigError::InvalidField {
                field: "sigma_g_sq",
                reason: format!(
                    "needs one entry per relay ({}), got {}",
                    self.num_relays,
                    self.sigma_g_sq.len()
                ),
            });
        }
        for &v in &self.sigma_f_sq {
            positive("sigma_f_sq", v)?;
        }
        for &v in &self.sigma_g_sq {
            positive("sigma_g_sq", v)?;
        }
        positive("noise1", self.noise1)?;
        positive("noise2", self.noise2)?;
        positive("total_power", self.total_power)?;
        Ok(())
    }

    /// Returns `(σ_f², σ_g²)` when every relay shares the same hop variances,
    /// `None` otherwise. Closed-form power-splitting results only exist for
    /// this homogeneous case.
    pub fn homogeneous_variances(&self) -> Option<(f64, f64)> {
        let f0 = *self.sigma_f_sq.first()?;
        let g0 = *self.sigma_g_sq.first()?;
        let all_equal = self.sigma_f_sq.iter().all(|&v| v == f0)
            && self.sigma_g_sq.iter().all(|&v| v == g0);
        all_equal.then_some((f0, g0))
    }
}

/// One draw of all fading coefficients in the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Source→relay coefficients; entry `(i, r)` is `f_{i,r}`, the link from
    /// source antenna `i` to relay `r`. Shape `Ns × R`.
    pub f: Array2<Complex64>,
    /// Relay→destination coefficients; entry `(r, j)` is `g_{r,j}`, the link
    /// from relay `r` to destination antenna `j`. Shape `R × Nd`.
    pub g: Array2<Complex64>,
}

/// Draws one standard complex Gaussian via the Box–Muller transform.
///
/// Both coordinates come from the same two uniforms, so each call consumes
/// exactly two `f64` draws from the stream — a fixed consumption pattern that
/// keeps realizations bit-reproducible for a given seed.
pub(crate) fn standard_complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    // 1 − U maps [0,1) to (0,1], keeping the logarithm finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(radius * angle.cos(), radius * angle.sin())
}

/// Samples an independent Rayleigh-fading realization of the whole network.
///
/// Entry `f[(i, r)]` is drawn from `CN(0, sigma_f_sq[r])` and `g[(r, j)]`
/// from `CN(0, sigma_g_sq[r])`, all mutually independent. The stream is
/// consumed in a fixed documented order — `f` row by row, then `g` row by
/// row — so a fixed seed yields a bit-identical realization on every run.
///
/// ## Panics
///
/// Panics if `config` is structurally invalid (call
/// [`NetworkConfig::validate`] first at the application boundary).
pub fn sample_channel<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> ChannelRealization {
    let ns = config.src_antennas;
    let relays = config.num_relays;
    let nd = config.dst_antennas;
    assert_eq!(config.sigma_f_sq.len(), relays, "config not validated");
    assert_eq!(config.sigma_g_sq.len(), relays, "config not validated");

    let mut f = Vec::with_capacity(ns * relays);
    for _i in 0..ns {
        for r in 0..relays {
            // E|f|² = σ² means each real coordinate carries σ²/2.
            let scale = (config.sigma_f_sq[r] / 2.0).sqrt();
            f.push(standard_complex_gaussian(rng) * scale);
        }
    }
    let mut g = Vec::with_capacity(relays * nd);
    for r in 0..relays {
        let scale = (config.sigma_g_sq[r] / 2.0).sqrt();
        for _j in 0..nd {
            g.push(standard_complex_gaussian(rng) * scale);
        }
    }

    ChannelRealization {
        f: Array2::from_shape_vec((ns, relays), f).expect("shape matches construction"),
        g: Array2::from_shape_vec((relays, nd), g).expect("shape matches construction"),
    }
}

/// How a power budget is split across phases, antennas, and relays.
///
/// Phase 1 receives `P₁ = tau·P` and phase 2 the remainder
/// `P₂ = (1 − tau)·P`; `p1_per_antenna[n]` is source antenna `n`'s share of
/// `P₁` and `p2_per_relay[r]` relay `r`'s share of `P₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    /// Fraction of the total power spent in phase 1, in `(0, 1)`.
    pub tau: f64,
    /// Per-source-antenna transmit powers `P_{1,n}`; length `Ns`.
    pub p1_per_antenna: Vec<f64>,
    /// Per-relay transmit powers `P_{2,r}`; length `R`.
    pub p2_per_relay: Vec<f64>,
}

impl PowerAllocation {
    /// Phase-1 budget `P₁ = tau·P`.
    pub fn phase1_power(&self, total_power: f64) -> f64 {
        self.tau * total_power
    }

    /// Phase-2 budget `P₂ = (1 − tau)·P`.
    pub fn phase2_power(&self, total_power: f64) -> f64 {
        (1.0 - self.tau) * total_power
    }

    /// Checks the allocation against a network's shape and budget.
    ///
    /// ## Errors
    ///
    /// [`ConfigError::InvalidField`] when `tau` leaves `(0, 1)`, a list has
    /// the wrong length, an entry is negative, or a phase's entries sum past
    /// that phase's budget (with a small relative tolerance for rounding).
    pub fn validate(&self, config: &NetworkConfig) -> Result<(), ConfigError> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(ConfigError::InvalidField {
                field: "tau",
                reason: format!("must lie strictly inside (0, 1), got {}", self.tau),
            });
        }
        if self.p1_per_antenna.len() != config.src_antennas {
            return Err(ConfigError::InvalidField {
                field: "p1_per_antenna",
                reason: format!(
                    "needs one entry per source antenna ({}), got {}",
                    config.src_antennas,
                    self.p1_per_antenna.len()
                ),
            });
        }
        if self.p2_per_relay.len() != config.num_relays {
            return Err(ConfigError::InvalidField {
                field: "p2_per_relay",
                reason: format!(
                    "needs one entry per relay ({}), got {}",
                    config.num_relays,
                    self.p2_per_relay.len()
                ),
            });
        }
        if let Some(&bad) = self.p1_per_antenna.iter().find(|&&p| !(p >= 0.0)) {
            return Err(ConfigError::InvalidField {
                field: "p1_per_antenna",
                reason: format!("entries must be non-negative, got {bad}"),
            });
        }
        if let Some(&bad) = self.p2_per_relay.iter().find(|&&p| !(p >= 0.0)) {
            return Err(ConfigError::InvalidField {
                field: "p2_per_relay",
                reason: format!("entries must be non-negative, got {bad}"),
            });
        }
        let budget_tol = 1.0 + 1e-9;
        let p1_sum: f64 = self.p1_per_antenna.iter().sum();
        if p1_sum > self.phase1_power(config.total_power) * budget_tol {
            return Err(ConfigError::InvalidField {
                field: "p1_per_antenna",
                reason: format!(
                    "sums to {p1_sum}, above the phase-1 budget {}",
                    self.phase1_power(config.total_power)
                ),
            });
        }
        let p2_sum: f64 = self.p2_per_relay.iter().sum();
        if p2_sum > self.phase2_power(config.total_power) * budget_tol {
            return Err(ConfigError::InvalidField {
                field: "p2_per_relay",
                reason: format!(
                    "sums to {p2_sum}, above the phase-2 budget {}",
                    self.phase2_power(config.total_power)
                ),
            });
        }
        Ok(())
    }
}

/// Amplification gain `ρ_r` of relay `r` (zero-based).
///
/// The relay scales its phase-1 observation so that its *average* transmit
/// power equals the allocated `P_{2,r}`:
///
/// `ρ_r = sqrt( P_{2,r} / (σ_{f_r}²·P₁ + N₁) )` with `P₁ = tau·P`.
///
/// The denominator is the mean received power at the relay when the whole
/// phase-1 budget `P₁` excites channels of variance `σ_{f_r}²` plus noise.
///
/// ## Panics
///
/// Panics if `r` is out of range for the configuration or the allocation.
pub fn relay_gain(config: &NetworkConfig, alloc: &PowerAllocation, r: usize) -> f64 {
    let p1 = alloc.phase1_power(config.total_power);
    let p2r = alloc.p2_per_relay[r];
    (p2r / (config.sigma_f_sq[r] * p1 + config.noise1)).sqrt()
}

/// First-hop variance a relay's automatic gain control assumes for relay `r`
/// under the given allocation policy.
///
/// A relay only has statistical knowledge of its incoming links, so its gain
/// depends on the *average* power it expects to receive. When the source
/// spreads power over all antennas, each incoming coefficient contributes its
/// plain variance `σ_{f_r}²`. When the protocol concentrates the whole
/// phase-1 budget on a single antenna, that antenna is the *best* of `Ns`
/// toward the forwarding relay, and the expected squared magnitude of the
/// strongest of `Ns` unit-mean exponentials is the harmonic number
/// `H_{Ns} = Σ_{k=1}^{Ns} 1/k`; the effective variance grows to
/// `σ_{f_r}²·H_{Ns}`. A single-antenna entry in `p1_per_antenna` is how the
/// selection policies express themselves, so that shape selects the rule.
pub(crate) fn agc_first_hop_variance(
    config: &NetworkConfig,
    alloc: &PowerAllocation,
    r: usize,
) -> f64 {
    let active = alloc.p1_per_antenna.iter().filter(|&&p| p > 0.0).count();
    if active == 1 && config.src_antennas > 1 {
        config.sigma_f_sq[r] * crate::numutil::harmonic(config.src_antennas as u32)
    } else {
        config.sigma_f_sq[r]
    }
}

/// Relay gain consistent with the allocation's selection policy: plain
/// [`relay_gain`] for spread allocations, the harmonic-scaled first-hop
/// variance when a single source antenna carries the whole phase-1 budget.
pub(crate) fn agc_relay_gain(config: &NetworkConfig, alloc: &PowerAllocation, r: usize) -> f64 {
    let p1 = alloc.phase1_power(config.total_power);
    let p2r = alloc.p2_per_relay[r];
    let sigma = agc_first_hop_variance(config, alloc, r);
    (p2r / (sigma * p1 + config.noise1)).sqrt()
}

/// Constellation family for symbol-error-rate expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModulationFamily {
    /// M-ary phase-shift keying.
    #[serde(rename = "MPSK")]
    Mpsk,
    /// M-ary square quadrature amplitude modulation.
    #[serde(rename = "MQAM")]
    Mqam,
}

/// Constellation constants `(c, g)` entering the SER expressions
/// `P_e ≈ c·Q(√(g·SNR))` and their integral forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationSpec {
    /// Constellation family.
    pub family: ModulationFamily,
    /// Constellation order (power of two; perfect square for QAM).
    #[serde(rename = "M")]
    pub m: u32,
    /// Multiplicative SER constant: `2` for M-PSK, `4(√M−1)/√M` for M-QAM.
    pub c: f64,
    /// SNR scaling constant: `2·sin²(π/M)` for M-PSK, `3/(M−1)` for M-QAM.
    pub g: f64,
}

impl ModulationSpec {
    /// Constellation constant to use inside SER formulas.
    ///
    /// For BPSK (`MPSK`, `M = 2`) the generic nearest-neighbor count of two
    /// double-counts the single neighbor, and `c·Q(√(g·SNR))` would evaluate
    /// to `2·Q(√(2·SNR))` instead of the exact `Q(√(2·SNR))`; every SER
    /// kernel therefore uses `1` for BPSK and the stored `c` otherwise.
    pub fn ser_coefficient(&self) -> f64 {
        if self.family == ModulationFamily::Mpsk && self.m == 2 {
            1.0
        } else {
            self.c
        }
    }

    /// Bits per symbol, `log₂(M)`.
    pub fn bits_per_symbol(&self) -> u32 {
        self.m.trailing_zeros()
    }
}

/// Builds the constellation constants for a modulation family and order.
///
/// ## Errors
///
/// [`ConfigError::InvalidField`] when `M` is below 2 or not a power of two,
/// or when a QAM order is not a perfect square (only square QAM grids have
/// the closed-form constants).
pub fn modulation_constants(family: ModulationFamily, m: u32) -> Result<ModulationSpec, ConfigError> {
    if m < 2 || !m.is_power_of_two() {
        return Err(ConfigError::InvalidField {
            field: "M",
            reason: format!("must be a power of two at least 2, got {m}"),
        });
    }
    let (c, g) = match family {
        ModulationFamily::Mpsk => {
            let mf = f64::from(m);
            (2.0, 2.0 * (std::f64::consts::PI / mf).sin().powi(2))
        }
        ModulationFamily::Mqam => {
            let root = (f64::from(m)).sqrt().round() as u32;
            if root * root != m {
                return Err(ConfigError::InvalidField {
                    field: "M",
                    reason: format!("QAM order must be a perfect square, got {m}"),
                });
            }
            let rootf = f64::from(root);
            (4.0 * (rootf - 1.0) / rootf, 3.0 / (f64::from(m) - 1.0))
        }
    };
    Ok(ModulationSpec { family, m, c, g })
}
