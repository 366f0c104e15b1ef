//! Analytical performance engine: SNR distributions per relay, exact symbol
//! error rates by quadrature, an MGF-based estimate for the source-selection
//! scheme, high-SNR closed forms, upper bounds for the equal-antenna case,
//! and a diversity-order estimator for finished curves.
//!
//! Two SNR families appear throughout. The *ratio* family describes the
//! per-relay SNR `γ_r = XY/(aY + b_r)` where `X = ‖f_r‖²` is a sum over all
//! source antennas and `Y = ‖g_r‖²`; it governs the relay-selection scheme.
//! The *peak* family replaces `X` by the best single antenna,
//! `X = max_n |f_{n,r}|²`, and governs joint relay/antenna selection. Both
//! reduce the two-hop SNR to scalar gamma-type variates, so every density
//! here is a finite combination of modified Bessel functions of the second
//! kind.
//!
//! All formulas are parameterized by the per-branch Rayleigh scales
//! `σ_{f_r}²`, `σ_{g_r}²`. The parameter structs also carry the mean norms
//! `X̄_r = N_s σ_{f_r}²` and `Ȳ_r = N_d σ_{g_r}²` for callers that find those
//! more natural; the evaluators convert internally.

mod asymptote;
mod gamma;
mod mgf;
mod zeta;

pub use asymptote::{
    pdf_derivative_at_zero, pdf_zeta_derivative_at_zero, ser_asymptotic,
    ser_upper_bound_equal_antennas,
};
pub use gamma::{
    approx_pdf_equal_antennas, cdf_gamma_r, pdf_gamma_max, pdf_gamma_r, ser_exact_opportunistic,
};
pub use mgf::{ser_mgf_opportunistic_source, MgfSerEstimate};
pub use zeta::{cdf_zeta_r, pdf_zeta_max, pdf_zeta_r, ser_exact_full_opportunism};

use crate::network::{ConfigError, NetworkConfig};
use crate::numutil::{harmonic, ln_factorial, EULER_GAMMA};
use crate::powerctl::EQUAL_SPLIT;
use crate::specfun::{bessel_k, QuadratureError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from the analytical evaluators.
#[derive(Debug, Error)]
pub enum AnalysisError {
    /// An argument lies outside the formula's domain.
    #[error("{func}: {arg} = {value} is outside the domain ({requirement})")]
    Domain {
        func: &'static str,
        arg: &'static str,
        value: f64,
        requirement: &'static str,
    },
    /// A quadrature did not reach the requested tolerance.
    #[error("integration failed: {0}")]
    Convergence(#[from] QuadratureError),
    /// The requested closed form does not exist for this antenna/scheme
    /// combination.
    #[error("{0}")]
    Capability(String),
    /// Too few usable points for a fit.
    #[error("need at least {needed} strictly positive curve points at distinct SNRs, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

/// Parameters of the ratio-family SNR `γ_r = XY/(aY + b_r)` with
/// `X = ‖f_r‖²` and `Y = ‖g_r‖²`.
///
/// Built from a network configuration with [`GammaRatioParams::from_config`],
/// which applies the equal power split `P₁ = P₂ = P/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRatioParams {
    /// Weight of `Y` in the denominator: `a = N_s 𝒩₁ / P₁`.
    pub a: f64,
    /// Constant denominator term per relay:
    /// `b_r = N_s N_d 𝒩₂ (σ_{f_r}² P₁ + 𝒩₁) / (P₁ P₂)`.
    pub b: Vec<f64>,
    /// Mean of `X` per relay: `X̄_r = N_s σ_{f_r}²`.
    pub xbar: Vec<f64>,
    /// Mean of `Y` per relay: `Ȳ_r = N_d σ_{g_r}²`.
    pub ybar: Vec<f64>,
    /// `μ = N_s + N_d`.
    pub mu: u32,
    /// `ν = N_d − N_s`.
    pub nu: i32,
}

impl GammaRatioParams {
    /// Builds the parameters from a validated configuration under the equal
    /// power split `P₁ = P₂ = P/2`.
    pub fn from_config(config: &NetworkConfig) -> Self {
        let p1 = EQUAL_SPLIT * config.total_power;
        let p2 = (1.0 - EQUAL_SPLIT) * config.total_power;
        let ns = config.src_antennas as f64;
        let nd = config.dst_antennas as f64;
        let b = config
            .sigma_f_sq
            .iter()
            .map(|&sf| ns * nd * config.noise2 * (sf * p1 + config.noise1) / (p1 * p2))
            .collect();
        GammaRatioParams {
            a: ns * config.noise1 / p1,
            b,
            xbar: config.sigma_f_sq.iter().map(|&sf| ns * sf).collect(),
            ybar: config.sigma_g_sq.iter().map(|&sg| nd * sg).collect(),
            mu: (config.src_antennas + config.dst_antennas) as u32,
            nu: config.dst_antennas as i32 - config.src_antennas as i32,
        }
    }

    /// Number of relays covered by these parameters.
    pub fn num_relays(&self) -> usize {
        self.b.len()
    }

    /// Number of source antennas, recovered from `(μ − ν)/2`.
    pub fn src_antennas(&self) -> u32 {
        ((self.mu as i32 - self.nu) / 2) as u32
    }

    /// Number of destination antennas, recovered from `(μ + ν)/2`.
    pub fn dst_antennas(&self) -> u32 {
        ((self.mu as i32 + self.nu) / 2) as u32
    }

    /// Rayleigh scale of each first-hop entry: `σ_{f_r}² = X̄_r / N_s`.
    pub(crate) fn scale_x(&self, r: usize) -> f64 {
        self.xbar[r] / f64::from(self.src_antennas())
    }

    /// Rayleigh scale of each second-hop entry: `σ_{g_r}² = Ȳ_r / N_d`.
    pub(crate) fn scale_y(&self, r: usize) -> f64 {
        self.ybar[r] / f64::from(self.dst_antennas())
    }

    /// Checks positivity, list-length agreement, and the `μ`/`ν` antenna
    /// bookkeeping.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let relays = self.b.len();
        if relays == 0 {
            return Err(ConfigError::InvalidField {
                field: "b",
                reason: "needs at least one relay".into(),
            });
        }
        if self.xbar.len() != relays || self.ybar.len() != relays {
            return Err(ConfigError::InvalidField {
                field: "xbar",
                reason: format!("per-relay lists must all have length {relays}"),
            });
        }
        if !(self.a > 0.0) {
            return Err(ConfigError::InvalidField {
                field: "a",
                reason: format!("must be positive, got {}", self.a),
            });
        }
        for (name, list) in [("b", &self.b), ("xbar", &self.xbar), ("ybar", &self.ybar)] {
            if let Some(bad) = list.iter().find(|v| !(**v > 0.0)) {
                return Err(ConfigError::InvalidField {
                    field: name,
                    reason: format!("must be positive, got {bad}"),
                });
            }
        }
        let ns = self.mu as i32 - self.nu;
        let nd = self.mu as i32 + self.nu;
        if ns <= 0 || nd <= 0 || ns % 2 != 0 || nd % 2 != 0 {
            return Err(ConfigError::InvalidField {
                field: "mu",
                reason: format!(
                    "mu = {} and nu = {} do not describe positive antenna counts",
                    self.mu, self.nu
                ),
            });
        }
        Ok(())
    }
}

/// Parameters of the peak-family SNR `ζ_r = XY/(αY + β_r)` with
/// `X = max_n |f_{n,r}|²` and `Y = ‖g_r‖²`.
///
/// The relay gain behind `β_r` is normalized by the average power of the
/// *selected* antenna's signal, `σ_{ξ_r}² = σ_{f_r}² H_{N_s}` (the mean of
/// the maximum of `N_s` exponentials), matching how the transmission chain
/// scales its gains when a single source antenna is active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaParams {
    /// Weight of `Y` in the denominator: `α = 𝒩₁ / P₁`.
    pub alpha: f64,
    /// Constant denominator term per relay:
    /// `β_r = N_d 𝒩₂ (σ_{ξ_r}² P₁ + 𝒩₁) / (P₁ P₂)`.
    pub beta: Vec<f64>,
    /// First-hop Rayleigh scale per relay, `σ_{f_r}²`.
    pub sigma_f_sq: Vec<f64>,
    /// Mean of `Y` per relay: `Ȳ_r = N_d σ_{g_r}²`.
    pub ybar: Vec<f64>,
    /// Number of source antennas the maximum runs over.
    pub src_antennas: u32,
    /// Number of destination antennas.
    pub dst_antennas: u32,
}

impl ZetaParams {
    /// Builds the parameters from a validated configuration under the equal
    /// power split `P₁ = P₂ = P/2`.
    pub fn from_config(config: &NetworkConfig) -> Self {
        let p1 = EQUAL_SPLIT * config.total_power;
        let p2 = (1.0 - EQUAL_SPLIT) * config.total_power;
        let nd = config.dst_antennas as f64;
        let boost = harmonic(config.src_antennas as u32);
        let beta = config
            .sigma_f_sq
            .iter()
            .map(|&sf| nd * config.noise2 * (sf * boost * p1 + config.noise1) / (p1 * p2))
            .collect();
        ZetaParams {
            alpha: config.noise1 / p1,
            beta,
            sigma_f_sq: config.sigma_f_sq.clone(),
            ybar: config.sigma_g_sq.iter().map(|&sg| nd * sg).collect(),
            src_antennas: config.src_antennas as u32,
            dst_antennas: config.dst_antennas as u32,
        }
    }

    /// Number of relays covered by these parameters.
    pub fn num_relays(&self) -> usize {
        self.beta.len()
    }

    /// Rayleigh scale of each second-hop entry: `σ_{g_r}² = Ȳ_r / N_d`.
    pub(crate) fn scale_y(&self, r: usize) -> f64 {
        self.ybar[r] / f64::from(self.dst_antennas)
    }
}

/// Where the values of a [`SerCurve`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Monte Carlo over channel and noise realizations.
    Simulated,
    /// Quadrature of the exact error-rate integral.
    Exact,
    /// High-SNR closed form.
    Asymptotic,
    /// Closed-form upper bound.
    UpperBound,
    /// MGF-based estimate with Monte Carlo moment estimation.
    Mgf,
}

impl Provenance {
    /// Stable identifier used in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::Simulated => "simulated",
            Provenance::Exact => "exact",
            Provenance::Asymptotic => "asymptotic",
            Provenance::UpperBound => "upper_bound",
            Provenance::Mgf => "mgf",
        }
    }
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One point of an error-rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SerPoint {
    /// Transmit SNR in dB (`10 log₁₀(P/𝒩₁)`).
    pub snr_db: f64,
    /// Error rate in `[0, 1]`.
    pub value: f64,
    /// Half-width of the 95% confidence interval; zero for deterministic
    /// values.
    pub ci_halfwidth: f64,
}

/// An error-rate curve over an SNR grid, tagged with its origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerCurve {
    pub provenance: Provenance,
    pub points: Vec<SerPoint>,
}

impl SerCurve {
    /// Checks ordering and value ranges.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for pair in self.points.windows(2) {
            if pair[1].snr_db <= pair[0].snr_db {
                return Err(ConfigError::InvalidField {
                    field: "points",
                    reason: format!(
                        "snr_db must be strictly increasing, got {} after {}",
                        pair[1].snr_db, pair[0].snr_db
                    ),
                });
            }
        }
        for p in &self.points {
            if !(0.0..=1.0).contains(&p.value) || !p.value.is_finite() {
                return Err(ConfigError::InvalidField {
                    field: "points",
                    reason: format!("value {} at {} dB is outside [0, 1]", p.value, p.snr_db),
                });
            }
            if !(p.ci_halfwidth >= 0.0) {
                return Err(ConfigError::InvalidField {
                    field: "points",
                    reason: format!("ci_halfwidth {} at {} dB is negative", p.ci_halfwidth, p.snr_db),
                });
            }
        }
        Ok(())
    }
}

/// Least-squares diversity order of a curve's positive points: the negated
/// slope of `log₁₀(SER)` against `log₁₀(SNR)` (linear SNR, so the abscissa
/// is `snr_db/10`). Callers select the high-SNR window by passing a curve
/// restricted to it; points with zero value are skipped.
pub fn estimate_diversity_order(curve: &SerCurve) -> Result<f64, AnalysisError> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.value > 0.0)
        .map(|p| (p.snr_db / 10.0, p.value.log10()))
        .collect();
    let mut distinct: Vec<f64> = pts.iter().map(|&(x, _)| x).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(AnalysisError::InsufficientData {
            needed: 3,
            got: distinct.len(),
        });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|&(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|&(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|&(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|&(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(-slope)
}

/// Threshold below which `(z/2)^p K_m(z)` switches to its small-argument
/// limit; keeps the Bessel factor from overflowing while the product stays
/// finite.
const SMALL_ARGUMENT: f64 = 1e-6;

/// Evaluates `(z/2)^p · K_m(z)` for `z > 0`, stable as `z → 0`.
///
/// Every density here pairs a Bessel factor with at least as high a power of
/// its argument (`p ≥ |m|`), so the product has a finite limit even where
/// `K_m` alone overflows: `Γ(m)/2 · (z/2)^{p−m}` for `m ≠ 0`, and
/// `(z/2)^p (−ln(z/2) − γ)` for `m = 0`.
pub(crate) fn bessel_k_times_power(p: u32, order: i32, z: f64) -> f64 {
    let m = order.unsigned_abs();
    debug_assert!(p >= m, "power {p} must dominate Bessel order {m}");
    if z > SMALL_ARGUMENT {
        (z / 2.0).powi(p as i32) * bessel_k(order, z).expect("argument is positive")
    } else if m == 0 {
        let ln_half_z = (z / 2.0).ln();
        (f64::from(p) * ln_half_z).exp() * (-ln_half_z - EULER_GAMMA)
    } else {
        (ln_factorial(m - 1) - std::f64::consts::LN_2 + f64::from(p - m) * (z / 2.0).ln()).exp()
    }
}

/// Neumaier-compensated sum that also tracks the total magnitude of its
/// terms, so alternating series can detect catastrophic cancellation.
#[derive(Debug, Default)]
pub(crate) struct MonitoredSum {
    sum: f64,
    compensation: f64,
    magnitude: f64,
}

impl MonitoredSum {
    pub(crate) fn add(&mut self, term: f64) {
        self.magnitude += term.abs();
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// True when the absolute term mass exceeds the result by the given
    /// factor — the signal that the closed form has lost too many digits and
    /// a quadrature fallback should be used instead.
    pub(crate) fn cancellation_exceeds(&self, factor: f64) -> bool {
        let v = self.value().abs();
        v == 0.0 && self.magnitude > 0.0 || self.magnitude > factor * v
    }
}
