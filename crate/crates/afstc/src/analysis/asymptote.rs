//! High-SNR behavior: the densities' leading coefficients at the origin
//! (the "derivative at zero" constants), power-law SER asymptotes for the
//! two selection schemes, and log-corrected upper bounds for the
//! equal-antenna case where no pure power law exists.
//!
//! Near the origin each per-relay density behaves like
//! `p_r(γ) ≈ Φ_r γ^{N−1}/(N−1)!` with `N = min{N_s, N_d}` (peak family:
//! `Δ_r ζ^{N_s−1}/(N_s−1)!`, requiring `N_s < N_d`). Selecting the best of
//! `R` relays multiplies in the distribution functions, so the selected SNR's
//! density starts at order `γ^{NR−1}`, and averaging the conditional error
//! rate uses the moment identity
//! `∫₀^∞ Q(√(gγ)) γ^{NR−1} dγ = (2NR−1)!! / (2·NR·g^{NR})`.
//!
//! When `N_s = N_d` the zero-order Bessel term turns logarithmic and no
//! finite origin coefficient exists; the asymptote is then replaced by a
//! closed-form upper bound built from the small-argument density: a
//! general-R form that linearizes the other relays' distribution functions,
//! and a tighter two-relay form that keeps one distribution factor exact.

use super::{AnalysisError, GammaRatioParams, ZetaParams};
use crate::network::{ModulationSpec, NetworkConfig};
use crate::numutil::{binomial, factorial, harmonic, ln_factorial, EULER_GAMMA};
use crate::powerctl::SchemeId;

/// `ln Σ_i exp(terms_i)` with the usual max shift; every term finite.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `(N−1)`-th derivative of [`pdf_gamma_r`](super::pdf_gamma_r) at the
/// origin, `Φ_r`, with `N = min{N_s, N_d}`: the coefficient in
/// `p_r(γ) = Φ_r γ^{N−1}/(N−1)! + o(γ^{N−1})`.
///
/// Requires `N_s ≠ N_d`; at equal antenna counts the leading term carries a
/// `ln γ` factor and no finite derivative exists (use
/// [`ser_upper_bound_equal_antennas`] for that case).
pub fn pdf_derivative_at_zero(
    params: &GammaRatioParams,
    r: usize,
) -> Result<f64, AnalysisError> {
    Ok(ln_ratio_origin_coefficient(params, r)?.exp())
}

/// `ln Φ_r`, evaluated term-by-term in log space so large factorials and
/// small SNR-dependent constants cannot overflow on the way to a
/// representable result.
pub(crate) fn ln_ratio_origin_coefficient(
    params: &GammaRatioParams,
    r: usize,
) -> Result<f64, AnalysisError> {
    let ns = params.src_antennas();
    let nd = params.dst_antennas();
    if ns == nd {
        return Err(AnalysisError::Capability(format!(
            "the density's leading origin term carries a logarithmic factor when \
             N_s = N_d (got {ns} antennas on both sides); no finite derivative \
             exists — use the equal-antenna upper bound instead"
        )));
    }
    let xs = params.scale_x(r);
    let ys = params.scale_y(r);
    let ln_a = params.a.ln();
    let ln_b = params.b[r].ln();
    if ns < nd {
        let terms: Vec<f64> = (0..=ns)
            .map(|k| {
                binomial(ns, k).ln()
                    + f64::from(k) * ln_a
                    + f64::from(ns - k) * ln_b
                    + ln_factorial(nd - ns + k - 1)
                    - ln_factorial(nd - 1)
                    - f64::from(ns) * xs.ln()
                    - f64::from(ns - k) * ys.ln()
            })
            .collect();
        Ok(log_sum_exp(&terms))
    } else {
        Ok(ln_factorial(ns - nd - 1) - ln_factorial(ns - 1)
            + f64::from(nd) * (ln_b - xs.ln() - ys.ln()))
    }
}

/// `(N_s−1)`-th derivative of [`pdf_zeta_r`](super::pdf_zeta_r) at the
/// origin, `Δ_r`: the coefficient in
/// `p_{ζ_r}(ζ) = Δ_r ζ^{N_s−1}/(N_s−1)! + o(ζ^{N_s−1})`.
///
/// Requires `N_s < N_d`; otherwise the second-hop moments behind the
/// expansion diverge and the leading exponent changes.
pub fn pdf_zeta_derivative_at_zero(
    zparams: &ZetaParams,
    r: usize,
) -> Result<f64, AnalysisError> {
    Ok(ln_peak_origin_coefficient(zparams, r)?.exp())
}

/// `ln Δ_r` in log space; see [`pdf_zeta_derivative_at_zero`].
pub(crate) fn ln_peak_origin_coefficient(
    zparams: &ZetaParams,
    r: usize,
) -> Result<f64, AnalysisError> {
    let ns = zparams.src_antennas;
    let nd = zparams.dst_antennas;
    if ns >= nd {
        return Err(AnalysisError::Capability(format!(
            "the joint-selection origin coefficient requires strictly more \
             destination than source antennas (N_s < N_d); got N_s = {ns}, \
             N_d = {nd}"
        )));
    }
    let xs = zparams.sigma_f_sq[r];
    let ys = zparams.scale_y(r);
    let ln_alpha = zparams.alpha.ln();
    let ln_beta = zparams.beta[r].ln();
    let terms: Vec<f64> = (0..=ns)
        .map(|k| {
            binomial(ns, k).ln()
                + f64::from(ns - k) * ln_alpha
                + f64::from(k) * ln_beta
                + ln_factorial(nd - k - 1)
                - ln_factorial(nd - 1)
                - f64::from(k) * ys.ln()
        })
        .collect();
    Ok(ln_factorial(ns) - f64::from(ns) * xs.ln() + log_sum_exp(&terms))
}

/// High-SNR SER approximation for the selection schemes.
///
/// * `OpportunisticRelay`: the `Φ`-based power law of order `R·min{N_s,N_d}`
///   when `N_s ≠ N_d`; at `N_s = N_d` (where the power law picks up a `ln`
///   factor) the call routes to [`ser_upper_bound_equal_antennas`].
/// * `FullOpportunism`: the `Δ`-based power law of order `N_s R`, defined
///   only for `N_s < N_d`.
/// * The uniform and source-selection schemes have no supported closed form
///   and return a capability error.
pub fn ser_asymptotic(
    config: &NetworkConfig,
    modulation: &ModulationSpec,
    scheme: SchemeId,
) -> Result<f64, AnalysisError> {
    match scheme {
        SchemeId::DstcUniform | SchemeId::OpportunisticSource => {
            Err(AnalysisError::Capability(format!(
                "no high-SNR closed form is implemented for the `{scheme}` scheme; \
                 only the relay-selection and joint-selection schemes have \
                 origin-coefficient asymptotes"
            )))
        }
        SchemeId::OpportunisticRelay => {
            let params = GammaRatioParams::from_config(config);
            if params.src_antennas() == params.dst_antennas() {
                return ser_upper_bound_equal_antennas(config, modulation);
            }
            let n = params.src_antennas().min(params.dst_antennas());
            let ln_coeffs = (0..params.num_relays())
                .map(|r| ln_ratio_origin_coefficient(&params, r))
                .collect::<Result<Vec<f64>, _>>()?;
            Ok(asymptote_from_origin_coefficients(&ln_coeffs, n, modulation))
        }
        SchemeId::FullOpportunism => {
            let zparams = ZetaParams::from_config(config);
            let ln_coeffs = (0..zparams.num_relays())
                .map(|r| ln_peak_origin_coefficient(&zparams, r))
                .collect::<Result<Vec<f64>, _>>()?;
            Ok(asymptote_from_origin_coefficients(
                &ln_coeffs,
                zparams.src_antennas,
                modulation,
            ))
        }
    }
}

/// `c · R (Π_r coeff_r) / ((N−1)!(N!)^{R−1}) · (2NR−1)!!/(2·NR·g^{NR})`,
/// assembled in log space and clamped to `[0, 1]`.
fn asymptote_from_origin_coefficients(
    ln_coeffs: &[f64],
    n: u32,
    modulation: &ModulationSpec,
) -> f64 {
    let relays = ln_coeffs.len() as u32;
    let order = n * relays;
    let ln_double_factorial: f64 = (1..=order).map(|i| f64::from(2 * i - 1).ln()).sum();
    let ln_value = modulation.ser_coefficient().ln()
        + f64::from(relays).ln()
        + ln_coeffs.iter().sum::<f64>()
        - ln_factorial(n - 1)
        - f64::from(relays - 1) * ln_factorial(n)
        + ln_double_factorial
        - (2.0 * f64::from(order)).ln()
        - f64::from(order) * modulation.g.ln();
    ln_value.exp().clamp(0.0, 1.0)
}

/// Closed-form SER upper bound for the relay-selection scheme with
/// `N_s = N_d`, where the asymptote's origin coefficient does not exist.
///
/// Both forms integrate the small-argument density against the `e^{−gγ}`
/// error-rate kernel; the two-relay variant keeps the competing relay's
/// exact exponential distribution factor instead of its linearization and
/// is therefore tighter. Results are clamped to `[0, 1]`.
pub fn ser_upper_bound_equal_antennas(
    config: &NetworkConfig,
    modulation: &ModulationSpec,
) -> Result<f64, AnalysisError> {
    let params = GammaRatioParams::from_config(config);
    let ns = params.src_antennas();
    if ns != params.dst_antennas() {
        return Err(AnalysisError::Capability(format!(
            "the closed-form upper bound applies to equal antenna counts only, \
             got {} source and {} destination",
            ns,
            params.dst_antennas(),
        )));
    }
    let g = modulation.g;
    let value = if params.num_relays() == 2 {
        two_relay_bound(&params, g)
    } else {
        general_bound(&params, g)
    };
    Ok((modulation.ser_coefficient() * value).clamp(0.0, 1.0))
}

/// The `Ψ_{r,k}` constants of the bound kernels. `k = 0` multiplies the
/// logarithmic term; `k ≥ 1` are the pure power terms.
fn psi(params: &GammaRatioParams, r: usize, k: u32) -> f64 {
    let ns = params.src_antennas();
    let xs = params.scale_x(r);
    let ys = params.scale_y(r);
    let b = params.b[r];
    let norm = factorial(ns - 1).powi(2) * xs.powi(ns as i32);
    if k == 0 {
        b.powi(ns as i32) / (norm * ys.powi(ns as i32))
    } else {
        binomial(ns, k) * params.a.powi(k as i32) * b.powi((ns - k) as i32)
            * factorial(k - 1)
            / (norm * ys.powi((ns - k) as i32))
    }
}

/// Brace factor shared by both bounds:
/// `Σ_{k=1}^{N_s} Ψ_{r,k} + Ψ_{r,0}[ln((g·x_r·y_r + q·y_r)/(4b_r)) + γ − H_h]`,
/// where `q` is the accumulated exponential rate from the other relays'
/// distribution factors and `H_h` the harmonic number paired with the
/// `∫ γ^h e^{−sγ} ln γ dγ` evaluation.
fn brace(params: &GammaRatioParams, r: usize, g: f64, q: f64, h: u32) -> f64 {
    let ns = params.src_antennas();
    let xs = params.scale_x(r);
    let ys = params.scale_y(r);
    let b = params.b[r];
    let power_terms: f64 = (1..=ns).map(|k| psi(params, r, k)).sum();
    let log_term = ((g * xs * ys + q * ys) / (4.0 * b)).ln() + EULER_GAMMA - harmonic(h);
    power_terms + psi(params, r, 0) * log_term
}

/// General-R bound: every competing relay's distribution factor is
/// linearized to `aγ/x_j`, lifting the integrand's power to
/// `m = N_s + R − 2`.
fn general_bound(params: &GammaRatioParams, g: f64) -> f64 {
    let ns = params.src_antennas();
    let relays = params.num_relays();
    let m = ns + relays as u32 - 2;
    (0..relays)
        .map(|r| {
            let s = g + params.a / params.scale_x(r);
            let cross: f64 = (0..relays)
                .filter(|&j| j != r)
                .map(|j| params.a / params.scale_x(j))
                .product();
            factorial(m) / s.powi(m as i32 + 1) * cross * brace(params, r, g, params.a, m)
        })
        .sum()
}

/// Two-relay bound: the competitor's distribution `1 − e^{−aγ/x}` is kept
/// exact, splitting each summand into rates `a` and `2a`.
fn two_relay_bound(params: &GammaRatioParams, g: f64) -> f64 {
    let ns = params.src_antennas();
    (0..2)
        .map(|r| {
            let rate = params.a / params.scale_x(r);
            factorial(ns - 1)
                * ((g + rate).powi(-(ns as i32)) * brace(params, r, g, params.a, ns - 1)
                    - (g + 2.0 * rate).powi(-(ns as i32))
                        * brace(params, r, g, 2.0 * params.a, ns - 1))
        })
        .sum()
}
