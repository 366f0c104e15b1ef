//! Density, distribution, and exact-SER evaluators for the ratio family
//! `γ_r = XY/(aY + b_r)` with `X = ‖f_r‖²` (gamma with `N_s` degrees) and
//! `Y = ‖g_r‖²` (gamma with `N_d` degrees).

use super::{bessel_k_times_power, AnalysisError, GammaRatioParams};
use crate::network::ModulationSpec;
use crate::numutil::{binomial, factorial};
use crate::specfun::{gaussian_q, integrate_semi_infinite, QuadratureSpec};

/// Density of `γ_r` for relay `r`: a finite Bessel-K sum obtained by
/// integrating the conditional gamma density of `X` over `Y`.
///
/// Errors when `gamma ≤ 0` (the variable is supported on the positive
/// half-line).
pub fn pdf_gamma_r(
    params: &GammaRatioParams,
    r: usize,
    gamma: f64,
) -> Result<f64, AnalysisError> {
    if !(gamma > 0.0) {
        return Err(AnalysisError::Domain {
            func: "pdf_gamma_r",
            arg: "gamma",
            value: gamma,
            requirement: "must be > 0",
        });
    }
    Ok(pdf_gamma_value(params, r, gamma))
}

/// Density evaluation without the domain check, for integrands that already
/// guarantee a positive argument.
pub(crate) fn pdf_gamma_value(params: &GammaRatioParams, r: usize, gamma: f64) -> f64 {
    let ns = params.src_antennas();
    let nd = params.dst_antennas();
    let xs = params.scale_x(r);
    let ys = params.scale_y(r);
    let b = params.b[r];
    let z = 2.0 * (b * gamma / (xs * ys)).sqrt();
    let norm = factorial(nd - 1) * factorial(ns - 1);
    let envelope = (-params.a * gamma / xs).exp() / gamma;
    let mut sum = 0.0;
    for k in 0..=ns {
        let coeff = 2.0 * binomial(ns, k) * (params.a * ys / b).powi(k as i32) / norm;
        sum += coeff * bessel_k_times_power(params.mu + k, params.nu + k as i32, z);
    }
    sum * envelope
}

/// Distribution function of `γ_r`: `Pr{γ_r < γ}`. Returns 0 for `γ ≤ 0` and
/// clamps roundoff at the edges of `[0, 1]`.
pub fn cdf_gamma_r(params: &GammaRatioParams, r: usize, gamma: f64) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    let ns = params.src_antennas();
    let nd = params.dst_antennas();
    let xs = params.scale_x(r);
    let ys = params.scale_y(r);
    let b = params.b[r];
    let z = 2.0 * (b * gamma / (xs * ys)).sqrt();
    let mut tail = 0.0;
    for n in 0..ns {
        for k in 0..=n {
            let coeff =
                2.0 * binomial(n, k) * (params.a * ys / b).powi(k as i32)
                    / (factorial(n) * factorial(nd - 1));
            tail += coeff
                * bessel_k_times_power(
                    nd + n + k,
                    nd as i32 - n as i32 + k as i32,
                    z,
                );
        }
    }
    (1.0 - (-params.a * gamma / xs).exp() * tail).clamp(0.0, 1.0)
}

/// Density of `γ_max = max_r γ_r` by the order-statistics identity
/// `Σ_r p_r(γ) Π_{j≠r} F_j(γ)`.
pub fn pdf_gamma_max(params: &GammaRatioParams, gamma: f64) -> Result<f64, AnalysisError> {
    if !(gamma > 0.0) {
        return Err(AnalysisError::Domain {
            func: "pdf_gamma_max",
            arg: "gamma",
            value: gamma,
            requirement: "must be > 0",
        });
    }
    Ok(pdf_gamma_max_value(params, gamma))
}

pub(crate) fn pdf_gamma_max_value(params: &GammaRatioParams, gamma: f64) -> f64 {
    let relays = params.num_relays();
    (0..relays)
        .map(|r| {
            let mut term = pdf_gamma_value(params, r, gamma);
            for j in 0..relays {
                if j != r {
                    term *= cdf_gamma_r(params, j, gamma);
                }
            }
            term
        })
        .sum()
}

/// Exact average SER of the relay-selection scheme:
/// `∫₀^∞ c·Q(√(g·γ)) p_max(γ) dγ` by semi-infinite quadrature.
pub fn ser_exact_opportunistic(
    params: &GammaRatioParams,
    modulation: &ModulationSpec,
) -> Result<f64, AnalysisError> {
    let c = modulation.ser_coefficient();
    let g = modulation.g;
    let spec = QuadratureSpec::default();
    let estimate = integrate_semi_infinite(
        |gamma| {
            let q = gaussian_q((g * gamma).sqrt()).expect("finite argument");
            c * q * pdf_gamma_max_value(params, gamma)
        },
        &spec,
    )?;
    Ok(estimate.value.clamp(0.0, 1.0))
}

/// Small-argument approximation of [`pdf_gamma_r`] for the equal-antenna
/// case `N_s = N_d`, where the zero-order Bessel term turns logarithmic:
///
/// `p_r(γ) ≈ e^{−aγ/σ_f²} γ^{N−1} (b/(σ_f²σ_g²))^N / ((N−1)!)² ·
///  [Σ_{k=1}^{N} C(N,k) (a σ_g²/b)^k (k−1)! − ln(4 b γ/(σ_f²σ_g²))]`.
///
/// This is the kernel behind the closed-form upper bounds; it is only
/// accurate where `bγ/(σ_f²σ_g²)` is small.
pub fn approx_pdf_equal_antennas(
    params: &GammaRatioParams,
    r: usize,
    gamma: f64,
) -> Result<f64, AnalysisError> {
    let ns = params.src_antennas();
    if ns != params.dst_antennas() {
        return Err(AnalysisError::Capability(format!(
            "small-argument density requires equal antenna counts, got {} source and {} destination",
            ns,
            params.dst_antennas()
        )));
    }
    if !(gamma > 0.0) {
        return Err(AnalysisError::Domain {
            func: "approx_pdf_equal_antennas",
            arg: "gamma",
            value: gamma,
            requirement: "must be > 0",
        });
    }
    Ok(approx_pdf_equal_antennas_value(params, r, gamma))
}

pub(crate) fn approx_pdf_equal_antennas_value(
    params: &GammaRatioParams,
    r: usize,
    gamma: f64,
) -> f64 {
    let ns = params.src_antennas();
    let xs = params.scale_x(r);
    let ys = params.scale_y(r);
    let b = params.b[r];
    let w = b * gamma / (xs * ys);
    let norm = factorial(ns - 1) * factorial(ns - 1);
    let constant: f64 = (1..=ns)
        .map(|k| binomial(ns, k) * (params.a * ys / b).powi(k as i32) * factorial(k - 1))
        .sum();
    (-params.a * gamma / xs).exp() / gamma * w.powi(ns as i32) / norm
        * (constant - (4.0 * w).ln())
}
