//! Small exact-combinatorics helpers shared by the analytical formulas.
//!
//! Everything here is `pub(crate)`: these are implementation details of the
//! closed forms in `analysis` and `specfun`, not part of the public surface.

/// n! as an `f64`, exactly rounded for n ≤ 34 (computed in `u128`), and by
/// f64 products beyond that (monotone error ~1 ulp per step, fine up to 170!).
pub(crate) fn factorial(n: u32) -> f64 {
    if n <= 34 {
        let mut acc: u128 = 1;
        for k in 2..=n as u128 {
            acc *= k;
        }
        acc as f64
    } else {
        let mut acc = factorial(34);
        for k in 35..=n {
            acc *= f64::from(k);
        }
        acc
    }
}

/// ln(n!) via `lgamma(n+1)`; used where factorials would overflow.
pub(crate) fn ln_factorial(n: u32) -> f64 {
    if n <= 34 {
        factorial(n).ln()
    } else {
        libm::lgamma(f64::from(n) + 1.0)
    }
}

/// Binomial coefficient C(n, k) as an `f64` (exact for every case used here:
/// n stays far below the 2^53 integer limit).
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k as u128 {
        num *= n as u128 - i;
        den *= i + 1;
    }
    (num / den) as f64
}

/// Harmonic number H_n = Σ_{k=1..n} 1/k, with H_0 = 0.
pub(crate) fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / f64::from(k)).sum()
}

/// Euler–Mascheroni constant γ.
pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
