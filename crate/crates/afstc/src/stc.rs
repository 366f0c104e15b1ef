//! Orthogonal space-time code construction, source/relay encoding over the
//! two-phase relay channel, and the destination's ML decision.
//!
//! The source maps a symbol vector `s` onto a `T×Ns` orthogonal block whose
//! columns are `A_n·s`; each relay linearly transforms its noisy observation
//! with its own `T×T` matrix `C_r` and forwards it. Stacking the relay
//! contributions turns the network into an equivalent point-to-point
//! space-time system `Y = √(P₁T/Ns)·S·H + W_T` with the block-structured
//! channel `H` and a colored total noise `W_T`, which is what
//! [`simulate_transmission`] produces and [`decode_ml`] inverts. All
//! dispersion matrices come from the real 4×4 orthogonal-design family, so
//! the code is full rate (`K = T`) and the ML metric decomposes per symbol
//! for real constellations.

use crate::network::{
    agc_relay_gain, standard_complex_gaussian, ChannelRealization, ModulationFamily,
    ModulationSpec, NetworkConfig, PowerAllocation,
};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Errors raised by code construction and the transmission chain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StcError {
    /// The requested code shape has no known orthogonal design here.
    #[error(
        "no codebook for Ns={src_antennas}, R={num_relays}, T={block_len}; \
         supported shapes: T=4 with Ns in {{1,2}}, R in {{1,2,4}}, and Ns·R <= 4"
    )]
    UnsupportedShape {
        /// Requested number of source antennas.
        src_antennas: usize,
        /// Requested number of relays.
        num_relays: usize,
        /// Requested block length.
        block_len: usize,
    },
    /// An input's dimensions do not match the configuration.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dispersion matrices of a distributed orthogonal space-time code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeBook {
    /// Source dispersion matrices `A_n`, one unitary `T×T` matrix per source
    /// antenna; column `n` of the source block is `A_n·s`.
    pub a: Vec<Array2<Complex64>>,
    /// Relay dispersion matrices `C_r`, one unitary `T×T` matrix per relay;
    /// relay `r` forwards `ρ_r·C_r·x_r`.
    pub c: Vec<Array2<Complex64>>,
}

/// The four real 4×4 orthogonal-design generators. They satisfy
/// `B_iᵗB_i = I` and `B_iᵗB_j = −B_jᵗB_i` for `i ≠ j`, which is exactly what
/// makes any family `{C_r·A_n}` drawn from (signed) members of the set an
/// orthogonal design for real symbol vectors.
fn design_generators() -> [Array2<Complex64>; 4] {
    fn from_rows(rows: [[i8; 4]; 4]) -> Array2<Complex64> {
        Array2::from_shape_fn((4, 4), |(i, j)| Complex64::new(f64::from(rows[i][j]), 0.0))
    }
    [
        from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
        from_rows([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]),
        from_rows([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]),
        from_rows([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]),
    ]
}

/// Builds the dispersion matrices for a network shape.
///
/// Supported shapes are the full-rate real orthogonal designs over `T = 4`:
/// `Ns ∈ {1, 2}`, `R ∈ {1, 2, 4}`, with `Ns·R ≤ 4` so the stacked codeword
/// stays orthogonal. The two-antenna/two-relay codebook is the canonical
/// one: `A₁ = C₁ = I₄`, `A₂` the pairwise-rotation generator, and `C₂` the
/// four-cycle generator; the four-relay codebook appends the remaining two
/// generators.
///
/// ## Errors
///
/// [`StcError::UnsupportedShape`] (naming the supported set) for any other
/// shape — general orthogonal-design synthesis is out of scope.
pub fn build_codebook(src_antennas: usize, num_relays: usize, block_len: usize) -> Result<CodeBook, StcError> {
    let [b1, b2, b3, b4] = design_generators();
    let unsupported = StcError::UnsupportedShape {
        src_antennas,
        num_relays,
        block_len,
    };
    if block_len != 4 || src_antennas * num_relays > 4 {
        return Err(unsupported);
    }
    let a = match src_antennas {
        1 => vec![b1.clone()],
        2 => vec![b1.clone(), b2.clone()],
        _ => return Err(unsupported),
    };
    let c = match num_relays {
        1 => vec![b1],
        2 => vec![b1, b3],
        4 => vec![b1, b3, b2, b4],
        _ => return Err(unsupported),
    };
    Ok(CodeBook { a, c })
}

/// Everything produced by one pass through the two-phase channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionTrace {
    /// Transmitted symbol vector, length `T`, normalized so `E[‖s‖²] = 1`
    /// (each constellation point carries average energy `1/T`), which is the
    /// normalization that makes `√(P₁T/Ns)` the exact source scale factor.
    pub s: Array1<Complex64>,
    /// Per-relay phase-1 observations `x_r`, each of length `T`.
    pub x_r: Vec<Array1<Complex64>>,
    /// Destination block `Y`, `T×Nd`.
    pub y: Array2<Complex64>,
    /// Equivalent channel `H = F·Λ·G`, `NsR×Nd`; block `r` of rows is the
    /// outer product `ρ_r·f_r·g_r`.
    pub h: Array2<Complex64>,
    /// Total effective noise `W_T = V·Λ·G + W`, `T×Nd`, where column `r` of
    /// `V` is `C_r·v_r`.
    pub w_t: Array2<Complex64>,
}

/// Weighted source block: column `n` is `√P_{1,n}·A_n·s`, so that antenna
/// `n` radiates average power `P_{1,n}` after the global `√T` stretch.
fn weighted_source_block(
    codebook: &CodeBook,
    alloc: &PowerAllocation,
    s: &Array1<Complex64>,
) -> Array2<Complex64> {
    let t = s.len();
    let ns = codebook.a.len();
    let mut xp = Array2::zeros((t, ns));
    for (n, a_n) in codebook.a.iter().enumerate() {
        let column = a_n.dot(s) * Complex64::new(alloc.p1_per_antenna[n].sqrt(), 0.0);
        xp.column_mut(n).assign(&column);
    }
    xp
}

/// Equivalent channel `H = F·Λ·G` for the given gains.
fn equivalent_channel(chan: &ChannelRealization, rho: &[f64]) -> Array2<Complex64> {
    let (ns, relays) = chan.f.dim();
    let nd = chan.g.dim().1;
    let mut h = Array2::zeros((ns * relays, nd));
    for r in 0..relays {
        for n in 0..ns {
            for j in 0..nd {
                h[(r * ns + n, j)] = chan.f[(n, r)] * chan.g[(r, j)] * rho[r];
            }
        }
    }
    h
}

/// Runs one block through both phases of the relay channel.
///
/// Phase 1 sends `√T·X_p` (columns `√P_{1,n}·A_n·s`), so relay `r` observes
/// `x_r = √T·X_p·f_r + v_r`; with the uniform split `P_{1,n} = P₁/Ns` this
/// is the classical `√(P₁T/Ns)·S₁·f_r + v_r`. Phase 2 applies each relay's
/// gain and dispersion and adds destination noise; the destination block is
/// assembled through the equivalent-channel identity
///
/// `Y = √T·[C₁X_p, …, C_RX_p]·H + W_T`,
///
/// which *is* the physical superposition `y_j = Σ_r g_{r,j}ρ_r C_r x_r + w_j`
/// rewritten, so the identity holds by construction. Relay gains follow the
/// allocation's selection policy (see the gain-control rule in the network
/// layer); relays with `P_{2,r} = 0` contribute neither signal nor noise.
///
/// The random stream is consumed in a fixed order — relay noises `v_1 … v_R`
/// (each `T` entries), then destination noise column by column — keeping
/// traces bit-reproducible for a given seed.
///
/// ## Errors
///
/// [`StcError::DimensionMismatch`] when the symbol vector, codebook,
/// allocation, or channel shapes disagree with `config`.
pub fn simulate_transmission<R: Rng + ?Sized>(
    config: &NetworkConfig,
    codebook: &CodeBook,
    alloc: &PowerAllocation,
    chan: &ChannelRealization,
    s: &Array1<Complex64>,
    rng: &mut R,
) -> Result<TransmissionTrace, StcError> {
    let t = config.block_len;
    let ns = config.src_antennas;
    let relays = config.num_relays;
    let nd = config.dst_antennas;
    if s.len() != t {
        return Err(StcError::DimensionMismatch(format!(
            "symbol vector has length {}, block length is {t}",
            s.len()
        )));
    }
    if codebook.a.len() != ns || codebook.c.len() != relays {
        return Err(StcError::DimensionMismatch(format!(
            "codebook is for Ns={}, R={}; config has Ns={ns}, R={relays}",
            codebook.a.len(),
            codebook.c.len()
        )));
    }
    if chan.f.dim() != (ns, relays) || chan.g.dim() != (relays, nd) {
        return Err(StcError::DimensionMismatch(format!(
            "channel shapes f{:?}, g{:?} do not match (Ns={ns}, R={relays}, Nd={nd})",
            chan.f.dim(),
            chan.g.dim()
        )));
    }
    if alloc.p1_per_antenna.len() != ns || alloc.p2_per_relay.len() != relays {
        return Err(StcError::DimensionMismatch(format!(
            "allocation is for Ns={}, R={}; config has Ns={ns}, R={relays}",
            alloc.p1_per_antenna.len(),
            alloc.p2_per_relay.len()
        )));
    }

    let sqrt_t = (t as f64).sqrt();
    let xp = weighted_source_block(codebook, alloc, s);

    // Phase 1: relay observations and their dispersed forms C_r·v_r.
    let noise1_scale = (config.noise1 / 2.0).sqrt();
    let mut x_r = Vec::with_capacity(relays);
    let mut dispersed_noise = Vec::with_capacity(relays);
    for r in 0..relays {
        let f_r = chan.f.column(r).to_owned();
        let mut x = xp.dot(&f_r);
        x.mapv_inplace(|z| z * sqrt_t);
        let v: Array1<Complex64> =
            Array1::from_iter((0..t).map(|_| standard_complex_gaussian(rng) * noise1_scale));
        let x = x + &v;
        dispersed_noise.push(codebook.c[r].dot(&v));
        x_r.push(x);
    }

    // Gains under the allocation's selection policy.
    let rho: Vec<f64> = (0..relays).map(|r| agc_relay_gain(config, alloc, r)).collect();
    let h = equivalent_channel(chan, &rho);

    // Total noise W_T = V·Λ·G + W.
    let noise2_scale = (config.noise2 / 2.0).sqrt();
    let mut w_t = Array2::zeros((t, nd));
    for j in 0..nd {
        for i in 0..t {
            let mut entry = standard_complex_gaussian(rng) * noise2_scale;
            for r in 0..relays {
                entry += dispersed_noise[r][i] * chan.g[(r, j)] * rho[r];
            }
            w_t[(i, j)] = entry;
        }
    }

    // Y = √T·[C₁X_p, …, C_RX_p]·H + W_T.
    let mut y = w_t.clone();
    for r in 0..relays {
        let block = codebook.c[r].dot(&xp); // T×Ns
        for j in 0..nd {
            for n in 0..ns {
                let h_entry = h[(r * ns + n, j)] * sqrt_t;
                for i in 0..t {
                    y[(i, j)] += block[(i, n)] * h_entry;
                }
            }
        }
    }

    Ok(TransmissionTrace {
        s: s.clone(),
        x_r,
        y,
        h,
        w_t,
    })
}

/// Matched-filter statistic `z = Σ_j G_jᴴ·y_j` with
/// `G_j = √T·Σ_m √P_{1,n(m)}·H[m,j]·C_{r(m)}A_{n(m)}`.
fn matched_filter(
    trace: &TransmissionTrace,
    codebook: &CodeBook,
    alloc: &PowerAllocation,
) -> Array1<Complex64> {
    let t = trace.s.len();
    let ns = codebook.a.len();
    let relays = codebook.c.len();
    let nd = trace.y.dim().1;
    let sqrt_t = (t as f64).sqrt();

    let mut z = Array1::zeros(t);
    for j in 0..nd {
        let y_j = trace.y.column(j);
        let mut g_j = Array2::<Complex64>::zeros((t, t));
        for r in 0..relays {
            for n in 0..ns {
                let weight =
                    trace.h[(r * ns + n, j)] * Complex64::new(alloc.p1_per_antenna[n].sqrt() * sqrt_t, 0.0);
                let m = codebook.c[r].dot(&codebook.a[n]);
                g_j.zip_mut_with(&m, |acc, &entry| *acc += entry * weight);
            }
        }
        // G_jᴴ·y_j accumulated across destination antennas.
        for k in 0..t {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..t {
                acc += g_j[(i, k)].conj() * y_j[i];
            }
            z[k] += acc;
        }
    }
    z
}

/// Per-symbol ML decision for the orthogonal design.
///
/// Because every codeword matrix family here is a real orthogonal design,
/// the Gaussian metric `‖Y − √(P₁T/Ns)·S(s̃)·H‖²` decomposes per symbol: the
/// cross terms `G_jᴴG_j` reduce to `(Σ_m |weight_m|²)·I` plus a skew part
/// that vanishes in the decision statistic for real constellations, so
/// maximum-likelihood detection is a symbol-wise slice of the matched-filter
/// output `z = Σ_j G_jᴴ y_j`. For BPSK this is `sign(Re z_k)`; phase
/// constellations slice by angle, square QAM by the nearest scaled grid
/// point. Real designs make the decomposition exact only for real
/// constellations (BPSK), which is what the simulation layer drives.
pub fn decode_ml(
    trace: &TransmissionTrace,
    codebook: &CodeBook,
    _config: &NetworkConfig,
    alloc: &PowerAllocation,
    _chan: &ChannelRealization,
    modulation: &ModulationSpec,
) -> Array1<Complex64> {
    let t = trace.s.len();
    let z = matched_filter(trace, codebook, alloc);
    let scale = 1.0 / (t as f64).sqrt();

    match (modulation.family, modulation.m) {
        (ModulationFamily::Mpsk, 2) => z.mapv(|zk| {
            if zk.re >= 0.0 {
                Complex64::new(scale, 0.0)
            } else {
                Complex64::new(-scale, 0.0)
            }
        }),
        (ModulationFamily::Mpsk, m) => z.mapv(|zk| {
            // Angular slicing: decision regions are scale-invariant cones.
            let step = 2.0 * std::f64::consts::PI / f64::from(m);
            let sector = (zk.arg() / step).round();
            Complex64::from_polar(scale, sector * step)
        }),
        (ModulationFamily::Mqam, m) => {
            // Nearest point of the unit-average-energy square grid, scaled
            // by the matched filter's signal amplitude Σ_j c_j · √T… which
            // equals Σ_{j,m} |weight_m|² from the same weights the filter
            // used; recompute it cheaply from the trace.
            let side = (f64::from(m)).sqrt().round();
            let energy: f64 = {
                let t_f = t as f64;
                let nd = trace.y.dim().1;
                let ns = codebook.a.len();
                let relays = codebook.c.len();
                let mut sum = 0.0;
                for j in 0..nd {
                    for r in 0..relays {
                        for n in 0..ns {
                            sum += alloc.p1_per_antenna[n]
                                * t_f
                                * trace.h[(r * ns + n, j)].norm_sqr();
                        }
                    }
                }
                sum
            };
            // Grid levels ±1, ±3, …, ±(side−1) normalized to unit average
            // symbol energy 2(M−1)/3 per complex dimension pair.
            let norm = (3.0 / (2.0 * (f64::from(m) - 1.0))).sqrt() * scale;
            let slice = |v: f64| -> f64 {
                let level = (v / (energy * norm)).clamp(-(side - 1.0), side - 1.0);
                let odd = 2.0 * ((level + 1.0) / 2.0).floor() + 1.0;
                odd.clamp(-(side - 1.0), side - 1.0)
            };
            z.mapv(|zk| Complex64::new(slice(zk.re) * norm, slice(zk.im) * norm))
        }
    }
}

/// Post-detection SNR at the destination for a fixed channel realization.
///
/// Computed as the ratio of the block-averaged signal power to the total
/// noise power at the ML combiner input:
///
/// `SNR = Σ_n P_{1,n}·θ_n`, `θ_n = Σ_r |f_{n,r}|²ρ_r²‖g_r‖² /
/// (Σ_k ρ_k²‖g_k‖²·N₁ + Nd·N₂)`,
///
/// which for the uniform split `P_{1,n} = P₁/Ns` reduces to the familiar
/// `Σ_r P₁ρ_r²‖f_r‖²‖g_r‖² / (Ns·Σ_k ρ_k²‖g_k‖²N₁ + NsNdN₂)`. Gains follow
/// the allocation's selection policy, matching [`simulate_transmission`].
pub fn instantaneous_snr(
    config: &NetworkConfig,
    alloc: &PowerAllocation,
    chan: &ChannelRealization,
) -> f64 {
    let relays = config.num_relays;
    let ns = config.src_antennas;
    let rho_sq: Vec<f64> = (0..relays)
        .map(|r| {
            let rho = agc_relay_gain(config, alloc, r);
            rho * rho
        })
        .collect();
    let g_norm_sq: Vec<f64> = (0..relays)
        .map(|r| chan.g.row(r).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    let denom: f64 = (0..relays).map(|k| rho_sq[k] * g_norm_sq[k]).sum::<f64>() * config.noise1
        + config.dst_antennas as f64 * config.noise2;
    let mut snr = 0.0;
    for n in 0..ns {
        let theta_num: f64 = (0..relays)
            .map(|r| chan.f[(n, r)].norm_sqr() * rho_sq[r] * g_norm_sq[r])
            .sum();
        snr += alloc.p1_per_antenna[n] * theta_num / denom;
    }
    snr
}
