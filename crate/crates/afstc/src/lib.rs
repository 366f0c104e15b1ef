//! Simulation and analysis workbench for amplify-and-forward (A&F) relay
//! networks that use distributed space-time coding (DSTC) between a
//! multi-antenna source and a multi-antenna destination.
//!
//! The crate is organized in layers, bottom up:
//!
//! * [`specfun`] — special functions (modified Bessel K, Gaussian Q, upper
//!   incomplete gamma) and deterministic adaptive quadrature, including
//!   semi-infinite integrals.
//! * [`network`] — static network description ([`NetworkConfig`]), Rayleigh
//!   channel sampling, relay amplification gains, and modulation constants.
//! * [`stc`] — orthogonal space-time codebooks, the end-to-end two-phase
//!   transmission model, the per-symbol ML decoder, and the instantaneous
//!   post-combining SNR.
//! * [`powerctl`] — the four power-allocation/selection strategies (uniform
//!   DSTC, opportunistic relay, full opportunism, opportunistic source) plus
//!   the optimal two-phase power split.
//! * [`analysis`] — closed-form SNR densities, exact SER by quadrature,
//!   MGF-based SER, high-SNR asymptotes, upper bounds, and diversity-order
//!   estimation.
//! * [`montecarlo`] — the seeded, reproducible simulation engine that
//!   produces SER curves with confidence intervals.
//!
//! # Example
//!
//! ```
//! use afstc::montecarlo::{run_sim, SimPlan};
//! use afstc::network::{modulation_constants, ModulationFamily, NetworkConfig};
//! use afstc::powerctl::SchemeId;
//!
//! let config = NetworkConfig::homogeneous(2, 2, 1, 4, 1.0, 1.0, 1.0, 1.0, 10.0);
//! let plan = SimPlan {
//!     config,
//!     scheme: SchemeId::OpportunisticRelay,
//!     modulation: modulation_constants(ModulationFamily::Mpsk, 2).unwrap(),
//!     snr_db_grid: vec![10.0, 14.0],
//!     min_errors: 50,
//!     max_trials: 20_000,
//!     seed: 7,
//! };
//! let result = run_sim(&plan).unwrap();
//! assert_eq!(result.curve.points.len(), 2);
//! ```

pub mod analysis;
pub mod montecarlo;
pub mod network;
pub mod powerctl;
pub mod specfun;
pub mod stc;

mod numutil;

pub use network::{ChannelRealization, ModulationFamily, ModulationSpec, NetworkConfig, PowerAllocation};
pub use powerctl::SchemeId;
