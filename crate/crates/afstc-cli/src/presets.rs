//! Built-in experiment bundles reproducing the three reference figures.

use std::path::PathBuf;

use afstc::montecarlo::SimPlan;
use afstc::network::NetworkConfig;
use afstc::powerctl::SchemeId;

use crate::{default_modulation, ExperimentSpec, OutputKind, Session};

/// The bundled figure pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// All four schemes at (R=2, Ns=2, Nd=1), BPSK: scheme gains at
    /// BER 10⁻⁴.
    Fig2,
    /// Relay selection at (R=2, Ns=2, Nd ∈ {1, 2}): simulated and exact
    /// curves for overlay.
    Fig3,
    /// Uniform DSTC with a single-antenna source across (R, Nd) shapes:
    /// low-SNR array gain vs high-SNR diversity.
    Fig4,
}

impl Preset {
    /// Directory name the preset writes into by default.
    pub fn dir_name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }
}

fn grid(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let count = ((stop - start) / step).round() as usize;
    (0..=count).map(|i| start + i as f64 * step).collect()
}

fn spec(
    preset: Preset,
    config: NetworkConfig,
    scheme: SchemeId,
    snr_db_grid: Vec<f64>,
    outputs: Vec<OutputKind>,
) -> ExperimentSpec {
    ExperimentSpec {
        plan: SimPlan {
            config,
            scheme,
            modulation: default_modulation(),
            snr_db_grid,
            min_errors: 200,
            max_trials: 10_000_000,
            seed: 0x5EED,
        },
        outputs,
        out_path: PathBuf::from("afstc-out").join(preset.dir_name()),
    }
}

/// Expands a preset into its experiments, gain pairs, and target level.
///
/// Every experiment of a preset shares one seed, so scheme comparisons run
/// on common channel realizations and the gain estimates lose most of the
/// Monte Carlo jitter they would have under independent draws.
pub fn expand(preset: Preset) -> Session {
    match preset {
        Preset::Fig2 => {
            let config = NetworkConfig::homogeneous(2, 2, 1, 4, 1.0, 1.0, 1.0, 1.0, 10.0);
            let specs = SchemeId::ALL
                .iter()
                .map(|&scheme| {
                    spec(
                        preset,
                        config.clone(),
                        scheme,
                        grid(2.0, 2.0, 32.0),
                        vec![OutputKind::Simulated],
                    )
                })
                .collect();
            Session {
                specs,
                // Gains the figure quotes: each selection scheme against
                // uniform DSTC, and joint selection against relay selection.
                pairs: vec![(1, 0), (3, 0), (2, 1)],
                target_ber: 1e-4,
            }
        }
        Preset::Fig3 => {
            let specs = [1, 2]
                .into_iter()
                .map(|dst_antennas| {
                    spec(
                        preset,
                        NetworkConfig::homogeneous(2, 2, dst_antennas, 4, 1.0, 1.0, 1.0, 1.0, 10.0),
                        SchemeId::OpportunisticRelay,
                        grid(2.0, 2.0, 18.0),
                        vec![OutputKind::Simulated, OutputKind::Exact],
                    )
                })
                .collect();
            Session {
                specs,
                pairs: Vec::new(),
                target_ber: 1e-4,
            }
        }
        Preset::Fig4 => {
            let shapes = [(2usize, 1usize), (2, 2), (4, 1)];
            let specs = shapes
                .into_iter()
                .map(|(num_relays, dst_antennas)| {
                    spec(
                        preset,
                        NetworkConfig::homogeneous(
                            num_relays,
                            1,
                            dst_antennas,
                            4,
                            1.0,
                            1.0,
                            1.0,
                            1.0,
                            10.0,
                        ),
                        SchemeId::DstcUniform,
                        grid(0.0, 2.0, 18.0),
                        vec![OutputKind::Simulated],
                    )
                })
                .collect();
            Session {
                specs,
                // The figure's low-SNR comparison: two relays with a second
                // destination antenna against four relays with one.
                pairs: vec![(1, 2)],
                target_ber: 1e-2,
            }
        }
    }
}
