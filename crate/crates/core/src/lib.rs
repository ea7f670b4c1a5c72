//! Hybrid precoding design and energy-efficiency evaluation for
//! millimeter-wave massive MIMO transmitters with a generalized
//! sub-array-connected (GSAC) analog front end.
//!
//! The crate covers the full pipeline:
//!
//! - [`arch`]: GSAC configuration validation and RF-partition enumeration
//! - [`channel`]: clustered narrowband channel realizations (ULA responses)
//! - [`precoder`]: successive-interference-cancellation hybrid designs,
//!   the unconstrained block-diagonal reference, and the FC-OMP baseline
//! - [`codebook`]: quantized beamsteering codebooks for limited feedback
//! - [`metrics`]: achievable rate, transmitter power, energy efficiency
//! - [`search`]: exhaustive energy-efficiency search over RF configurations
//! - [`experiment`]: reproducible Monte-Carlo sweeps with CSV output
//!
//! All numeric kernels are generic over the real scalar via [`scalar::Scalar`]
//! (`f32` or `f64`); the `*64` aliases at the crate root pin the double
//! precision variants the experiment layer uses.
//!
//! # Example
//!
//! ```
//! use gsac_core::{GsacConfig, achievable_rate, design_sic_hybrid, generate_channel};
//! use gsac_core::channel::{ChannelParams, ChannelProfile};
//! use gsac_core::metrics::LinkBudget;
//!
//! // 16-antenna transmitter split into two sub-arrays of 8, two RF chains each.
//! let cfg = GsacConfig::proportional(16, &[2, 2]).unwrap();
//! let params = ChannelParams::new(ChannelProfile::default_mmwave(), 16, 8, 42);
//! let ch = generate_channel(&params).unwrap();
//!
//! let precoder = design_sic_hybrid(ch.h(), &cfg, 1.0).unwrap();
//! precoder.check_invariants(1e-12, 1e-9).unwrap();
//!
//! let rate = achievable_rate(ch.h(), precoder.f(), &LinkBudget::new(1.0, cfg.n_s())).unwrap();
//! assert!(rate > 0.0);
//! ```

pub mod arch;
pub mod channel;
pub mod codebook;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod precoder;
pub mod rng;
pub mod scalar;
pub mod search;

pub use arch::{
    allocate_antennas, enumerate_partitions, parse_partition_string, partition_count_estimate,
    partition_string, GsacConfig, PartitionSet,
};
pub use channel::{generate_channel, ula_response, ChannelMatrix, ChannelParams, ChannelProfile};
pub use codebook::{build_codebook, quantize_analog, BeamsteeringCodebook};
pub use error::{Error, Result};
pub use linalg::CMat;
pub use metrics::{achievable_rate, energy_efficiency, total_power, LinkBudget, PowerModel};
pub use precoder::{
    design_fc_omp, design_sic_hybrid, design_unconstrained, hermitian_top_eigvecs,
    phase_extract_matrix, phase_extract_vector, HybridPrecoder, UnconstrainedPrecoder,
};
pub use search::{config_robustness, search_best_config, SearchReport};

/// Complex double.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix, double precision.
pub type Mat64 = linalg::CMat<f64>;
/// Channel realization, double precision.
pub type Channel64 = channel::ChannelMatrix<f64>;
/// Hybrid precoder, double precision.
pub type Hybrid64 = precoder::HybridPrecoder<f64>;
