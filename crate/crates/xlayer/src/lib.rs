//! Cross-layer energy-efficiency analysis for clustered random-access
//! wireless networks.
//!
//! The crate models the full chain from physical-layer statistics to a
//! network-level energy-efficiency comparison:
//!
//! - [`geometry`]: point-process sampling (uniform clusters, Matérn-style
//!   cluster processes, homogeneous PPPs) and the closed-form distance
//!   densities used by the analytic layers.
//! - [`interference`]: aggregate out-of-cluster interference moments via
//!   cumulant matching, plus Monte Carlo CDF comparison between the exact
//!   clustered process and its PPP approximation.
//! - [`sensing`]: energy-detector error probabilities from characteristic
//!   functions inverted numerically, with a sample-level detector simulator
//!   as the oracle.
//! - [`mac`]: mean-field dynamics of a slotted random-access protocol with
//!   imperfect sensing, subcarrier-occupancy Markov chain, and sensing /
//!   transmission energy, validated by an exact slot-level simulator.
//! - [`sic`]: successive-interference-cancellation decode statistics over a
//!   binomial point process of colliders.
//! - [`efficiency`]: throughput, decoding energy, and bits-per-joule
//!   efficiency for hybrid, centralized, and distributed signal-processing
//!   schemes, plus a composed end-to-end simulator.
//! - [`numerics`]: adaptive Gauss-Kronrod quadrature, the Gauss
//!   hypergeometric family used by the decode analysis, and an
//!   oscillation-aware characteristic-function inversion routine.
//!
//! All simulators draw from per-trial seeded RNG streams so results are
//! reproducible bit-for-bit regardless of thread count (see [`montecarlo`]).

pub mod efficiency;
pub mod error;
pub mod geometry;
pub mod interference;
pub mod mac;
pub mod montecarlo;
pub mod numerics;
pub mod params;
pub mod sensing;
pub mod sic;

pub use error::{Error, Result};
pub use params::{
    ClusterTopology, DecodingConfig, MacConfig, ParamBundle, PowerTimingProfile, SchemeKind,
};
