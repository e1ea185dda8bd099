//! Aggregate out-of-cluster interference: analytic moments via cumulant
//! matching, an independent truncated-Campbell oracle, and Monte Carlo CDF
//! comparison between the clustered process and its PPP approximation.

use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::geometry::{sample_matern_interferers, sample_ppp_interferers, MaternModel};
use crate::montecarlo::parallel_trials;
use crate::params::ClusterTopology;

/// Gaussian surrogate for the aggregate interference amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceModel {
    /// Amplitude variance (power units).
    pub variance: f64,
    /// Amplitude mean; zero for the cumulant-matched Gaussian surrogate.
    pub mean: f64,
    /// Second moment of the fading amplitude (1 for Rayleigh).
    pub fading_second_moment: f64,
    /// Mean concurrent transmissions per cluster on the observed subcarrier.
    pub active_per_cluster: f64,
}

impl InterferenceModel {
    /// Build the surrogate for a topology at a given activity level.
    pub fn for_topology(
        topology: &ClusterTopology,
        transmit_power: f64,
        active_per_cluster: f64,
    ) -> Result<Self> {
        Ok(Self {
            variance: aggregate_variance(topology, transmit_power, active_per_cluster)?,
            mean: 0.0,
            fading_second_moment: 1.0,
            active_per_cluster,
        })
    }
}

/// Default AP density when a figure or experiment leaves it unspecified:
/// one AP per four cluster areas.
pub fn default_ap_density(cluster_radius: f64) -> f64 {
    1.0 / (std::f64::consts::PI * (2.0 * cluster_radius).powi(2))
}

/// n-th moment of the Rayleigh fading amplitude |h| with E|h|^2 = 1:
/// Gamma(1 + n/2).
pub fn rayleigh_amplitude_moment(n: u32) -> f64 {
    statrs::function::gamma::gamma(1.0 + n as f64 / 2.0)
}

/// Variance of the cumulant-matched Gaussian interference surrogate.
pub fn aggregate_variance(
    topology: &ClusterTopology,
    transmit_power: f64,
    active_per_cluster: f64,
) -> Result<f64> {
    if !(topology.path_loss_exponent > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "aggregate_variance requires path_loss_exponent > 2, got {}",
            topology.path_loss_exponent
        )));
    }
    if !(active_per_cluster >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "active_per_cluster must be >= 0, got {active_per_cluster}"
        )));
    }
    let alpha = topology.path_loss_exponent;
    Ok(transmit_power
        * std::f64::consts::PI
        * active_per_cluster
        * topology.ap_density
        / (2.0 * alpha - 1.0)
        * topology.exclusion_distance.powf(2.0 - alpha)
        * rayleigh_amplitude_moment(2))
}

/// n-th cumulant of the aggregate interference amplitude under the PPP
/// approximation with Rayleigh fading.
///
/// The n = 2 cumulant coincides with [`aggregate_variance`]. The n = 1
/// cumulant of the one-sided amplitude sum is positive even though the
/// matched Gaussian surrogate is zero-mean; both are exposed without
/// reconciliation.
pub fn interference_cumulant(
    order: u32,
    topology: &ClusterTopology,
    transmit_power: f64,
    active_per_cluster: f64,
) -> Result<f64> {
    let n = order as f64;
    let alpha = topology.path_loss_exponent;
    if !(n * alpha / 2.0 > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "cumulant of order {order} diverges: need n*alpha/2 > 2, got {}",
            n * alpha / 2.0
        )));
    }
    Ok(transmit_power.powf(n / 2.0)
        * std::f64::consts::PI
        * active_per_cluster
        * topology.ap_density
        / (n * alpha - 1.0)
        * topology.exclusion_distance.powf(2.0 - n * alpha / 2.0)
        * rayleigh_amplitude_moment(order))
}

/// Campbell variance of the shot-noise amplitude sum sqrt(P) |h| r^{-a/2}
/// over a PPP of the given density on the annulus [r_min, r_max], with
/// E|h|^2 = 1.
///
/// This is the independent oracle for simulated interference variance and
/// the basis for window sizing; pass `r_max = f64::INFINITY` for the full
/// plane.
pub fn truncated_shot_noise_variance(
    density: f64,
    transmit_power: f64,
    alpha: f64,
    r_min: f64,
    r_max: f64,
) -> f64 {
    let tail = |r: f64| {
        if r.is_infinite() {
            0.0
        } else {
            r.powf(2.0 - alpha)
        }
    };
    transmit_power * 2.0 * std::f64::consts::PI * density / (alpha - 2.0)
        * (tail(r_min) - tail(r_max))
}

/// Which interferer point process to simulate.
#[derive(Debug, Clone, Copy)]
pub enum InterferenceProcess {
    Matern(MaternModel),
    Ppp { density: f64, d_min: f64, window_radius: f64 },
}

/// Simulate per-trial aggregate interference power sum P_t |h_j|^2 d_j^{-a}
/// and return the sorted samples (the empirical CDF support).
pub fn simulate_interference_cdf(
    process: InterferenceProcess,
    transmit_power: f64,
    alpha: f64,
    trials: u64,
    seed: u64,
) -> Vec<f64> {
    let mut samples = parallel_trials(trials, seed, |_, rng| {
        let points = match process {
            InterferenceProcess::Matern(model) => sample_matern_interferers(&model, rng),
            InterferenceProcess::Ppp { density, d_min, window_radius } => {
                sample_ppp_interferers(density, d_min, window_radius, rng)
            }
        };
        points
            .distances_from_origin()
            .iter()
            .map(|&d| {
                let h2: f64 = Exp1.sample(rng);
                transmit_power * h2 * d.powf(-alpha)
            })
            .sum::<f64>()
    });
    samples.sort_by(f64::total_cmp);
    samples
}

/// Per-trial aggregate interference amplitude sum sqrt(P_t) |h_j| d_j^{-a/2},
/// sorted. Used to validate the amplitude-cumulant formulas.
pub fn simulate_interference_amplitude(
    process: InterferenceProcess,
    transmit_power: f64,
    alpha: f64,
    trials: u64,
    seed: u64,
) -> Vec<f64> {
    let mut samples = parallel_trials(trials, seed, |_, rng| {
        let points = match process {
            InterferenceProcess::Matern(model) => sample_matern_interferers(&model, rng),
            InterferenceProcess::Ppp { density, d_min, window_radius } => {
                sample_ppp_interferers(density, d_min, window_radius, rng)
            }
        };
        points
            .distances_from_origin()
            .iter()
            .map(|&d| {
                let h2: f64 = Exp1.sample(rng);
                transmit_power.sqrt() * h2.sqrt() * d.powf(-alpha / 2.0)
            })
            .sum::<f64>()
    });
    samples.sort_by(f64::total_cmp);
    samples
}

/// Two-sample Kolmogorov-Smirnov distance between sorted sample sets.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "ks_distance needs non-empty samples");
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        // advance past ties on both sides together
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// Mean and unbiased variance of a sample set.
pub fn sample_mean_variance(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
