//! Energy-detector analysis: characteristic functions of the per-subcarrier
//! energy statistic under both occupancy hypotheses, numerical inversion into
//! missed-detection and false-alarm probabilities, ROC sweeps, and a
//! sample-level detector simulator used as the oracle.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::pairwise_distance_pdf;
use crate::montecarlo::parallel_trials;
use crate::numerics::{
    adaptive_quadrature, cf_inversion, regularized_gamma_upper, TailDirection, Tolerance,
};
use crate::params::ClusterTopology;

/// Energy-detector configuration together with the interference level it
/// faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingModel {
    /// Number of averaged sensing blocks.
    pub blocks: u32,
    /// Decision threshold on the averaged energy statistic.
    pub threshold: f64,
    /// Noise variance.
    pub noise_variance: f64,
    /// Aggregate out-of-cluster interference variance.
    pub interference_variance: f64,
    /// Concurrent in-cluster transmitters on the sensed subcarrier.
    pub in_cluster_actives: u32,
}

impl SensingModel {
    /// Per-block combined interference-plus-noise variance.
    pub fn combined_variance(&self) -> f64 {
        (self.interference_variance + self.noise_variance) / self.blocks as f64
    }

    /// Total interference-plus-noise power (the mean of the idle-channel
    /// energy statistic).
    pub fn total_variance(&self) -> f64 {
        self.interference_variance + self.noise_variance
    }

    /// Sensing time implied by the block count, subcarrier count, and
    /// sampling rate.
    pub fn sensing_time(&self, subcarriers: u32, nyquist_rate: f64) -> f64 {
        self.blocks as f64 * subcarriers as f64 / nyquist_rate
    }
}

/// Missed-detection and false-alarm probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingErrors {
    pub missed_detection: f64,
    pub false_alarm: f64,
}

/// One point of a receiver operating characteristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub false_alarm: f64,
    pub missed_detection: f64,
}

/// Characteristic function of the energy statistic on an idle subcarrier:
/// (1 - 2 j w s)^(-B/2) with s the per-block combined variance.
///
/// The base 1 - 2 j w s has unit real part for every w, so the principal
/// log is the branch that is continuous from w = 0; the complex power is
/// evaluated through it.
pub fn cf_h0(omega: f64, model: &SensingModel) -> Complex64 {
    let z = Complex64::new(1.0, -2.0 * omega * model.combined_variance());
    (-(model.blocks as f64 / 2.0) * z.ln()).exp()
}

/// Characteristic function of the energy statistic on a subcarrier occupied
/// by `l` in-cluster transmitters at random pairwise distances.
///
/// The distance expectation E_x[ 1 / (1 - 2 j w (P_t/(2 x^a) + s)) ] is
/// evaluated by adaptive quadrature against the pairwise-distance density,
/// raised to the l-th power, and divided by (1 - 2 j w s)^(B/2 - l).
/// The factor 2 multiplying the whole bracket keeps the distribution mean at
/// E[signal power] + total noise power, which the sample-level simulator
/// confirms (see tests); both complex bases have positive real part for all
/// w, so principal logs stay on the continuous branch.
pub fn cf_h1(
    omega: f64,
    model: &SensingModel,
    topology: &ClusterTopology,
    transmit_power: f64,
) -> Result<Complex64> {
    let s = model.combined_variance();
    let l = model.in_cluster_actives as f64;
    let z = Complex64::new(1.0, -2.0 * omega * s);
    if model.in_cluster_actives == 0 {
        // no signal term: degenerates to the idle-channel CF
        return Ok((-(model.blocks as f64 / 2.0) * z.ln()).exp());
    }
    if omega == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let d_c = topology.cluster_radius;
    let alpha = topology.path_loss_exponent;
    let tol = Tolerance::new(1e-12, 1e-8);
    let part = |imag: bool| {
        let r = adaptive_quadrature(
            |x| {
                let q = 2.0 * omega * (transmit_power / (2.0 * x.powf(alpha)) + s);
                if !q.is_finite() {
                    return 0.0;
                }
                let w = pairwise_distance_pdf(x, d_c);
                let denom = 1.0 + q * q;
                if imag {
                    w * q / denom
                } else {
                    w / denom
                }
            },
            0.0,
            2.0 * d_c,
            tol,
        );
        if r.converged {
            Ok(r.value)
        } else {
            Err(Error::QuadratureNotConverged {
                achieved: r.error_estimate / r.value.abs().max(f64::MIN_POSITIVE),
                requested: 1e-8,
            })
        }
    };
    let expectation = Complex64::new(part(false)?, part(true)?);

    let ln_num = l * expectation.ln();
    let ln_den = (model.blocks as f64 / 2.0 - l) * z.ln();
    Ok((ln_num - ln_den).exp())
}

/// Probability that an occupied subcarrier's energy statistic falls below
/// the threshold.
pub fn prob_missed_detection(
    model: &SensingModel,
    topology: &ClusterTopology,
    transmit_power: f64,
) -> Result<f64> {
    cf_inversion(
        |w| cf_h1(w, model, topology, transmit_power),
        model.threshold,
        TailDirection::Below,
        1e-8,
    )
}

/// Probability that an idle subcarrier's energy statistic exceeds the
/// threshold.
pub fn prob_false_alarm(model: &SensingModel) -> Result<f64> {
    cf_inversion(|w| Ok(cf_h0(w, model)), model.threshold, TailDirection::Above, 1e-8)
}

/// Closed-form false-alarm probability: the idle statistic is a scaled
/// chi-square with B degrees of freedom, so
/// P_fa = Q(B/2, threshold / (2 s)) with Q the regularized upper gamma.
pub fn false_alarm_closed_form(model: &SensingModel) -> f64 {
    regularized_gamma_upper(
        model.blocks as f64 / 2.0,
        model.threshold / (2.0 * model.combined_variance()),
    )
}

/// Analytic ROC over a strictly increasing threshold grid.
pub fn roc_curve(
    model: &SensingModel,
    thresholds: &[f64],
    topology: &ClusterTopology,
    transmit_power: f64,
) -> Result<Vec<RocPoint>> {
    let mut points = Vec::with_capacity(thresholds.len());
    for &rho in thresholds {
        let m = SensingModel { threshold: rho, ..*model };
        points.push(RocPoint {
            threshold: rho,
            false_alarm: prob_false_alarm(&m)?,
            missed_detection: prob_missed_detection(&m, topology, transmit_power)?,
        });
    }
    Ok(points)
}

/// Channel occupancy hypothesis for sample generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Idle,
    Occupied,
}

/// Sample-level energies of the detector statistic.
///
/// Each trial places the sensing node and (under `Occupied`) the
/// `in_cluster_actives` transmitters uniformly in the cluster disk, draws
/// quasi-static Rayleigh fading, and averages B blocks of signal-plus-noise
/// energy; the signal contribution is constant across the blocks of one
/// sensing window while the noise-plus-interference term is drawn per block.
pub fn simulate_energy_samples(
    model: &SensingModel,
    topology: &ClusterTopology,
    transmit_power: f64,
    hypothesis: Hypothesis,
    trials: u64,
    seed: u64,
) -> Vec<f64> {
    let b = model.blocks as usize;
    let sigma = model.total_variance().sqrt();
    let d_c = topology.cluster_radius;
    let alpha = topology.path_loss_exponent;
    let l = model.in_cluster_actives as usize;

    parallel_trials(trials, seed, move |_, rng| {
        let amplitude = match hypothesis {
            Hypothesis::Idle => 0.0,
            Hypothesis::Occupied => {
                let sx = d_c * rng.random::<f64>().sqrt();
                let sa = std::f64::consts::TAU * rng.random::<f64>();
                let (sn_x, sn_y) = (sx * sa.cos(), sx * sa.sin());
                let mut p_sig = 0.0;
                for _ in 0..l {
                    let r = d_c * rng.random::<f64>().sqrt();
                    let a = std::f64::consts::TAU * rng.random::<f64>();
                    let d = (r * a.cos() - sn_x).hypot(r * a.sin() - sn_y);
                    let h2: f64 = Exp1.sample(rng);
                    p_sig += transmit_power * h2 * d.powf(-alpha);
                }
                p_sig.sqrt()
            }
        };
        let mut acc = 0.0;
        for _ in 0..b {
            let n: f64 = StandardNormal.sample(rng);
            let r = amplitude + sigma * n;
            acc += r * r;
        }
        acc / b as f64
    })
}

/// Empirical detector errors at the model's threshold.
pub fn simulate_detector(
    model: &SensingModel,
    topology: &ClusterTopology,
    transmit_power: f64,
    trials: u64,
    seed: u64,
) -> SensingErrors {
    let idle =
        simulate_energy_samples(model, topology, transmit_power, Hypothesis::Idle, trials, seed);
    let busy = simulate_energy_samples(
        model,
        topology,
        transmit_power,
        Hypothesis::Occupied,
        trials,
        seed.wrapping_add(1),
    );
    SensingErrors {
        false_alarm: idle.iter().filter(|&&e| e > model.threshold).count() as f64 / trials as f64,
        missed_detection: busy.iter().filter(|&&e| e < model.threshold).count() as f64
            / trials as f64,
    }
}

/// Empirical error rates for many thresholds from one set of sample draws.
pub fn detector_error_grid(
    model: &SensingModel,
    topology: &ClusterTopology,
    transmit_power: f64,
    thresholds: &[f64],
    trials: u64,
    seed: u64,
) -> Vec<SensingErrors> {
    let mut idle =
        simulate_energy_samples(model, topology, transmit_power, Hypothesis::Idle, trials, seed);
    let mut busy = simulate_energy_samples(
        model,
        topology,
        transmit_power,
        Hypothesis::Occupied,
        trials,
        seed.wrapping_add(1),
    );
    idle.sort_by(f64::total_cmp);
    busy.sort_by(f64::total_cmp);
    thresholds
        .iter()
        .map(|&rho| {
            let above = idle.len() - idle.partition_point(|&e| e <= rho);
            let below = busy.partition_point(|&e| e < rho);
            SensingErrors {
                false_alarm: above as f64 / trials as f64,
                missed_detection: below as f64 / trials as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn topo() -> ClusterTopology {
        ClusterTopology {
            ap_density: crate::interference::default_ap_density(100.0),
            cluster_radius: 100.0,
            exclusion_distance: 100.0,
            path_loss_exponent: 4.0,
            mean_nodes: 32,
            subcarriers: 64,
        }
    }

    const SIGMA_I2: f64 = 3.5714285714285715e-10; // default-topology activity 1
    const SIGMA_W2: f64 = SIGMA_I2;

    fn model(blocks: u32, threshold_factor: f64, l: u32) -> SensingModel {
        SensingModel {
            blocks,
            threshold: threshold_factor * (SIGMA_I2 + SIGMA_W2),
            noise_variance: SIGMA_W2,
            interference_variance: SIGMA_I2,
            in_cluster_actives: l,
        }
    }

    #[test]
    fn cf_at_origin_and_symmetry() {
        let m = model(100, 1.0, 1);
        assert_abs_diff_eq!(cf_h0(0.0, &m).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cf_h0(0.0, &m).im, 0.0, epsilon = 1e-15);
        let w = 0.3 / m.combined_variance();
        let plus = cf_h0(w, &m);
        let minus = cf_h0(-w, &m);
        assert_abs_diff_eq!(plus.re, minus.re, epsilon = 1e-14);
        assert_abs_diff_eq!(plus.im, -minus.im, epsilon = 1e-14);

        let h1 = cf_h1(0.0, &m, &topo(), 1.0).unwrap();
        assert_abs_diff_eq!(h1.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h1.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cf_modulus_two_blocks() {
        // B = 2: |psi|^2 = 1 / (1 + 4 w^2 s^2)
        let m = model(2, 1.0, 0);
        let s = m.combined_variance();
        for wf in [0.1, 1.0, 7.3] {
            let w = wf / s;
            let got = cf_h0(w, &m).norm_sqr();
            assert_abs_diff_eq!(got, 1.0 / (1.0 + 4.0 * w * w * s * s), epsilon = 1e-12);
        }
    }

    #[test]
    fn cf_bounded_by_one() {
        let m = model(1000, 1.0, 1);
        for wf in [0.0, 0.01, 0.1, 1.0, 10.0] {
            let w = wf / m.combined_variance();
            assert!(cf_h0(w, &m).norm() <= 1.0 + 1e-12);
            assert!(cf_h1(w, &m, &topo(), 1.0).unwrap().norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn occupied_cf_without_actives_degenerates_to_idle() {
        let m = model(200, 1.0, 0);
        let w = 0.7 / m.combined_variance();
        let a = cf_h0(w, &m);
        let b = cf_h1(w, &m, &topo(), 1.0).unwrap();
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
        assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-14);
    }

    #[test]
    fn false_alarm_matches_chi_square_closed_form() {
        for blocks in [100u32, 1000] {
            for f in [0.9, 1.0, 1.05, 1.2] {
                let m = model(blocks, f, 0);
                let inv = prob_false_alarm(&m).unwrap();
                let cf = false_alarm_closed_form(&m);
                assert_abs_diff_eq!(inv, cf, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn error_probability_limits() {
        let low = model(100, 1e-3, 1);
        let high = model(100, 50.0, 1);
        assert!(prob_false_alarm(&low).unwrap() > 0.999);
        assert!(prob_false_alarm(&high).unwrap() < 1e-6);
        assert!(prob_missed_detection(&low, &topo(), 1.0).unwrap() < 0.06);
        assert!(prob_missed_detection(&high, &topo(), 1.0).unwrap() > 0.5);
    }

    #[test]
    fn threshold_monotonicity() {
        let t = topo();
        let grid: Vec<f64> = (1..=12).map(|k| 0.5 + 0.1 * k as f64).collect();
        let base = model(100, 1.0, 1);
        let thresholds: Vec<f64> = grid.iter().map(|f| f * base.total_variance()).collect();
        let roc = roc_curve(&base, &thresholds, &t, 1.0).unwrap();
        for pair in roc.windows(2) {
            assert!(pair[1].false_alarm <= pair[0].false_alarm + 1e-9);
            assert!(pair[1].missed_detection >= pair[0].missed_detection - 1e-9);
        }
    }

    #[test]
    fn operating_point_at_thousand_blocks() {
        // An operating point with both errors at the percent level exists.
        let m = model(1000, 1.12, 1);
        let pfa = prob_false_alarm(&m).unwrap();
        let pmd = prob_missed_detection(&m, &topo(), 1.0).unwrap();
        assert!(pfa <= 0.02, "P_fa {pfa}");
        assert!(pmd <= 0.02, "P_md {pmd}");
    }

    #[test]
    fn noiseless_detection_is_perfect() {
        // No noise, no interference: idle energy is exactly zero, signal
        // energy strictly positive, so any positive threshold separates.
        let m = SensingModel {
            blocks: 64,
            threshold: 1e-12,
            noise_variance: 0.0,
            interference_variance: 0.0,
            in_cluster_actives: 1,
        };
        let e = simulate_detector(&m, &topo(), 1.0, 2000, 5);
        assert_eq!(e.false_alarm, 0.0);
        assert_eq!(e.missed_detection, 0.0);
    }

    #[test]
    fn empirical_false_alarm_matches_chi_square() {
        let m = model(100, 1.1, 0);
        let trials = 40_000;
        let e = simulate_detector(&m, &topo(), 1.0, trials, 11);
        let expect = false_alarm_closed_form(&m);
        let se = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!(
            (e.false_alarm - expect).abs() < 3.0 * se,
            "emp {} vs {} (3se {})",
            e.false_alarm,
            expect,
            3.0 * se
        );
    }
}
