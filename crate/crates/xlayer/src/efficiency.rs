//! Energy, throughput, and bits-per-joule efficiency of the hybrid,
//! centralized, and distributed signal-processing schemes, plus a composed
//! slot-level Monte Carlo (MAC protocol feeding per-subcarrier decode chains
//! with full energy metering).

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interference::aggregate_variance;
use crate::mac::{
    occupancy_distribution, sensing_energy, transmission_energy, OccupancyDistribution,
};
use crate::montecarlo::trial_rng;
use crate::params::{ClusterTopology, DecodingConfig, MacConfig, PowerTimingProfile, SchemeKind};
use crate::sensing::SensingErrors;
use crate::sic::{decode_count_distribution, DecodeCountDistribution, SicScenario};

/// Complete inputs for a scheme evaluation.
///
/// `interference_variance` is expressed relative to unit transmit power and
/// defaults to the one-active-transmitter-per-cluster operating point; use
/// [`NetworkScenario::with_interference_for_activity`] to couple it to a
/// different activity level.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario {
    pub topology: ClusterTopology,
    pub power: PowerTimingProfile,
    pub mac: MacConfig,
    pub decoding: DecodingConfig,
    pub sensing_errors: SensingErrors,
    pub interference_variance: f64,
}

impl NetworkScenario {
    pub fn new(
        topology: ClusterTopology,
        power: PowerTimingProfile,
        mac: MacConfig,
        decoding: DecodingConfig,
        sensing_errors: SensingErrors,
    ) -> Result<Self> {
        let interference_variance = aggregate_variance(&topology, 1.0, 1.0)?;
        Ok(Self { topology, power, mac, decoding, sensing_errors, interference_variance })
    }

    /// Recompute the external interference for a given mean number of
    /// concurrent transmissions per cluster (sensitivity-study hook).
    pub fn with_interference_for_activity(mut self, active_per_cluster: f64) -> Result<Self> {
        self.interference_variance = aggregate_variance(&self.topology, 1.0, active_per_cluster)?;
        Ok(self)
    }

    /// Decode scenario for `l` colliders at this configuration.
    pub fn sic_scenario(&self, colliders: u32) -> SicScenario {
        SicScenario {
            colliders,
            threshold: self.decoding.threshold,
            cluster_radius: self.topology.cluster_radius,
            path_loss_exponent: self.topology.path_loss_exponent,
            external_interference: self.interference_variance,
        }
    }
}

/// Decode-count distributions for every collider count up to the cluster
/// size, cached because the energy and throughput sums reuse them across
/// slots.
#[derive(Debug, Clone)]
pub struct DecodeTable {
    distributions: Vec<DecodeCountDistribution>,
    mean_attempts: Vec<f64>,
    mean_decoded: Vec<f64>,
    single_decode: Vec<f64>,
}

impl DecodeTable {
    pub fn build(scenario: &NetworkScenario) -> Result<Self> {
        let m = scenario.topology.mean_nodes;
        let mut distributions = Vec::with_capacity(m as usize);
        let mut mean_attempts = vec![0.0];
        let mut mean_decoded = vec![0.0];
        let mut single_decode = vec![0.0];
        for l in 1..=m {
            let d = decode_count_distribution(&scenario.sic_scenario(l))?;
            mean_attempts.push(d.mean_attempts());
            mean_decoded.push(d.mean_decoded());
            single_decode.push(d.exactly_one());
            distributions.push(d);
        }
        Ok(Self { distributions, mean_attempts, mean_decoded, single_decode })
    }

    /// Distribution for `l` colliders (1..=M).
    pub fn for_colliders(&self, l: u32) -> &DecodeCountDistribution {
        &self.distributions[(l - 1) as usize]
    }
}

/// Occupancy-weighted sum of per-collider-count values over the frame:
/// one term per contention slot plus the contention-free block at the final
/// occupancy.
fn occupancy_weighted_sum(
    occupancy: &OccupancyDistribution,
    mac: &MacConfig,
    values: &[f64],
) -> f64 {
    let k_c = mac.contention_slots as usize;
    let dot = |col: &[f64]| col.iter().zip(values).map(|(p, v)| p * v).sum::<f64>();
    let contention: f64 = (1..=k_c).map(|t| dot(occupancy.during_slot(t))).sum();
    contention + mac.contention_free_slots() as f64 * dot(occupancy.during_slot(k_c))
}

/// Mean decoding energy per subcarrier per slot: each occupied subcarrier
/// costs one attempt per decoded transmission plus the final one.
pub fn decoding_energy(
    occupancy: &OccupancyDistribution,
    table: &DecodeTable,
    power: &PowerTimingProfile,
    mac: &MacConfig,
) -> f64 {
    power.decoding_power * power.slot_duration / mac.frame_slots as f64
        * occupancy_weighted_sum(occupancy, mac, &table.mean_attempts)
}

/// Mean decoded bits per subcarrier per slot under multi-user decoding.
pub fn hybrid_throughput(
    occupancy: &OccupancyDistribution,
    table: &DecodeTable,
    decoding: &DecodingConfig,
    power: &PowerTimingProfile,
    mac: &MacConfig,
) -> f64 {
    decoding.spectral_gain() * power.slot_duration / mac.frame_slots as f64
        * occupancy_weighted_sum(occupancy, mac, &table.mean_decoded)
}

/// Energy breakdown, throughput, and efficiency of one scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeReport {
    pub scheme: SchemeKind,
    pub sensing_energy: f64,
    pub transmission_energy: f64,
    pub decoding_energy: f64,
    pub control_energy: f64,
    /// bits per subcarrier per slot
    pub throughput: f64,
    /// bits per joule
    pub efficiency: f64,
}

impl SchemeReport {
    pub fn total_energy(&self) -> f64 {
        self.sensing_energy + self.transmission_energy + self.decoding_energy + self.control_energy
    }
}

/// All three schemes evaluated on one shared occupancy chain and decode
/// table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeTriple {
    pub hybrid: SchemeReport,
    pub centralized: SchemeReport,
    pub distributed: SchemeReport,
}

/// Evaluate hybrid, centralized, and distributed schemes at one
/// configuration.
pub fn evaluate_schemes(scenario: &NetworkScenario) -> Result<SchemeTriple> {
    let occupancy = occupancy_distribution(
        &scenario.mac,
        scenario.topology.mean_nodes,
        scenario.topology.subcarriers,
        &scenario.sensing_errors,
    );
    let table = DecodeTable::build(scenario)?;
    evaluate_schemes_with(scenario, &occupancy, &table)
}

/// As [`evaluate_schemes`] with precomputed occupancy and decode table
/// (sweeps that hold the MAC or the threshold fixed reuse them).
pub fn evaluate_schemes_with(
    scenario: &NetworkScenario,
    occupancy: &OccupancyDistribution,
    table: &DecodeTable,
) -> Result<SchemeTriple> {
    let power = &scenario.power;
    let mac = &scenario.mac;
    let decoding = &scenario.decoding;
    let chi = decoding.spectral_gain();
    let t_slot = power.slot_duration;

    let e_s = sensing_energy(power, mac, scenario.topology.mean_nodes);
    let e_t = transmission_energy(power, mac, &occupancy.mean_during_sequence());
    let e_d = decoding_energy(occupancy, table, power, mac);
    let r = hybrid_throughput(occupancy, table, decoding, mac);
    let hybrid = SchemeReport {
        scheme: SchemeKind::Hybrid,
        sensing_energy: e_s,
        transmission_energy: e_t,
        decoding_energy: e_d,
        control_energy: 0.0,
        throughput: r,
        efficiency: r / (e_s + e_t + e_d),
    };

    // Centralized: scheduled single transmission per subcarrier, one decode
    // attempt, control channel always on.
    let d11 = table.for_colliders(1).exactly_one();
    let r_c = chi * d11 * t_slot / t_slot; // bits per subcarrier per slot
    let e_c_control = power.control_power * t_slot;
    let e_c_tx = power.transmit_power * t_slot;
    let e_c_dec = power.decoding_power * t_slot;
    let centralized = SchemeReport {
        scheme: SchemeKind::Centralized,
        sensing_energy: 0.0,
        transmission_energy: e_c_tx,
        decoding_energy: e_c_dec,
        control_energy: e_c_control,
        throughput: r_c * t_slot,
        efficiency: r_c * t_slot / (e_c_control + e_c_tx + e_c_dec),
    };

    // Distributed: identical access dynamics, single decode attempt per
    // subcarrier per slot, only singleton occupations pay off.
    let r_d = chi * t_slot / mac.frame_slots as f64
        * occupancy_weighted_sum(occupancy, mac, &table.single_decode);
    let e_d_dec = power.decoding_power * t_slot;
    let distributed = SchemeReport {
        scheme: SchemeKind::Distributed,
        sensing_energy: e_s,
        transmission_energy: e_t,
        decoding_energy: e_d_dec,
        control_energy: 0.0,
        throughput: r_d,
        efficiency: r_d / (e_s + e_t + e_d_dec),
    };

    Ok(SchemeTriple { hybrid, centralized, distributed })
}

/// Hybrid-scheme efficiency alone.
pub fn hybrid_efficiency(scenario: &NetworkScenario) -> Result<SchemeReport> {
    Ok(evaluate_schemes(scenario)?.hybrid)
}

/// Centralized-scheme efficiency alone.
pub fn centralized_efficiency(scenario: &NetworkScenario) -> Result<SchemeReport> {
    Ok(evaluate_schemes(scenario)?.centralized)
}

/// Distributed-scheme efficiency alone.
pub fn distributed_efficiency(scenario: &NetworkScenario) -> Result<SchemeReport> {
    Ok(evaluate_schemes(scenario)?.distributed)
}

/// Which scalar a scheme-comparison sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Linear decode threshold.
    Threshold,
    DecodingPower,
    ControlPower,
    AccessProbability,
    ContentionSlots,
}

/// One sweep row: the swept value and all three scheme reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub hybrid: SchemeReport,
    pub centralized: SchemeReport,
    pub distributed: SchemeReport,
}

/// Evaluate the three schemes across a sweep grid.
pub fn compare_schemes(
    sweep: SweepVariable,
    grid: &[f64],
    base: &NetworkScenario,
) -> Result<Vec<SweepRow>> {
    // The MAC chain is threshold-independent and the decode table is
    // MAC-independent; share whichever side the sweep leaves fixed.
    let shared_occupancy = match sweep {
        SweepVariable::AccessProbability | SweepVariable::ContentionSlots => None,
        _ => Some(occupancy_distribution(
            &base.mac,
            base.topology.mean_nodes,
            base.topology.subcarriers,
            &base.sensing_errors,
        )),
    };
    let shared_table = match sweep {
        SweepVariable::Threshold => None,
        _ => Some(DecodeTable::build(base)?),
    };

    let mut rows = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut scenario = base.clone();
        match sweep {
            SweepVariable::Threshold => scenario.decoding.threshold = value,
            SweepVariable::DecodingPower => scenario.power.decoding_power = value,
            SweepVariable::ControlPower => scenario.power.control_power = value,
            SweepVariable::AccessProbability => scenario.mac.access_probability = value,
            SweepVariable::ContentionSlots => {
                let k = value.round() as u32;
                if k == 0 || k > scenario.mac.frame_slots {
                    return Err(Error::InvalidParameter(format!(
                        "contention-slot sweep value {value} outside 1..={}",
                        scenario.mac.frame_slots
                    )));
                }
                scenario.mac.contention_slots = k;
            }
        }
        let occupancy = match &shared_occupancy {
            Some(o) => o.clone(),
            None => occupancy_distribution(
                &scenario.mac,
                scenario.topology.mean_nodes,
                scenario.topology.subcarriers,
                &scenario.sensing_errors,
            ),
        };
        let table = match &shared_table {
            Some(t) => t.clone(),
            None => DecodeTable::build(&scenario)?,
        };
        let triple = evaluate_schemes_with(&scenario, &occupancy, &table)?;
        rows.push(SweepRow {
            value,
            hybrid: triple.hybrid,
            centralized: triple.centralized,
            distributed: triple.distributed,
        });
    }
    Ok(rows)
}

/// Empirical hybrid-scheme figures from the composed slot-level simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposedReport {
    pub sensing_energy: f64,
    pub transmission_energy: f64,
    pub decoding_energy: f64,
    pub throughput: f64,
    pub efficiency: f64,
    pub frames: u64,
}

/// Composed Monte Carlo: the exact MAC protocol drives per-subcarrier decode
/// chains with quasi-static fading and full energy metering.
///
/// Decode attempts are metered as successes plus one (the receiver probes the
/// residual after its last success), matching the analytic accounting.
pub fn simulate_composed(scenario: &NetworkScenario, frames: u64, seed: u64) -> ComposedReport {
    let m = scenario.topology.mean_nodes as usize;
    let n = scenario.topology.subcarriers as usize;
    let k_c = scenario.mac.contention_slots as usize;
    let k_d = scenario.mac.contention_free_slots() as u64;
    let k_f = scenario.mac.frame_slots as f64;
    let p = scenario.mac.access_probability;
    let s_max = scenario.mac.max_subcarriers_per_node as usize;
    let pmd = scenario.sensing_errors.missed_detection;
    let pfa = scenario.sensing_errors.false_alarm;
    let alpha = scenario.topology.path_loss_exponent;
    let d_c = scenario.topology.cluster_radius;
    let zeta = scenario.decoding.threshold;
    let ext = scenario.interference_variance;

    const BATCH: u64 = 64;
    let n_batches = frames.div_ceil(BATCH);

    #[derive(Default)]
    struct Acc {
        activations: u64,
        slot_units: u64,
        grabs: u64,
        attempts: u64,
        successes: u64,
    }

    let decode = |powers: &mut Vec<f64>| -> u64 {
        powers.sort_by(|a, b| b.total_cmp(a));
        let mut residual: f64 = powers.iter().sum();
        let mut decoded = 0u64;
        for &x in powers.iter() {
            residual -= x;
            if x >= zeta * (residual + ext) {
                decoded += 1;
            } else {
                break;
            }
        }
        decoded
    };

    let batches: Vec<Acc> = (0..n_batches)
        .into_par_iter()
        .map(|bi| {
            let mut acc = Acc::default();
            let mut active = vec![false; m];
            let mut radius = vec![0.0f64; m];
            let mut occ: Vec<Vec<f64>> = vec![Vec::new(); n]; // unit-power received powers
            let mut sensed_free: Vec<usize> = Vec::with_capacity(n);
            let mut pending: Vec<(usize, usize)> = Vec::new();
            let mut powers: Vec<f64> = Vec::with_capacity(m);
            let lo = bi * BATCH;
            let hi = (lo + BATCH).min(frames);
            for frame in lo..hi {
                let mut rng = trial_rng(seed, frame);
                active.fill(false);
                for r in radius.iter_mut() {
                    *r = d_c * rng.random::<f64>().sqrt();
                }
                for o in occ.iter_mut() {
                    o.clear();
                }
                for t in 1..=k_c {
                    pending.clear();
                    for node in 0..m {
                        if active[node] || rng.random::<f64>() >= p {
                            continue;
                        }
                        active[node] = true;
                        acc.activations += 1;
                        sensed_free.clear();
                        for (k, o) in occ.iter().enumerate() {
                            let sensed = if o.is_empty() {
                                rng.random::<f64>() >= pfa
                            } else {
                                rng.random::<f64>() < pmd
                            };
                            if sensed {
                                sensed_free.push(k);
                            }
                        }
                        if sensed_free.is_empty() {
                            continue;
                        }
                        let take = s_max.min(sensed_free.len());
                        for i in 0..take {
                            let j = rng.random_range(i..sensed_free.len());
                            sensed_free.swap(i, j);
                            pending.push((sensed_free[i], node));
                        }
                    }
                    for &(k, node) in &pending {
                        let h2: f64 = Exp1.sample(&mut rng);
                        occ[k].push(h2 * radius[node].powf(-alpha));
                        acc.grabs += 1;
                        acc.slot_units += (k_c - t + 1) as u64 + k_d;
                    }
                    for o in occ.iter_mut() {
                        if o.is_empty() {
                            continue;
                        }
                        powers.clear();
                        powers.extend_from_slice(o);
                        let decoded = decode(&mut powers);
                        acc.successes += decoded;
                        acc.attempts += decoded + 1;
                    }
                }
                // contention-free block: occupancy and fading frozen, so the
                // per-subcarrier outcome repeats k_d times
                for o in occ.iter_mut() {
                    if o.is_empty() {
                        continue;
                    }
                    powers.clear();
                    powers.extend_from_slice(o);
                    let decoded = decode(&mut powers);
                    acc.successes += k_d * decoded;
                    acc.attempts += k_d * (decoded + 1);
                }
            }
            acc
        })
        .collect();

    let mut total = Acc::default();
    for b in &batches {
        total.activations += b.activations;
        total.slot_units += b.slot_units;
        total.grabs += b.grabs;
        total.attempts += b.attempts;
        total.successes += b.successes;
    }

    let power = &scenario.power;
    let t_slot = power.slot_duration;
    let per_sub_slot = n as f64 * k_f * frames as f64;
    let sensing = power.sensing_power * power.sensing_time * total.activations as f64
        / (k_f * frames as f64);
    let transmission = power.transmit_power
        * (t_slot * total.slot_units as f64 - power.sensing_time * total.grabs as f64)
        / per_sub_slot;
    let decoding = power.decoding_power * t_slot * total.attempts as f64 / per_sub_slot;
    let throughput =
        scenario.decoding.spectral_gain() * t_slot * total.successes as f64 / per_sub_slot;

    ComposedReport {
        sensing_energy: sensing,
        transmission_energy: transmission,
        decoding_energy: decoding,
        throughput,
        efficiency: throughput / (sensing + transmission + decoding),
        frames,
    }
}
