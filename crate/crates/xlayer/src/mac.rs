//! Mean-field dynamics and energy accounting of the slotted random-access
//! protocol, the per-subcarrier occupancy Markov chain, and an exact
//! slot-level protocol simulator used as the oracle.
//!
//! Slot-state convention: `OccupancyDistribution` stores start-of-slot state
//! vectors for slots 1..=k_c+1; the state at the start of slot t+1 is the
//! occupancy *during* slot t (what is on air in slot t, including nodes that
//! activated in it). Energy and throughput sums use the during-slot states,
//! matching the simulator's physical metering; transition into slot t+1 is
//! driven by slot-t quantities.

use rand::Rng;

use crate::geometry::ln_choose;
use crate::montecarlo::trial_rng;
use crate::params::{MacConfig, PowerTimingProfile};
use crate::sensing::SensingErrors;
use rayon::prelude::*;

/// Mean-field per-slot state of the contention period.
#[derive(Debug, Clone)]
pub struct MacTrajectory {
    inactive: Vec<f64>,
    free: Vec<f64>,
    sensed_free: Vec<f64>,
    selection_fraction: Vec<f64>,
}

impl MacTrajectory {
    /// Mean inactive nodes at the start of slot `t` (1..=k_c+1).
    pub fn inactive_nodes(&self, t: usize) -> f64 {
        self.inactive[t - 1]
    }

    /// Mean free subcarriers at the start of slot `t` (1..=k_c+1).
    pub fn free_subcarriers(&self, t: usize) -> f64 {
        self.free[t - 1]
    }

    /// Mean subcarriers sensed free by a node activating in slot `t`
    /// (1..=k_c).
    pub fn sensed_free(&self, t: usize) -> f64 {
        self.sensed_free[t - 1]
    }

    /// Fraction of sensed-free subcarriers a slot-`t` activator selects
    /// (1..=k_c); zero when nothing is sensed free.
    pub fn selection_fraction(&self, t: usize) -> f64 {
        self.selection_fraction[t - 1]
    }

    pub fn contention_slots(&self) -> usize {
        self.selection_fraction.len()
    }
}

/// Mean-field recursion for inactive nodes, free subcarriers, and the
/// selection fraction over the contention period.
pub fn evolve_mean_field(
    mac: &MacConfig,
    mean_nodes: u32,
    subcarriers: u32,
    errors: &SensingErrors,
) -> MacTrajectory {
    let k_c = mac.contention_slots as usize;
    let p = mac.access_probability;
    let s = mac.max_subcarriers_per_node as f64;
    let n_total = subcarriers as f64;
    let (pmd, pfa) = (errors.missed_detection, errors.false_alarm);

    let mut inactive = Vec::with_capacity(k_c + 1);
    let mut free = Vec::with_capacity(k_c + 1);
    let mut sensed = Vec::with_capacity(k_c);
    let mut xi = Vec::with_capacity(k_c);

    inactive.push(mean_nodes as f64);
    free.push(n_total);
    for t in 1..=k_c {
        let m_prev = inactive[t - 1];
        let f_prev = free[t - 1];
        let n_hat = f_prev * (1.0 - pfa) + (n_total - f_prev) * pmd;
        let frac = if n_hat > 0.0 { (s / n_hat).min(1.0) } else { 0.0 };
        sensed.push(n_hat);
        xi.push(frac);
        inactive.push(m_prev * (1.0 - p));
        free.push(f_prev * (1.0 - p * (1.0 - pfa) * frac).powf(m_prev));
    }

    MacTrajectory { inactive, free, sensed_free: sensed, selection_fraction: xi }
}

/// Binomial pmf via log-gamma, stable for edge probabilities.
fn binom_pmf(n: u64, q: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if q <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if q >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_choose(n, k) + k as f64 * q.ln() + (n - k) as f64 * (1.0 - q).ln()).exp()
}

/// Transition matrix between occupancy states over slot `t` (1..=k_c).
///
/// Rows index the occupancy at the start of slot t, columns the occupancy
/// during slot t; both run 0..=M. Arrivals beyond full occupancy M are
/// lumped into the M column, so every row is an exact probability vector.
pub fn transition_probabilities(
    t: usize,
    trajectory: &MacTrajectory,
    mac: &MacConfig,
    errors: &SensingErrors,
    mean_nodes: u32,
) -> Vec<Vec<f64>> {
    let m_states = mean_nodes as usize;
    let m_bar = trajectory.inactive_nodes(t).round_ties_even().max(0.0) as u64;
    let xi = trajectory.selection_fraction(t);
    let p = mac.access_probability;
    let q_md = p * errors.missed_detection * xi;
    let g_free = (1.0 - errors.false_alarm) * xi;

    let mut matrix = vec![vec![0.0; m_states + 1]; m_states + 1];

    // From an idle subcarrier: i of the inactive nodes activate, j of those
    // sense it free and select it.
    let activations: Vec<f64> = (0..=m_bar).map(|i| binom_pmf(m_bar, p, i)).collect();
    for j in 0..=(m_bar.min(m_states as u64)) {
        let mut acc = 0.0;
        for i in j..=m_bar {
            acc += activations[i as usize] * binom_pmf(i, g_free, j);
        }
        matrix[0][j as usize] = acc;
    }
    let row_sum: f64 = matrix[0].iter().sum();
    matrix[0][m_states] += (1.0 - row_sum).max(0.0);

    // From an occupied subcarrier: newcomers join only through missed
    // detection.
    for i in 1..=m_states {
        let mut cum = 0.0;
        for l in i..m_states {
            let pm = binom_pmf(m_bar, q_md, (l - i) as u64);
            matrix[i][l] = pm;
            cum += pm;
        }
        matrix[i][m_states] = (1.0 - cum).max(0.0);
    }

    matrix
}

/// Distribution of the per-subcarrier occupancy over the contention period.
#[derive(Debug, Clone)]
pub struct OccupancyDistribution {
    /// columns[k] = state at the start of slot k+1; columns[0] is the empty
    /// point mass.
    columns: Vec<Vec<f64>>,
}

impl OccupancyDistribution {
    /// State distribution at the start of slot `t` (1..=k_c+1).
    pub fn at_slot_start(&self, t: usize) -> &[f64] {
        &self.columns[t - 1]
    }

    /// State distribution during slot `t` (1..=k_c).
    pub fn during_slot(&self, t: usize) -> &[f64] {
        &self.columns[t]
    }

    /// Number of contention slots covered.
    pub fn contention_slots(&self) -> usize {
        self.columns.len() - 1
    }

    /// Highest representable occupancy.
    pub fn max_occupancy(&self) -> usize {
        self.columns[0].len() - 1
    }

    /// Mean occupancy during each slot t = 1..=k_c.
    pub fn mean_during_sequence(&self) -> Vec<f64> {
        (1..=self.contention_slots())
            .map(|t| {
                self.during_slot(t)
                    .iter()
                    .enumerate()
                    .map(|(l, p)| l as f64 * p)
                    .sum()
            })
            .collect()
    }
}

/// Forward recursion of the occupancy chain from an all-free start.
pub fn occupancy_distribution(
    mac: &MacConfig,
    mean_nodes: u32,
    subcarriers: u32,
    errors: &SensingErrors,
) -> OccupancyDistribution {
    let trajectory = evolve_mean_field(mac, mean_nodes, subcarriers, errors);
    let m_states = mean_nodes as usize;
    let k_c = mac.contention_slots as usize;

    let mut columns = Vec::with_capacity(k_c + 1);
    let mut state = vec![0.0; m_states + 1];
    state[0] = 1.0;
    columns.push(state.clone());

    for t in 1..=k_c {
        let tr = transition_probabilities(t, &trajectory, mac, errors, mean_nodes);
        let mut next = vec![0.0; m_states + 1];
        for (i, &mass) in state.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (l, &pr) in tr[i].iter().enumerate() {
                next[l] += mass * pr;
            }
        }
        state = next;
        columns.push(state.clone());
    }

    OccupancyDistribution { columns }
}

/// Mean occupancy at the start of slot `t` (1..=k_c+1); zero at t = 1.
pub fn mean_occupancy(occupancy: &OccupancyDistribution, t: usize) -> f64 {
    occupancy
        .at_slot_start(t)
        .iter()
        .enumerate()
        .map(|(l, p)| l as f64 * p)
        .sum()
}

/// Sensing and transmission energy per subcarrier per slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacEnergy {
    pub sensing: f64,
    pub transmission: f64,
}

/// Mean sensing energy per subcarrier per slot: each node activates at most
/// once per frame and senses the whole band at the per-subcarrier sensing
/// power.
pub fn sensing_energy(power: &PowerTimingProfile, mac: &MacConfig, mean_nodes: u32) -> f64 {
    let p = mac.access_probability;
    power.sensing_power * power.sensing_time * mean_nodes as f64
        * (1.0 - (1.0 - p).powi(mac.contention_slots as i32))
        / mac.frame_slots as f64
}

/// Mean transmission energy per subcarrier per slot from the during-slot
/// occupancy means: every transmission runs from its activation slot to the
/// frame end with the sensing time deducted once.
pub fn transmission_energy(
    power: &PowerTimingProfile,
    mac: &MacConfig,
    mean_occupancy_during: &[f64],
) -> f64 {
    let k_c = mac.contention_slots as usize;
    assert_eq!(mean_occupancy_during.len(), k_c, "need one mean per contention slot");
    let t_slot = power.slot_duration;
    let k_d = mac.contention_free_slots() as f64;
    let contention: f64 = mean_occupancy_during.iter().sum::<f64>() * t_slot;
    let tail = mean_occupancy_during[k_c - 1] * (k_d * t_slot - power.sensing_time);
    power.transmit_power * (contention + tail) / mac.frame_slots as f64
}

/// Output of the slot-level protocol simulator.
#[derive(Debug, Clone)]
pub struct MacSimReport {
    pub energy: MacEnergy,
    /// Empirical during-slot occupancy distribution, `occupancy[t-1][l]` for
    /// t = 1..=k_c.
    pub occupancy_during: Vec<Vec<f64>>,
    /// Empirical mean occupancy during each contention slot.
    pub mean_during: Vec<f64>,
    pub frames: u64,
}

/// Exact slot-level protocol simulation.
///
/// Per frame, each still-inactive node activates with probability p in each
/// contention slot, senses every subcarrier once (false alarms on free ones,
/// missed detections on occupied ones against the start-of-slot state),
/// claims up to `s` of those sensed free, and transmits until the frame end;
/// a node sensing nothing free stays silent for the rest of the frame.
pub fn simulate_mac(
    mac: &MacConfig,
    mean_nodes: u32,
    subcarriers: u32,
    errors: &SensingErrors,
    power: &PowerTimingProfile,
    frames: u64,
    seed: u64,
) -> MacSimReport {
    let m = mean_nodes as usize;
    let n = subcarriers as usize;
    let k_c = mac.contention_slots as usize;
    let k_d = mac.contention_free_slots() as u64;
    let p = mac.access_probability;
    let s_max = mac.max_subcarriers_per_node as usize;
    let (pmd, pfa) = (errors.missed_detection, errors.false_alarm);

    const BATCH: u64 = 128;
    let n_batches = frames.div_ceil(BATCH);

    struct Batch {
        activations: u64,
        slot_units: u64,
        grabs: u64,
        hist: Vec<u64>, // k_c * (m+1), during-slot occupancy counts
    }

    let batches: Vec<Batch> = (0..n_batches)
        .into_par_iter()
        .map(|bi| {
            let mut acc = Batch {
                activations: 0,
                slot_units: 0,
                grabs: 0,
                hist: vec![0u64; k_c * (m + 1)],
            };
            let mut active = vec![false; m];
            let mut occ = vec![0u32; n];
            let mut sensed_free: Vec<usize> = Vec::with_capacity(n);
            let mut pending: Vec<usize> = Vec::with_capacity(s_max * m);
            let lo = bi * BATCH;
            let hi = (lo + BATCH).min(frames);
            for frame in lo..hi {
                let mut rng = trial_rng(seed, frame);
                active.fill(false);
                occ.fill(0);
                for t in 1..=k_c {
                    pending.clear();
                    for node in 0..m {
                        if active[node] || rng.random::<f64>() >= p {
                            continue;
                        }
                        active[node] = true;
                        acc.activations += 1;
                        sensed_free.clear();
                        for (k, &o) in occ.iter().enumerate() {
                            let sensed = if o > 0 {
                                rng.random::<f64>() < pmd
                            } else {
                                rng.random::<f64>() >= pfa
                            };
                            if sensed {
                                sensed_free.push(k);
                            }
                        }
                        if sensed_free.is_empty() {
                            continue; // defers to the next frame
                        }
                        let take = s_max.min(sensed_free.len());
                        for i in 0..take {
                            let j = rng.random_range(i..sensed_free.len());
                            sensed_free.swap(i, j);
                            pending.push(sensed_free[i]);
                        }
                    }
                    for &k in &pending {
                        occ[k] += 1;
                        acc.grabs += 1;
                        acc.slot_units += (k_c - t + 1) as u64 + k_d;
                    }
                    let row = &mut acc.hist[(t - 1) * (m + 1)..t * (m + 1)];
                    for &o in &occ {
                        row[(o as usize).min(m)] += 1;
                    }
                }
            }
            acc
        })
        .collect();

    let mut activations = 0u64;
    let mut slot_units = 0u64;
    let mut grabs = 0u64;
    let mut hist = vec![0u64; k_c * (m + 1)];
    for b in &batches {
        activations += b.activations;
        slot_units += b.slot_units;
        grabs += b.grabs;
        for (h, v) in hist.iter_mut().zip(&b.hist) {
            *h += v;
        }
    }

    let norm = (n as u64 * frames) as f64;
    let occupancy_during: Vec<Vec<f64>> = (0..k_c)
        .map(|ti| hist[ti * (m + 1)..(ti + 1) * (m + 1)].iter().map(|&c| c as f64 / norm).collect())
        .collect();
    let mean_during: Vec<f64> = occupancy_during
        .iter()
        .map(|col| col.iter().enumerate().map(|(l, p)| l as f64 * p).sum())
        .collect();

    let tx_time = power.slot_duration * slot_units as f64 - power.sensing_time * grabs as f64;
    MacSimReport {
        energy: MacEnergy {
            sensing: power.sensing_power * power.sensing_time * activations as f64
                / (mac.frame_slots as f64 * frames as f64),
            transmission: power.transmit_power * tx_time / (n as f64 * mac.frame_slots as f64 * frames as f64),
        },
        occupancy_during,
        mean_during,
        frames,
    }
}
