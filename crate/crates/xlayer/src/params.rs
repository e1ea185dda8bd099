//! Shared configuration types and validation.
//!
//! All types are immutable value objects; a [`ParamBundle`] is only
//! constructible through [`validate`], which reports every violated
//! invariant rather than stopping at the first.

use std::fmt;

/// Geometric and network-density parameters of one cluster and its
/// surroundings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterTopology {
    /// Density of access points outside the representative cluster (per unit
    /// area).
    pub ap_density: f64,
    /// Cluster radius.
    pub cluster_radius: f64,
    /// Minimum distance between a node in the representative cluster and any
    /// out-of-cluster interferer.
    pub exclusion_distance: f64,
    /// Path-loss exponent; must exceed 2 for finite interference moments.
    pub path_loss_exponent: f64,
    /// Mean number of nodes per cluster.
    pub mean_nodes: u32,
    /// Number of orthogonal subcarriers.
    pub subcarriers: u32,
}

impl ClusterTopology {
    /// Node density implied by the mean node count and cluster area.
    pub fn node_density(&self) -> f64 {
        self.mean_nodes as f64 / (std::f64::consts::PI * self.cluster_radius * self.cluster_radius)
    }
}

/// Power draws and time constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTimingProfile {
    /// Transmit power per subcarrier.
    pub transmit_power: f64,
    /// Sensing power per subcarrier.
    pub sensing_power: f64,
    /// Decoding power per subcarrier.
    pub decoding_power: f64,
    /// Control-channel power per subcarrier (centralized scheme only).
    pub control_power: f64,
    /// Slot duration.
    pub slot_duration: f64,
    /// Sensing time; strictly less than one slot.
    pub sensing_time: f64,
}

/// Random-access MAC configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacConfig {
    /// Per-slot activation probability.
    pub access_probability: f64,
    /// Maximum subcarriers a node may occupy.
    pub max_subcarriers_per_node: u32,
    /// Contention slots per frame.
    pub contention_slots: u32,
    /// Total slots per frame.
    pub frame_slots: u32,
}

impl MacConfig {
    /// Contention-free slots per frame.
    pub fn contention_free_slots(&self) -> u32 {
        self.frame_slots - self.contention_slots
    }
}

/// Spectral-gain model mapping the decode threshold to bits per second.
#[derive(Debug, Clone, Copy)]
pub enum SpectralGain {
    /// log2(1 + threshold)
    ShannonLog2,
    /// Arbitrary gain function of the linear threshold.
    Custom(fn(f64) -> f64),
}

impl PartialEq for SpectralGain {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SpectralGain::ShannonLog2, SpectralGain::ShannonLog2) => true,
            (SpectralGain::Custom(a), SpectralGain::Custom(b)) => std::ptr::fn_addr_eq(*a, *b),
            _ => false,
        }
    }
}

/// Decoding threshold and spectral gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodingConfig {
    /// SINR decode threshold, linear scale.
    pub threshold: f64,
    pub gain: SpectralGain,
}

impl DecodingConfig {
    pub fn new(threshold: f64) -> Self {
        Self { threshold, gain: SpectralGain::ShannonLog2 }
    }

    /// Construct from a threshold expressed in dB.
    pub fn from_db(threshold_db: f64) -> Self {
        Self::new(10f64.powf(threshold_db / 10.0))
    }

    /// Spectral gain at the configured threshold.
    pub fn spectral_gain(&self) -> f64 {
        self.gain_at(self.threshold)
    }

    /// Spectral gain at an arbitrary linear threshold.
    pub fn gain_at(&self, threshold: f64) -> f64 {
        match self.gain {
            SpectralGain::ShannonLog2 => (1.0 + threshold).log2(),
            SpectralGain::Custom(f) => f(threshold),
        }
    }
}

/// Signal-processing placement scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Hybrid,
    Centralized,
    Distributed,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::Hybrid => write!(f, "hybrid"),
            SchemeKind::Centralized => write!(f, "centralized"),
            SchemeKind::Distributed => write!(f, "distributed"),
        }
    }
}

/// A single invariant violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

/// Every violated invariant found during validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} parameter violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.field, v.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// A validated, immutable parameter bundle.
///
/// `warnings` carries non-fatal advisories (currently only an exclusion
/// distance below the cluster radius, which the analysis permits but the
/// non-overlapping-cluster default discourages).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBundle {
    pub topology: ClusterTopology,
    pub power: PowerTimingProfile,
    pub mac: MacConfig,
    pub decoding: DecodingConfig,
    pub warnings: Vec<String>,
}

/// Validate a full parameter set, reporting every violation. Never clamps.
pub fn validate(
    topology: ClusterTopology,
    power: PowerTimingProfile,
    mac: MacConfig,
    decoding: DecodingConfig,
) -> Result<ParamBundle, ValidationReport> {
    let mut report = ValidationReport::default();
    let mut fail = |field: &'static str, message: String| {
        report.violations.push(Violation { field, message });
    };

    if !(topology.ap_density > 0.0) {
        fail("topology.ap_density", format!("must be > 0, got {}", topology.ap_density));
    }
    if !(topology.cluster_radius > 0.0) {
        fail("topology.cluster_radius", format!("must be > 0, got {}", topology.cluster_radius));
    }
    if !(topology.exclusion_distance > 0.0) {
        fail(
            "topology.exclusion_distance",
            format!("must be > 0, got {}", topology.exclusion_distance),
        );
    }
    if !(topology.path_loss_exponent > 2.0) {
        fail(
            "topology.path_loss_exponent",
            format!("must be > 2 for finite interference moments, got {}", topology.path_loss_exponent),
        );
    }
    if topology.mean_nodes == 0 {
        fail("topology.mean_nodes", "must be a positive integer".into());
    }
    if topology.subcarriers == 0 {
        fail("topology.subcarriers", "must be a positive integer".into());
    }

    if !(power.transmit_power > 0.0) {
        fail("power.transmit_power", format!("must be > 0, got {}", power.transmit_power));
    }
    for (field, value) in [
        ("power.sensing_power", power.sensing_power),
        ("power.decoding_power", power.decoding_power),
        ("power.control_power", power.control_power),
    ] {
        if !(value >= 0.0) {
            fail(field, format!("must be >= 0, got {value}"));
        }
    }
    if !(power.slot_duration > 0.0) {
        fail("power.slot_duration", format!("must be > 0, got {}", power.slot_duration));
    }
    if !(power.sensing_time >= 0.0 && power.sensing_time < power.slot_duration) {
        fail(
            "power.sensing_time",
            format!(
                "must satisfy 0 <= sensing_time < slot_duration, got {} vs {}",
                power.sensing_time, power.slot_duration
            ),
        );
    }

    if !(mac.access_probability > 0.0 && mac.access_probability <= 1.0) {
        fail(
            "mac.access_probability",
            format!("must lie in (0, 1], got {}", mac.access_probability),
        );
    }
    if mac.max_subcarriers_per_node == 0 {
        fail("mac.max_subcarriers_per_node", "must be a positive integer".into());
    }
    if mac.contention_slots == 0 {
        fail("mac.contention_slots", "must be a positive integer".into());
    }
    if mac.contention_slots > mac.frame_slots {
        fail(
            "mac.contention_slots",
            format!(
                "contention slots ({}) must not exceed frame slots ({})",
                mac.contention_slots, mac.frame_slots
            ),
        );
    }

    if !(decoding.threshold > 0.0) {
        fail("decoding.threshold", format!("must be > 0 (linear scale), got {}", decoding.threshold));
    }

    if !report.violations.is_empty() {
        return Err(report);
    }

    let mut warnings = Vec::new();
    if topology.exclusion_distance < topology.cluster_radius {
        warnings.push(format!(
            "exclusion_distance {} is below cluster_radius {}: clusters overlap",
            topology.exclusion_distance, topology.cluster_radius
        ));
    }

    Ok(ParamBundle { topology, power, mac, decoding, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_defaults() -> (ClusterTopology, PowerTimingProfile, MacConfig, DecodingConfig) {
        (
            ClusterTopology {
                ap_density: 1.0 / (std::f64::consts::PI * 200.0 * 200.0),
                cluster_radius: 100.0,
                exclusion_distance: 100.0,
                path_loss_exponent: 4.0,
                mean_nodes: 32,
                subcarriers: 64,
            },
            PowerTimingProfile {
                transmit_power: 1.0,
                sensing_power: 1e-2,
                decoding_power: 1e-2,
                control_power: 1.0,
                slot_duration: 1.0,
                sensing_time: 0.1,
            },
            MacConfig {
                access_probability: 0.05,
                max_subcarriers_per_node: 3,
                contention_slots: 60,
                frame_slots: 60,
            },
            DecodingConfig::from_db(5.0),
        )
    }

    #[test]
    fn figure_parameters_validate() {
        let (t, p, m, d) = fig_defaults();
        let bundle = validate(t, p, m, d).unwrap();
        assert!(bundle.warnings.is_empty());
        assert_eq!(bundle.mac.contention_free_slots(), 0);
        // node density reproduces the mean node count
        let back = bundle.topology.node_density()
            * std::f64::consts::PI
            * bundle.topology.cluster_radius.powi(2);
        assert!((back - 32.0).abs() < 1e-9);
    }

    #[test]
    fn path_loss_boundary_rejected() {
        let (mut t, p, m, d) = fig_defaults();
        t.path_loss_exponent = 2.0;
        let err = validate(t, p, m, d).unwrap_err();
        assert!(err.violations.iter().any(|v| v.field == "topology.path_loss_exponent"));
    }

    #[test]
    fn contention_exceeding_frame_rejected() {
        let (t, p, mut m, d) = fig_defaults();
        m.contention_slots = 61;
        m.frame_slots = 60;
        let err = validate(t, p, m, d).unwrap_err();
        assert!(err.violations.iter().any(|v| v.field == "mac.contention_slots"));
    }

    #[test]
    fn all_violations_reported() {
        let (mut t, mut p, mut m, d) = fig_defaults();
        t.path_loss_exponent = 1.5;
        p.sensing_time = 2.0;
        m.contention_slots = 100;
        let err = validate(t, p, m, d).unwrap_err();
        assert_eq!(err.violations.len(), 3);
    }

    #[test]
    fn overlapping_clusters_warn_but_validate() {
        let (mut t, p, m, d) = fig_defaults();
        t.exclusion_distance = 50.0;
        let bundle = validate(t, p, m, d).unwrap();
        assert_eq!(bundle.warnings.len(), 1);
    }

    #[test]
    fn validation_is_idempotent() {
        let (t, p, m, d) = fig_defaults();
        let b1 = validate(t, p, m, d).unwrap();
        let b2 = validate(b1.topology, b1.power, b1.mac, b1.decoding).unwrap();
        assert_eq!(b1, b2);
    }

    #[test]
    fn db_conversion() {
        let d = DecodingConfig::from_db(5.0);
        assert!((d.threshold - 10f64.powf(0.5)).abs() < 1e-12);
        assert!((d.spectral_gain() - (1.0 + d.threshold).log2()).abs() < 1e-12);
    }
}
