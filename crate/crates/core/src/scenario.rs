//! Problem instances: physics constants, waveguide layout, delivery nodes.
//!
//! Scenarios are plain immutable values. They can be generated from a seed
//! or loaded from the JSON format documented in `docs/scenario-format.md`.
//! The file stores noise power in dBm; everything in memory is SI.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A point in meters.
pub type Point = [f64; 3];

pub fn distance(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsConfig {
    pub carrier_frequency_hz: f64,
    pub wavelength_m: f64,
    /// Noise power as written in the file; kept so save/load is exact.
    pub noise_power_dbm: f64,
    pub noise_power_w: f64,
    pub refraction_index: f64,
    pub guided_wavelength_m: f64,
    pub rate_threshold_bps_hz: f64,
    /// Per-antenna coupling amplitude, in (0, 1).
    pub radiation_constant: f64,
}

impl PhysicsConfig {
    pub fn new(
        carrier_frequency_hz: f64,
        noise_power_dbm: f64,
        refraction_index: f64,
        rate_threshold_bps_hz: f64,
        radiation_constant: f64,
    ) -> Self {
        let wavelength_m = SPEED_OF_LIGHT / carrier_frequency_hz;
        Self {
            carrier_frequency_hz,
            wavelength_m,
            noise_power_dbm,
            noise_power_w: dbm_to_watts(noise_power_dbm),
            refraction_index,
            guided_wavelength_m: wavelength_m / refraction_index,
            rate_threshold_bps_hz,
            radiation_constant,
        }
    }

    /// Same physics with a different rate threshold.
    pub fn with_rate_threshold(&self, rate_threshold_bps_hz: f64) -> Self {
        Self {
            rate_threshold_bps_hz,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.carrier_frequency_hz,
            self.noise_power_dbm,
            self.refraction_index,
            self.rate_threshold_bps_hz,
            self.radiation_constant,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Invariant("physics values must be finite".into()));
        }
        if self.carrier_frequency_hz <= 0.0 {
            return Err(Error::Invariant("carrier_frequency_hz must be positive".into()));
        }
        if self.refraction_index <= 0.0 {
            return Err(Error::Invariant("refraction_index must be positive".into()));
        }
        if !(self.radiation_constant > 0.0 && self.radiation_constant < 1.0) {
            return Err(Error::Invariant(
                "radiation_constant must lie strictly between 0 and 1".into(),
            ));
        }
        if self.noise_power_w <= 0.0 {
            return Err(Error::Invariant("noise power must be positive".into()));
        }
        if self.rate_threshold_bps_hz <= 0.0 {
            return Err(Error::Invariant("rate_threshold_bps_hz must be positive".into()));
        }
        Ok(())
    }
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig::new(15e9, -90.0, 1.4, 5.0, 0.30)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideConfig {
    pub y_m: f64,
    pub z_m: f64,
    pub span_m: f64,
    pub feed_x_m: f64,
    /// Antenna positions along x, strictly increasing.
    pub pa_x_m: Vec<f64>,
    /// Minimum spacing between antennas (mutual-coupling guard).
    pub min_spacing_m: f64,
}

impl WaveguideConfig {
    /// `count` antennas centred in equal cells of width `span / count`.
    pub fn uniform(y_m: f64, z_m: f64, span_m: f64, feed_x_m: f64, count: usize) -> Self {
        let spacing = span_m / count as f64;
        let pa_x_m = (0..count).map(|k| (k as f64 + 0.5) * spacing).collect();
        Self {
            y_m,
            z_m,
            span_m,
            feed_x_m,
            pa_x_m,
            min_spacing_m: spacing,
        }
    }

    pub fn pa_count(&self) -> usize {
        self.pa_x_m.len()
    }

    pub fn pa_position(&self, k: usize) -> Point {
        [self.pa_x_m[k], self.y_m, self.z_m]
    }

    pub fn validate(&self) -> Result<()> {
        if self.pa_x_m.is_empty() {
            return Err(Error::Invariant("waveguide needs at least one antenna".into()));
        }
        if !(self.span_m > 0.0 && self.min_spacing_m > 0.0) {
            return Err(Error::Invariant("span_m and min_spacing_m must be positive".into()));
        }
        for w in self.pa_x_m.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Invariant(format!(
                    "pa_x_m must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
            if w[1] - w[0] < self.min_spacing_m * (1.0 - 1e-9) {
                return Err(Error::Invariant(format!(
                    "antennas at {} and {} are closer than min_spacing_m = {}",
                    w[0], w[1], self.min_spacing_m
                )));
            }
        }
        if self
            .pa_x_m
            .iter()
            .any(|&x| !x.is_finite() || x < 0.0 || x > self.span_m)
        {
            return Err(Error::Invariant(format!("pa_x_m must lie within [0, {}]", self.span_m)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliveryNode {
    pub position_m: Point,
    pub task_count: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub physics: PhysicsConfig,
    pub waveguide: WaveguideConfig,
    pub station_m: Point,
    pub nodes: Vec<DeliveryNode>,
    pub flight_speed_mps: f64,
    pub delivery_speed_tps: f64,
    pub slot_seconds: f64,
    pub rng_seed: u64,
}

impl Scenario {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn pa_count(&self) -> usize {
        self.waveguide.pa_count()
    }

    /// Copy with a new rate threshold; geometry untouched.
    pub fn with_rate_threshold(&self, rate_threshold_bps_hz: f64) -> Self {
        Self {
            physics: self.physics.with_rate_threshold(rate_threshold_bps_hz),
            ..self.clone()
        }
    }

    /// Copy with a different antenna layout.
    pub fn with_waveguide(&self, waveguide: WaveguideConfig) -> Self {
        Self {
            waveguide,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.physics.validate()?;
        self.waveguide.validate()?;
        if self.nodes.is_empty() {
            return Err(Error::Invariant("scenario needs at least one delivery node".into()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.task_count == 0 {
                return Err(Error::Invariant(format!("node {i}: task_count must be >= 1")));
            }
            if node.position_m.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invariant(format!("node {i}: position must be finite")));
            }
        }
        if self.station_m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invariant("station position must be finite".into()));
        }
        if !(self.flight_speed_mps > 0.0) {
            return Err(Error::Invariant("flight speed must be positive".into()));
        }
        if !(self.delivery_speed_tps > 0.0) {
            return Err(Error::Invariant("delivery speed must be positive".into()));
        }
        if !(self.slot_seconds > 0.0) {
            return Err(Error::Invariant("slot_seconds must be positive".into()));
        }
        Ok(())
    }
}

/// Knobs for [`generate_scenario`]. Defaults reproduce the reference setup.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOptions {
    pub physics: PhysicsConfig,
    pub pa_count: usize,
    pub span_m: f64,
    pub waveguide_height_m: f64,
    pub flight_speed_mps: f64,
    pub delivery_speed_tps: f64,
    pub slot_seconds: f64,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            physics: PhysicsConfig::default(),
            pa_count: 10,
            span_m: 100.0,
            waveguide_height_m: 5.0,
            flight_speed_mps: 5.0,
            delivery_speed_tps: 0.5,
            slot_seconds: 1.0,
        }
    }
}

/// Random instance: nodes uniform in `[0,100]x[0,100]x[2.5,7.5]`, task
/// counts uniform in `1..=5`, station at the origin.
pub fn generate_scenario(seed: u64, node_count: usize, options: &ScenarioOptions) -> Result<Scenario> {
    if node_count == 0 {
        return Err(Error::InvalidConfig("node_count must be at least 1".into()));
    }
    if options.pa_count == 0 {
        return Err(Error::InvalidConfig("pa_count must be at least 1".into()));
    }
    let mut positions = rng::stream(seed, Stream::NodePositions);
    let mut tasks = rng::stream(seed, Stream::TaskCounts);
    let nodes = (0..node_count)
        .map(|_| DeliveryNode {
            position_m: [
                positions.gen_range(0.0..=100.0),
                positions.gen_range(0.0..=100.0),
                positions.gen_range(2.5..=7.5),
            ],
            task_count: tasks.gen_range(1..=5),
        })
        .collect();
    let scenario = Scenario {
        physics: options.physics.clone(),
        waveguide: WaveguideConfig::uniform(0.0, options.waveguide_height_m, options.span_m, 0.0, options.pa_count),
        station_m: [0.0, 0.0, 0.0],
        nodes,
        flight_speed_mps: options.flight_speed_mps,
        delivery_speed_tps: options.delivery_speed_tps,
        slot_seconds: options.slot_seconds,
        rng_seed: seed,
    };
    scenario.validate()?;
    Ok(scenario)
}

// On-disk layout.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicsFile {
    carrier_frequency_hz: f64,
    noise_power_dbm: f64,
    refraction_index: f64,
    rate_threshold_bps_hz: f64,
    radiation_constant: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaveguideFile {
    y_m: f64,
    z_m: f64,
    span_m: f64,
    feed_x_m: f64,
    pa_x_m: Vec<f64>,
    min_spacing_m: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeedsFile {
    flight_mps: f64,
    delivery_tps: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    physics: PhysicsFile,
    waveguide: WaveguideFile,
    station: Point,
    nodes: Vec<DeliveryNode>,
    speeds: SpeedsFile,
    slot_seconds: f64,
    seed: u64,
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            physics: PhysicsFile {
                carrier_frequency_hz: s.physics.carrier_frequency_hz,
                noise_power_dbm: s.physics.noise_power_dbm,
                refraction_index: s.physics.refraction_index,
                rate_threshold_bps_hz: s.physics.rate_threshold_bps_hz,
                radiation_constant: s.physics.radiation_constant,
            },
            waveguide: WaveguideFile {
                y_m: s.waveguide.y_m,
                z_m: s.waveguide.z_m,
                span_m: s.waveguide.span_m,
                feed_x_m: s.waveguide.feed_x_m,
                pa_x_m: s.waveguide.pa_x_m.clone(),
                min_spacing_m: s.waveguide.min_spacing_m,
            },
            station: s.station_m,
            nodes: s.nodes.clone(),
            speeds: SpeedsFile {
                flight_mps: s.flight_speed_mps,
                delivery_tps: s.delivery_speed_tps,
            },
            slot_seconds: s.slot_seconds,
            seed: s.rng_seed,
        }
    }
}

impl From<ScenarioFile> for Scenario {
    fn from(f: ScenarioFile) -> Self {
        let p = f.physics;
        Scenario {
            physics: PhysicsConfig::new(
                p.carrier_frequency_hz,
                p.noise_power_dbm,
                p.refraction_index,
                p.rate_threshold_bps_hz,
                p.radiation_constant,
            ),
            waveguide: WaveguideConfig {
                y_m: f.waveguide.y_m,
                z_m: f.waveguide.z_m,
                span_m: f.waveguide.span_m,
                feed_x_m: f.waveguide.feed_x_m,
                pa_x_m: f.waveguide.pa_x_m,
                min_spacing_m: f.waveguide.min_spacing_m,
            },
            station_m: f.station,
            nodes: f.nodes,
            flight_speed_mps: f.speeds.flight_mps,
            delivery_speed_tps: f.speeds.delivery_tps,
            slot_seconds: f.slot_seconds,
            rng_seed: f.seed,
        }
    }
}

/// Serialize to the JSON scenario format.
pub fn to_json(scenario: &Scenario) -> String {
    let file = ScenarioFile::from(scenario);
    // Plain structs of f64/u64 cannot fail to serialize.
    serde_json::to_string_pretty(&file).expect("scenario serialization") + "\n"
}

/// Parse and validate a JSON scenario.
pub fn from_json(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let scenario = Scenario::from(file);
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json(scenario)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generated(seed: u64, m: usize) -> Scenario {
        generate_scenario(seed, m, &ScenarioOptions::default()).unwrap()
    }

    #[test]
    fn generated_nodes_respect_bounds() {
        let s = generated(7, 10);
        assert_eq!(s.nodes.len(), 10);
        for n in &s.nodes {
            assert!((0.0..=100.0).contains(&n.position_m[0]));
            assert!((0.0..=100.0).contains(&n.position_m[1]));
            assert!((2.5..=7.5).contains(&n.position_m[2]));
            assert!((1..=5).contains(&n.task_count));
        }
        assert_eq!(s.station_m, [0.0, 0.0, 0.0]);
        assert_eq!(s.pa_count(), 10);
        assert_eq!(s.waveguide.min_spacing_m, 10.0);
    }

    #[test]
    fn same_seed_same_bytes() {
        assert_eq!(to_json(&generated(7, 10)), to_json(&generated(7, 10)));
    }

    #[test]
    fn different_seeds_differ() {
        assert_ne!(generated(7, 10).nodes, generated(8, 10).nodes);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(matches!(
            generate_scenario(1, 0, &ScenarioOptions::default()),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn derived_wavelengths() {
        let p = PhysicsConfig::default();
        assert!((p.wavelength_m - SPEED_OF_LIGHT / 15e9).abs() / p.wavelength_m < 1e-12);
        assert!((p.guided_wavelength_m - p.wavelength_m / 1.4).abs() / p.guided_wavelength_m < 1e-12);
        assert!((p.noise_power_w - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn dbm_conversion_inverts() {
        for dbm in [-120.0, -90.0, -3.5, 0.0, 30.0] {
            assert!((watts_to_dbm(dbm_to_watts(dbm)) - dbm).abs() < 1e-9);
        }
    }

    #[test]
    fn duplicate_antenna_positions_rejected() {
        let mut s = generated(3, 2);
        s.waveguide.pa_x_m = vec![10.0, 10.0];
        let err = from_json(&to_json(&s)).unwrap_err();
        assert!(err.to_string().contains("strictly increasing"), "{err}");
    }

    #[test]
    fn missing_task_count_names_field() {
        let s = generated(3, 1);
        let text = to_json(&s).replace("\"task_count\"", "\"tasks\"");
        let err = from_json(&text).unwrap_err();
        match &err {
            Error::Parse { message, line, .. } => {
                assert!(message.contains("task_count"), "{message}");
                assert!(*line > 0);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn zero_task_count_is_invariant_error() {
        let mut s = generated(3, 2);
        s.nodes[1].task_count = 0;
        let err = from_json(&to_json(&s)).unwrap_err();
        assert!(matches!(err, Error::Invariant(_)));
    }

    #[test]
    fn spacing_guard_enforced() {
        let mut w = WaveguideConfig::uniform(0.0, 5.0, 100.0, 0.0, 10);
        w.pa_x_m[1] = w.pa_x_m[0] + 4.0;
        assert!(w.validate().is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let s = generated(11, 6);
        save_scenario(&s, &path).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), s);
    }
}
