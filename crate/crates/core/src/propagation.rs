//! Free-space channels, in-waveguide phases and the sequential radiation model.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{distance, Point, Scenario, WaveguideConfig};

/// Closer than this to an antenna counts as degenerate geometry.
pub const MIN_LINK_DISTANCE_M: f64 = 1e-6;

/// Binary on/off state per antenna, indexed like `WaveguideConfig::pa_x_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Activation(Vec<bool>);

impl Activation {
    pub fn zeros(k: usize) -> Self {
        Activation(vec![false; k])
    }

    pub fn ones(k: usize) -> Self {
        Activation(vec![true; k])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Activation(bits)
    }

    /// Bit `k` of `mask` drives antenna `k`.
    pub fn from_mask(mask: u64, k: usize) -> Self {
        Activation((0..k).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn single(k: usize, on: usize) -> Self {
        let mut a = Self::zeros(k);
        a.0[on] = true;
        a
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn set(&mut self, k: usize, on: bool) {
        self.0[k] = on;
    }

    /// Number of active antennas.
    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k)
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl From<Activation> for String {
    fn from(a: Activation) -> String {
        a.to_string()
    }
}

impl TryFrom<String> for Activation {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid activation bit {other:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Activation)
    }
}

/// Per-antenna complex free-space gains seen from one UAV position.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    pub gains: Vec<Complex64>,
    pub uav_position_m: Point,
}

/// Per-antenna radiated amplitude fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationRatios(pub Vec<f64>);

impl RadiationRatios {
    pub fn sum_of_squares(&self) -> f64 {
        self.0.iter().map(|b| b * b).sum()
    }
}

/// `c^2 / (16 pi^2 f^2)`, i.e. `(lambda / 4 pi)^2`.
pub fn pathloss_constant(wavelength_m: f64) -> f64 {
    let r = wavelength_m / (4.0 * PI);
    r * r
}

/// Spherical-wave gain `sqrt(eta) exp(-j 2 pi d / lambda) / d`.
pub fn free_space_gain(wavelength_m: f64, d: f64) -> Complex64 {
    let amplitude = pathloss_constant(wavelength_m).sqrt() / d;
    Complex64::from_polar(amplitude, -2.0 * PI * d / wavelength_m)
}

pub fn channel(scenario: &Scenario, uav_position_m: Point) -> Result<ChannelVector> {
    let wg = &scenario.waveguide;
    let lambda = scenario.physics.wavelength_m;
    let gains = (0..wg.pa_count())
        .map(|k| {
            let d = distance(&uav_position_m, &wg.pa_position(k));
            if d < MIN_LINK_DISTANCE_M {
                Err(Error::DegenerateGeometry {
                    antenna: k,
                    distance_m: d,
                })
            } else {
                Ok(free_space_gain(lambda, d))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelVector { gains, uav_position_m })
}

/// In-waveguide phase from the feed to each antenna (lossless guide).
pub fn waveguide_response(scenario: &Scenario) -> Vec<Complex64> {
    let wg = &scenario.waveguide;
    let lambda_g = scenario.physics.guided_wavelength_m;
    wg.pa_x_m
        .iter()
        .map(|&x| {
            let path = (wg.feed_x_m - x).abs();
            Complex64::from_polar(1.0, -2.0 * PI * path / lambda_g)
        })
        .collect()
}

/// Antenna indices sorted by distance from the feed (nearest first).
pub fn feed_order(wg: &WaveguideConfig) -> Vec<usize> {
    let mut order: Vec<usize> = (0..wg.pa_count()).collect();
    order.sort_by(|&a, &b| {
        let da = (wg.pa_x_m[a] - wg.feed_x_m).abs();
        let db = (wg.pa_x_m[b] - wg.feed_x_m).abs();
        da.total_cmp(&db).then(a.cmp(&b))
    });
    order
}

/// Sequential depletion: the i-th active antenna from the feed radiates
/// `delta * sqrt(1 - delta^2)^(i-1)`. Index order is the feed order.
pub fn radiation_ratios(activation: &Activation, delta: f64) -> RadiationRatios {
    let order: Vec<usize> = (0..activation.len()).collect();
    radiation_ratios_ordered(activation, delta, &order)
}

/// As [`radiation_ratios`] with an explicit feed order.
pub fn radiation_ratios_ordered(activation: &Activation, delta: f64, order: &[usize]) -> RadiationRatios {
    let pass = (1.0 - delta * delta).sqrt();
    let mut ratios = vec![0.0; activation.len()];
    let mut remaining = 1.0;
    for &k in order {
        if activation.get(k) {
            ratios[k] = delta * remaining;
            remaining *= pass;
        }
    }
    RadiationRatios(ratios)
}

/// `|sum_k conj(h_k) beta_k g_k a_k|^2`.
pub fn effective_gain(
    channel: &ChannelVector,
    response: &[Complex64],
    ratios: &RadiationRatios,
    activation: &Activation,
) -> f64 {
    debug_assert_eq!(channel.gains.len(), response.len());
    debug_assert_eq!(channel.gains.len(), ratios.0.len());
    debug_assert_eq!(channel.gains.len(), activation.len());
    activation
        .active()
        .map(|k| channel.gains[k].conj() * response[k] * ratios.0[k])
        .sum::<Complex64>()
        .norm_sqr()
}

/// Gain of `activation` with ratios taken from the scenario's radiation model.
pub fn activation_gain(
    scenario: &Scenario,
    channel: &ChannelVector,
    response: &[Complex64],
    activation: &Activation,
) -> f64 {
    let ratios = radiation_ratios_ordered(
        activation,
        scenario.physics.radiation_constant,
        &feed_order(&scenario.waveguide),
    );
    effective_gain(channel, response, &ratios, activation)
}
