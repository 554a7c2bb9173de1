//! Inner layer: which pinching antennas to switch on in one slot.
//!
//! The required transmit power is `(2^R - 1) sigma^2 / g(a)` where
//! `g(a) = |sum_k conj(h_k) beta_k(a) g_k a_k|^2`. Because the radiation
//! ratios `beta_k` deplete along the guide, switching on more antennas is not
//! always better. Four solvers are offered:
//!
//! * [`exhaustive_best`]: enumerate all `2^K` vectors (oracle, `K <= 20`).
//! * [`bnb_optimize`]: exact branch and bound with McCormick LP bounds.
//! * [`islr_optimize`]: gain-ranked prefix search plus set replacement.
//! * [`full_activation`]: everything on.

mod bnb;
mod islr;
mod relaxation;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::link_budget::required_power;
use crate::propagation::{feed_order, Activation, ChannelVector};
use crate::scenario::Scenario;

pub use bnb::{bnb_optimize, BnbResult, BoundSnapshot, PrunedBox};
pub use islr::{default_k_prime, islr_optimize, islr_search, IslrResult};
pub use relaxation::{relax_upper_bound, Relaxation, SearchBox};

/// Largest antenna count [`exhaustive_best`] enumerates.
pub const EXHAUSTIVE_MAX_ANTENNAS: usize = 20;

/// One slot's activation problem, with antennas kept in index order.
#[derive(Debug, Clone)]
pub struct ActivationProblem {
    /// `conj(h_k) * g_k` per antenna.
    pub coefficients: Vec<Complex64>,
    /// `|h_k|`, used for gain ranking.
    pub channel_magnitudes: Vec<f64>,
    /// Antenna indices nearest-to-feed first.
    pub feed_order: Vec<usize>,
    pub delta: f64,
    pub noise_w: f64,
    pub rate_threshold: f64,
}

impl ActivationProblem {
    pub fn new(scenario: &Scenario, channel: &ChannelVector, response: &[Complex64]) -> Self {
        let coefficients = channel.gains.iter().zip(response).map(|(h, g)| h.conj() * g).collect();
        Self {
            coefficients,
            channel_magnitudes: channel.gains.iter().map(|h| h.norm()).collect(),
            feed_order: feed_order(&scenario.waveguide),
            delta: scenario.physics.radiation_constant,
            noise_w: scenario.physics.noise_power_w,
            rate_threshold: scenario.physics.rate_threshold_bps_hz,
        }
    }

    pub fn antenna_count(&self) -> usize {
        self.coefficients.len()
    }

    /// `1 / ((2^R - 1) sigma^2)`: objective per unit gain.
    pub fn rho(&self) -> f64 {
        1.0 / ((self.rate_threshold.exp2() - 1.0) * self.noise_w)
    }

    /// Effective gain with the sequential radiation ratios.
    pub fn gain(&self, activation: &Activation) -> f64 {
        self.gain_bits(activation.bits())
    }

    pub(crate) fn gain_bits(&self, bits: &[bool]) -> f64 {
        let pass = (1.0 - self.delta * self.delta).sqrt();
        let mut amplitude = self.delta;
        let mut sum = Complex64::new(0.0, 0.0);
        for &k in &self.feed_order {
            if bits[k] {
                sum += self.coefficients[k] * amplitude;
                amplitude *= pass;
            }
        }
        sum.norm_sqr()
    }

    /// `rho * gain`; maximizing it minimizes the required power.
    pub fn objective(&self, activation: &Activation) -> f64 {
        self.rho() * self.gain(activation)
    }

    pub fn required_power(&self, activation: &Activation) -> f64 {
        required_power(self.gain(activation), self.rate_threshold, self.noise_w)
    }

    /// Best single-antenna vector; ties go to the lowest index.
    pub fn best_single(&self) -> Activation {
        let k = self.antenna_count();
        let mut best = (0, f64::NEG_INFINITY);
        for i in 0..k {
            let v = self.gain(&Activation::single(k, i));
            if v > best.1 {
                best = (i, v);
            }
        }
        Activation::single(k, best.0)
    }
}

/// `true` when `a` should replace `b` as the argmax: larger objective, then
/// fewer active antennas, then the lexicographically smaller bitmap.
pub(crate) fn preferred(a: (&[bool], f64), b: (&[bool], f64)) -> bool {
    if a.1 != b.1 {
        return a.1 > b.1;
    }
    let (ca, cb) = (a.0.iter().filter(|&&x| x).count(), b.0.iter().filter(|&&x| x).count());
    if ca != cb {
        return ca < cb;
    }
    a.0 < b.0
}

/// Global argmax by enumeration of every nonzero vector.
pub fn exhaustive_best(problem: &ActivationProblem) -> Result<Activation> {
    let k = problem.antenna_count();
    if k > EXHAUSTIVE_MAX_ANTENNAS {
        return Err(Error::SizeGuard {
            what: "antenna count",
            got: k,
            limit: EXHAUSTIVE_MAX_ANTENNAS,
        });
    }
    if k == 0 {
        return Err(Error::InvalidConfig("no antennas to activate".into()));
    }
    let mut best: Option<(Vec<bool>, f64)> = None;
    let mut bits = vec![false; k];
    for mask in 1u64..(1u64 << k) {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = mask >> i & 1 == 1;
        }
        let v = problem.gain_bits(&bits);
        let replace = match &best {
            None => true,
            Some((bb, bv)) => preferred((&bits, v), (bb, *bv)),
        };
        if replace {
            best = Some((bits.clone(), v));
        }
    }
    Ok(Activation::from_bits(best.expect("k >= 1").0))
}

pub fn full_activation(k: usize) -> Activation {
    Activation::ones(k)
}
