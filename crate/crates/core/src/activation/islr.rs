//! Incremental search with local replacement.
//!
//! Antennas are ranked by `|h_k|`. The strongest `K'` form the high set and
//! the rest the low set. A prefix search over the high set picks a starting
//! set. Then two moves alternate until neither helps:
//!
//! * downsizing drops the antennas with the smallest marginal contribution
//!   `|beta_i h_i|`, one at a time, while power keeps falling;
//! * upsizing appends low-set antennas strongest first, while power keeps
//!   falling, and consumes the ones it keeps.
//!
//! The search on its own can end above full activation when the phases of
//! the dropped antennas happened to add up. [`islr_optimize`] therefore also
//! scores the all-on set in the final selection; [`islr_search`] exposes the
//! bare search.

use crate::error::{Error, Result};
use crate::propagation::{radiation_ratios_ordered, Activation};

use super::ActivationProblem;

/// `ceil(K / 2)`.
pub fn default_k_prime(k: usize) -> usize {
    k.div_ceil(2)
}

#[derive(Debug, Clone)]
pub struct IslrResult {
    pub activation: Activation,
    pub power_w: f64,
    /// Number of candidate sets whose power was computed.
    pub evaluations: usize,
}

struct Tracker<'a> {
    problem: &'a ActivationProblem,
    best: Option<(Vec<usize>, f64)>,
    evaluations: usize,
}

impl Tracker<'_> {
    fn power(&mut self, set: &[usize]) -> f64 {
        let mut bits = vec![false; self.problem.antenna_count()];
        for &i in set {
            bits[i] = true;
        }
        let p = self.problem.required_power(&Activation::from_bits(bits));
        self.evaluations += 1;
        if self.best.as_ref().is_none_or(|(_, b)| p < *b) {
            self.best = Some((set.to_vec(), p));
        }
        p
    }
}

/// Search with the all-on set as an extra final candidate, so the result
/// never needs more power than full activation.
pub fn islr_optimize(problem: &ActivationProblem, k_prime: usize) -> Result<IslrResult> {
    islr_search(problem, k_prime, true)
}

pub fn islr_search(problem: &ActivationProblem, k_prime: usize, full_set_candidate: bool) -> Result<IslrResult> {
    let k = problem.antenna_count();
    if k_prime == 0 || k_prime > k {
        return Err(Error::InvalidConfig(format!("K' = {k_prime} must be in 1..={k}")));
    }
    let mag = &problem.channel_magnitudes;
    let mut ranked: Vec<usize> = (0..k).collect();
    ranked.sort_by(|&a, &b| mag[b].total_cmp(&mag[a]).then(a.cmp(&b)));
    let mut low: Vec<usize> = ranked[k_prime..].to_vec();
    let mut t = Tracker {
        problem,
        best: None,
        evaluations: 0,
    };

    // Prefix search over the high set.
    let mut current: Vec<usize> = Vec::new();
    let mut current_power = f64::INFINITY;
    for n in 1..=k_prime {
        let p = t.power(&ranked[..n]);
        if p < current_power {
            current_power = p;
            current = ranked[..n].to_vec();
        }
    }

    loop {
        let mut improved = false;

        if current.len() > 1 {
            let bits = {
                let mut b = vec![false; k];
                current.iter().for_each(|&i| b[i] = true);
                Activation::from_bits(b)
            };
            let beta = radiation_ratios_ordered(&bits, problem.delta, &problem.feed_order);
            let mut by_gain = current.clone();
            by_gain.sort_by(|&a, &b| (beta.0[a] * mag[a]).total_cmp(&(beta.0[b] * mag[b])).then(a.cmp(&b)));
            let mut prev = current_power;
            let mut kept: Option<(Vec<usize>, f64)> = None;
            for removed in 1..current.len() {
                let set: Vec<usize> = current
                    .iter()
                    .copied()
                    .filter(|i| !by_gain[..removed].contains(i))
                    .collect();
                let p = t.power(&set);
                if p >= prev {
                    break;
                }
                prev = p;
                kept = Some((set, p));
            }
            if let Some((set, p)) = kept {
                current = set;
                current_power = p;
                improved = true;
            }
        }

        let mut prev = current_power;
        let mut kept: Option<(usize, f64)> = None;
        for added in 1..=low.len() {
            let set: Vec<usize> = current.iter().chain(&low[..added]).copied().collect();
            let p = t.power(&set);
            if p >= prev {
                break;
            }
            prev = p;
            kept = Some((added, p));
        }
        if let Some((added, p)) = kept {
            current.extend(low.drain(..added));
            current_power = p;
            improved = true;
        }

        if !improved {
            break;
        }
    }

    if full_set_candidate {
        t.power(&(0..k).collect::<Vec<_>>());
    }
    let (set, power_w) = t.best.expect("at least one set was evaluated");
    let mut bits = vec![false; k];
    set.iter().for_each(|&i| bits[i] = true);
    Ok(IslrResult {
        activation: Activation::from_bits(bits),
        power_w,
        evaluations: t.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::bnb_optimize;
    use crate::activation::tests::random_problem;
    use crate::link_budget::achievable_rate;

    #[test]
    fn k_prime_default() {
        assert_eq!(default_k_prime(10), 5);
        assert_eq!(default_k_prime(7), 4);
        assert_eq!(default_k_prime(1), 1);
    }

    #[test]
    fn single_antenna() {
        let p = random_problem(1, 1);
        let r = islr_optimize(&p, 1).unwrap();
        assert_eq!(r.activation, Activation::ones(1));
    }

    #[test]
    fn never_beats_bnb_and_meets_rate() {
        let mut ratios = Vec::new();
        for seed in 0..40 {
            let p = random_problem(seed, 10);
            let r = islr_optimize(&p, 5).unwrap();
            let opt = bnb_optimize(&p, 0.0).unwrap();
            let opt_power = p.required_power(&opt.activation);
            assert!(r.power_w >= opt_power * (1.0 - 1e-9));
            assert_eq!(r.power_w, p.required_power(&r.activation));
            let rate = achievable_rate(r.power_w, p.gain(&r.activation), p.noise_w);
            assert!((rate - p.rate_threshold).abs() < 1e-9);
            ratios.push(r.power_w / opt_power);
        }
        ratios.sort_by(f64::total_cmp);
        assert!(ratios[ratios.len() / 2] >= 1.0);
    }

    #[test]
    fn never_above_full_activation() {
        for seed in 0..60 {
            let p = random_problem(seed, 10);
            let full = p.required_power(&Activation::ones(10));
            let guarded = islr_optimize(&p, 5).unwrap().power_w;
            assert!(guarded <= full);
            assert!(guarded <= islr_search(&p, 5, false).unwrap().power_w);
        }
    }

    #[test]
    fn full_k_prime_covers_full_set() {
        for seed in 0..20 {
            let p = random_problem(seed, 8);
            let full = p.required_power(&Activation::ones(8));
            assert!(islr_search(&p, 8, false).unwrap().power_w <= full);
        }
    }

    #[test]
    fn rejects_bad_k_prime() {
        let p = random_problem(2, 4);
        assert!(islr_optimize(&p, 0).is_err());
        assert!(islr_optimize(&p, 5).is_err());
    }

    #[test]
    fn deterministic() {
        let p = random_problem(9, 10);
        let a = islr_optimize(&p, 5).unwrap();
        let b = islr_optimize(&p, 5).unwrap();
        assert_eq!(a.activation, b.activation);
        assert_eq!(a.power_w, b.power_w);
    }
}
