//! Linear relaxation used as the branch-and-bound upper bound.
//!
//! Write the objective in terms of the radiated amplitudes. With `s =
//! sqrt(1 - delta^2)`, the antenna that is `n`-th active from the feed
//! radiates `delta * s^(n-1)`, so with `x_k = a_k * s^(#active before k)` the
//! objective is `rho delta^2 sum_{k,k'} Q_kk' x_k x_k'` where
//! `Q_kk' = Re(c_k conj(c_k'))`.
//!
//! Inside a box every `x_k` lives in a known interval: fixed-off gives
//! `[0, 0]`; a fixed-on antenna with `F1` fixed-on and `Fr` free antennas
//! ahead of it gives `[s^(F1+Fr), s^F1]`; a free one gives `[0, s^F1]`.
//! Replacing each product `x_k x_k'` by a variable bounded with the McCormick
//! inequalities on the side that matters for the sign of `Q_kk'` gives an LP
//! whose optimum bounds every binary vector in the box. Taking the amplitudes
//! all equal to `delta` instead would not: with fixed-on antennas whose
//! contributions cancel, depleting the later one raises the true objective
//! above such a bound.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use crate::error::{Error, Result};

use super::ActivationProblem;

/// A sub-box of `{0,1}^K` given by per-antenna bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox {
    pub lower: Vec<bool>,
    pub upper: Vec<bool>,
    pub upper_bound_value: f64,
    pub relaxed_solution: Vec<f64>,
}

impl SearchBox {
    pub fn root(k: usize) -> Self {
        Self {
            lower: vec![false; k],
            upper: vec![true; k],
            upper_bound_value: f64::INFINITY,
            relaxed_solution: vec![0.5; k],
        }
    }

    pub fn is_fixed(&self, k: usize) -> bool {
        self.lower[k] == self.upper[k]
    }

    pub fn fully_fixed(&self) -> bool {
        self.lower == self.upper
    }

    pub fn first_free(&self) -> Option<usize> {
        (0..self.lower.len()).find(|&k| !self.is_fixed(k))
    }

    /// The box contains only the zero vector.
    pub fn only_zero(&self) -> bool {
        !self.upper.iter().any(|&u| u)
    }

    pub fn contains(&self, bits: &[bool]) -> bool {
        bits.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&b, (&lo, &hi))| (!lo || b) && (hi || !b))
    }

    /// Copy with antenna `k` fixed to `on`.
    pub fn fix(&self, k: usize, on: bool) -> Self {
        let mut child = self.clone();
        child.lower[k] = on;
        child.upper[k] = on;
        child
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    pub value: f64,
    /// Relaxed activation in `[0, 1]` per antenna (amplitude over its cap).
    pub relaxed_solution: Vec<f64>,
}

/// Amplitude interval per antenna for `b`.
fn amplitude_bounds(problem: &ActivationProblem, b: &SearchBox) -> (Vec<f64>, Vec<f64>) {
    let k = problem.antenna_count();
    let s = (1.0 - problem.delta * problem.delta).sqrt();
    let (mut lo, mut hi) = (vec![0.0; k], vec![0.0; k]);
    let (mut fixed_on, mut free) = (0i32, 0i32);
    for &i in &problem.feed_order {
        match (b.lower[i], b.upper[i]) {
            (_, false) => {}
            (true, true) => {
                lo[i] = s.powi(fixed_on + free);
                hi[i] = s.powi(fixed_on);
                fixed_on += 1;
            }
            (false, true) => {
                hi[i] = s.powi(fixed_on);
                free += 1;
            }
        }
    }
    (lo, hi)
}

#[derive(Clone, Copy)]
enum Amp {
    Zero,
    Const(f64),
    Free,
}

/// Upper bound on the objective over the binary points of `b`.
/// `Ok(None)` when the box holds nothing but the infeasible zero vector.
pub fn relax_upper_bound(problem: &ActivationProblem, b: &SearchBox) -> Result<Option<Relaxation>> {
    if b.only_zero() {
        return Ok(None);
    }
    let k = problem.antenna_count();
    let c = &problem.coefficients;
    let (lo, hi) = amplitude_bounds(problem, b);
    // Normalize so the LP works on O(1) numbers.
    let scale = c.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(Some(Relaxation {
            value: 0.0,
            relaxed_solution: vec![0.0; k],
        }));
    }
    let q = |i: usize, j: usize| (c[i] * c[j].conj()).re / scale;
    let amps: Vec<Amp> = (0..k)
        .map(|i| {
            if hi[i] == 0.0 {
                Amp::Zero
            } else if lo[i] == hi[i] {
                Amp::Const(hi[i])
            } else {
                Amp::Free
            }
        })
        .collect();

    // Terms with at most one free amplitude are exact.
    let mut constant = 0.0;
    let mut linear = vec![0.0; k];
    for i in 0..k {
        for j in i..k {
            let w = if i == j { q(i, i) } else { 2.0 * q(i, j) };
            match (amps[i], amps[j]) {
                (Amp::Const(u), Amp::Const(v)) => constant += w * u * v,
                (Amp::Const(u), Amp::Free) => linear[j] += w * u,
                (Amp::Free, Amp::Const(v)) => linear[i] += w * v,
                _ => {}
            }
        }
    }

    let factor = problem.rho() * problem.delta * problem.delta * scale;
    if !amps.iter().any(|a| matches!(a, Amp::Free)) {
        let relaxed = (0..k).map(|i| if hi[i] > 0.0 { 1.0 } else { 0.0 }).collect();
        return Ok(Some(Relaxation {
            value: factor * constant,
            relaxed_solution: relaxed,
        }));
    }

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let x: Vec<Option<Variable>> = (0..k)
        .map(|i| matches!(amps[i], Amp::Free).then(|| lp.add_var(linear[i], (lo[i], hi[i]))))
        .collect();
    for i in 0..k {
        let Some(xi) = x[i] else { continue };
        let qi = q(i, i);
        if qi > 0.0 {
            // x^2 <= (lo + hi) x - lo hi on [lo, hi].
            let sq = lp.add_var(qi, (f64::NEG_INFINITY, f64::INFINITY));
            lp.add_constraint(&[(xi, -(lo[i] + hi[i])), (sq, 1.0)], ComparisonOp::Le, -lo[i] * hi[i]);
        }
        for j in i + 1..k {
            let Some(xj) = x[j] else { continue };
            let w = 2.0 * q(i, j);
            if w == 0.0 {
                continue;
            }
            let p = lp.add_var(w, (f64::NEG_INFINITY, f64::INFINITY));
            if w > 0.0 {
                lp.add_constraint(
                    &[(xi, -lo[j]), (xj, -hi[i]), (p, 1.0)],
                    ComparisonOp::Le,
                    -hi[i] * lo[j],
                );
                lp.add_constraint(
                    &[(xi, -hi[j]), (xj, -lo[i]), (p, 1.0)],
                    ComparisonOp::Le,
                    -lo[i] * hi[j],
                );
            } else {
                lp.add_constraint(
                    &[(xi, -lo[j]), (xj, -lo[i]), (p, 1.0)],
                    ComparisonOp::Ge,
                    -lo[i] * lo[j],
                );
                lp.add_constraint(
                    &[(xi, -hi[j]), (xj, -hi[i]), (p, 1.0)],
                    ComparisonOp::Ge,
                    -hi[i] * hi[j],
                );
            }
        }
    }
    let solution = lp
        .solve()
        .map_err(|e| Error::Invariant(format!("relaxation LP failed: {e}")))?;
    let relaxed = (0..k)
        .map(|i| match (amps[i], x[i]) {
            (Amp::Zero, _) => 0.0,
            (_, Some(v)) => (solution[v] / hi[i]).clamp(0.0, 1.0),
            _ => 1.0,
        })
        .collect();
    Ok(Some(Relaxation {
        value: factor * (solution.objective() + constant),
        relaxed_solution: relaxed,
    }))
}
