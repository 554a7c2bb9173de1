use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::propagation::Activation;

use super::relaxation::{relax_upper_bound, SearchBox};
use super::ActivationProblem;

/// Global bounds after one pop of the best box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSnapshot {
    pub global_upper: f64,
    pub global_lower: f64,
}

/// A box discarded because its bound could not beat the incumbent.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedBox {
    pub lower: Vec<bool>,
    pub upper: Vec<bool>,
    pub upper_bound_value: f64,
}

#[derive(Debug, Clone)]
pub struct BnbResult {
    pub activation: Activation,
    pub objective: f64,
    pub trace: Vec<BoundSnapshot>,
    /// Boxes whose relaxation was solved, root included.
    pub nodes_explored: usize,
    pub pruned: Vec<PrunedBox>,
}

struct Queued {
    bound: f64,
    seq: usize,
    b: SearchBox,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    // Max-heap on the bound; older boxes first among equals.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Round the relaxed point into the box: free antennas switch on at 0.5.
/// An all-zero result falls back to the strongest free or forced antenna.
fn project(b: &SearchBox, relaxed: &[f64]) -> Vec<bool> {
    let mut bits: Vec<bool> = (0..relaxed.len())
        .map(|k| if b.is_fixed(k) { b.lower[k] } else { relaxed[k] >= 0.5 })
        .collect();
    if !bits.iter().any(|&x| x) {
        let pick = (0..relaxed.len())
            .filter(|&k| b.upper[k])
            .max_by(|&i, &j| relaxed[i].total_cmp(&relaxed[j]).then(j.cmp(&i)))
            .expect("box is not zero-only");
        bits[pick] = true;
    }
    bits
}

/// Exact activation by best-first branch and bound.
///
/// Stops once the best open bound is within `tolerance` of the incumbent
/// (absolute, on the objective). With `tolerance = 0` the result is the global
/// optimum up to LP round-off.
pub fn bnb_optimize(problem: &ActivationProblem, tolerance: f64) -> Result<BnbResult> {
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance {tolerance} must be >= 0")));
    }
    let k = problem.antenna_count();
    if k == 0 {
        return Err(Error::InvalidConfig("no antennas to activate".into()));
    }
    let rho = problem.rho();
    let mut incumbent = problem.best_single();
    let mut best = problem.objective(&incumbent);
    let mut trace = Vec::new();
    let mut pruned = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let mut nodes = 0;

    let offer = |bits: Vec<bool>, incumbent: &mut Activation, best: &mut f64| {
        let value = rho * problem.gain_bits(&bits);
        if value > *best {
            *best = value;
            *incumbent = Activation::from_bits(bits);
        }
    };

    let mut root = SearchBox::root(k);
    let r = relax_upper_bound(problem, &root)?.expect("root box holds nonzero vectors");
    nodes += 1;
    root.upper_bound_value = r.value;
    offer(project(&root, &r.relaxed_solution), &mut incumbent, &mut best);
    root.relaxed_solution = r.relaxed_solution;
    heap.push(Queued {
        bound: root.upper_bound_value,
        seq,
        b: root,
    });

    while let Some(Queued { bound, b, .. }) = heap.pop() {
        let global_upper = bound.max(best);
        trace.push(BoundSnapshot {
            global_upper,
            global_lower: best,
        });
        if global_upper - best <= tolerance {
            // Everything still open is dominated by the incumbent.
            pruned.push(PrunedBox {
                lower: b.lower,
                upper: b.upper,
                upper_bound_value: bound,
            });
            pruned.extend(heap.drain().map(|q| PrunedBox {
                lower: q.b.lower,
                upper: q.b.upper,
                upper_bound_value: q.bound,
            }));
            break;
        }
        if bound <= best {
            pruned.push(PrunedBox {
                lower: b.lower.clone(),
                upper: b.upper.clone(),
                upper_bound_value: bound,
            });
            continue;
        }
        let Some(edge) = b.first_free() else { continue };
        for on in [false, true] {
            let mut child = b.fix(edge, on);
            let Some(r) = relax_upper_bound(problem, &child)? else {
                continue;
            };
            nodes += 1;
            // Children are nested in the parent; keep their bounds nested too.
            child.upper_bound_value = r.value.min(bound);
            offer(project(&child, &r.relaxed_solution), &mut incumbent, &mut best);
            child.relaxed_solution = r.relaxed_solution;
            if child.fully_fixed() {
                continue;
            }
            if child.upper_bound_value <= best {
                pruned.push(PrunedBox {
                    lower: child.lower,
                    upper: child.upper,
                    upper_bound_value: child.upper_bound_value,
                });
                continue;
            }
            seq += 1;
            heap.push(Queued {
                bound: child.upper_bound_value,
                seq,
                b: child,
            });
        }
    }
    if trace.last().is_none_or(|t| t.global_upper > best) {
        trace.push(BoundSnapshot {
            global_upper: best,
            global_lower: best,
        });
    }

    Ok(BnbResult {
        activation: incumbent,
        objective: best,
        trace,
        nodes_explored: nodes,
        pruned,
    })
}
