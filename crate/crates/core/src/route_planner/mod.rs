//! Outer layer: delivery-sequence planning.
//!
//! The tour is a closed loop station -> nodes -> station, so the planning
//! problem is a Euclidean TSP with a fixed depot. [`hao_plan`] alternates a
//! genetic search ([`ga_explore`]) with exact dynamic programming on short
//! windows of each candidate ([`dp_refine`]). [`held_karp`] and
//! [`nearest_neighbor`] serve as the exact oracle and greedy baseline.

mod exact;
mod ga;
mod hao;
mod refine;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{distance, Point, Scenario};

pub use exact::{held_karp, nearest_neighbor, HELD_KARP_MAX_NODES};
pub use ga::{ga_explore, inversion_mutation, ordered_crossover, GaConfig, GaRun};
pub use hao::{hao_plan, HaoConfig, HaoRun};
pub use refine::{dp_refine, shortest_fixed_path};

/// A delivery order with its cached loop length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    /// Zero-based node indices in visiting order.
    pub order: Vec<usize>,
    pub total_distance_m: f64,
}

impl Tour {
    pub fn new(scenario: &Scenario, order: Vec<usize>) -> Self {
        let total_distance_m = tour_distance(scenario, &order);
        Tour {
            order,
            total_distance_m,
        }
    }

    /// Station, nodes in order, station.
    pub fn waypoints(&self, scenario: &Scenario) -> Vec<Point> {
        std::iter::once(scenario.station_m)
            .chain(self.order.iter().map(|&m| scenario.nodes[m].position_m))
            .chain(std::iter::once(scenario.station_m))
            .collect()
    }

    pub fn fitness(&self) -> f64 {
        1.0 / self.total_distance_m
    }

    pub fn validate(&self, node_count: usize) -> Result<()> {
        if is_permutation(&self.order, node_count) {
            Ok(())
        } else {
            Err(Error::Invariant(format!(
                "tour order is not a permutation of 0..{node_count}"
            )))
        }
    }
}

pub fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Closed-loop length: station -> order[0] -> ... -> order[M-1] -> station.
pub fn tour_distance(scenario: &Scenario, order: &[usize]) -> f64 {
    let station = &scenario.station_m;
    let Some((&first, &last)) = order.first().zip(order.last()) else {
        return 0.0;
    };
    let inner: f64 = order
        .windows(2)
        .map(|w| distance(&scenario.nodes[w[0]].position_m, &scenario.nodes[w[1]].position_m))
        .sum();
    distance(station, &scenario.nodes[first].position_m) + inner + distance(&scenario.nodes[last].position_m, station)
}

/// Reciprocal of the loop length.
pub fn fitness(scenario: &Scenario, order: &[usize]) -> f64 {
    1.0 / tour_distance(scenario, order)
}

/// Symmetric distance table over nodes `0..M` plus the station at index `M`.
pub(crate) fn distance_table(scenario: &Scenario) -> Vec<Vec<f64>> {
    let points: Vec<Point> = scenario
        .nodes
        .iter()
        .map(|n| n.position_m)
        .chain(std::iter::once(scenario.station_m))
        .collect();
    points
        .iter()
        .map(|a| points.iter().map(|b| distance(a, b)).collect())
        .collect()
}
