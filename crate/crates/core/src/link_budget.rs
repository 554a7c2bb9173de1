//! Rates, minimum transmit power, slot discretization and cycle energy.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::{self, Activation};
use crate::route_planner::Tour;
use crate::scenario::{distance, Point, Scenario};

/// `log2(1 + p g / sigma^2)`.
pub fn achievable_rate(power_w: f64, gain: f64, noise_w: f64) -> f64 {
    (power_w * gain / noise_w).ln_1p() / std::f64::consts::LN_2
}

/// Smallest power meeting `rate_threshold` at `gain`. Infinite when `gain == 0`.
pub fn required_power(gain: f64, rate_threshold: f64, noise_w: f64) -> f64 {
    if gain <= 0.0 {
        return f64::INFINITY;
    }
    (rate_threshold.exp2() - 1.0) * noise_w / gain
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Flying,
    Hovering,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Flying => "flying",
            Mode::Hovering => "hovering",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub uav_position_m: Point,
    pub mode: Mode,
    /// Node being served; set on hovering slots only.
    pub node_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotPlan {
    pub slots: Vec<Slot>,
    pub slot_seconds: f64,
}

impl SlotPlan {
    pub fn total_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn flying_slots(&self) -> usize {
        self.slots.iter().filter(|s| s.mode == Mode::Flying).count()
    }
}

/// `ceil(length / step)` with a guard against `0.0 / step` rounding up.
fn slot_count(length: f64, step: f64) -> usize {
    if length <= 0.0 {
        0
    } else {
        (length / step).ceil() as usize
    }
}

pub fn hover_slots(task_count: u32, delivery_speed_tps: f64, slot_seconds: f64) -> usize {
    slot_count(f64::from(task_count), delivery_speed_tps * slot_seconds)
}

/// Slot count from the closed-form ceiling sum, without building the plan.
pub fn expected_slot_count(scenario: &Scenario, tour: &Tour) -> usize {
    let step = scenario.flight_speed_mps * scenario.slot_seconds;
    let waypoints = tour.waypoints(scenario);
    let flying: usize = waypoints
        .windows(2)
        .map(|w| slot_count(distance(&w[0], &w[1]), step))
        .sum();
    let hovering: usize = tour
        .order
        .iter()
        .map(|&m| {
            hover_slots(
                scenario.nodes[m].task_count,
                scenario.delivery_speed_tps,
                scenario.slot_seconds,
            )
        })
        .sum();
    flying + hovering
}

/// Piecewise-constant flight schedule for `tour`.
///
/// Each straight segment takes `ceil(D / (v_f tau))` flying slots, each
/// located where the UAV is at the end of the slot (clamped to the segment
/// endpoint). The last flying slot of a leg therefore sits on the node, so
/// the hovering slots that follow share its position.
pub fn discretize(scenario: &Scenario, tour: &Tour) -> SlotPlan {
    let step = scenario.flight_speed_mps * scenario.slot_seconds;
    let waypoints = tour.waypoints(scenario);
    let mut slots = Vec::new();
    for (leg, w) in waypoints.windows(2).enumerate() {
        let (from, to) = (w[0], w[1]);
        let length = distance(&from, &to);
        let n = slot_count(length, step);
        for j in 0..n {
            let travelled = (j + 1) as f64 * step;
            let position = if j + 1 == n || travelled >= length {
                to
            } else {
                let t = travelled / length;
                [
                    from[0] + t * (to[0] - from[0]),
                    from[1] + t * (to[1] - from[1]),
                    from[2] + t * (to[2] - from[2]),
                ]
            };
            slots.push(Slot {
                uav_position_m: position,
                mode: Mode::Flying,
                node_index: None,
            });
        }
        // Legs 0..M-1 end at a delivery node; the last leg returns home.
        if let Some(&node) = tour.order.get(leg) {
            let hover = hover_slots(
                scenario.nodes[node].task_count,
                scenario.delivery_speed_tps,
                scenario.slot_seconds,
            );
            slots.extend((0..hover).map(|_| Slot {
                uav_position_m: scenario.nodes[node].position_m,
                mode: Mode::Hovering,
                node_index: Some(node),
            }));
        }
    }
    SlotPlan {
        slots,
        slot_seconds: scenario.slot_seconds,
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub strategy_name: String,
    pub per_slot_power_w: Vec<f64>,
    pub total_energy_j: f64,
    pub per_slot_activation: Vec<Activation>,
    /// Effective gain per slot (diagnostic; rate check uses it).
    pub per_slot_gain: Vec<f64>,
}

impl EnergyReport {
    /// Assemble a report from per-slot powers; totals use compensated summation.
    pub fn from_slots(
        strategy_name: impl Into<String>,
        slot_seconds: f64,
        per_slot_power_w: Vec<f64>,
        per_slot_gain: Vec<f64>,
        per_slot_activation: Vec<Activation>,
    ) -> Self {
        let total_energy_j = compensated_sum(per_slot_power_w.iter().map(|p| p * slot_seconds));
        Self {
            strategy_name: strategy_name.into(),
            per_slot_power_w,
            total_energy_j,
            per_slot_activation,
            per_slot_gain,
        }
    }

    /// Rate actually delivered in each slot at the reported power.
    pub fn realized_rates(&self, noise_w: f64) -> Vec<f64> {
        self.per_slot_power_w
            .iter()
            .zip(&self.per_slot_gain)
            .map(|(&p, &g)| achievable_rate(p, g, noise_w))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, plan: &SlotPlan, out: W) -> Result<()> {
        write_energy_csv(plan, std::slice::from_ref(self), out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Per-slot rows for several strategies on one plan, strategy-major.
pub fn write_energy_csv<W: Write>(plan: &SlotPlan, reports: &[EnergyReport], out: W) -> Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        slot_index: usize,
        mode: &'a str,
        x: f64,
        y: f64,
        z: f64,
        strategy: &'a str,
        #[serde(rename = "K_a")]
        k_a: usize,
        power_w: f64,
    }
    let mut w = csv::Writer::from_writer(out);
    for report in reports {
        for (l, slot) in plan.slots.iter().enumerate() {
            w.serialize(Row {
                slot_index: l,
                mode: slot.mode.as_str(),
                x: slot.uav_position_m[0],
                y: slot.uav_position_m[1],
                z: slot.uav_position_m[2],
                strategy: &report.strategy_name,
                k_a: report.per_slot_activation[l].count(),
                power_w: report.per_slot_power_w[l],
            })?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Cycle energy for a fixed activation per slot.
pub fn cycle_energy(
    scenario: &Scenario,
    plan: &SlotPlan,
    activation_per_slot: &[Activation],
    strategy_name: &str,
) -> Result<EnergyReport> {
    if activation_per_slot.len() != plan.total_slots() {
        return Err(Error::InvalidConfig(format!(
            "{} activations for {} slots",
            activation_per_slot.len(),
            plan.total_slots()
        )));
    }
    let response = propagation::waveguide_response(scenario);
    let physics = &scenario.physics;
    let mut powers = Vec::with_capacity(plan.total_slots());
    let mut gains = Vec::with_capacity(plan.total_slots());
    for (l, (slot, activation)) in plan.slots.iter().zip(activation_per_slot).enumerate() {
        let h = propagation::channel(scenario, slot.uav_position_m)?;
        let gain = propagation::activation_gain(scenario, &h, &response, activation);
        if gain <= 0.0 {
            return Err(Error::InfeasibleSlot { slot: l });
        }
        powers.push(required_power(
            gain,
            physics.rate_threshold_bps_hz,
            physics.noise_power_w,
        ));
        gains.push(gain);
    }
    Ok(EnergyReport::from_slots(
        strategy_name,
        plan.slot_seconds,
        powers,
        gains,
        activation_per_slot.to_vec(),
    ))
}
