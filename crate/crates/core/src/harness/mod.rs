//! Full double-layer runs, baselines and benchmark sweeps.
//!
//! [`run_dlo`] plans a tour, discretizes it into slots and picks an
//! activation per slot. Hovering slots reuse the previous slot's activation.
//! [`run_dlo_multi`] evaluates several activators on one shared plan.

pub mod commands;
mod sweep;
mod trace;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::activation::{
    bnb_optimize, default_k_prime, exhaustive_best, full_activation, islr_optimize, ActivationProblem,
};
use crate::error::{Error, Result};
use crate::link_budget::{cycle_energy, discretize, required_power, EnergyReport, Mode, SlotPlan};
use crate::propagation::{channel, free_space_gain, waveguide_response, Activation, MIN_LINK_DISTANCE_M};
use crate::rng::{self, Stream};
use crate::route_planner::{ga_explore, hao_plan, held_karp, nearest_neighbor, GaConfig, HaoConfig, Tour};
use crate::scenario::{distance, Point, Scenario};

pub use sweep::{sweep, CellFailure, ExperimentResult, SweepConfig, SweepVariable};
pub use trace::{distance_energy_trace, spearman, trace_rows, write_trace_csv, TraceRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Planner {
    Hao,
    GaOnly,
    NearestNeighbor,
    HeldKarp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activator {
    Bnb,
    Islr,
    Full,
    Exhaustive,
    Mimo,
}

impl Planner {
    pub const ALL: [Planner; 4] = [
        Planner::Hao,
        Planner::GaOnly,
        Planner::NearestNeighbor,
        Planner::HeldKarp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Planner::Hao => "hao",
            Planner::GaOnly => "ga_only",
            Planner::NearestNeighbor => "nearest_neighbor",
            Planner::HeldKarp => "held_karp",
        }
    }
}

impl Activator {
    pub const ALL: [Activator; 5] = [
        Activator::Bnb,
        Activator::Islr,
        Activator::Full,
        Activator::Exhaustive,
        Activator::Mimo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Activator::Bnb => "bnb",
            Activator::Islr => "islr",
            Activator::Full => "full",
            Activator::Exhaustive => "exhaustive",
            Activator::Mimo => "mimo",
        }
    }
}

fn parse_named<T: Copy>(s: &str, all: &[T], name: impl Fn(T) -> &'static str, what: &str) -> Result<T> {
    all.iter().copied().find(|&v| name(v) == s).ok_or_else(|| {
        let options: Vec<&str> = all.iter().map(|&v| name(v)).collect();
        Error::InvalidConfig(format!("unknown {what} {s:?}; expected one of {}", options.join(", ")))
    })
}

impl FromStr for Planner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_named(s, &Planner::ALL, Planner::as_str, "planner")
    }
}

impl FromStr for Activator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_named(s, &Activator::ALL, Activator::as_str, "activator")
    }
}

impl fmt::Display for Planner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Activator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Conventional array baseline: a uniform linear array along +x.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoConfig {
    pub element_count: usize,
    pub spacing_m: f64,
    pub array_origin_m: Point,
}

impl MimoConfig {
    /// Ten half-wavelength elements starting at `(0, 0, 5)`.
    pub fn for_wavelength(wavelength_m: f64) -> Self {
        Self {
            element_count: 10,
            spacing_m: wavelength_m / 2.0,
            array_origin_m: [0.0, 0.0, 5.0],
        }
    }

    pub fn element_position(&self, n: usize) -> Point {
        let o = self.array_origin_m;
        [o[0] + n as f64 * self.spacing_m, o[1], o[2]]
    }
}

/// Array gain `sum_n |h_n|^2` under maximum-ratio transmission.
pub fn mimo_gain(scenario: &Scenario, mimo: &MimoConfig, uav_position_m: Point) -> Result<f64> {
    let lambda = scenario.physics.wavelength_m;
    (0..mimo.element_count)
        .map(|n| {
            let d = distance(&uav_position_m, &mimo.element_position(n));
            if d < MIN_LINK_DISTANCE_M {
                Err(Error::DegenerateGeometry {
                    antenna: n,
                    distance_m: d,
                })
            } else {
                Ok(free_space_gain(lambda, d).norm_sqr())
            }
        })
        .sum()
}

pub fn mimo_required_power(scenario: &Scenario, mimo: &MimoConfig, uav_position_m: Point) -> Result<f64> {
    let gain = mimo_gain(scenario, mimo, uav_position_m)?;
    let physics = &scenario.physics;
    Ok(required_power(
        gain,
        physics.rate_threshold_bps_hz,
        physics.noise_power_w,
    ))
}

/// Tunables shared by every strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyParams {
    pub ga: GaConfig,
    pub hao: HaoConfig,
    /// Absolute BnB gap on the objective.
    pub tolerance: f64,
    /// ISLR high-set size; `None` means `ceil(K / 2)`.
    pub k_prime: Option<usize>,
    /// Optimize hovering slots instead of copying the previous activation.
    pub reoptimize_hover: bool,
    /// Array baseline; `None` derives the default from the scenario wavelength.
    pub mimo: Option<MimoConfig>,
}

impl Default for StrategyParams {
    fn default() -> Self {
        Self {
            ga: GaConfig::default(),
            hao: HaoConfig::default(),
            tolerance: 1e-9,
            k_prime: None,
            reoptimize_hover: false,
            mimo: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpec {
    pub planner: Planner,
    pub activator: Activator,
    pub params: StrategyParams,
}

impl StrategySpec {
    pub fn new(planner: Planner, activator: Activator) -> Self {
        Self {
            planner,
            activator,
            params: StrategyParams::default(),
        }
    }

    /// `planner+activator`, e.g. `hao+bnb`.
    pub fn name(&self) -> String {
        format!("{}+{}", self.planner, self.activator)
    }
}

/// Parses `planner:activator`.
impl FromStr for StrategySpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (p, a) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidConfig(format!("strategy {s:?} must look like planner:activator")))?;
        Ok(Self::new(p.trim().parse()?, a.trim().parse()?))
    }
}

/// Tour plus the planner's best-distance trace (per HAO iteration or GA
/// generation; a single entry for the deterministic planners).
#[derive(Debug, Clone)]
pub struct PlannedTour {
    pub tour: Tour,
    pub trace: Vec<f64>,
}

/// Outer layer only. The genetic planners draw from the scenario seed.
pub fn plan_tour(scenario: &Scenario, planner: Planner, params: &StrategyParams) -> Result<PlannedTour> {
    scenario.validate()?;
    let mut rng = rng::stream(scenario.rng_seed, Stream::Genetic);
    match planner {
        Planner::Hao => {
            let run = hao_plan(scenario, &params.ga, &params.hao, &mut rng)?;
            Ok(PlannedTour {
                tour: run.best,
                trace: run.trace,
            })
        }
        Planner::GaOnly => {
            let run = ga_explore(scenario, &params.ga, &[], &mut rng)?;
            Ok(PlannedTour {
                tour: run.candidates[0].clone(),
                trace: run.best_per_generation,
            })
        }
        Planner::NearestNeighbor => {
            let tour = nearest_neighbor(scenario, None);
            let trace = vec![tour.total_distance_m];
            Ok(PlannedTour { tour, trace })
        }
        Planner::HeldKarp => {
            let tour = held_karp(scenario)?;
            let trace = vec![tour.total_distance_m];
            Ok(PlannedTour { tour, trace })
        }
    }
}

/// Activation for one UAV position.
pub fn activate_at(
    scenario: &Scenario,
    activator: Activator,
    params: &StrategyParams,
    uav_position_m: Point,
) -> Result<Activation> {
    let h = channel(scenario, uav_position_m)?;
    let problem = ActivationProblem::new(scenario, &h, &waveguide_response(scenario));
    let k = scenario.pa_count();
    match activator {
        Activator::Bnb => Ok(bnb_optimize(&problem, params.tolerance)?.activation),
        Activator::Islr => {
            let k_prime = params.k_prime.unwrap_or_else(|| default_k_prime(k));
            Ok(islr_optimize(&problem, k_prime)?.activation)
        }
        Activator::Full => Ok(full_activation(k)),
        Activator::Exhaustive => exhaustive_best(&problem),
        Activator::Mimo => Err(Error::InvalidConfig(
            "the array baseline has no antenna activation".into(),
        )),
    }
}

/// Slots that get their own optimization: all flying slots, plus hovering
/// slots with nothing to copy from (or all of them on request).
fn optimized_slots(plan: &SlotPlan, reoptimize_hover: bool) -> Vec<bool> {
    plan.slots
        .iter()
        .enumerate()
        .map(|(l, s)| s.mode == Mode::Flying || reoptimize_hover || l == 0)
        .collect()
}

/// Per-slot energy of `activator` on a fixed plan.
pub fn evaluate_plan(
    scenario: &Scenario,
    plan: &SlotPlan,
    activator: Activator,
    params: &StrategyParams,
    name: &str,
) -> Result<EnergyReport> {
    if activator == Activator::Mimo {
        let mimo = params
            .mimo
            .clone()
            .unwrap_or_else(|| MimoConfig::for_wavelength(scenario.physics.wavelength_m));
        let gains = plan
            .slots
            .par_iter()
            .map(|s| mimo_gain(scenario, &mimo, s.uav_position_m))
            .collect::<Result<Vec<f64>>>()?;
        let physics = &scenario.physics;
        let powers = gains
            .iter()
            .map(|&g| required_power(g, physics.rate_threshold_bps_hz, physics.noise_power_w))
            .collect();
        let acts = vec![Activation::ones(mimo.element_count); plan.total_slots()];
        return Ok(EnergyReport::from_slots(name, plan.slot_seconds, powers, gains, acts));
    }

    let fresh = optimized_slots(plan, params.reoptimize_hover);
    let solved: Vec<Option<Activation>> = plan
        .slots
        .par_iter()
        .zip(&fresh)
        .map(|(slot, &own)| {
            own.then(|| activate_at(scenario, activator, params, slot.uav_position_m))
                .transpose()
        })
        .collect::<Result<_>>()?;
    let mut acts: Vec<Activation> = Vec::with_capacity(solved.len());
    for a in solved {
        let a = a.unwrap_or_else(|| acts.last().expect("slot 0 is always optimized").clone());
        acts.push(a);
    }
    cycle_energy(scenario, plan, &acts, name)
}

/// Result of one double-layer run.
#[derive(Debug, Clone)]
pub struct DloOutput {
    pub tour: Tour,
    pub planner_trace: Vec<f64>,
    pub slot_plan: SlotPlan,
    /// One report per requested activator, in request order.
    pub reports: Vec<EnergyReport>,
}

impl DloOutput {
    pub fn report(&self) -> &EnergyReport {
        &self.reports[0]
    }
}

pub fn run_dlo(scenario: &Scenario, spec: &StrategySpec) -> Result<DloOutput> {
    run_dlo_multi(scenario, spec.planner, &[spec.activator], &spec.params)
}

/// One plan, several activators.
pub fn run_dlo_multi(
    scenario: &Scenario,
    planner: Planner,
    activators: &[Activator],
    params: &StrategyParams,
) -> Result<DloOutput> {
    let planned = plan_tour(scenario, planner, params)?;
    let slot_plan = discretize(scenario, &planned.tour);
    let reports = activators
        .iter()
        .map(|&a| {
            let name = format!("{planner}+{a}");
            evaluate_plan(scenario, &slot_plan, a, params, &name)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DloOutput {
        tour: planned.tour,
        planner_trace: planned.trace,
        slot_plan,
        reports,
    })
}
