//! File-producing entry points behind the command-line tool.
//!
//! Each function loads or generates a scenario, runs one job and writes its
//! artifacts into an output directory. They are plain library calls, so
//! scripts can drive them without going through the binary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::activation::ActivationProblem;
use crate::error::{Error, Result};
use crate::link_budget::{discretize, write_energy_csv, SlotPlan};
use crate::propagation::{channel, waveguide_response, Activation};
use crate::scenario::{
    generate_scenario, load_scenario, watts_to_dbm, PhysicsConfig, Point, Scenario, ScenarioOptions, WaveguideConfig,
};

use super::{
    mimo_gain, mimo_required_power, plan_tour, run_dlo_multi, sweep, trace_rows, write_trace_csv, Activator, DloOutput,
    ExperimentResult, MimoConfig, PlannedTour, Planner, StrategyParams, SweepConfig, SweepVariable,
};

/// Where the scenario comes from, plus command-line overrides.
#[derive(Debug, Clone)]
pub struct ScenarioSource {
    /// Scenario file; when absent one is generated from `seed`.
    pub path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub nodes: usize,
    pub pa_count: Option<usize>,
    pub rate_threshold: Option<f64>,
    pub delta: Option<f64>,
    pub slot_seconds: Option<f64>,
}

impl Default for ScenarioSource {
    fn default() -> Self {
        Self {
            path: None,
            seed: None,
            nodes: 10,
            pa_count: None,
            rate_threshold: None,
            delta: None,
            slot_seconds: None,
        }
    }
}

impl ScenarioSource {
    pub fn generated(seed: u64, nodes: usize) -> Self {
        Self {
            seed: Some(seed),
            nodes,
            ..Self::default()
        }
    }

    fn physics(&self, base: &PhysicsConfig) -> PhysicsConfig {
        PhysicsConfig::new(
            base.carrier_frequency_hz,
            base.noise_power_dbm,
            base.refraction_index,
            self.rate_threshold.unwrap_or(base.rate_threshold_bps_hz),
            self.delta.unwrap_or(base.radiation_constant),
        )
    }

    /// Generator options with the overrides applied.
    pub fn options(&self) -> ScenarioOptions {
        let defaults = ScenarioOptions::default();
        ScenarioOptions {
            physics: self.physics(&defaults.physics),
            pa_count: self.pa_count.unwrap_or(defaults.pa_count),
            slot_seconds: self.slot_seconds.unwrap_or(defaults.slot_seconds),
            ..defaults
        }
    }

    pub fn load(&self) -> Result<Scenario> {
        if self.pa_count == Some(0) {
            return Err(Error::InvalidConfig("pa_count must be at least 1".into()));
        }
        if let Some(tau) = self.slot_seconds {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::InvalidConfig(format!("slot length {tau} must be positive")));
            }
        }
        let scenario = match &self.path {
            Some(path) => {
                let mut s = load_scenario(path)?;
                s.physics = self.physics(&s.physics);
                if let Some(k) = self.pa_count {
                    let wg = &s.waveguide;
                    s.waveguide = WaveguideConfig::uniform(wg.y_m, wg.z_m, wg.span_m, wg.feed_x_m, k);
                }
                if let Some(tau) = self.slot_seconds {
                    s.slot_seconds = tau;
                }
                if let Some(seed) = self.seed {
                    s.rng_seed = seed;
                }
                s
            }
            None => generate_scenario(self.seed.unwrap_or(0), self.nodes, &self.options())?,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Process exit status for an error: 2 for bad input, 3 for an infeasible
/// slot, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::Parse { .. } | Error::SizeGuard { .. } | Error::Invariant(_) => 2,
        Error::InfeasibleSlot { .. } => 3,
        _ => 1,
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidConfig("thread count must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Parses `planner:act1,act2,...`.
pub fn parse_strategy_list(s: &str) -> Result<(Planner, Vec<Activator>)> {
    let (p, acts) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidConfig(format!("strategy {s:?} must look like planner:activator")))?;
    let activators = acts
        .split(',')
        .map(|a| a.trim().parse())
        .collect::<Result<Vec<Activator>>>()?;
    Ok((p.trim().parse()?, activators))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, dir: &Path, name: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(dir.join(name), e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let mut w = create(dir, name)?;
    w.write_all(text.as_bytes()).map_err(|e| Error::io(dir.join(name), e))?;
    finish(w, dir, name)
}

fn write_tour(dir: &Path, scenario: &Scenario, planned_order: &[usize], distance_m: f64) -> Result<()> {
    #[derive(Serialize)]
    struct TourFile<'a> {
        order: &'a [usize],
        total_distance_m: f64,
        waypoints_m: Vec<Point>,
    }
    let mut waypoints_m = vec![scenario.station_m];
    waypoints_m.extend(planned_order.iter().map(|&i| scenario.nodes[i].position_m));
    waypoints_m.push(scenario.station_m);
    let file = TourFile {
        order: planned_order,
        total_distance_m: distance_m,
        waypoints_m,
    };
    let text = serde_json::to_string_pretty(&file).expect("tour serialization") + "\n";
    write_text(dir, "tour.json", &text)
}

/// Writes `tour.json` and `plan_trace.csv` (iteration, best distance).
pub fn plan(source: &ScenarioSource, planner: Planner, params: &StrategyParams, out_dir: &Path) -> Result<PlannedTour> {
    let scenario = source.load()?;
    let planned = plan_tour(&scenario, planner, params)?;
    ensure_dir(out_dir)?;
    write_tour(out_dir, &scenario, &planned.tour.order, planned.tour.total_distance_m)?;

    let name = "plan_trace.csv";
    let mut w = csv::Writer::from_writer(create(out_dir, name)?);
    w.write_record(["iteration", "best_distance_m"])?;
    for (i, d) in planned.trace.iter().enumerate() {
        w.write_record([i.to_string(), d.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(out_dir.join(name), e))?;
    Ok(planned)
}

/// Where to evaluate an activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivateTarget {
    Position(Point),
    /// Slot of the plan produced by `planner` on the same scenario.
    Slot {
        planner: Planner,
        index: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivationSummary {
    pub uav_position_m: Point,
    pub activator: Activator,
    /// `None` for the array baseline.
    pub activation: Option<Activation>,
    pub gain: f64,
    pub power_w: f64,
}

impl ActivationSummary {
    pub fn active_count(&self) -> Option<usize> {
        self.activation.as_ref().map(Activation::count)
    }

    pub fn power_dbm(&self) -> f64 {
        watts_to_dbm(self.power_w)
    }
}

impl std::fmt::Display for ActivationSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [x, y, z] = self.uav_position_m;
        writeln!(f, "position   ({x:.3}, {y:.3}, {z:.3}) m")?;
        writeln!(f, "strategy   {}", self.activator)?;
        match &self.activation {
            Some(a) => {
                writeln!(f, "activation {a}")?;
                writeln!(f, "K_a        {}", a.count())?;
            }
            None => writeln!(f, "activation n/a (array baseline)")?,
        }
        writeln!(f, "gain       {:.6e}", self.gain)?;
        write!(f, "power      {:.6e} W ({:.3} dBm)", self.power_w, self.power_dbm())
    }
}

pub fn activate(
    source: &ScenarioSource,
    activator: Activator,
    params: &StrategyParams,
    target: ActivateTarget,
) -> Result<ActivationSummary> {
    let scenario = source.load()?;
    let pos = match target {
        ActivateTarget::Position(p) => p,
        ActivateTarget::Slot { planner, index } => {
            let planned = plan_tour(&scenario, planner, params)?;
            let slots = discretize(&scenario, &planned.tour);
            slots
                .slots
                .get(index)
                .ok_or_else(|| {
                    Error::InvalidConfig(format!("slot {index} out of range; plan has {}", slots.total_slots()))
                })?
                .uav_position_m
        }
    };
    if activator == Activator::Mimo {
        let mimo = params
            .mimo
            .clone()
            .unwrap_or_else(|| MimoConfig::for_wavelength(scenario.physics.wavelength_m));
        return Ok(ActivationSummary {
            uav_position_m: pos,
            activator,
            activation: None,
            gain: mimo_gain(&scenario, &mimo, pos)?,
            power_w: mimo_required_power(&scenario, &mimo, pos)?,
        });
    }
    let a = super::activate_at(&scenario, activator, params, pos)?;
    let h = channel(&scenario, pos)?;
    let problem = ActivationProblem::new(&scenario, &h, &waveguide_response(&scenario));
    let gain = problem.gain(&a);
    if !(gain > 0.0) {
        return Err(Error::InfeasibleSlot { slot: 0 });
    }
    Ok(ActivationSummary {
        uav_position_m: pos,
        activator,
        power_w: problem.required_power(&a),
        gain,
        activation: Some(a),
    })
}

fn write_slots_csv(plan: &SlotPlan, dir: &Path) -> Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        slot_index: usize,
        mode: &'a str,
        x: f64,
        y: f64,
        z: f64,
        node: Option<usize>,
    }
    let name = "slots.csv";
    let mut w = csv::Writer::from_writer(create(dir, name)?);
    for (l, s) in plan.slots.iter().enumerate() {
        let [x, y, z] = s.uav_position_m;
        w.serialize(Row {
            slot_index: l,
            mode: s.mode.as_str(),
            x,
            y,
            z,
            node: s.node_index,
        })?;
    }
    w.flush().map_err(|e| Error::io(dir.join(name), e))
}

/// One full run. Writes `tour.json`, `slots.csv`, `energy.csv` (every
/// activator) and `trace_distance.csv` (first activator).
pub fn simulate(
    source: &ScenarioSource,
    planner: Planner,
    activators: &[Activator],
    params: &StrategyParams,
    out_dir: &Path,
) -> Result<DloOutput> {
    if activators.is_empty() {
        return Err(Error::InvalidConfig("simulate needs at least one activator".into()));
    }
    let scenario = source.load()?;
    let out = run_dlo_multi(&scenario, planner, activators, params)?;
    ensure_dir(out_dir)?;
    write_tour(out_dir, &scenario, &out.tour.order, out.tour.total_distance_m)?;
    write_slots_csv(&out.slot_plan, out_dir)?;

    let w = create(out_dir, "energy.csv")?;
    write_energy_csv(&out.slot_plan, &out.reports, w)?;

    let rows = trace_rows(&scenario, &out.slot_plan, out.report());
    let w = create(out_dir, "trace_distance.csv")?;
    write_trace_csv(&rows, w)?;
    Ok(out)
}

/// Default grid for each sweep variable.
pub fn default_sweep_values(variable: SweepVariable) -> Vec<f64> {
    match variable {
        SweepVariable::RateThreshold => vec![3.0, 4.0, 5.0, 6.0, 7.0],
        SweepVariable::PaCount => vec![4.0, 6.0, 8.0, 10.0, 12.0],
        SweepVariable::NodeCount => vec![4.0, 6.0, 8.0, 10.0, 12.0],
    }
}

/// Runs a sweep and writes `sweep_<variable>.csv`.
pub fn benchmark(cfg: &SweepConfig, out_dir: &Path) -> Result<ExperimentResult> {
    let result = sweep(cfg)?;
    ensure_dir(out_dir)?;
    let name = format!("sweep_{}.csv", cfg.variable);
    let w = create(out_dir, &name)?;
    result.write_csv(w)?;
    Ok(result)
}
