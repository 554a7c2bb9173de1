use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::link_budget::{discretize, SlotPlan};
use crate::route_planner::Tour;
use crate::scenario::{generate_scenario, Scenario, ScenarioOptions};

use super::{evaluate_plan, plan_tour, Planner, StrategyParams, StrategySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    RateThreshold,
    PaCount,
    NodeCount,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::RateThreshold => "rate_threshold",
            SweepVariable::PaCount => "pa_count",
            SweepVariable::NodeCount => "node_count",
        }
    }

    /// Whether the tour depends on the swept value.
    fn changes_geometry(self) -> bool {
        self == SweepVariable::NodeCount
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rate_threshold" | "rth" => Ok(SweepVariable::RateThreshold),
            "pa_count" => Ok(SweepVariable::PaCount),
            "node_count" | "nodes" => Ok(SweepVariable::NodeCount),
            _ => Err(Error::InvalidConfig(format!(
                "unknown sweep variable {s:?}; expected rate_threshold, pa_count or node_count"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub strategies: Vec<StrategySpec>,
    pub seeds: Vec<u64>,
    /// Node count when it is not the swept variable.
    pub node_count: usize,
    pub options: ScenarioOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub value: f64,
    pub strategy: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub sweep_variable: SweepVariable,
    pub sweep_values: Vec<f64>,
    pub strategy_names: Vec<String>,
    pub seeds: Vec<u64>,
    /// `[value][strategy][seed]` cycle energy in joules; `None` on failure.
    pub per_seed_energy_j: Vec<Vec<Vec<Option<f64>>>>,
    /// `[value][strategy]` mean over the seeds that succeeded (NaN if none).
    pub mean_energy_j: Vec<Vec<f64>>,
    pub failures: Vec<CellFailure>,
}

impl ExperimentResult {
    /// Long-format CSV, one row per (value, strategy).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            variable: &'a str,
            value: f64,
            strategy: &'a str,
            mean_energy_j: Option<f64>,
            mean_energy_mj: Option<f64>,
            runs: usize,
            failures: usize,
        }
        let mut w = csv::Writer::from_writer(out);
        for (v, value) in self.sweep_values.iter().enumerate() {
            for (s, name) in self.strategy_names.iter().enumerate() {
                let cells = &self.per_seed_energy_j[v][s];
                let runs = cells.iter().flatten().count();
                let mean = self.mean_energy_j[v][s];
                let mean = mean.is_finite().then_some(mean);
                w.serialize(Row {
                    variable: self.sweep_variable.as_str(),
                    value: *value,
                    strategy: name,
                    mean_energy_j: mean,
                    mean_energy_mj: mean.map(|e| e * 1e3),
                    runs,
                    failures: cells.len() - runs,
                })?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

fn integer_value(variable: SweepVariable, value: f64) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 {
        Ok(value as usize)
    } else {
        Err(Error::InvalidConfig(format!(
            "{variable} value {value} must be a positive integer"
        )))
    }
}

/// Scenario for one sweep cell.
fn cell_scenario(cfg: &SweepConfig, value: f64, seed: u64) -> Result<Scenario> {
    match cfg.variable {
        SweepVariable::RateThreshold => {
            let s = generate_scenario(seed, cfg.node_count, &cfg.options)?;
            let s = s.with_rate_threshold(value);
            s.physics.validate()?;
            Ok(s)
        }
        SweepVariable::PaCount => {
            let options = ScenarioOptions {
                pa_count: integer_value(cfg.variable, value)?,
                ..cfg.options.clone()
            };
            generate_scenario(seed, cfg.node_count, &options)
        }
        SweepVariable::NodeCount => generate_scenario(seed, integer_value(cfg.variable, value)?, &cfg.options),
    }
}

/// Runs every (value, strategy, seed) cell. Tours are planned once per
/// (geometry, planner) and shared by all activators and by values that do
/// not move the nodes. Failures are recorded per cell.
pub fn sweep(cfg: &SweepConfig) -> Result<ExperimentResult> {
    if cfg.values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one value".into()));
    }
    if cfg.strategies.is_empty() || cfg.seeds.is_empty() {
        return Err(Error::InvalidConfig("sweep needs strategies and seeds".into()));
    }

    // Planning jobs, keyed by (value index or 0, seed, planner).
    let mut plan_keys: BTreeMap<(usize, u64, Planner), &StrategyParams> = BTreeMap::new();
    for v in 0..cfg.values.len() {
        let geometry = if cfg.variable.changes_geometry() { v } else { 0 };
        for &seed in &cfg.seeds {
            for s in &cfg.strategies {
                plan_keys.entry((geometry, seed, s.planner)).or_insert(&s.params);
            }
        }
    }
    let plan_keys: Vec<_> = plan_keys.into_iter().collect();
    let tours: Vec<Result<Tour>> = plan_keys
        .par_iter()
        .map(|&((v, seed, planner), params)| {
            let scenario = cell_scenario(cfg, cfg.values[v], seed)?;
            Ok(plan_tour(&scenario, planner, params)?.tour)
        })
        .collect();
    let tour_of: BTreeMap<(usize, u64, Planner), &Result<Tour>> =
        plan_keys.iter().map(|(k, _)| *k).zip(&tours).collect();

    let mut jobs = Vec::new();
    for v in 0..cfg.values.len() {
        for s in 0..cfg.strategies.len() {
            for seed_idx in 0..cfg.seeds.len() {
                jobs.push((v, s, seed_idx));
            }
        }
    }
    let results: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(v, s, seed_idx)| {
            let spec = &cfg.strategies[s];
            let seed = cfg.seeds[seed_idx];
            let geometry = if cfg.variable.changes_geometry() { v } else { 0 };
            let tour = match tour_of[&(geometry, seed, spec.planner)] {
                Ok(t) => t,
                Err(e) => return Err(Error::Invariant(format!("planning failed: {e}"))),
            };
            let scenario = cell_scenario(cfg, cfg.values[v], seed)?;
            let plan: SlotPlan = discretize(&scenario, tour);
            let report = evaluate_plan(&scenario, &plan, spec.activator, &spec.params, &spec.name())?;
            Ok(report.total_energy_j)
        })
        .collect();

    let (n_v, n_s, n_seed) = (cfg.values.len(), cfg.strategies.len(), cfg.seeds.len());
    let mut per_seed = vec![vec![vec![None; n_seed]; n_s]; n_v];
    let mut failures = Vec::new();
    for (&(v, s, k), r) in jobs.iter().zip(results) {
        match r {
            Ok(e) => per_seed[v][s][k] = Some(e),
            Err(e) => failures.push(CellFailure {
                value: cfg.values[v],
                strategy: cfg.strategies[s].name(),
                seed: cfg.seeds[k],
                message: e.to_string(),
            }),
        }
    }
    let mean_energy_j = per_seed
        .iter()
        .map(|row| {
            row.iter()
                .map(|cells| {
                    let ok: Vec<f64> = cells.iter().flatten().copied().collect();
                    if ok.is_empty() {
                        f64::NAN
                    } else {
                        ok.iter().sum::<f64>() / ok.len() as f64
                    }
                })
                .collect()
        })
        .collect();

    Ok(ExperimentResult {
        sweep_variable: cfg.variable,
        sweep_values: cfg.values.clone(),
        strategy_names: cfg.strategies.iter().map(StrategySpec::name).collect(),
        seeds: cfg.seeds.clone(),
        per_seed_energy_j: per_seed,
        mean_energy_j,
        failures,
    })
}
