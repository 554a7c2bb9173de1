use rand::Rng;

use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::{dp_refine, ga_explore, GaConfig, Tour};

#[derive(Debug, Clone, PartialEq)]
pub struct HaoConfig {
    pub max_iterations: usize,
    /// Positions per DP window minus one.
    pub subpath_length: usize,
    /// Stop after this many iterations without improvement.
    pub patience: usize,
}

impl Default for HaoConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10,
            subpath_length: 3,
            patience: 3,
        }
    }
}

impl HaoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subpath_length < 2 {
            return Err(Error::InvalidConfig("subpath_length must be at least 2".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HaoRun {
    pub best: Tour,
    /// Best distance so far after each iteration.
    pub trace: Vec<f64>,
    /// GA candidates handed to the last refinement pass.
    pub final_candidates: Vec<Tour>,
}

impl HaoRun {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Alternate genetic exploration and window refinement. Refined candidates
/// seed the next genetic round as elites.
pub fn hao_plan(scenario: &Scenario, ga_cfg: &GaConfig, hao_cfg: &HaoConfig, rng: &mut impl Rng) -> Result<HaoRun> {
    ga_cfg.validate()?;
    hao_cfg.validate()?;
    if scenario.node_count() == 0 {
        return Err(Error::InvalidConfig("scenario has no delivery nodes".into()));
    }
    let mut best: Option<Tour> = None;
    let mut trace = Vec::with_capacity(hao_cfg.max_iterations);
    let mut elites: Vec<Tour> = Vec::new();
    let mut final_candidates = Vec::new();
    let mut stale = 0;

    for _ in 0..hao_cfg.max_iterations {
        let run = ga_explore(scenario, ga_cfg, &elites, rng)?;
        let mut refined: Vec<Tour> = run
            .candidates
            .iter()
            .map(|t| dp_refine(scenario, t, hao_cfg.subpath_length))
            .collect();
        refined.sort_by(|a, b| a.total_distance_m.total_cmp(&b.total_distance_m));
        final_candidates = run.candidates;

        let round_best = refined[0].clone();
        let improved = match &best {
            Some(b) => round_best.total_distance_m < b.total_distance_m,
            None => true,
        };
        if improved {
            best = Some(round_best);
            stale = 0;
        } else {
            stale += 1;
        }
        trace.push(best.as_ref().map_or(f64::INFINITY, |b| b.total_distance_m));
        elites = refined;
        if stale >= hao_cfg.patience {
            break;
        }
    }

    Ok(HaoRun {
        best: best.expect("at least one iteration ran"),
        trace,
        final_candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{self, Stream};
    use crate::route_planner::{held_karp, is_permutation};
    use crate::scenario::{generate_scenario, ScenarioOptions};

    fn quick_ga() -> GaConfig {
        GaConfig {
            population_size: 60,
            generations: 20,
            candidate_count: 6,
            ..GaConfig::default()
        }
    }

    #[test]
    fn trace_non_increasing_and_bounded_by_candidates() {
        let s = generate_scenario(12, 11, &ScenarioOptions::default()).unwrap();
        let run = hao_plan(
            &s,
            &quick_ga(),
            &HaoConfig::default(),
            &mut rng::stream(12, Stream::Genetic),
        )
        .unwrap();
        assert!(is_permutation(&run.best.order, 11));
        for w in run.trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert_eq!(*run.trace.last().unwrap(), run.best.total_distance_m);
        for c in &run.final_candidates {
            assert!(run.best.total_distance_m <= c.total_distance_m + 1e-12);
        }
    }

    #[test]
    fn single_iteration() {
        let s = generate_scenario(5, 7, &ScenarioOptions::default()).unwrap();
        let cfg = HaoConfig {
            max_iterations: 1,
            ..HaoConfig::default()
        };
        let run = hao_plan(&s, &quick_ga(), &cfg, &mut rng::stream(5, Stream::Genetic)).unwrap();
        assert_eq!(run.iterations(), 1);

        let mut r = rng::stream(5, Stream::Genetic);
        let ga = ga_explore(&s, &quick_ga(), &[], &mut r).unwrap();
        let direct = ga
            .candidates
            .iter()
            .map(|t| dp_refine(&s, t, 3).total_distance_m)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(run.best.total_distance_m, direct);
    }

    #[test]
    fn small_instance_reaches_optimum() {
        let s = generate_scenario(30, 7, &ScenarioOptions::default()).unwrap();
        let run = hao_plan(
            &s,
            &quick_ga(),
            &HaoConfig::default(),
            &mut rng::stream(30, Stream::Genetic),
        )
        .unwrap();
        let opt = held_karp(&s).unwrap().total_distance_m;
        assert!((run.best.total_distance_m - opt).abs() < 1e-9);
    }

    #[test]
    fn rejects_short_window() {
        let cfg = HaoConfig {
            subpath_length: 1,
            ..HaoConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
