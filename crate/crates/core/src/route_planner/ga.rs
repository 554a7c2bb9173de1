//! Genetic global exploration over delivery orders.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::{nearest_neighbor, tour_distance, Tour};

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub selection_prob: f64,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    /// Share of the initial population seeded by nearest-neighbor tours.
    pub greedy_seed_fraction: f64,
    pub generations: usize,
    pub candidate_count: usize,
    /// Carry the elite tenth of each generation into regeneration.
    pub elitism: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 200,
            selection_prob: 0.4,
            crossover_prob: 0.6,
            mutation_prob: 0.05,
            greedy_seed_fraction: 0.05,
            generations: 100,
            candidate_count: 20,
            elitism: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("selection_prob", self.selection_prob),
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("greedy_seed_fraction", self.greedy_seed_fraction),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        if self.greedy_seed_fraction >= 0.10 {
            return Err(Error::InvalidConfig("greedy_seed_fraction must stay below 0.10".into()));
        }
        if self.population_size < 2 {
            return Err(Error::InvalidConfig("population_size must be at least 2".into()));
        }
        if self.candidate_count == 0 || self.candidate_count > self.population_size {
            return Err(Error::InvalidConfig(
                "candidate_count must be in 1..=population_size".into(),
            ));
        }
        Ok(())
    }

    fn elite_count(&self) -> usize {
        (self.population_size / 10).max(1)
    }
}

/// Result of one exploration run.
#[derive(Debug, Clone)]
pub struct GaRun {
    /// Best `candidate_count` distinct tours, shortest first.
    pub candidates: Vec<Tour>,
    /// Shortest distance in the population after each generation.
    pub best_per_generation: Vec<f64>,
}

/// Ordered crossover: keep `parent1[segment]` in place, fill the other slots
/// with the remaining nodes in `parent2` order.
pub fn ordered_crossover(parent1: &[usize], parent2: &[usize], segment: (usize, usize)) -> Vec<usize> {
    let (lo, hi) = segment;
    debug_assert!(lo <= hi && hi < parent1.len());
    let kept: HashSet<usize> = parent1[lo..=hi].iter().copied().collect();
    let mut fill = parent2.iter().copied().filter(|g| !kept.contains(g));
    (0..parent1.len())
        .map(|i| {
            if (lo..=hi).contains(&i) {
                parent1[i]
            } else {
                fill.next().expect("parents are permutations of the same set")
            }
        })
        .collect()
}

/// Reverse `parent[i..=j]`.
pub fn inversion_mutation(parent: &[usize], i: usize, j: usize) -> Vec<usize> {
    let mut child = parent.to_vec();
    child[i..=j].reverse();
    child
}

#[derive(Debug, Clone)]
struct Individual {
    order: Vec<usize>,
    distance: f64,
}

impl Individual {
    fn new(scenario: &Scenario, order: Vec<usize>) -> Self {
        let distance = tour_distance(scenario, &order);
        Individual { order, distance }
    }
}

fn random_individual(scenario: &Scenario, rng: &mut impl Rng) -> Individual {
    let mut order: Vec<usize> = (0..scenario.node_count()).collect();
    order.shuffle(rng);
    Individual::new(scenario, order)
}

fn greedy_individual(scenario: &Scenario, j: usize) -> Individual {
    let start = j.checked_sub(1);
    let t = nearest_neighbor(scenario, start);
    Individual {
        order: t.order,
        distance: t.total_distance_m,
    }
}

fn segment(rng: &mut impl Rng, len: usize) -> (usize, usize) {
    let a = rng.gen_range(0..len);
    let b = rng.gen_range(0..len);
    (a.min(b), a.max(b))
}

/// Indices of `pop` sorted shortest first, ties by index.
fn ranking(pop: &[Individual]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&a, &b| pop[a].distance.total_cmp(&pop[b].distance).then(a.cmp(&b)));
    idx
}

/// Fitness-proportional sampling without replacement.
fn roulette(pop: &[Individual], keep: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..pop.len()).collect();
    let mut chosen = Vec::with_capacity(keep);
    while chosen.len() < keep && !pool.is_empty() {
        let total: f64 = pool.iter().map(|&i| 1.0 / pop[i].distance).sum();
        let mut ticket = rng.gen::<f64>() * total;
        let mut pick = pool.len() - 1;
        for (p, &i) in pool.iter().enumerate() {
            ticket -= 1.0 / pop[i].distance;
            if ticket < 0.0 {
                pick = p;
                break;
            }
        }
        chosen.push(pool.remove(pick));
    }
    chosen
}

fn initial_population(scenario: &Scenario, cfg: &GaConfig, seeds: &[Tour], rng: &mut impl Rng) -> Vec<Individual> {
    let n = cfg.population_size;
    let mut pop: Vec<Individual> = Vec::with_capacity(n);
    let greedy = if seeds.is_empty() {
        (cfg.greedy_seed_fraction * n as f64).round() as usize
    } else {
        pop.extend(
            seeds
                .iter()
                .take(cfg.elite_count())
                .map(|t| Individual::new(scenario, t.order.clone())),
        );
        (0.9 * cfg.greedy_seed_fraction * n as f64).round() as usize
    };
    for j in 0..greedy.min(n - pop.len()) {
        pop.push(greedy_individual(scenario, j));
    }
    while pop.len() < n {
        pop.push(random_individual(scenario, rng));
    }
    pop
}

/// Genetic exploration. `seeds` are refined tours from a previous HAO round;
/// when present they occupy the first tenth of the initial population.
pub fn ga_explore(scenario: &Scenario, cfg: &GaConfig, seeds: &[Tour], rng: &mut impl Rng) -> Result<GaRun> {
    cfg.validate()?;
    let m = scenario.node_count();
    let n = cfg.population_size;
    let mut pop = initial_population(scenario, cfg, seeds, rng);
    let mut best_per_generation = Vec::with_capacity(cfg.generations);

    for _ in 0..cfg.generations {
        let ranked = ranking(&pop);
        let elites: Vec<usize> = ranked[..cfg.elite_count()].to_vec();

        let keep = (cfg.selection_prob * n as f64).round() as usize;
        let retained = roulette(&pop, keep, rng);

        let mut pool: Vec<Individual> = retained.iter().map(|&i| pop[i].clone()).collect();
        if cfg.elitism {
            pool.extend(elites.iter().map(|&i| pop[i].clone()));
        }

        if m >= 2 && !retained.is_empty() {
            let crossovers = (cfg.crossover_prob * retained.len() as f64).round() as usize;
            for &p2 in retained.choose_multiple(rng, crossovers) {
                let p1 = elites[rng.gen_range(0..elites.len())];
                let seg = segment(rng, m);
                let child = ordered_crossover(&pop[p1].order, &pop[p2].order, seg);
                pool.push(Individual::new(scenario, child));
            }
            let mutations = (cfg.mutation_prob * retained.len() as f64).round() as usize;
            for &p in retained.choose_multiple(rng, mutations) {
                let (i, j) = segment(rng, m);
                let child = inversion_mutation(&pop[p].order, i, j);
                pool.push(Individual::new(scenario, child));
            }
        }

        // Regeneration: best half of the distinct pool, random refill.
        let mut seen = HashSet::new();
        pool.retain(|ind| seen.insert(ind.order.clone()));
        let order = ranking(&pool);
        let mut next: Vec<Individual> = order.into_iter().take(n / 2).map(|i| pool[i].clone()).collect();
        while next.len() < n {
            next.push(random_individual(scenario, rng));
        }
        pop = next;
        best_per_generation.push(pop.iter().map(|i| i.distance).fold(f64::INFINITY, f64::min));
    }

    let mut seen = HashSet::new();
    let candidates = ranking(&pop)
        .into_iter()
        .filter(|&i| seen.insert(pop[i].order.clone()))
        .take(cfg.candidate_count)
        .map(|i| Tour {
            order: pop[i].order.clone(),
            total_distance_m: pop[i].distance,
        })
        .collect();
    Ok(GaRun {
        candidates,
        best_per_generation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{self, Stream};
    use crate::route_planner::{held_karp, is_permutation};
    use crate::scenario::{generate_scenario, ScenarioOptions};

    #[test]
    fn ox_hand_trace() {
        let p1 = [1, 2, 3, 4, 5];
        let p2 = [5, 4, 3, 2, 1];
        assert_eq!(ordered_crossover(&p1, &p2, (2, 3)), vec![5, 2, 3, 4, 1]);
        assert_eq!(ordered_crossover(&p1, &p2, (0, 4)), p1.to_vec());
        assert_eq!(ordered_crossover(&p1, &p1, (1, 2)), p1.to_vec());
    }

    #[test]
    fn im_hand_trace() {
        let p = [1, 2, 3, 4, 5];
        assert_eq!(inversion_mutation(&p, 1, 3), vec![1, 4, 3, 2, 5]);
        assert_eq!(inversion_mutation(&p, 2, 2), p.to_vec());
        assert_eq!(inversion_mutation(&inversion_mutation(&p, 0, 3), 0, 3), p.to_vec());
    }

    #[test]
    fn rejects_greedy_fraction_at_ten_percent() {
        let cfg = GaConfig {
            greedy_seed_fraction: 0.10,
            ..GaConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn three_nodes_reach_optimum() {
        let s = generate_scenario(4, 3, &ScenarioOptions::default()).unwrap();
        let cfg = GaConfig {
            generations: 5,
            ..GaConfig::default()
        };
        let run = ga_explore(&s, &cfg, &[], &mut rng::stream(4, Stream::Genetic)).unwrap();
        let best = run.candidates[0].total_distance_m;
        assert!((best - held_karp(&s).unwrap().total_distance_m).abs() < 1e-9);
    }

    #[test]
    fn default_run_shape_and_elitist_trace() {
        let s = generate_scenario(2, 12, &ScenarioOptions::default()).unwrap();
        let cfg = GaConfig {
            generations: 30,
            ..GaConfig::default()
        };
        let run = ga_explore(&s, &cfg, &[], &mut rng::stream(2, Stream::Genetic)).unwrap();
        assert_eq!(run.candidates.len(), 20);
        assert_eq!(run.best_per_generation.len(), 30);
        for w in run.best_per_generation.windows(2) {
            assert!(w[1] <= w[0], "best got worse: {w:?}");
        }
        for t in &run.candidates {
            assert!(is_permutation(&t.order, 12));
            assert!((t.total_distance_m - tour_distance(&s, &t.order)).abs() < 1e-9);
        }
        for w in run.candidates.windows(2) {
            assert!(w[0].total_distance_m <= w[1].total_distance_m);
        }
    }

    #[test]
    fn seeded_population_keeps_elites() {
        let s = generate_scenario(6, 8, &ScenarioOptions::default()).unwrap();
        let opt = held_karp(&s).unwrap();
        let cfg = GaConfig {
            generations: 1,
            ..GaConfig::default()
        };
        let run = ga_explore(
            &s,
            &cfg,
            std::slice::from_ref(&opt),
            &mut rng::stream(6, Stream::Genetic),
        )
        .unwrap();
        assert!((run.candidates[0].total_distance_m - opt.total_distance_m).abs() < 1e-9);
    }
}
