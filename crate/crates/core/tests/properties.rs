use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pass_uav::activation::{bnb_optimize, ActivationProblem};
use pass_uav::link_budget::{achievable_rate, discretize, expected_slot_count, required_power};
use pass_uav::propagation::{channel, radiation_ratios, waveguide_response, Activation};
use pass_uav::route_planner::{dp_refine, inversion_mutation, is_permutation, ordered_crossover, Tour};
use pass_uav::scenario::{from_json, generate_scenario, to_json, ScenarioOptions, WaveguideConfig};

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}

proptest! {
    #[test]
    fn radiated_share_is_conserved(mask in 0u64..1 << 16, k in 1usize..=16, delta in 0.01f64..0.99) {
        let a = Activation::from_mask(mask & ((1 << k) - 1), k);
        let sum = radiation_ratios(&a, delta).sum_of_squares();
        let expected = 1.0 - (1.0 - delta * delta).powi(a.count() as i32);
        prop_assert!((sum - expected).abs() < 1e-12);
    }

    #[test]
    fn crossover_and_mutation_keep_permutations(
        n in 2usize..20, s1 in any::<u64>(), s2 in any::<u64>(), a in any::<usize>(), b in any::<usize>()
    ) {
        let (p1, p2) = (permutation(n, s1), permutation(n, s2));
        let (i, j) = (a % n, b % n);
        let (lo, hi) = (i.min(j), i.max(j));
        prop_assert!(is_permutation(&ordered_crossover(&p1, &p2, (lo, hi)), n));
        prop_assert!(is_permutation(&inversion_mutation(&p1, lo, hi), n));
    }

    #[test]
    fn dp_refine_never_lengthens(seed in 0u64..10_000, m in 2usize..11, a in 2usize..6) {
        let s = generate_scenario(seed, m, &ScenarioOptions::default()).unwrap();
        let tour = Tour::new(&s, permutation(m, seed));
        let refined = dp_refine(&s, &tour, a);
        prop_assert!(is_permutation(&refined.order, m));
        prop_assert!(refined.total_distance_m <= tour.total_distance_m);
    }

    #[test]
    fn rate_and_power_invert(gain in 1e-12f64..1e-3, rate in 0.5f64..12.0, noise_dbm in -120.0f64..-60.0) {
        let noise = pass_uav::scenario::dbm_to_watts(noise_dbm);
        let p = required_power(gain, rate, noise);
        prop_assert!((achievable_rate(p, gain, noise) - rate).abs() < 1e-9);
    }

    #[test]
    fn scenario_json_round_trips(seed in any::<u64>(), m in 1usize..15) {
        let s = generate_scenario(seed, m, &ScenarioOptions::default()).unwrap();
        prop_assert_eq!(from_json(&to_json(&s)).unwrap(), s);
    }

    #[test]
    fn slot_count_matches_closed_form(seed in 0u64..100_000, m in 1usize..13, tau in 0.25f64..3.0) {
        let options = ScenarioOptions { slot_seconds: tau, ..ScenarioOptions::default() };
        let s = generate_scenario(seed, m, &options).unwrap();
        let tour = Tour::new(&s, permutation(m, seed ^ 0x5a5a));
        prop_assert_eq!(discretize(&s, &tour).total_slots(), expected_slot_count(&s, &tour));
    }
}

#[test]
fn generated_scenarios_satisfy_invariants() {
    for seed in 0..1000 {
        let m = 1 + (seed as usize % 15);
        let s = generate_scenario(seed, m, &ScenarioOptions::default()).unwrap();
        s.validate().unwrap();
        assert_eq!(s.node_count(), m);
        assert_eq!(s.rng_seed, seed);
        for n in &s.nodes {
            let [x, y, z] = n.position_m;
            assert!((0.0..=100.0).contains(&x) && (0.0..=100.0).contains(&y) && (2.5..=7.5).contains(&z));
            assert!((1..=5).contains(&n.task_count));
        }
    }
}

/// Adding candidate antennas never raises the optimal power: an inactive
/// antenna leaves every other antenna's radiation unchanged.
#[test]
fn more_antennas_never_cost_more() {
    let span = 100.0;
    let grid: Vec<f64> = (0..12).map(|k| (k as f64 + 0.5) * span / 12.0).collect();
    let prefix_order = [0, 6, 3, 9, 1, 7, 4, 10, 2, 8, 5, 11];
    let base = generate_scenario(3, 1, &ScenarioOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let pos = [
            rand::Rng::gen_range(&mut rng, 0.0..100.0),
            rand::Rng::gen_range(&mut rng, 0.0..100.0),
            rand::Rng::gen_range(&mut rng, 2.5..7.5),
        ];
        let mut last = f64::INFINITY;
        for k in 1..=12 {
            let mut xs: Vec<f64> = prefix_order[..k].iter().map(|&i| grid[i]).collect();
            xs.sort_by(f64::total_cmp);
            let wg = WaveguideConfig {
                pa_x_m: xs,
                min_spacing_m: span / 12.0,
                ..base.waveguide.clone()
            };
            let s = base.with_waveguide(wg);
            s.validate().unwrap();
            let h = channel(&s, pos).unwrap();
            let p = ActivationProblem::new(&s, &h, &waveguide_response(&s));
            let power = p.required_power(&bnb_optimize(&p, 0.0).unwrap().activation);
            assert!(power <= last * (1.0 + 1e-12), "K={k}: {power} > {last}");
            last = power;
        }
    }
}
