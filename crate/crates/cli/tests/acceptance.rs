//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use pass_uav::activation::{bnb_optimize, exhaustive_best, islr_search, ActivationProblem};
use pass_uav::harness::{
    distance_energy_trace, evaluate_plan, mimo_required_power, plan_tour, run_dlo_multi, spearman, Activator,
    MimoConfig, Planner, StrategyParams, StrategySpec,
};
use pass_uav::link_budget::{discretize, Mode};
use pass_uav::propagation::{channel, radiation_ratios, waveguide_response, Activation};
use pass_uav::rng::{self, Stream};
use pass_uav::route_planner::{held_karp, Tour};
use pass_uav::scenario::{generate_scenario, Point, Scenario, ScenarioOptions};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn problem_at(s: &Scenario, pos: Point) -> ActivationProblem {
    let h = channel(s, pos).expect("position clear of the antennas");
    ActivationProblem::new(s, &h, &waveguide_response(s))
}

/// Uniform point of the delivery space, optionally with x restricted.
fn sample_position(rng: &mut impl Rng, x_range: (f64, f64)) -> Point {
    [
        rng.gen_range(x_range.0..=x_range.1),
        rng.gen_range(0.0..=100.0),
        rng.gen_range(2.5..=7.5),
    ]
}

fn bnb_optimality() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut mismatches = 0;
    for seed in 1..=100u64 {
        let s = generate_scenario(seed, 1, &ScenarioOptions::default()).unwrap();
        let pos = sample_position(&mut rng::stream(seed, Stream::Sampling), (0.0, 100.0));
        let p = problem_at(&s, pos);
        let bnb = bnb_optimize(&p, 0.0).unwrap().objective;
        let exact = p.objective(&exhaustive_best(&p).unwrap());
        let rel = (bnb - exact).abs() / exact;
        worst = worst.max(rel);
        if rel > 1e-9 {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < 60.0,
        format!(
            "BnB vs exhaustive, K=10, 100 positions: {mismatches} mismatches, worst rel gap {worst:.1e}, {secs:.1} s"
        ),
    )
}

fn dominance_chain(traces: &mut Vec<Vec<f64>>) -> Outcome {
    let params = StrategyParams::default();
    let mut slots = 0;
    let mut violations = 0;
    let mut bare_above_full = 0;
    for seed in 1..=20u64 {
        let s = generate_scenario(seed, 10, &ScenarioOptions::default()).unwrap();
        let out = run_dlo_multi(
            &s,
            Planner::Hao,
            &[Activator::Bnb, Activator::Islr, Activator::Full],
            &params,
        )
        .unwrap();
        traces.push(out.planner_trace.clone());
        let [bnb, islr, full] = [0, 1, 2].map(|i| &out.reports[i].per_slot_power_w);
        for l in 0..out.slot_plan.total_slots() {
            slots += 1;
            if !(bnb[l] <= islr[l] && islr[l] <= full[l]) {
                violations += 1;
            }
        }
        // Informational: the search without the all-on candidate.
        for slot in out.slot_plan.slots.iter().filter(|x| x.mode == Mode::Flying) {
            let p = problem_at(&s, slot.uav_position_m);
            let bare = islr_search(&p, s.pa_count().div_ceil(2), false).unwrap().power_w;
            if bare > p.required_power(&Activation::ones(s.pa_count())) {
                bare_above_full += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!(
            "bnb <= islr <= full on {slots} slots of 20 cycles: {violations} violations \
             (info: bare ISLR search above full activation on {bare_above_full} flying slots)"
        ),
    )
}

fn hao_quality(traces: &mut Vec<Vec<f64>>) -> Outcome {
    let params = StrategyParams::default();
    let mut hits = 0;
    let mut worst = 0.0_f64;
    for seed in 1..=20u64 {
        let s = generate_scenario(seed, 9, &ScenarioOptions::default()).unwrap();
        let planned = plan_tour(&s, Planner::Hao, &params).unwrap();
        traces.push(planned.trace.clone());
        let opt = held_karp(&s).unwrap().total_distance_m;
        let gap = planned.tour.total_distance_m / opt - 1.0;
        worst = worst.max(gap);
        if gap <= 1e-9 {
            hits += 1;
        }
    }
    outcome(
        hits >= 18 && worst <= 0.05,
        format!(
            "HAO hits the Held-Karp optimum on {hits}/20 seeds (M=9), worst gap {:.3}%",
            worst * 100.0
        ),
    )
}

fn monotone_traces(traces: &[Vec<f64>]) -> Outcome {
    let bad = traces
        .iter()
        .filter(|t| t.is_empty() || t.windows(2).any(|w| w[1] > w[0]))
        .count();
    outcome(
        bad == 0 && !traces.is_empty(),
        format!(
            "best-distance trace non-increasing on {}/{} HAO runs",
            traces.len() - bad,
            traces.len()
        ),
    )
}

fn rate_trend() -> Outcome {
    let base = generate_scenario(1, 10, &ScenarioOptions::default()).unwrap();
    let params = StrategyParams::default();
    let tour: Tour = plan_tour(&base, Planner::Hao, &params).unwrap().tour;
    let plan = discretize(&base, &tour);
    let thresholds = [3.0, 4.0, 5.0, 6.0, 7.0];
    let activators = [Activator::Bnb, Activator::Islr, Activator::Full, Activator::Mimo];
    let reports: Vec<Vec<_>> = thresholds
        .iter()
        .map(|&r| {
            let s = base.with_rate_threshold(r);
            activators
                .iter()
                .map(|&a| evaluate_plan(&s, &plan, a, &params, a.as_str()).unwrap())
                .collect()
        })
        .collect();

    let mut increasing = true;
    for a in 0..activators.len() {
        for t in 0..thresholds.len() - 1 {
            increasing &= reports[t + 1][a].total_energy_j > reports[t][a].total_energy_j;
        }
    }
    let mut checked = 0;
    let mut worst = 0.0_f64;
    for t in 0..thresholds.len() - 1 {
        let r = thresholds[t];
        let expected = ((r + 1.0_f64).exp2() - 1.0) / (r.exp2() - 1.0);
        let (lo, hi) = (&reports[t][0], &reports[t + 1][0]);
        for l in 0..plan.total_slots() {
            if lo.per_slot_activation[l] == hi.per_slot_activation[l] {
                checked += 1;
                let ratio = hi.per_slot_power_w[l] / lo.per_slot_power_w[l];
                worst = worst.max((ratio / expected - 1.0).abs());
            }
        }
    }
    outcome(
        increasing && checked > 0 && worst <= 1e-6,
        format!(
            "cycle energy strictly increasing in R_th for all 4 strategies: {increasing}; \
             bnb ratio on {checked} unchanged slots, worst rel error {worst:.1e}"
        ),
    )
}

fn distance_correlation() -> Outcome {
    let s = generate_scenario(7, 10, &ScenarioOptions::default()).unwrap();
    let rows = distance_energy_trace(&s, &StrategySpec::new(Planner::Hao, Activator::Bnb)).unwrap();
    let d: Vec<f64> = rows.iter().map(|r| r.waveguide_distance_m).collect();
    let p: Vec<f64> = rows.iter().map(|r| r.power_w).collect();
    let rho = spearman(&d, &p);
    outcome(
        rho > 0.9,
        format!(
            "Spearman(distance to waveguide, power) = {rho:.4} over {} flying slots, seed 7",
            rows.len()
        ),
    )
}

fn pass_vs_mimo() -> Outcome {
    let s = generate_scenario(7, 1, &ScenarioOptions::default())
        .unwrap()
        .with_rate_threshold(7.0);
    let mimo = MimoConfig::for_wavelength(s.physics.wavelength_m);
    let mut rng = rng::stream(7, Stream::Sampling);
    let n = 500;
    let mut wins = 0;
    for _ in 0..n {
        let pos = sample_position(&mut rng, (50.0, 100.0));
        let p = problem_at(&s, pos);
        let pass = p.required_power(&bnb_optimize(&p, 0.0).unwrap().activation);
        if pass < mimo_required_power(&s, &mimo, pos).unwrap() {
            wins += 1;
        }
    }
    let frac = wins as f64 / n as f64;
    outcome(
        frac >= 0.95,
        format!(
            "PASS-BnB below MIMO-MRT on {wins}/{n} positions with x in [50,100] ({:.1}%, need 95%)",
            frac * 100.0
        ),
    )
}

fn conservation() -> Outcome {
    let delta = 0.3_f64;
    let mut worst = 0.0_f64;
    for mask in 0..1u64 << 10 {
        let a = Activation::from_mask(mask, 10);
        let sum = radiation_ratios(&a, delta).sum_of_squares();
        let expected = 1.0 - (1.0 - delta * delta).powi(a.count() as i32);
        worst = worst.max((sum - expected).abs());
    }
    outcome(
        worst < 1e-12,
        format!("sum beta^2 over all 1024 activations, max error {worst:.1e}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_pass-uav"))
            .args(["simulate", "--seed", "7", "--out"])
            .arg(&out)
            .output()
            .expect("binary runs")
            .status;
        (out, status.success())
    };
    let ((a, ok_a), (b, ok_b)) = (run("a"), run("b"));
    let files = ["tour.json", "slots.csv", "energy.csv", "trace_distance.csv"];
    let same = if ok_a && ok_b {
        files
            .iter()
            .filter(|f| fs::read(a.join(f)).unwrap() == fs::read(b.join(f)).unwrap())
            .count()
    } else {
        0
    };
    outcome(
        same == files.len(),
        format!(
            "simulate --seed 7 twice: {same}/{} output files byte-identical",
            files.len()
        ),
    )
}

/// Independent slot counter: walk each leg in `v_f tau` steps and count
/// deliveries per slot.
fn walk_slot_count(s: &Scenario, order: &[usize]) -> usize {
    let step = s.flight_speed_mps * s.slot_seconds;
    let per_slot = s.delivery_speed_tps * s.slot_seconds;
    let mut stops: Vec<(Point, u32)> = order
        .iter()
        .map(|&i| (s.nodes[i].position_m, s.nodes[i].task_count))
        .collect();
    stops.push((s.station_m, 0));
    let mut here = s.station_m;
    let mut slots = 0;
    for (target, tasks) in stops {
        let mut left = pass_uav::scenario::distance(&here, &target);
        while left > 0.0 {
            left -= step;
            slots += 1;
        }
        let mut remaining = f64::from(tasks);
        while remaining > 0.0 {
            remaining -= per_slot;
            slots += 1;
        }
        here = target;
    }
    slots
}

fn slot_count_oracle() -> Outcome {
    let mut rng = rng::stream(10, Stream::Sampling);
    let mut mismatches = 0;
    for i in 0..1000u64 {
        let m = rng.gen_range(1..=12);
        let options = ScenarioOptions {
            slot_seconds: [0.5, 1.0, 2.0][i as usize % 3],
            ..ScenarioOptions::default()
        };
        let s = generate_scenario(i, m, &options).unwrap();
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut rng);
        let expected = walk_slot_count(&s, &order);
        if discretize(&s, &Tour::new(&s, order)).total_slots() != expected {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("L matches the step-walk count on {}/1000 tours", 1000 - mismatches),
    )
}

fn main() {
    let mut traces = Vec::new();
    let results = [
        ("1", "BnB optimality", bnb_optimality()),
        ("2", "dominance chain", dominance_chain(&mut traces)),
        ("3", "HAO quality", hao_quality(&mut traces)),
        ("4", "monotone convergence", monotone_traces(&traces)),
        ("5", "rate-threshold trend", rate_trend()),
        ("6", "distance-energy correlation", distance_correlation()),
        ("7", "PASS vs MIMO", pass_vs_mimo()),
        ("8", "radiation conservation", conservation()),
        ("9", "determinism", determinism()),
        ("10", "slot-count oracle", slot_count_oracle()),
    ];
    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
