//! Antenna activation at a single UAV position with every activator.

use pass_uav::activation::{bnb_optimize, ActivationProblem};
use pass_uav::harness::{activate_at, Activator, StrategyParams};
use pass_uav::propagation::{channel, waveguide_response};
use pass_uav::scenario::{generate_scenario, watts_to_dbm, ScenarioOptions};

fn main() -> pass_uav::Result<()> {
    let scenario = generate_scenario(1, 1, &ScenarioOptions::default())?;
    let params = StrategyParams::default();
    let pos = [62.0, 8.0, 4.0];

    let h = channel(&scenario, pos)?;
    let problem = ActivationProblem::new(&scenario, &h, &waveguide_response(&scenario));

    println!(
        "UAV at {pos:?}, R_th = {} bit/s/Hz",
        scenario.physics.rate_threshold_bps_hz
    );
    for activator in [Activator::Bnb, Activator::Islr, Activator::Full, Activator::Exhaustive] {
        let a = activate_at(&scenario, activator, &params, pos)?;
        let p = problem.required_power(&a);
        println!(
            "{:<10} {a}  K_a={:<2} {:.4e} W ({:6.2} dBm)",
            activator.as_str(),
            a.count(),
            p,
            watts_to_dbm(p)
        );
    }

    // Global bounds as the search proceeds.
    let run = bnb_optimize(&problem, 0.0)?;
    println!(
        "\nBnB explored {} boxes, pruned {}",
        run.nodes_explored,
        run.pruned.len()
    );
    for (i, snap) in run.trace.iter().enumerate().step_by((run.trace.len() / 8).max(1)) {
        println!(
            "  step {i:>4}  lower {:.6e}  upper {:.6e}",
            snap.global_lower, snap.global_upper
        );
    }
    Ok(())
}
