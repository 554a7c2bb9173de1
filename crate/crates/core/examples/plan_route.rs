//! Compare the route planners on one scenario.

use pass_uav::harness::{plan_tour, Planner, StrategyParams};
use pass_uav::scenario::{generate_scenario, ScenarioOptions};

fn main() -> pass_uav::Result<()> {
    let scenario = generate_scenario(3, 10, &ScenarioOptions::default())?;
    let params = StrategyParams::default();

    for planner in Planner::ALL {
        let start = std::time::Instant::now();
        let planned = plan_tour(&scenario, planner, &params)?;
        println!(
            "{:<17} {:8.3} m  {:>4} trace points  {:>7.1} ms  {:?}",
            planner.as_str(),
            planned.tour.total_distance_m,
            planned.trace.len(),
            start.elapsed().as_secs_f64() * 1e3,
            planned.tour.order
        );
    }
    Ok(())
}
