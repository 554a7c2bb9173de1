//! Per-slot power against distance to the waveguide for one cycle.

use pass_uav::harness::{distance_energy_trace, spearman, write_trace_csv, Activator, Planner, StrategySpec};
use pass_uav::scenario::{generate_scenario, ScenarioOptions};

fn main() -> pass_uav::Result<()> {
    let scenario = generate_scenario(7, 10, &ScenarioOptions::default())?;
    let rows = distance_energy_trace(&scenario, &StrategySpec::new(Planner::Hao, Activator::Bnb))?;

    let d: Vec<f64> = rows.iter().map(|r| r.waveguide_distance_m).collect();
    let p: Vec<f64> = rows.iter().map(|r| r.power_w).collect();
    println!("{} flying slots, Spearman rho = {:.4}", rows.len(), spearman(&d, &p));

    write_trace_csv(&rows, std::io::stdout().lock())
}
