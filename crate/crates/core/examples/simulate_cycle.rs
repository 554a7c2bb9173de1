//! One delivery cycle, several activation strategies on the same tour.

use pass_uav::harness::{run_dlo_multi, Activator, Planner, StrategyParams};
use pass_uav::link_budget::write_energy_csv;
use pass_uav::scenario::{generate_scenario, ScenarioOptions};

fn main() -> pass_uav::Result<()> {
    let scenario = generate_scenario(7, 10, &ScenarioOptions::default())?;
    let activators = [Activator::Bnb, Activator::Islr, Activator::Full, Activator::Mimo];
    let out = run_dlo_multi(&scenario, Planner::Hao, &activators, &StrategyParams::default())?;

    println!("tour {:?}", out.tour.order);
    println!(
        "{:.2} m, {} slots ({} flying)",
        out.tour.total_distance_m,
        out.slot_plan.total_slots(),
        out.slot_plan.flying_slots()
    );
    for r in &out.reports {
        println!("{:<10} {:10.4} J", r.strategy_name, r.total_energy_j);
    }

    let path = std::env::temp_dir().join("energy.csv");
    let file = std::fs::File::create(&path).expect("create energy.csv");
    write_energy_csv(&out.slot_plan, &out.reports, file)?;
    println!("per-slot rows in {}", path.display());
    Ok(())
}
