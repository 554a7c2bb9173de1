//! Mean cycle energy against the rate threshold, averaged over seeds.

use pass_uav::harness::{sweep, Activator, Planner, StrategySpec, SweepConfig, SweepVariable};
use pass_uav::scenario::ScenarioOptions;

fn main() -> pass_uav::Result<()> {
    let cfg = SweepConfig {
        variable: SweepVariable::RateThreshold,
        values: vec![3.0, 4.0, 5.0, 6.0, 7.0],
        strategies: [Activator::Bnb, Activator::Islr, Activator::Full, Activator::Mimo]
            .map(|a| StrategySpec::new(Planner::Hao, a))
            .to_vec(),
        seeds: (1..=5).collect(),
        node_count: 10,
        options: ScenarioOptions::default(),
    };
    let result = sweep(&cfg)?;

    print!("{:>6}", "R_th");
    for name in &result.strategy_names {
        print!("{name:>14}");
    }
    println!();
    for (v, value) in result.sweep_values.iter().enumerate() {
        print!("{value:>6}");
        for e in &result.mean_energy_j[v] {
            print!("{e:>14.4}");
        }
        println!();
    }
    result.write_csv(std::io::stdout().lock())
}
