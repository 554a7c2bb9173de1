//! Cycle energy as more pinching antennas are placed on the waveguide.

use pass_uav::harness::{sweep, Activator, Planner, StrategySpec, SweepConfig, SweepVariable};
use pass_uav::scenario::ScenarioOptions;

fn main() -> pass_uav::Result<()> {
    let cfg = SweepConfig {
        variable: SweepVariable::PaCount,
        values: vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
        strategies: vec![
            StrategySpec::new(Planner::NearestNeighbor, Activator::Bnb),
            StrategySpec::new(Planner::NearestNeighbor, Activator::Islr),
        ],
        seeds: (1..=3).collect(),
        node_count: 8,
        options: ScenarioOptions::default(),
    };
    let result = sweep(&cfg)?;
    for (v, k) in result.sweep_values.iter().enumerate() {
        let [bnb, islr] = [0, 1].map(|s| result.mean_energy_j[v][s]);
        println!(
            "K = {k:>2}  bnb {bnb:9.4} J  islr {islr:9.4} J  gap {:5.1}%",
            (islr / bnb - 1.0) * 100.0
        );
    }
    Ok(())
}
