//! Best distance per HAO iteration and per GA generation. Greedy seeding is
//! switched off so the GA starts from random tours.

use pass_uav::rng::{stream, Stream};
use pass_uav::route_planner::{ga_explore, hao_plan, held_karp, GaConfig, HaoConfig};
use pass_uav::scenario::{generate_scenario, ScenarioOptions};

fn main() -> pass_uav::Result<()> {
    let scenario = generate_scenario(11, 14, &ScenarioOptions::default())?;
    let ga = GaConfig {
        greedy_seed_fraction: 0.0,
        ..GaConfig::default()
    };
    let optimum = held_karp(&scenario)?.total_distance_m;

    let run = ga_explore(&scenario, &ga, &[], &mut stream(11, Stream::Genetic))?;
    println!("GA only, every 10th generation (optimum {optimum:.3} m):");
    for (g, d) in run.best_per_generation.iter().enumerate().step_by(10) {
        println!("  gen {g:>3}  {d:.3}");
    }

    let hao = hao_plan(&scenario, &ga, &HaoConfig::default(), &mut stream(11, Stream::Genetic))?;
    println!("HAO, {} iterations:", hao.iterations());
    for (i, d) in hao.trace.iter().enumerate() {
        println!("  iter {i:>2}  {d:.3}");
    }
    Ok(())
}
