//! Generate a random delivery scenario, save it as JSON and load it back.
//!
//!     cargo run --example generate_scenario -- [seed] [nodes] [path]

use pass_uav::scenario::{generate_scenario, load_scenario, save_scenario, ScenarioOptions};

fn main() -> pass_uav::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let nodes = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10);
    let path = args
        .get(3)
        .cloned()
        .unwrap_or_else(|| std::env::temp_dir().join("scenario.json").display().to_string());

    let scenario = generate_scenario(seed, nodes, &ScenarioOptions::default())?;
    save_scenario(&scenario, &path)?;
    let loaded = load_scenario(&path)?;
    assert_eq!(loaded, scenario);

    println!("wrote {path}");
    println!(
        "{} nodes, {} antennas, wavelength {:.4} m, guided {:.4} m",
        scenario.node_count(),
        scenario.pa_count(),
        scenario.physics.wavelength_m,
        scenario.physics.guided_wavelength_m
    );
    for (i, n) in scenario.nodes.iter().enumerate() {
        let [x, y, z] = n.position_m;
        println!("  node {i:>2}  ({x:6.2}, {y:6.2}, {z:4.2})  tasks {}", n.task_count);
    }
    Ok(())
}
