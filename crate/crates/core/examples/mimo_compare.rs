//! Pinching antennas vs a conventional 10-element array along a sweep of
//! UAV positions at a fixed offset from the waveguide.

use pass_uav::activation::ActivationProblem;
use pass_uav::harness::{activate_at, mimo_required_power, Activator, MimoConfig, StrategyParams};
use pass_uav::propagation::{channel, waveguide_response};
use pass_uav::scenario::{generate_scenario, watts_to_dbm, ScenarioOptions};

fn main() -> pass_uav::Result<()> {
    let scenario = generate_scenario(1, 1, &ScenarioOptions::default())?.with_rate_threshold(7.0);
    let params = StrategyParams::default();
    let mimo = MimoConfig::for_wavelength(scenario.physics.wavelength_m);
    let response = waveguide_response(&scenario);

    for y in [1.0, 5.0, 20.0] {
        println!("y = {y} m");
        for x in (0..=10).map(|i| i as f64 * 10.0) {
            let pos = [x, y, 5.0];
            let a = activate_at(&scenario, Activator::Bnb, &params, pos)?;
            let pass = ActivationProblem::new(&scenario, &channel(&scenario, pos)?, &response).required_power(&a);
            let array = mimo_required_power(&scenario, &mimo, pos)?;
            println!(
                "  x {x:5.1}  PASS {:7.2} dBm  MIMO {:7.2} dBm  {}",
                watts_to_dbm(pass),
                watts_to_dbm(array),
                if pass < array { "PASS" } else { "MIMO" }
            );
        }
    }
    Ok(())
}
