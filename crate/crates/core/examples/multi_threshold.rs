//! A three-threshold quantiser reports `s = #{j : y <= C_j}`; more levels
//! carry more information per reading than the binary sensor.
//!
//!     cargo run --release --example multi_threshold

use setvalued_id::prelude::*;

fn main() -> setvalued_id::Result<()> {
    let reference = ExperimentConfig::reference();
    let noise = NoiseModel::gaussian(25.0)?;
    let sensors = [
        ("binary C = 1", Sensor::binary(1.0, noise.clone())?),
        ("C = (-2, 1, 4)", Sensor::new(vec![-2.0, 1.0, 4.0], noise.clone())?),
        ("C = (-6, -2, 1, 4, 8)", Sensor::new(vec![-6.0, -2.0, 1.0, 4.0, 8.0], noise)?),
    ];
    println!("{:<24} {:>14} {:>14}", "sensor", "k mean|err|^2", "slope");
    for (name, sensor) in sensors {
        let config = ExperimentConfig {
            system: SystemModel::new(vec![3.0, -1.0], sensor, 2)?,
            policy: StepPolicy::harmonic(10.0).with_warm_start(20),
            horizon: 20_000,
            runs: 100,
            ..reference.clone()
        };
        let ens = monte_carlo(&config)?;
        let k = config.horizon;
        println!("{name:<24} {:>14.3} {:>14.3}", k as f64 * ens.mean_err_sq_at(k)?, ens.rate.ms_slope);
    }

    let sensor = Sensor::new(vec![-2.0, 1.0, 4.0], NoiseModel::gaussian(25.0)?)?;
    let system = SystemModel::new(vec![3.0, -1.0], sensor, 2)?;
    let trace = simulate_run(&system, &reference.inputs, 12, 5, 3)?;
    println!("\nreadings: {:?}", trace.readings());
    Ok(())
}
