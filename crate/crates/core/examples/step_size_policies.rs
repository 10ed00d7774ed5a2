//! Harmonic, normalised and adaptive step sizes on the same readings.
//!
//!     cargo run --release --example step_size_policies

use setvalued_id::estimate::{adaptive_beta, run_on};
use setvalued_id::prelude::*;

fn main() -> setvalued_id::Result<()> {
    let config = ExperimentConfig::reference();
    let trace = simulate_run(&config.system, &config.inputs, 50_000, config.run_seed(3), config.pe_window)?;
    let pe = *trace.pe();
    let sensor = config.system.sensor();
    let beta_at_truth = adaptive_beta(1.5, pe.excitation_level, pe.regressor_bound, 10f64.sqrt(), sensor)?;
    println!("certificate: delta = {:.4}, M = {:.4}", pe.excitation_level, pe.regressor_bound);
    println!("adaptive beta at |theta| = sqrt(10), margin 1.5: {beta_at_truth:.3}\n");

    let policies = [
        ("harmonic beta = 20", StepPolicy::harmonic(20.0)),
        ("harmonic beta = 2", StepPolicy::harmonic(2.0)),
        ("normalised beta = 20", StepPolicy::normalized(20.0, 1.0, 50.0)),
        ("adaptive margin 1.5", StepPolicy::adaptive(1.5, &pe)),
    ];
    println!("{:<22} {:>12} {:>12} {:>12}", "policy", "|err|^2 @1e3", "@1e4", "@5e4");
    for (name, policy) in policies {
        let policy = policy.with_warm_start(20);
        let traj = run_on(trace.regressors(), trace.readings(), sensor, policy, &config.init, Some(config.system.theta()))?;
        let at = |k| traj.err_sq_at(k).unwrap();
        println!("{name:<22} {:>12.4e} {:>12.4e} {:>12.4e}", at(1_000), at(10_000), at(50_000));
    }
    Ok(())
}
