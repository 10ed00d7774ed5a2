//! Compares the ensemble error with the Cramér–Rao bound of the same
//! regressors, and with the periodic empirical-measurement baseline.
//!
//!     cargo run --release --example crlb_vs_empirical

use setvalued_id::prelude::*;
use setvalued_id::simulate::regressors_for;

fn main() -> setvalued_id::Result<()> {
    let config = ExperimentConfig {
        inputs: InputPlan::reference(0.0, 0, 1),
        horizon: 30_000,
        ..ExperimentConfig::reference()
    };
    let system = &config.system;
    let regs = regressors_for(system, &config.inputs, config.horizon)?;
    let bound = crlb(&regs, system.theta(), system.noise(), system.thresholds())?;
    let ens = monte_carlo(&config)?;
    let k = config.horizon;
    println!("k trace(CRLB)        = {:.3}", bound.k_trace);
    println!("k mean|err|^2 (SA)   = {:.3}", k as f64 * ens.mean_err_sq_at(k)?);

    let mut baseline = 0.0;
    for run in 0..config.runs {
        let trace = simulate_run(system, &config.inputs, k, config.run_seed(run), 3)?;
        let est = empirical_measurement_baseline(&trace, 3, &trace.regressors().truncated(3))?;
        baseline += est.iter().zip(system.theta()).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }
    println!("k mean|err|^2 (EM)   = {:.3}", k as f64 * baseline / config.runs as f64);
    Ok(())
}
