//! Splits the estimation error into the averaged observation error `T_k`
//! and the remainder `psi_k`, and checks the `psi` recursion.
//!
//!     cargo run --release --example spao_decomposition

use setvalued_id::prelude::*;
use setvalued_id::spao::{decomposition_gap, psi_by_recursion, recursion_residual};

fn main() -> setvalued_id::Result<()> {
    let config = ExperimentConfig::reference();
    let theta = config.system.theta();
    let beta = config.policy.harmonic_beta().unwrap();
    let trace = simulate_run(&config.system, &config.inputs, 10_000, config.run_seed(0), 3)?;
    let traj = run_estimator(&trace, config.policy, &config.init)?;

    let t = compute_t(&trace, beta, theta)?;
    let spao = compute_psi(&traj, &t, theta)?;
    let k0 = traj.start();
    let psi = psi_by_recursion(&trace, &t, theta, beta, k0, spao.psi.get(k0))?;

    println!("{:>6} {:>22} {:>22} {:>22}", "k", "err", "T", "psi");
    for k in [20, 100, 1_000, 10_000] {
        let f = |v: &[f64]| format!("({:+.4}, {:+.4})", v[0], v[1]);
        println!("{k:>6} {:>22} {:>22} {:>22}", f(spao.theta_err.get(k)), f(t.get(k)), f(psi.get(k)));
    }
    println!("\nrecursion residual: {:.3e}", recursion_residual(&spao, &trace, beta, theta)?);
    println!("max |err - psi - T| / (1 + |err|): {:.3e}", decomposition_gap(&spao.theta_err, &psi, &t));
    Ok(())
}
