//! Identifies `theta = (3, -1)` from one-bit readings with the harmonic
//! step `20 / k`, starting from `(1, 1)` at `k0 = 20`.
//!
//!     cargo run --release --example identify_binary_ma

use setvalued_id::prelude::*;

fn main() -> setvalued_id::Result<()> {
    let config = ExperimentConfig::reference();
    let trace = simulate_run(&config.system, &config.inputs, 100_000, config.run_seed(0), config.pe_window)?;
    let traj = run_estimator(&trace, config.policy, &config.init)?;

    println!("{:>7} {:>10} {:>10} {:>12} {:>12}", "k", "theta_1", "theta_2", "|err|^2", "k |err|^2");
    let mut k = traj.start();
    while k <= traj.end() {
        let th = traj.theta_hat(k);
        let e = traj.err_sq_at(k).unwrap();
        println!("{k:>7} {:>10.5} {:>10.5} {e:>12.4e} {:>12.4}", th[0], th[1], k as f64 * e);
        k = if k < 100 { 100 } else { k * 10 };
    }
    Ok(())
}
