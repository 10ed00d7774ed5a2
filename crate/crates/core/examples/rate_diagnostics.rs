//! Rate coefficient `eta = beta delta f_lo`, the a.s. series
//! `k |err|^2 / ln ln k` and the fitted mean-square slope.
//!
//!     cargo run --release --example rate_diagnostics

use setvalued_id::prelude::*;

fn main() -> setvalued_id::Result<()> {
    let config = ExperimentConfig { horizon: 20_000, runs: 100, ..ExperimentConfig::reference() };
    let ens = monte_carlo(&config)?;
    let rate = &ens.rate;
    println!("delta = {:.4}, M = {:.4}", ens.pe.excitation_level, ens.pe.regressor_bound);
    println!("f_lo  = {:.6}", rate.f_lower.unwrap());
    let coef = rate.rate.unwrap();
    println!("eta   = {:.4} (regime {})", coef.eta, coef.regime.label());
    println!("slope of log mean|err|^2 over [{}, {}]: {:.4}", rate.window.0, rate.window.1, rate.ms_slope);

    println!("\n{:>7} {:>16} {:>16}", "k", "run 0 a.s.", "k mean|err|^2");
    for (&(k, v), &(_, m)) in rate.as_series[0].iter().zip(&rate.mean_k_err_sq).step_by(10) {
        println!("{k:>7} {v:>16.4} {m:>16.4}");
    }
    Ok(())
}
