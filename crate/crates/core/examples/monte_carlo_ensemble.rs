//! A seeded ensemble written to disk in the documented CSV layout.
//!
//!     cargo run --release --example monte_carlo_ensemble -- [out_dir]

use setvalued_id::export::write_experiment;
use setvalued_id::prelude::*;

fn main() -> setvalued_id::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/monte_carlo_ensemble".into());
    let config = ExperimentConfig { horizon: 20_000, ..ExperimentConfig::reference() };
    let ens = monte_carlo(&config)?;
    println!("{} runs, {} grid points, {:.2?}", ens.runs.len(), ens.grid.len(), ens.wall_clock);

    for k in [100, 1_000, 10_000] {
        let tail = ens.tail_estimate(k, 1.0)?;
        println!(
            "P(sup_(j >= {k}) |err_j|^2 >= 1) = {:.3}  [{:.3}, {:.3}]",
            tail.probability, tail.lower, tail.upper
        );
    }
    let mut finals = ens.final_errors();
    finals.sort_by(f64::total_cmp);
    println!("final |err|^2: median {:.3e}, max {:.3e}", finals[finals.len() / 2], finals[finals.len() - 1]);

    for path in write_experiment(std::path::Path::new(&out), &ens, config.horizon, 3)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
