//! The four noise families: CDF, density, quantiles, sampling and the
//! density infimum used by the rate analysis.
//!
//!     cargo run --example noise_models

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use setvalued_id::model::{CdfTable, NoiseModel};

fn main() -> setvalued_id::Result<()> {
    // triangular density on [-3, 3], tabulated every 0.5
    let table: Vec<(f64, f64)> = (0..=12)
        .map(|i| {
            let x = -3.0 + 0.5 * i as f64;
            let f = if x <= 0.0 { (x + 3.0).powi(2) / 18.0 } else { 1.0 - (3.0 - x).powi(2) / 18.0 };
            (x, f)
        })
        .collect();
    let families = [
        NoiseModel::gaussian(25.0)?,
        NoiseModel::laplacian(25.0)?,
        NoiseModel::student_t(5.0, 25.0)?,
        NoiseModel::tabulated(CdfTable::new(&table)?),
    ];

    println!("{:<10} {:>8} {:>10} {:>10} {:>10} {:>12}", "family", "var", "F(1)", "f(1)", "q(0.9)", "inf f[-2,2]");
    for noise in &families {
        println!(
            "{:<10} {:>8.3} {:>10.6} {:>10.6} {:>10.4} {:>12.6}",
            noise.family_name(),
            noise.variance(),
            noise.cdf(1.0)?,
            noise.pdf(1.0)?,
            noise.quantile(0.9)?,
            noise.inf_density(-2.0, 2.0),
        );
    }

    println!("\nsample mean and variance from 100000 draws");
    for noise in &families {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws: Vec<f64> = (0..100_000).map(|_| noise.sample(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        println!("{:<10} mean {:>8.4}  var {:>8.4}  (model {:.4})", noise.family_name(), mean, var, noise.variance());
    }
    Ok(())
}
