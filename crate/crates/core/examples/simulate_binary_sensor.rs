//! Simulates the reference system behind a one-bit sensor and compares the
//! per-phase reading frequency with the model probability `F(C - phi^T theta)`.
//!
//!     cargo run --example simulate_binary_sensor

use setvalued_id::prelude::*;

fn main() -> setvalued_id::Result<()> {
    let sensor = Sensor::binary(1.0, NoiseModel::gaussian(25.0)?)?;
    let system = SystemModel::new(vec![3.0, -1.0], sensor, 2)?;
    // no dither, so phi_k repeats with period 3
    let trace = simulate_run(&system, &InputPlan::reference(0.0, 0, 1), 30_000, 42, 3)?;

    println!("first steps");
    println!("{:>3} {:>14} {:>9} {:>2}", "k", "phi", "y", "s");
    for st in trace.steps().take(6) {
        println!("{:>3} {:>14} {:>9.3} {:>2}", st.k, format!("{:?}", st.phi), st.y, st.s);
    }

    println!("\nphase  phi          freq(s=1)  F(C - phi'theta)");
    for phase in 0..3 {
        let steps: Vec<_> = trace.steps().filter(|st| (st.k - 1) % 3 == phase).collect();
        let freq = steps.iter().filter(|st| st.s == 1).count() as f64 / steps.len() as f64;
        let phi = steps[0].phi;
        let model = system.noise().cdf(1.0 - (phi[0] * 3.0 - phi[1]))?;
        println!("{phase:>5}  {:<12} {freq:>9.4}  {model:>16.4}", format!("{phi:?}"));
    }
    assert_eq!(trace.first_inconsistent_step(), None);
    Ok(())
}
