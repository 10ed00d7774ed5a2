//! Persistent-excitation certificates for cyclic, dithered and i.i.d. inputs.
//!
//!     cargo run --example persistent_excitation

use setvalued_id::prelude::*;
use setvalued_id::simulate::{regressors_for, InputKind};

fn main() -> setvalued_id::Result<()> {
    let sensor = Sensor::binary(1.0, NoiseModel::gaussian(25.0)?)?;
    let system = SystemModel::new(vec![3.0, -1.0], sensor, 2)?;
    let plans = [
        ("cycle (-1, 2, 0)", InputPlan::reference(0.0, 0, 1)),
        ("cycle + dither 0.1", InputPlan::reference(0.1, 0, 1)),
        ("cycle + dither 0.5", InputPlan::reference(0.5, 0, 1)),
        ("constant 1", InputPlan::cyclic(vec![1.0], 0.0, 0, 1)),
        (
            "iid U[-1, 1]",
            InputPlan { kind: InputKind::IidUniform { low: -1.0, high: 1.0 }, length: 0, seed: 1 },
        ),
    ];
    println!("{:<20} {:>3} {:>12} {:>10} {:>6} {:>8}", "inputs", "N", "delta", "M", "valid", "worst k");
    for (name, plan) in &plans {
        let regs = regressors_for(&system, plan, 10_000)?;
        for window in [2, 3, 10] {
            let pe = pe_check(&regs, window)?;
            println!(
                "{name:<20} {window:>3} {:>12.6} {:>10.6} {:>6} {:>8}",
                pe.excitation_level, pe.regressor_bound, pe.valid, pe.worst_window_start
            );
        }
    }
    Ok(())
}
