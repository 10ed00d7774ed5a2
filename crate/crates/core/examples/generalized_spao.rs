//! The averaged-observation decomposition for a generic identifier
//! `theta_k = theta_(k-1) + rho_k v_k (h_k - s_k)`, here a sign-error
//! variant with scalar gains and a preconditioned one with matrix gains.
//!
//!     cargo run --release --example generalized_spao

use setvalued_id::prelude::*;
use setvalued_id::spao::{spao_generalized, Gain, GeneralStep};

fn main() -> setvalued_id::Result<()> {
    let config = ExperimentConfig::reference();
    let system = &config.system;
    let noise = system.noise();
    let c = system.thresholds()[0];
    let trace = simulate_run(system, &config.inputs, 5_000, config.run_seed(0), 3)?;

    for (name, precondition) in [("scalar gain", false), ("matrix gain", true)] {
        let mut theta_hat = [1.0, 1.0];
        let mut steps = Vec::new();
        for st in trace.steps() {
            let k = st.k as f64;
            let predicted = noise.cdf(c - st.phi[0] * theta_hat[0] - st.phi[1] * theta_hat[1])?;
            let gain = if precondition {
                Gain::Matrix(vec![20.0 / k, 0.0, 0.0, 10.0 / k])
            } else {
                Gain::Scalar(20.0 / k)
            };
            let step = GeneralStep { gain, v: st.phi.to_vec(), phi: st.phi.to_vec(), threshold: c, s: st.s, predicted };
            let (g0, g1) = match &step.gain {
                Gain::Scalar(r) => (*r, *r),
                Gain::Matrix(m) => (m[0], m[3]),
            };
            theta_hat[0] += g0 * st.phi[0] * (predicted - st.s as f64);
            theta_hat[1] += g1 * st.phi[1] * (predicted - st.s as f64);
            steps.push(step);
        }
        let out = spao_generalized(&steps, &[1.0, 1.0], system.theta(), noise)?;
        let k = out.t.end();
        println!("{name}: err_K = {:?}", out.theta_err.get(k));
        println!("  T_K = {:?}, psi_K = {:?}", out.t.get(k), out.psi.get(k));
        match out.recursion_residual {
            Some(r) => println!("  psi recursion residual {r:.3e}"),
            None => println!("  (recursion residual only defined for scalar gains)"),
        }
    }
    Ok(())
}
