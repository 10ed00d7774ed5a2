//! Recursive identification of moving-average systems observed through
//! binary and quantised sensors.
//!
//! A system `y_k = phi_k^T theta + d_k` is only seen through a threshold
//! sensor `s_k = #{j : y_k <= C_j}`. The crate provides
//!
//! - [`model`]: noise laws with known CDF, sensors and systems;
//! - [`simulate`]: inputs, regressors, readings and persistent-excitation checks;
//! - [`estimate`]: the stochastic-approximation identifier and its step-size policies;
//! - [`spao`]: the averaged-observation error decomposition and rate diagnostics;
//! - [`bench`]: Monte Carlo ensembles, the Cramér–Rao bound and a periodic-input baseline;
//! - [`export`] and [`config`]: CSV outputs and experiment config files;
//! - [`cli`]: the `setvalued-id` command-line front end.
//!
//! ```
//! use setvalued_id::prelude::*;
//!
//! let sensor = Sensor::binary(1.0, NoiseModel::gaussian(25.0)?)?;
//! let system = SystemModel::new(vec![3.0, -1.0], sensor, 2)?;
//! let trace = simulate_run(&system, &InputPlan::reference(0.1, 0, 7), 5_000, 11, 3)?;
//! let policy = StepPolicy::harmonic(20.0).with_warm_start(20);
//! let traj = run_estimator(&trace, policy, &[1.0, 1.0])?;
//! assert!(traj.err_sq_at(5_000).unwrap() < traj.err_sq_at(20).unwrap());
//! # Ok::<(), setvalued_id::Error>(())
//! ```

pub mod bench;
pub mod cli;
pub mod config;
pub mod error;
pub mod estimate;
pub mod export;
mod linalg;
pub mod model;
pub mod simulate;
pub mod spao;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bench::{crlb, empirical_measurement_baseline, monte_carlo, ExperimentConfig};
    pub use crate::error::{Error, Result};
    pub use crate::estimate::{run_estimator, run_mean_field, EstimatorState, StepPolicy};
    pub use crate::model::{NoiseModel, PeCertificate, Sensor, SystemModel};
    pub use crate::simulate::{build_regressors, gen_inputs, pe_check, simulate_run, InputPlan, Regressors, RunTrace};
    pub use crate::spao::{compute_psi, compute_t, lower_density_bound, rate_coefficient};
}
