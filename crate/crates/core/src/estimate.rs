//! Stochastic-approximation identifier for threshold-sensor MA systems.
//!
//! The recursion is
//!
//! ```text
//! theta_k = theta_{k-1} + rho_k * phi_k * (Fhat_k - s_k),   k > k0
//! Fhat_k  = sum_j F(C_j - phi_k^T theta_{k-1})
//! ```
//!
//! with no projection, truncation or clipping. `theta_{k0}` is the initial
//! value; observations at `k <= k0` are ignored.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::model::{NoiseModel, PeCertificate, Sensor, SystemModel};
use crate::simulate::{Regressors, RunTrace};
use crate::spao::lower_density_bound;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepKind {
    /// `rho_k = beta / k`.
    Harmonic { beta: f64 },
    /// `rho_k = beta_k / (1 + sum_{i<=k} |phi_i|^2)`, `beta_k = clamp(beta, lo, hi)`.
    Normalized { beta: f64, beta_lo: f64, beta_hi: f64 },
    /// `rho_k = beta_k / k` with `beta_k = margin / (2 delta f_lo(M |theta_{k-1}|))`.
    AdaptiveBeta {
        margin: f64,
        excitation_level: f64,
        regressor_bound: f64,
    },
}

/// Step-size rule plus the warm-start index `k0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub kind: StepKind,
    pub warm_start: usize,
}

impl StepPolicy {
    pub fn harmonic(beta: f64) -> Self {
        StepPolicy {
            kind: StepKind::Harmonic { beta },
            warm_start: 1,
        }
    }

    pub fn normalized(beta: f64, beta_lo: f64, beta_hi: f64) -> Self {
        StepPolicy {
            kind: StepKind::Normalized {
                beta,
                beta_lo,
                beta_hi,
            },
            warm_start: 1,
        }
    }

    /// Adaptive coefficient using the certified excitation level and regressor bound.
    pub fn adaptive(margin: f64, pe: &PeCertificate) -> Self {
        StepPolicy {
            kind: StepKind::AdaptiveBeta {
                margin,
                excitation_level: pe.excitation_level,
                regressor_bound: pe.regressor_bound,
            },
            warm_start: 1,
        }
    }

    pub fn with_warm_start(self, warm_start: usize) -> Self {
        StepPolicy { warm_start, ..self }
    }

    /// Constant `beta` of the harmonic policy, if that is the policy.
    pub fn harmonic_beta(&self) -> Option<f64> {
        match self.kind {
            StepKind::Harmonic { beta } => Some(beta),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive and finite, got {v}")))
            }
        };
        if self.warm_start < 1 {
            return Err(Error::config("est.k0", "warm start must be >= 1"));
        }
        match self.kind {
            StepKind::Harmonic { beta } => positive("est.beta", beta),
            StepKind::Normalized {
                beta,
                beta_lo,
                beta_hi,
            } => {
                positive("est.beta", beta)?;
                positive("est.beta_lo", beta_lo)?;
                positive("est.beta_hi", beta_hi)?;
                if beta_lo > beta_hi {
                    return Err(Error::config(
                        "est.beta_lo",
                        format!("lower bound {beta_lo} exceeds upper bound {beta_hi}"),
                    ));
                }
                Ok(())
            }
            StepKind::AdaptiveBeta {
                margin,
                excitation_level,
                regressor_bound,
            } => {
                if !(margin.is_finite() && margin > 1.0) {
                    return Err(Error::config(
                        "est.margin",
                        format!("safety margin must exceed 1, got {margin}"),
                    ));
                }
                positive("pe.excitation_level", excitation_level)?;
                if !(regressor_bound.is_finite() && regressor_bound >= 0.0) {
                    return Err(Error::config("pe.regressor_bound", "must be finite and >= 0"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    theta_hat: Vec<f64>,
    k: usize,
    policy: StepPolicy,
    normalizer: f64,
    sensor: Sensor,
}

impl EstimatorState {
    /// State holding `theta_{k0} = init`; the next update is step `k0 + 1`.
    pub fn new(policy: StepPolicy, init: Vec<f64>, sensor: Sensor) -> Result<Self> {
        policy.validate()?;
        if init.is_empty() || init.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("est.init", "initial estimate must be non-empty and finite"));
        }
        Ok(EstimatorState {
            theta_hat: init,
            k: policy.warm_start,
            policy,
            normalizer: 0.0,
            sensor,
        })
    }

    pub fn theta_hat(&self) -> &[f64] {
        &self.theta_hat
    }

    /// Index of the current estimate.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn policy(&self) -> &StepPolicy {
        &self.policy
    }

    pub fn sensor(&self) -> &Sensor {
        &self.sensor
    }

    /// Running `sum ||phi_i||^2` over the processed steps.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// One update with sensor reading `s`.
    pub fn step(&mut self, phi: &[f64], s: u32) -> Result<()> {
        if s as usize > self.sensor.levels() {
            return Err(Error::Shape(format!(
                "reading {s} outside {{0..{}}}",
                self.sensor.levels()
            )));
        }
        self.step_towards(phi, s as f64)
    }

    /// One update against a real-valued target in place of `s_k`; with the
    /// target set to the true `E[s_k]` this is the noise-free mean-field replay.
    pub fn step_towards(&mut self, phi: &[f64], target: f64) -> Result<()> {
        if phi.len() != self.theta_hat.len() {
            return Err(Error::Shape(format!(
                "regressor has length {}, estimate has {}",
                phi.len(),
                self.theta_hat.len()
            )));
        }
        let k = self.k + 1;
        let rho = step_size(&self.policy, k, phi, self)?;
        let predicted = expected_output(self.sensor.thresholds(), phi, &self.theta_hat, self.sensor.noise())?;
        let gain = rho * (predicted - target);
        for (t, p) in self.theta_hat.iter_mut().zip(phi) {
            *t += gain * p;
        }
        if self.theta_hat.iter().any(|t| !t.is_finite()) {
            return Err(Error::NumericalFault { k });
        }
        self.normalizer += dot(phi, phi);
        self.k = k;
        Ok(())
    }
}

/// `rho_k` for step `k` with regressor `phi_k`, given the state before the update.
pub fn step_size(policy: &StepPolicy, k: usize, phi: &[f64], state: &EstimatorState) -> Result<f64> {
    let kf = k as f64;
    match policy.kind {
        StepKind::Harmonic { beta } => Ok(beta / kf),
        StepKind::Normalized {
            beta,
            beta_lo,
            beta_hi,
        } => Ok(beta.clamp(beta_lo, beta_hi) / (1.0 + state.normalizer + dot(phi, phi))),
        StepKind::AdaptiveBeta {
            margin,
            excitation_level,
            regressor_bound,
        } => {
            let beta = adaptive_beta(
                margin,
                excitation_level,
                regressor_bound,
                norm(&state.theta_hat),
                &state.sensor,
            )?;
            Ok(beta / kf)
        }
    }
}

/// `beta_k = margin / (2 delta f_lo)`, with `f_lo` the density lower bound at
/// radius `M |theta_hat|` (smallest over all thresholds).
pub fn adaptive_beta(
    margin: f64,
    excitation_level: f64,
    regressor_bound: f64,
    theta_norm: f64,
    sensor: &Sensor,
) -> Result<f64> {
    let f_lo = sensor
        .thresholds()
        .iter()
        .map(|&c| lower_density_bound(sensor.noise(), c, regressor_bound, theta_norm, 0.0))
        .fold(f64::INFINITY, f64::min);
    if !(f_lo > 0.0) {
        return Err(Error::RateDegenerate);
    }
    Ok(margin / (2.0 * excitation_level * f_lo))
}

/// `sum_j F(C_j - phi^T theta_hat)`, the predicted reading.
pub fn expected_output(thresholds: &[f64], phi: &[f64], theta_hat: &[f64], noise: &NoiseModel) -> Result<f64> {
    let mean = dot(phi, theta_hat);
    thresholds.iter().map(|c| noise.cdf(c - mean)).sum()
}

/// Estimates `theta_{k0} ..= theta_K` and, when the truth is known, `|theta_k - theta|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    start: usize,
    dim: usize,
    estimates: Vec<f64>,
    err_sq: Option<Vec<f64>>,
}

impl Trajectory {
    /// Index `k0` of the first recorded estimate.
    pub fn start(&self) -> usize {
        self.start
    }

    /// Index of the last recorded estimate.
    pub fn end(&self) -> usize {
        self.start + self.len() - 1
    }

    pub fn len(&self) -> usize {
        self.estimates.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta_hat(&self, k: usize) -> &[f64] {
        let i = k - self.start;
        &self.estimates[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last(&self) -> &[f64] {
        self.theta_hat(self.end())
    }

    pub fn err_sq(&self) -> Option<&[f64]> {
        self.err_sq.as_deref()
    }

    pub fn err_sq_at(&self, k: usize) -> Option<f64> {
        self.err_sq.as_ref().map(|e| e[k - self.start])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> + '_ {
        self.estimates
            .chunks_exact(self.dim)
            .enumerate()
            .map(move |(i, t)| (self.start + i, t))
    }
}

struct Recorder<'a> {
    traj: Trajectory,
    truth: Option<&'a [f64]>,
}

impl<'a> Recorder<'a> {
    fn new(state: &EstimatorState, truth: Option<&'a [f64]>) -> Self {
        let mut r = Recorder {
            traj: Trajectory {
                start: state.k(),
                dim: state.theta_hat().len(),
                estimates: Vec::new(),
                err_sq: truth.map(|_| Vec::new()),
            },
            truth,
        };
        r.record(state.theta_hat());
        r
    }

    fn record(&mut self, theta_hat: &[f64]) {
        self.traj.estimates.extend_from_slice(theta_hat);
        if let (Some(truth), Some(err)) = (self.truth, self.traj.err_sq.as_mut()) {
            err.push(theta_hat.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum());
        }
    }
}

/// Folds the recursion over recorded regressors and readings.
pub fn run_on(
    regressors: &Regressors,
    readings: &[u32],
    sensor: &Sensor,
    policy: StepPolicy,
    init: &[f64],
    truth: Option<&[f64]>,
) -> Result<Trajectory> {
    if regressors.is_empty() {
        return Err(Error::Shape("empty trace".into()));
    }
    if readings.len() != regressors.len() {
        return Err(Error::Shape("readings and regressors differ in length".into()));
    }
    check_dims(regressors.dim(), init, truth)?;
    let mut state = EstimatorState::new(policy, init.to_vec(), sensor.clone())?;
    let mut rec = Recorder::new(&state, truth);
    for k in state.k() + 1..=regressors.len() {
        state.step(regressors.phi(k), readings[k - 1])?;
        rec.record(state.theta_hat());
    }
    Ok(rec.traj)
}

/// Runs the identifier over a simulated trace, recording squared errors
/// against the trace's true parameter.
pub fn run_estimator(trace: &RunTrace, policy: StepPolicy, init: &[f64]) -> Result<Trajectory> {
    let system = trace.system();
    run_on(
        trace.regressors(),
        trace.readings(),
        system.sensor(),
        policy,
        init,
        Some(system.theta()),
    )
}

/// Deterministic replay with every reading replaced by its mean
/// `E[s_k] = sum_j F(C_j - phi_k^T theta)`.
pub fn run_mean_field(
    regressors: &Regressors,
    system: &SystemModel,
    policy: StepPolicy,
    init: &[f64],
) -> Result<Trajectory> {
    check_dims(regressors.dim(), init, Some(system.theta()))?;
    let mut state = EstimatorState::new(policy, init.to_vec(), system.sensor().clone())?;
    let mut rec = Recorder::new(&state, Some(system.theta()));
    for k in state.k() + 1..=regressors.len() {
        let phi = regressors.phi(k);
        let target = expected_output(system.thresholds(), phi, system.theta(), system.noise())?;
        state.step_towards(phi, target)?;
        rec.record(state.theta_hat());
    }
    Ok(rec.traj)
}

fn check_dims(n: usize, init: &[f64], truth: Option<&[f64]>) -> Result<()> {
    if init.len() != n {
        return Err(Error::config(
            "est.init",
            format!("initial estimate has length {}, regressors have {n}", init.len()),
        ));
    }
    if truth.is_some_and(|t| t.len() != n) {
        return Err(Error::Shape("true parameter dimension mismatch".into()));
    }
    Ok(())
}
