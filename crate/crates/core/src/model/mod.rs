//! Domain types shared by the simulator, the estimator and the diagnostics.

mod noise;

pub use noise::{CdfTable, NoiseFamily, NoiseModel, QUANTILE_TOL};

use crate::error::{Error, Result};

/// Threshold sensor together with the (known) noise law behind it.
///
/// With thresholds `C_1 < ... < C_q` the reading is the number of
/// thresholds at or above the output, `s = #{j : y <= C_j}`, so the
/// binary case `q = 1` gives `s = 1{y <= C}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sensor {
    thresholds: Vec<f64>,
    noise: NoiseModel,
}

impl Sensor {
    pub fn new(thresholds: Vec<f64>, noise: NoiseModel) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::config("system.thresholds", "need at least one threshold"));
        }
        if thresholds.iter().any(|c| !c.is_finite()) {
            return Err(Error::config("system.thresholds", "thresholds must be finite"));
        }
        if thresholds.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "system.thresholds",
                "thresholds must be strictly ascending",
            ));
        }
        Ok(Sensor { thresholds, noise })
    }

    pub fn binary(threshold: f64, noise: NoiseModel) -> Result<Self> {
        Sensor::new(vec![threshold], noise)
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Number of thresholds `q`.
    pub fn levels(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_binary(&self) -> bool {
        self.thresholds.len() == 1
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    /// Quantise an output.
    pub fn read(&self, y: f64) -> u32 {
        self.thresholds.iter().filter(|&&c| y <= c).count() as u32
    }

    /// `E[s | phi^T theta = mean] = sum_j F(C_j - mean)`.
    pub fn expected_reading(&self, mean: f64) -> Result<f64> {
        self.thresholds
            .iter()
            .map(|c| self.noise.cdf(c - mean))
            .sum()
    }
}

/// Linear-in-parameters MA system `y_k = phi_k^T theta + d_k` behind a threshold sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    theta: Vec<f64>,
    sensor: Sensor,
    regressor_memory: usize,
}

impl SystemModel {
    pub fn new(theta: Vec<f64>, sensor: Sensor, regressor_memory: usize) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::config("system.theta", "parameter dimension must be >= 1"));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::config("system.theta", "parameter must be finite"));
        }
        if regressor_memory == 0 {
            return Err(Error::config("system.memory", "regressor memory must be >= 1"));
        }
        Ok(SystemModel {
            theta,
            sensor,
            regressor_memory,
        })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Regressor dimension `n`.
    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// Input memory `n̄` of the regressor map.
    pub fn regressor_memory(&self) -> usize {
        self.regressor_memory
    }

    pub fn sensor(&self) -> &Sensor {
        &self.sensor
    }

    pub fn thresholds(&self) -> &[f64] {
        self.sensor.thresholds()
    }

    pub fn noise(&self) -> &NoiseModel {
        self.sensor.noise()
    }
}

/// Finite-horizon certificate of bounded, uniformly persistently exciting
/// regressors: every length-`window` block satisfies
/// `(1/N) sum phi phi^T >= excitation_level * I`, and `|phi_k| <= regressor_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeCertificate {
    pub window: usize,
    pub excitation_level: f64,
    pub regressor_bound: f64,
    pub valid: bool,
    /// 1-based step index where the least excited window starts.
    pub worst_window_start: usize,
}
