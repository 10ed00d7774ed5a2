//! Averaged-observation decomposition of the estimation error and the
//! convergence-rate diagnostics built on it.
//!
//! With `T_k = (1/k) sum_{i<=k} beta phi_i (F_i - s_i)` the error splits as
//! `theta_k - theta = psi_k + T_k`, where `psi_k` follows a recursion driven
//! only by `T_{k-1}` and the noise-free CDF. Everything here is a pure
//! function of completed traces.

use crate::error::{Error, Result};
use crate::estimate::{expected_output, Trajectory};
use crate::linalg::{dot, norm};
use crate::model::NoiseModel;
use crate::simulate::RunTrace;

/// Vectors indexed by step, `k = start ..= start + len - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct VecSeries {
    start: usize,
    dim: usize,
    data: Vec<f64>,
}

impl VecSeries {
    pub fn new(start: usize, dim: usize) -> Self {
        VecSeries {
            start,
            dim,
            data: Vec::new(),
        }
    }

    pub fn push(&mut self, v: &[f64]) {
        debug_assert_eq!(v.len(), self.dim);
        self.data.extend_from_slice(v);
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.start + self.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn covers(&self, k: usize) -> bool {
        !self.is_empty() && k >= self.start && k <= self.end()
    }

    pub fn get(&self, k: usize) -> &[f64] {
        let i = k - self.start;
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> + '_ {
        self.data
            .chunks_exact(self.dim)
            .enumerate()
            .map(move |(i, v)| (self.start + i, v))
    }
}

/// `T_1 ..= T_K` for a trace with known truth, updated as
/// `T_k = (k-1)/k T_{k-1} + (beta/k) phi_k (F_k - s_k)`.
pub fn compute_t(trace: &RunTrace, beta: f64, theta: &[f64]) -> Result<VecSeries> {
    let system = trace.system();
    if theta.len() != system.dim() {
        return Err(Error::Shape("true parameter dimension mismatch".into()));
    }
    let n = system.dim();
    let mut out = VecSeries::new(1, n);
    let mut t = vec![0.0; n];
    for st in trace.steps() {
        let f = expected_output(system.thresholds(), st.phi, theta, system.noise())?;
        let kf = st.k as f64;
        let w = beta * (f - st.s as f64) / kf;
        for (tj, pj) in t.iter_mut().zip(st.phi) {
            *tj = (kf - 1.0) / kf * *tj + w * pj;
        }
        out.push(&t);
    }
    Ok(out)
}

/// `T_k`, `psi_k` and `theta_k - theta` over the estimator's index range.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaoTrace {
    pub t: VecSeries,
    pub psi: VecSeries,
    pub theta_err: VecSeries,
}

impl SpaoTrace {
    /// `max_k |theta_err_k - psi_k - T_k| / (1 + |theta_err_k|)`.
    pub fn decomposition_gap(&self) -> f64 {
        decomposition_gap(&self.theta_err, &self.psi, &self.t)
    }
}

/// `psi_k = (theta_k - theta) - T_k` for every `k` of the trajectory.
pub fn compute_psi(traj: &Trajectory, t: &VecSeries, theta: &[f64]) -> Result<SpaoTrace> {
    let n = traj.dim();
    if t.dim() != n || theta.len() != n {
        return Err(Error::Shape("dimension mismatch between estimates, T and theta".into()));
    }
    if !(t.covers(traj.start()) && t.covers(traj.end())) {
        return Err(Error::Shape(format!(
            "T covers k = {}..={} but estimates span {}..={}",
            t.start(),
            t.end(),
            traj.start(),
            traj.end()
        )));
    }
    let mut psi = VecSeries::new(traj.start(), n);
    let mut err = VecSeries::new(traj.start(), n);
    let mut tmp_e = vec![0.0; n];
    let mut tmp_p = vec![0.0; n];
    for (k, th) in traj.iter() {
        for j in 0..n {
            tmp_e[j] = th[j] - theta[j];
            tmp_p[j] = tmp_e[j] - t.get(k)[j];
        }
        err.push(&tmp_e);
        psi.push(&tmp_p);
    }
    let t_sub = {
        let mut s = VecSeries::new(traj.start(), n);
        for k in traj.start()..=traj.end() {
            s.push(t.get(k));
        }
        s
    };
    Ok(SpaoTrace {
        t: t_sub,
        psi,
        theta_err: err,
    })
}

/// Right-hand side of the psi recursion for step `k`:
/// `psi_{k-1} + (beta phi_k / k)(F(C - phi^T theta - phi^T psi_{k-1} - phi^T T_{k-1}) - F_k) + T_{k-1}/k`.
fn psi_recursion_step(
    thresholds: &[f64],
    noise: &NoiseModel,
    phi: &[f64],
    theta: &[f64],
    beta: f64,
    k: usize,
    psi_prev: &[f64],
    t_prev: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let kf = k as f64;
    let base = dot(phi, theta);
    let shift = dot(phi, psi_prev) + dot(phi, t_prev);
    let f_hat: f64 = thresholds
        .iter()
        .map(|c| noise.cdf(c - base - shift))
        .sum::<Result<f64>>()?;
    let f_true: f64 = thresholds
        .iter()
        .map(|c| noise.cdf(c - base))
        .sum::<Result<f64>>()?;
    let w = beta * (f_hat - f_true) / kf;
    for j in 0..out.len() {
        out[j] = psi_prev[j] + w * phi[j] + t_prev[j] / kf;
    }
    Ok(())
}

/// Largest one-step residual of the psi recursion, normalised by
/// `1 + max |psi|`, over `k = start + 1 ..= end` of the SPAO trace.
/// Valid for the harmonic step `beta / k`.
pub fn recursion_residual(spao: &SpaoTrace, trace: &RunTrace, beta: f64, theta: &[f64]) -> Result<f64> {
    let system = trace.system();
    let n = spao.psi.dim();
    let mut pred = vec![0.0; n];
    let mut worst = 0.0_f64;
    for k in spao.psi.start() + 1..=spao.psi.end() {
        psi_recursion_step(
            system.thresholds(),
            system.noise(),
            trace.regressors().phi(k),
            theta,
            beta,
            k,
            spao.psi.get(k - 1),
            spao.t.get(k - 1),
            &mut pred,
        )?;
        let r = spao
            .psi
            .get(k)
            .iter()
            .zip(&pred)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    let scale = 1.0
        + spao
            .psi
            .iter()
            .map(|(_, p)| norm(p))
            .fold(0.0, f64::max);
    Ok(worst / scale)
}

/// Generates `psi` forward from `psi_start = theta_err_{start} - T_{start}`
/// using only the recursion, never the estimates themselves.
pub fn psi_by_recursion(
    trace: &RunTrace,
    t: &VecSeries,
    theta: &[f64],
    beta: f64,
    start: usize,
    psi_start: &[f64],
) -> Result<VecSeries> {
    let system = trace.system();
    let n = psi_start.len();
    if !(t.covers(start) && t.covers(trace.len())) {
        return Err(Error::Shape("T does not cover the requested range".into()));
    }
    let mut out = VecSeries::new(start, n);
    out.push(psi_start);
    let mut prev = psi_start.to_vec();
    let mut next = vec![0.0; n];
    for k in start + 1..=trace.len() {
        psi_recursion_step(
            system.thresholds(),
            system.noise(),
            trace.regressors().phi(k),
            theta,
            beta,
            k,
            &prev,
            t.get(k - 1),
            &mut next,
        )?;
        out.push(&next);
        std::mem::swap(&mut prev, &mut next);
    }
    Ok(out)
}

/// `max_k |err_k - psi_k - T_k| / (1 + |err_k|)` over the range of `err`.
pub fn decomposition_gap(err: &VecSeries, psi: &VecSeries, t: &VecSeries) -> f64 {
    err.iter()
        .map(|(k, e)| {
            let (p, tk) = (psi.get(k), t.get(k));
            let gap = (0..e.len())
                .map(|j| {
                    let d = e[j] - p[j] - tk[j];
                    d * d
                })
                .sum::<f64>()
                .sqrt();
            gap / (1.0 + norm(e))
        })
        .fold(0.0, f64::max)
}

/// Step size of a general recursive set-valued identifier: scalar or an
/// `n x n` row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Gain {
    Scalar(f64),
    Matrix(Vec<f64>),
}

impl Gain {
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Gain::Scalar(r) => out.iter_mut().zip(v).for_each(|(o, x)| *o = r * x),
            Gain::Matrix(m) => {
                let n = v.len();
                for (i, o) in out.iter_mut().enumerate() {
                    *o = dot(&m[i * n..(i + 1) * n], v);
                }
            }
        }
    }
}

/// One step of `theta_k = theta_{k-1} + rho_k v_k (h_k - s_k)` as recorded
/// from an arbitrary recursive identifier with threshold `C_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralStep {
    pub gain: Gain,
    pub v: Vec<f64>,
    pub phi: Vec<f64>,
    pub threshold: f64,
    pub s: u32,
    /// The algorithm's prediction `h(phi_k, theta_{k-1})`.
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedSpao {
    pub t: VecSeries,
    pub psi: VecSeries,
    pub theta_err: VecSeries,
    /// Largest residual of the generalised psi recursion (scalar gains only).
    pub recursion_residual: Option<f64>,
}

/// `T_k = rho_k sum_{i<=k} v_i (F(C_i - phi_i^T theta) - s_i)` and
/// `psi_k = theta_k - theta - T_k` for `k = 1 ..= K`; estimates are rebuilt
/// from `theta_0 = init` and the recorded predictions.
pub fn spao_generalized(
    steps: &[GeneralStep],
    init: &[f64],
    theta: &[f64],
    noise: &NoiseModel,
) -> Result<GeneralizedSpao> {
    let n = theta.len();
    if init.len() != n {
        return Err(Error::Shape("initial estimate dimension mismatch".into()));
    }
    let scalar = matches!(steps.first().map(|s| &s.gain), Some(Gain::Scalar(_)) | None);
    for (i, st) in steps.iter().enumerate() {
        let k = i + 1;
        if st.v.len() != n || st.phi.len() != n {
            return Err(Error::Shape(format!("step {k}: gain vector or regressor has wrong length")));
        }
        match &st.gain {
            Gain::Scalar(_) if !scalar => {
                return Err(Error::Shape(format!("step {k}: scalar gain mixed with matrix gains")))
            }
            Gain::Matrix(_) if scalar => {
                return Err(Error::Shape(format!("step {k}: matrix gain mixed with scalar gains")))
            }
            Gain::Matrix(m) if m.len() != n * n => {
                return Err(Error::Shape(format!("step {k}: matrix gain must be {n}x{n}")))
            }
            _ => {}
        }
    }

    let mut t_out = VecSeries::new(1, n);
    let mut psi_out = VecSeries::new(1, n);
    let mut err_out = VecSeries::new(1, n);
    let mut theta_hat = init.to_vec();
    let mut sum = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut buf = vec![0.0; n];
    let mut worst: f64 = 0.0;
    let mut psi_prev: Vec<f64> = (0..n).map(|j| init[j] - theta[j]).collect();
    let mut rho_prev_inv = 0.0;
    for st in steps {
        let f_true = noise.cdf(st.threshold - dot(&st.phi, theta))?;
        let innov: Vec<f64> = st.v.iter().map(|v| v * (st.predicted - st.s as f64)).collect();
        st.gain.apply(&innov, &mut buf);
        theta_hat.iter_mut().zip(&buf).for_each(|(a, b)| *a += b);

        let t_prev = t.clone();
        sum.iter_mut()
            .zip(&st.v)
            .for_each(|(acc, v)| *acc += v * (f_true - st.s as f64));
        st.gain.apply(&sum, &mut t);

        let err: Vec<f64> = theta_hat.iter().zip(theta).map(|(a, b)| a - b).collect();
        let psi: Vec<f64> = err.iter().zip(&t).map(|(e, tk)| e - tk).collect();

        if let Gain::Scalar(rho) = st.gain {
            // psi_k = psi_{k-1} + rho v (h - F) + rho (1/rho - 1/rho_prev) T_{k-1}
            let w = rho * (st.predicted - f_true);
            let c = rho * (1.0 / rho - rho_prev_inv);
            let gap = (0..n)
                .map(|j| {
                    let pred = psi_prev[j] + w * st.v[j] + c * t_prev[j];
                    (psi[j] - pred).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            worst = worst.max(gap / (1.0 + norm(&psi)));
            rho_prev_inv = 1.0 / rho;
        }
        t_out.push(&t);
        psi_out.push(&psi);
        err_out.push(&err);
        psi_prev = psi;
    }
    Ok(GeneralizedSpao {
        t: t_out,
        psi: psi_out,
        theta_err: err_out,
        recursion_residual: scalar.then_some(worst),
    })
}

/// Infimum of the density over `[C - z, C + z]`, `z = M theta_norm + x`,
/// taking the right limit in `z`. Nonincreasing and right-continuous in `x`.
pub fn lower_density_bound(noise: &NoiseModel, c: f64, m: f64, theta_norm: f64, x: f64) -> f64 {
    let z = m * theta_norm + x;
    noise.inf_density(c - z, c + z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `eta > 1/2`: the fastest rates hold.
    Above,
    Critical,
    Below,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Above => "> 1/2",
            Regime::Critical => "= 1/2",
            Regime::Below => "< 1/2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCoefficient {
    pub eta: f64,
    pub regime: Regime,
}

/// `eta = beta * delta * f_lower` and its regime relative to 1/2.
pub fn rate_coefficient(beta: f64, delta: f64, f_lower: f64) -> RateCoefficient {
    let eta = beta * delta * f_lower;
    let regime = if (eta - 0.5).abs() <= 1e-12 {
        Regime::Critical
    } else if eta > 0.5 {
        Regime::Above
    } else {
        Regime::Below
    };
    RateCoefficient { eta, regime }
}

/// Rate diagnostics over an ensemble of squared-error series on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// `(k, k e_k / ln ln k)` per run, `k >= 3`.
    pub as_series: Vec<Vec<(usize, f64)>>,
    /// `(k, k * mean_r e_k)`.
    pub mean_k_err_sq: Vec<(usize, f64)>,
    /// Least-squares slope of `ln mean e_k` against `ln k` over `window`.
    pub ms_slope: f64,
    pub window: (usize, usize),
    pub f_lower: Option<f64>,
    pub rate: Option<RateCoefficient>,
}

/// `k e / ln ln k`, defined for `k >= 3`.
pub fn as_rate_value(k: usize, err_sq: f64) -> Option<f64> {
    (k >= 3).then(|| k as f64 * err_sq / (k as f64).ln().ln())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 10 {
        return Err(Error::Statistics(format!(
            "slope fit needs at least 10 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Statistics("log-log fit needs positive values".into()));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Statistics("slope fit needs distinct k values".into()));
    }
    Ok(sxy / sxx)
}

/// Builds the rate report. `runs[r][i]` is run `r`'s squared error at `grid[i]`.
pub fn rate_diagnostics<S: AsRef<[f64]>>(grid: &[usize], runs: &[S], window: (usize, usize)) -> Result<RateReport> {
    if runs.is_empty() {
        return Err(Error::Statistics("ensemble is empty".into()));
    }
    if runs.iter().any(|r| r.as_ref().len() != grid.len()) {
        return Err(Error::Shape("error series and grid differ in length".into()));
    }
    let r = runs.len() as f64;
    let mean: Vec<f64> = (0..grid.len())
        .map(|i| runs.iter().map(|run| run.as_ref()[i]).sum::<f64>() / r)
        .collect();
    let as_series = runs
        .iter()
        .map(|run| {
            grid.iter()
                .zip(run.as_ref())
                .filter_map(|(&k, &e)| as_rate_value(k, e).map(|v| (k, v)))
                .collect()
        })
        .collect();
    let mean_k_err_sq = grid.iter().zip(&mean).map(|(&k, &m)| (k, k as f64 * m)).collect();
    let fit: Vec<(f64, f64)> = grid
        .iter()
        .zip(&mean)
        .filter(|(&k, _)| k >= window.0 && k <= window.1)
        .map(|(&k, &m)| (k as f64, m))
        .collect();
    let ms_slope = loglog_slope(&fit)?;
    Ok(RateReport {
        as_series,
        mean_k_err_sq,
        ms_slope,
        window,
        f_lower: None,
        rate: None,
    })
}

/// Empirical probability with its 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub k: usize,
    pub level: f64,
    pub runs: usize,
    pub probability: f64,
    pub lower: f64,
    pub upper: f64,
}

impl TailEstimate {
    pub fn disjoint_from(&self, other: &TailEstimate) -> bool {
        self.upper < other.lower || other.upper < self.lower
    }
}

pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Minimum ensemble size for reporting a tail probability.
pub const MIN_TAIL_RUNS: usize = 30;

/// Fraction of runs whose supremum in `sups` reaches `level`.
pub fn tail_from_sups(sups: &[f64], k: usize, level: f64) -> Result<TailEstimate> {
    if sups.len() < MIN_TAIL_RUNS {
        return Err(Error::Statistics(format!(
            "tail estimate needs at least {MIN_TAIL_RUNS} runs, got {}",
            sups.len()
        )));
    }
    let hits = sups.iter().filter(|&&s| s >= level).count();
    let (lower, upper) = wilson_interval(hits, sups.len(), 1.96);
    Ok(TailEstimate {
        k,
        level,
        runs: sups.len(),
        probability: hits as f64 / sups.len() as f64,
        lower,
        upper,
    })
}

/// Fraction of runs with `sup_{k <= j <= K} e_j >= level`, where `runs[r][i]`
/// is the squared error at step `start + i` (finite-horizon surrogate of the
/// infinite-tail event).
pub fn tail_estimate<S: AsRef<[f64]>>(runs: &[S], start: usize, k: usize, level: f64) -> Result<TailEstimate> {
    let sups = runs
        .iter()
        .map(|r| {
            let r = r.as_ref();
            if k < start || k >= start + r.len() {
                return Err(Error::Index(format!("k = {k} outside the recorded range")));
            }
            Ok(r[k - start..].iter().copied().fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    tail_from_sups(&sups, k, level)
}
