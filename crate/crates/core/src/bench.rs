//! Monte Carlo harness, Cramér–Rao bound for binary observations, and the
//! empirical-measurement baseline for periodic inputs.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::{EstimatorState, StepPolicy};
use crate::linalg::{self, dot};
use crate::model::{NoiseModel, PeCertificate, Sensor, SystemModel};
use crate::simulate::{observe, pe_check, regressors_for, InputPlan, Regressors, RunTrace};
use crate::spao::{lower_density_bound, rate_coefficient, rate_diagnostics, tail_from_sups, RateReport, TailEstimate};

/// Inverse Fisher information of `theta` given binary readings `s_1..s_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Crlb {
    pub k: usize,
    pub dim: usize,
    /// Row-major `n x n` covariance bound.
    pub matrix: Vec<f64>,
    pub trace: f64,
    /// `k * trace`, comparable with `k * E|theta_k - theta|^2`.
    pub k_trace: f64,
}

/// `(sum_i f_i^2 / (F_i (1 - F_i)) phi_i phi_i^T)^{-1}` with
/// `F_i = F(C - phi_i^T theta)`, `f_i = f(C - phi_i^T theta)`.
pub fn crlb(regressors: &Regressors, theta: &[f64], noise: &NoiseModel, thresholds: &[f64]) -> Result<Crlb> {
    let &[c] = thresholds else {
        return Err(Error::config(
            "system.thresholds",
            "the Cramér–Rao bound is implemented for a single threshold",
        ));
    };
    let n = regressors.dim();
    if theta.len() != n {
        return Err(Error::Shape("true parameter dimension mismatch".into()));
    }
    let mut info = vec![0.0; n * n];
    for phi in regressors.iter() {
        let x = c - dot(phi, theta);
        let big_f = noise.cdf(x)?;
        let var = big_f * (1.0 - big_f);
        if var > 0.0 {
            let f = noise.pdf(x)?;
            linalg::add_outer(&mut info, phi, f * f / var);
        }
    }
    let rank = linalg::psd_rank(&info, n);
    if rank < n {
        return Err(Error::Singular { rank, dim: n });
    }
    let chol = DMatrix::from_row_slice(n, n, &info)
        .cholesky()
        .ok_or(Error::Singular { rank, dim: n })?;
    let inv = chol.inverse();
    let matrix: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| inv[(i, j)]).collect();
    let trace = (0..n).map(|i| matrix[i * n + i]).sum::<f64>();
    let k = regressors.len();
    Ok(Crlb {
        k,
        dim: n,
        matrix,
        trace,
        k_trace: k as f64 * trace,
    })
}

/// Everything needed to reproduce one ensemble experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemModel,
    pub inputs: InputPlan,
    pub policy: StepPolicy,
    pub init: Vec<f64>,
    pub horizon: usize,
    pub runs: usize,
    pub seed: u64,
    pub pe_window: usize,
    /// Caps concurrent replications; `None` uses all cores.
    pub jobs: Option<usize>,
    /// Fit window for the mean-square slope; defaults to `[K/100, K]`.
    pub slope_window: Option<(usize, usize)>,
    /// Explicit thinning grid; defaults to [`thinning_grid`].
    pub grid: Option<Vec<usize>>,
    pub output_dir: Option<std::path::PathBuf>,
}

impl ExperimentConfig {
    /// The reference experiment: `theta = (3, -1)`, `C = 1`, Gaussian noise
    /// with variance 25, inputs cycling `(-1, 2, 0)` with dither in
    /// `[-0.1, 0.1]`, `beta = 20`, `k0 = 20`, `theta_{k0} = (1, 1)`,
    /// 200 replications sharing one input realisation.
    pub fn reference() -> Self {
        let sensor = Sensor::binary(1.0, NoiseModel::gaussian(25.0).expect("valid variance"))
            .expect("single threshold");
        ExperimentConfig {
            system: SystemModel::new(vec![3.0, -1.0], sensor, 2).expect("valid system"),
            inputs: InputPlan::reference(0.1, 100_000, 1),
            policy: StepPolicy::harmonic(20.0).with_warm_start(20),
            init: vec![1.0, 1.0],
            horizon: 100_000,
            runs: 200,
            seed: 1,
            pe_window: 3,
            jobs: None,
            slope_window: None,
            grid: None,
            output_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        if self.runs == 0 {
            return Err(Error::config("mc.runs", "need at least one replication"));
        }
        if self.horizon <= self.policy.warm_start {
            return Err(Error::config(
                "sim.length",
                format!(
                    "horizon {} must exceed the warm start {}",
                    self.horizon, self.policy.warm_start
                ),
            ));
        }
        if self.init.len() != self.system.dim() {
            return Err(Error::config(
                "est.init",
                format!("expected {} components, got {}", self.system.dim(), self.init.len()),
            ));
        }
        if self.jobs == Some(0) {
            return Err(Error::config("mc.jobs", "must be >= 1"));
        }
        Ok(())
    }

    pub fn slope_window(&self) -> (usize, usize) {
        self.slope_window
            .unwrap_or(((self.horizon / 100).max(1), self.horizon))
    }

    /// Seed of the noise stream for replication `run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        split_seed(self.seed, run as u64)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent child seed for stream `index` of a master seed.
pub fn split_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(index.wrapping_add(0xA076_1D64_78BD_642F)))
}

/// Geometric grid with ratio 1.1 from `start` to `end`, always containing
/// both ends and every power of ten in between, capped at 500 points by
/// widening the ratio.
pub fn thinning_grid(start: usize, end: usize) -> Vec<usize> {
    const MAX_POINTS: usize = 500;
    let mut ratio = 1.1_f64;
    loop {
        let mut grid = vec![start];
        let mut g = start;
        while g < end {
            g = ((g as f64 * ratio).ceil() as usize).max(g + 1).min(end);
            grid.push(g);
        }
        let mut p = 1usize;
        while p <= end {
            if p > start {
                grid.push(p);
            }
            p = p.saturating_mul(10);
        }
        grid.sort_unstable();
        grid.dedup();
        if grid.len() <= MAX_POINTS {
            return grid;
        }
        ratio *= 1.1;
    }
}

/// One replication reduced to the thinning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// Estimates at each grid point, row-major `grid.len() x n`.
    pub estimates: Vec<f64>,
    pub err_sq: Vec<f64>,
    /// `sup_{g_i <= j <= K} |theta_j - theta|^2` at each grid point.
    pub tail_sup: Vec<f64>,
    pub final_err_sq: f64,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub grid: Vec<usize>,
    pub dim: usize,
    pub mean_err_sq: Vec<f64>,
    pub runs: Vec<RunRecord>,
    pub rate: RateReport,
    pub pe: PeCertificate,
    /// `K * trace(CRLB)` over the shared regressors (binary sensors only).
    pub crlb_k_trace: Option<f64>,
    pub wall_clock: Duration,
}

impl PartialEq for EnsembleResult {
    /// Wall-clock metadata is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid
            && self.dim == other.dim
            && self.mean_err_sq == other.mean_err_sq
            && self.runs == other.runs
            && self.rate == other.rate
            && self.pe == other.pe
            && self.crlb_k_trace == other.crlb_k_trace
    }
}

impl EnsembleResult {
    pub fn final_errors(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.final_err_sq).collect()
    }

    fn grid_index(&self, k: usize) -> Result<usize> {
        self.grid
            .binary_search(&k)
            .map_err(|_| Error::Index(format!("k = {k} is not on the thinning grid")))
    }

    /// `mean_r |theta_k - theta|^2` at a grid point.
    pub fn mean_err_sq_at(&self, k: usize) -> Result<f64> {
        Ok(self.mean_err_sq[self.grid_index(k)?])
    }

    /// Fraction of runs with `sup_{k <= j <= K} |theta_j - theta|^2 >= level`.
    pub fn tail_estimate(&self, k: usize, level: f64) -> Result<TailEstimate> {
        let i = self.grid_index(k)?;
        let sups: Vec<f64> = self.runs.iter().map(|r| r.tail_sup[i]).collect();
        tail_from_sups(&sups, k, level)
    }
}

/// Streams one replication without materialising the trace. Noise draws
/// follow the same order as [`crate::simulate::simulate_with_regressors`].
fn replicate(
    system: &SystemModel,
    regressors: &Regressors,
    policy: StepPolicy,
    init: &[f64],
    grid: &[usize],
    run: usize,
    seed: u64,
) -> Result<RunRecord> {
    let n = system.dim();
    let theta = system.theta();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = EstimatorState::new(policy, init.to_vec(), system.sensor().clone())?;
    let k0 = state.k();
    let err = |t: &[f64]| t.iter().zip(theta).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();

    let mut estimates = Vec::with_capacity(grid.len() * n);
    let mut err_sq = Vec::with_capacity(grid.len());
    let mut block_max = vec![0.0_f64; grid.len()];
    let mut gi = 0;
    let mut e = err(state.theta_hat());
    for k in 1..=regressors.len() {
        let phi = regressors.phi(k);
        let (_, s) = observe(system, phi, system.noise().sample(&mut rng));
        if k > k0 {
            state.step(phi, s)?;
            e = err(state.theta_hat());
        }
        if k < k0 {
            continue;
        }
        while gi + 1 < grid.len() && grid[gi + 1] <= k {
            gi += 1;
        }
        if grid[gi] == k {
            estimates.extend_from_slice(state.theta_hat());
            err_sq.push(e);
        }
        if grid[gi] <= k {
            block_max[gi] = block_max[gi].max(e);
        }
    }
    let mut tail_sup = block_max;
    for i in (0..tail_sup.len().saturating_sub(1)).rev() {
        tail_sup[i] = tail_sup[i].max(tail_sup[i + 1]);
    }
    Ok(RunRecord {
        run,
        seed,
        estimates,
        err_sq,
        tail_sup,
        final_err_sq: e,
    })
}

/// Runs `R` replications sharing one input realisation and differing only
/// in their noise seeds, then aggregates on the thinning grid.
pub fn monte_carlo(config: &ExperimentConfig) -> Result<EnsembleResult> {
    config.validate()?;
    let started = Instant::now();
    let system = &config.system;
    let regressors = regressors_for(system, &config.inputs, config.horizon)?;
    let pe = pe_check(&regressors, config.pe_window)?;
    let k0 = config.policy.warm_start;
    let grid = match &config.grid {
        Some(g) => {
            if g.is_empty() || g.windows(2).any(|w| w[1] <= w[0]) || g[0] < k0 || *g.last().unwrap() > config.horizon {
                return Err(Error::config("mc.grid", "grid must be strictly increasing within [k0, K]"));
            }
            g.clone()
        }
        None => thinning_grid(k0, config.horizon),
    };

    let work = |run: usize| {
        let seed = config.run_seed(run);
        replicate(system, &regressors, config.policy, &config.init, &grid, run, seed).map_err(|e| {
            Error::Ensemble {
                run,
                seed,
                source: Box::new(e),
            }
        })
    };
    let runs: Vec<RunRecord> = match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::config("mc.jobs", e.to_string()))?
            .install(|| (0..config.runs).into_par_iter().map(work).collect::<Result<_>>())?,
        None => (0..config.runs).into_par_iter().map(work).collect::<Result<_>>()?,
    };

    let r = runs.len() as f64;
    let mean_err_sq: Vec<f64> = (0..grid.len())
        .map(|i| runs.iter().map(|run| run.err_sq[i]).sum::<f64>() / r)
        .collect();
    let series: Vec<&[f64]> = runs.iter().map(|run| run.err_sq.as_slice()).collect();
    let mut rate = rate_diagnostics(&grid, &series, config.slope_window())?;
    let f_lower = system
        .thresholds()
        .iter()
        .map(|&c| lower_density_bound(system.noise(), c, pe.regressor_bound, crate::linalg::norm(system.theta()), 0.0))
        .fold(f64::INFINITY, f64::min);
    rate.f_lower = Some(f_lower);
    rate.rate = config
        .policy
        .harmonic_beta()
        .map(|beta| rate_coefficient(beta, pe.excitation_level, f_lower));
    let crlb_k_trace = if system.sensor().is_binary() {
        crlb(&regressors, system.theta(), system.noise(), system.thresholds())
            .ok()
            .map(|c| c.k_trace)
    } else {
        None
    };
    Ok(EnsembleResult {
        dim: system.dim(),
        grid,
        mean_err_sq,
        runs,
        rate,
        pe,
        crlb_k_trace,
        wall_clock: started.elapsed(),
    })
}

/// Estimate from per-phase reading frequencies: `ybar_j = C - F^{-1}(freq_j)`,
/// then least squares on `Phi theta = ybar`.
pub fn baseline_from_frequencies(
    frequencies: &[f64],
    phase_regressors: &Regressors,
    threshold: f64,
    noise: &NoiseModel,
) -> Result<Vec<f64>> {
    let p = phase_regressors.len();
    let n = phase_regressors.dim();
    if frequencies.len() != p {
        return Err(Error::Shape(format!("{} frequencies for {p} phases", frequencies.len())));
    }
    let mut gram = vec![0.0; n * n];
    for phi in phase_regressors.iter() {
        linalg::add_outer(&mut gram, phi, 1.0);
    }
    let rank = linalg::psd_rank(&gram, n);
    if rank < n {
        return Err(Error::Singular { rank, dim: n });
    }
    let ybar = frequencies
        .iter()
        .enumerate()
        .map(|(phase, &q)| {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::Inversion { phase, frequency: q });
            }
            Ok(threshold - noise.quantile(q)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let a = DMatrix::from_row_slice(p, n, phase_regressors.iter().flatten().copied().collect::<Vec<_>>().as_slice());
    let b = DVector::from_vec(ybar);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Statistics(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}

/// Empirical-measurement estimate for exactly `period`-periodic regressors:
/// phase `j` collects steps with `(k - 1) mod period == j`.
pub fn empirical_measurement_baseline(trace: &RunTrace, period: usize, phase_regressors: &Regressors) -> Result<Vec<f64>> {
    let system = trace.system();
    let &[c] = system.thresholds() else {
        return Err(Error::config("system.thresholds", "baseline needs a binary sensor"));
    };
    if period == 0 || phase_regressors.len() != period {
        return Err(Error::Shape(format!(
            "need {period} phase regressors, got {}",
            phase_regressors.len()
        )));
    }
    if phase_regressors.dim() != system.dim() {
        return Err(Error::Shape("phase regressor dimension mismatch".into()));
    }
    if trace.len() < period {
        return Err(Error::Shape("trace shorter than one period".into()));
    }
    let mut hits = vec![0u64; period];
    let mut counts = vec![0u64; period];
    for st in trace.steps() {
        let j = (st.k - 1) % period;
        let want = phase_regressors.phi(j + 1);
        if st.phi.iter().zip(want).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(Error::config(
                "input.kind",
                format!("regressors are not {period}-periodic (k = {})", st.k),
            ));
        }
        hits[j] += st.s as u64;
        counts[j] += 1;
    }
    let freqs: Vec<f64> = hits.iter().zip(&counts).map(|(&h, &n)| h as f64 / n as f64).collect();
    baseline_from_frequencies(&freqs, phase_regressors, c, system.noise())
}
