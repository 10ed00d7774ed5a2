//! Input generation, regressors, quantised observations and the
//! persistent-excitation certificate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{PeCertificate, Sensor, SystemModel};

/// Input pattern repeated by the reference experiment, `u_{3i+j} = pattern[j] + e`.
pub const REFERENCE_PATTERN: [f64; 3] = [-1.0, 2.0, 0.0];

#[derive(Debug, Clone, PartialEq)]
pub enum InputKind {
    /// `u_k = pattern[k mod p] + e_k`, `e_k ~ U[-halfwidth, halfwidth]`.
    CyclicDither { pattern: Vec<f64>, halfwidth: f64 },
    /// `u_k ~ U[low, high]` i.i.d.
    IidUniform { low: f64, high: f64 },
    /// Values for `u_0, u_1, ...`.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputPlan {
    pub kind: InputKind,
    /// Last input index; [`gen_inputs`] yields `u_0 ..= u_length`.
    pub length: usize,
    pub seed: u64,
}

impl InputPlan {
    pub fn cyclic(pattern: Vec<f64>, halfwidth: f64, length: usize, seed: u64) -> Self {
        InputPlan {
            kind: InputKind::CyclicDither { pattern, halfwidth },
            length,
            seed,
        }
    }

    /// The reference `(-1, 2, 0)` cycle with uniform dither of the given half-width.
    pub fn reference(halfwidth: f64, length: usize, seed: u64) -> Self {
        InputPlan::cyclic(REFERENCE_PATTERN.to_vec(), halfwidth, length, seed)
    }

    fn validate(&self) -> Result<()> {
        match &self.kind {
            InputKind::CyclicDither { pattern, halfwidth } => {
                if pattern.is_empty() {
                    return Err(Error::config("input.pattern", "pattern must not be empty"));
                }
                if !(halfwidth.is_finite() && *halfwidth >= 0.0) {
                    return Err(Error::config(
                        "input.dither",
                        format!("dither half-width must be >= 0, got {halfwidth}"),
                    ));
                }
            }
            InputKind::IidUniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return Err(Error::config(
                        "input.range",
                        format!("need low < high, got [{low}, {high}]"),
                    ));
                }
            }
            InputKind::Explicit(values) => {
                if values.len() < self.length + 1 {
                    return Err(Error::config(
                        "input.values",
                        format!(
                            "explicit sequence has {} values, need {} (u_0 ..= u_{})",
                            values.len(),
                            self.length + 1,
                            self.length
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Inputs `u_start ..= u_end`, with `start <= 0` allowed so that regressors
/// with long memory are defined from `k = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSeries {
    start: i64,
    values: Vec<f64>,
}

impl InputSeries {
    pub fn new(start: i64, values: Vec<f64>) -> Self {
        InputSeries { start, values }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn get(&self, index: i64) -> Option<f64> {
        let i = index - self.start;
        (i >= 0).then(|| self.values.get(i as usize).copied()).flatten()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `u_0 ..= u_length`, deterministic in the plan seed.
pub fn gen_inputs(plan: &InputPlan) -> Result<InputSeries> {
    gen_inputs_from(plan, 0)
}

/// Like [`gen_inputs`] but starting at `start <= 0`. Cyclic patterns are
/// phase-aligned on the absolute index, so `u_0` always carries `pattern[0]`.
pub fn gen_inputs_from(plan: &InputPlan, start: i64) -> Result<InputSeries> {
    plan.validate()?;
    if start > 0 {
        return Err(Error::Index(format!("input series must start at or before 0, got {start}")));
    }
    let end = plan.length as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let values = match &plan.kind {
        InputKind::CyclicDither { pattern, halfwidth } => (start..=end)
            .map(|k| {
                let base = pattern[k.rem_euclid(pattern.len() as i64) as usize];
                let e = if *halfwidth > 0.0 {
                    rng.random_range(-halfwidth..=*halfwidth)
                } else {
                    0.0
                };
                base + e
            })
            .collect(),
        InputKind::IidUniform { low, high } => {
            (start..=end).map(|_| rng.random_range(*low..=*high)).collect()
        }
        InputKind::Explicit(values) => {
            if start < 0 {
                return Err(Error::Index(format!(
                    "explicit inputs start at u_0; u_{start} is not available"
                )));
            }
            values[..=plan.length].to_vec()
        }
    };
    Ok(InputSeries { start, values })
}

/// Maps the lag window `(u_k, u_{k-1}, ..., u_{k-memory+1})` to `phi_k`.
pub trait RegressorMap {
    fn memory(&self) -> usize;
    fn dim(&self) -> usize;
    fn fill(&self, lags: &[f64], out: &mut [f64]);
}

/// Delay-line stack, `phi_k = (u_k, ..., u_{k-memory+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayLine {
    pub memory: usize,
}

impl RegressorMap for DelayLine {
    fn memory(&self) -> usize {
        self.memory
    }

    fn dim(&self) -> usize {
        self.memory
    }

    fn fill(&self, lags: &[f64], out: &mut [f64]) {
        out.copy_from_slice(lags);
    }
}

/// Regressors `phi_1 ..= phi_K` stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressors {
    dim: usize,
    data: Vec<f64>,
}

impl Regressors {
    pub fn new(dim: usize) -> Self {
        Regressors {
            dim,
            data: Vec::new(),
        }
    }

    pub fn from_rows<I, R>(dim: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[f64]>,
    {
        let mut out = Regressors::new(dim);
        for row in rows {
            out.push(row.as_ref())?;
        }
        Ok(out)
    }

    pub fn push(&mut self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.dim {
            return Err(Error::Shape(format!(
                "regressor has length {}, expected {}",
                phi.len(),
                self.dim
            )));
        }
        self.data.extend_from_slice(phi);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of steps `K`.
    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `phi_k` for `k` in `1..=K`.
    pub fn phi(&self, k: usize) -> &[f64] {
        assert!(k >= 1, "regressors are indexed from 1");
        &self.data[(k - 1) * self.dim..k * self.dim]
    }

    /// Iterates `phi_1, phi_2, ...`.
    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim.max(1))
    }

    /// First `k` regressors.
    pub fn truncated(&self, k: usize) -> Regressors {
        Regressors {
            dim: self.dim,
            data: self.data[..k.min(self.len()) * self.dim].to_vec(),
        }
    }
}

/// Delay-line regressors `phi_k = (u_k, ..., u_{k-n̄+1})` for `k = 1 ..= end(u)`.
pub fn build_regressors(u: &InputSeries, memory: usize) -> Result<Regressors> {
    build_regressors_with(u, &DelayLine { memory })
}

pub fn build_regressors_with(u: &InputSeries, map: &dyn RegressorMap) -> Result<Regressors> {
    let memory = map.memory();
    if memory == 0 {
        return Err(Error::config("system.memory", "regressor memory must be >= 1"));
    }
    let first_needed = 2 - memory as i64;
    if u.start() > first_needed {
        return Err(Error::Index(format!(
            "phi_1 needs u_{first_needed} but inputs start at u_{}",
            u.start()
        )));
    }
    let k_max = u.end().max(0) as usize;
    let mut out = Regressors::new(map.dim());
    let mut lags = vec![0.0; memory];
    let mut phi = vec![0.0; map.dim()];
    for k in 1..=k_max as i64 {
        for (j, lag) in lags.iter_mut().enumerate() {
            *lag = u.get(k - j as i64).expect("range checked above");
        }
        map.fill(&lags, &mut phi);
        out.push(&phi)?;
    }
    Ok(out)
}

/// `y = phi^T theta + d` and its sensor reading.
pub fn observe(system: &SystemModel, phi: &[f64], d: f64) -> (f64, u32) {
    debug_assert_eq!(phi.len(), system.dim());
    let y = linalg::dot(phi, system.theta()) + d;
    (y, system.sensor().read(y))
}

/// Sliding-window excitation certificate over the given regressors.
///
/// The excitation level is the smallest `lambda_min((1/N) sum phi phi^T)` over
/// all length-`window` blocks; the certificate is valid when that level is
/// positive beyond round-off (`1e-12 * M^2`).
pub fn pe_check(regressors: &Regressors, window: usize) -> Result<PeCertificate> {
    let n = regressors.dim();
    if window < n {
        return Err(Error::config(
            "pe.window",
            format!("window N = {window} must be >= regressor dimension n = {n}"),
        ));
    }
    let len = regressors.len();
    if len < window {
        return Err(Error::config(
            "pe.window",
            format!("window N = {window} exceeds the {len} available regressors"),
        ));
    }
    let bound = regressors.iter().map(linalg::norm).fold(0.0, f64::max);

    // sliding Gram sum, rebuilt from scratch periodically to bound drift
    const REBUILD: usize = 1024;
    let mut gram = vec![0.0; n * n];
    let rebuild = |start: usize, gram: &mut [f64]| {
        gram.iter_mut().for_each(|g| *g = 0.0);
        for k in start..start + window {
            linalg::add_outer(gram, regressors.phi(k), 1.0);
        }
    };
    let mut worst = (f64::INFINITY, 1);
    for start in 1..=len - window + 1 {
        if (start - 1) % REBUILD == 0 {
            rebuild(start, &mut gram);
        } else {
            linalg::add_outer(&mut gram, regressors.phi(start - 1), -1.0);
            linalg::add_outer(&mut gram, regressors.phi(start + window - 1), 1.0);
        }
        let level = linalg::min_eigenvalue(&gram, n) / window as f64;
        if level < worst.0 {
            worst = (level, start);
        }
    }
    let level = worst.0.max(0.0);
    Ok(PeCertificate {
        window,
        excitation_level: level,
        regressor_bound: bound,
        valid: level > 1e-12 * bound * bound,
        worst_window_start: worst.1,
    })
}

/// One simulated run: regressors, outputs and sensor readings for `k = 1 ..= K`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    system: SystemModel,
    regressors: Regressors,
    outputs: Vec<f64>,
    readings: Vec<u32>,
    pe: PeCertificate,
}

/// Borrowed view of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<'a> {
    pub k: usize,
    pub phi: &'a [f64],
    pub y: f64,
    pub s: u32,
}

impl RunTrace {
    /// Assemble a trace from recorded data; readings must be consistent with
    /// outputs and the system's sensor.
    pub fn from_parts(
        system: SystemModel,
        regressors: Regressors,
        outputs: Vec<f64>,
        readings: Vec<u32>,
        pe: PeCertificate,
    ) -> Result<Self> {
        if regressors.dim() != system.dim() {
            return Err(Error::Shape(format!(
                "regressor dimension {} does not match parameter dimension {}",
                regressors.dim(),
                system.dim()
            )));
        }
        if outputs.len() != regressors.len() || readings.len() != regressors.len() {
            return Err(Error::Shape("outputs, readings and regressors differ in length".into()));
        }
        let trace = RunTrace {
            system,
            regressors,
            outputs,
            readings,
            pe,
        };
        if let Some(k) = trace.first_inconsistent_step() {
            return Err(Error::Shape(format!("reading at k = {k} disagrees with output")));
        }
        Ok(trace)
    }

    pub fn system(&self) -> &SystemModel {
        &self.system
    }

    pub fn regressors(&self) -> &Regressors {
        &self.regressors
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn readings(&self) -> &[u32] {
        &self.readings
    }

    pub fn pe(&self) -> &PeCertificate {
        &self.pe
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }

    pub fn step(&self, k: usize) -> Step<'_> {
        Step {
            k,
            phi: self.regressors.phi(k),
            y: self.outputs[k - 1],
            s: self.readings[k - 1],
        }
    }

    pub fn steps(&self) -> impl Iterator<Item = Step<'_>> + '_ {
        (1..=self.len()).map(|k| self.step(k))
    }

    /// Post-hoc recheck of `s_k = #{j : y_k <= C_j}`.
    pub fn first_inconsistent_step(&self) -> Option<usize> {
        let sensor: &Sensor = self.system.sensor();
        self.steps().find(|st| sensor.read(st.y) != st.s).map(|st| st.k)
    }
}

/// Simulate `K = horizon` steps. Inputs come from `plan` (its `length` is
/// replaced by the horizon), noise from a generator seeded with `noise_seed`,
/// and the embedded certificate uses window `pe_window`.
pub fn simulate_run(
    system: &SystemModel,
    plan: &InputPlan,
    horizon: usize,
    noise_seed: u64,
    pe_window: usize,
) -> Result<RunTrace> {
    let regressors = regressors_for(system, plan, horizon)?;
    let pe = pe_check(&regressors, pe_window)?;
    simulate_with_regressors(system, regressors, noise_seed, pe)
}

/// Generates the input series a system of this memory needs for `horizon`
/// steps and stacks the delay-line regressors.
pub fn regressors_for(system: &SystemModel, plan: &InputPlan, horizon: usize) -> Result<Regressors> {
    if horizon == 0 {
        return Err(Error::config("sim.length", "horizon must be >= 1"));
    }
    let memory = system.regressor_memory();
    if system.dim() != memory {
        return Err(Error::Shape(format!(
            "delay-line regressors have dimension {memory} but theta has {}",
            system.dim()
        )));
    }
    let plan = InputPlan {
        length: horizon,
        ..plan.clone()
    };
    let start = (2 - memory as i64).min(0);
    let u = gen_inputs_from(&plan, start)?;
    build_regressors(&u, memory)
}

/// Draws noise for fixed regressors (shared-input replications).
pub fn simulate_with_regressors(
    system: &SystemModel,
    regressors: Regressors,
    noise_seed: u64,
    pe: PeCertificate,
) -> Result<RunTrace> {
    if regressors.dim() != system.dim() {
        return Err(Error::Shape(format!(
            "regressor dimension {} does not match parameter dimension {}",
            regressors.dim(),
            system.dim()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    let noise = system.noise();
    let (outputs, readings) = regressors
        .iter()
        .map(|phi| observe(system, phi, noise.sample(&mut rng)))
        .unzip();
    Ok(RunTrace {
        system: system.clone(),
        regressors,
        outputs,
        readings,
        pe,
    })
}
