//! Experiment config files.
//!
//! TOML with dotted sections. Keys that are missing take the values of
//! [`Config::paper_v`], except that `est.k0` defaults to 1, `est.init` to
//! zero and `pe.window` to the larger of the input period and `n`. Unknown keys,
//! and keys that do not apply to the chosen family, input kind or policy,
//! are rejected.
//!
//! ```toml
//! [system]
//! theta = [3.0, -1.0]
//! thresholds = [1.0]
//! memory = 2
//!
//! [noise]
//! family = "gaussian"   # gaussian | laplacian | student_t | custom
//! sigma2 = 25.0         # student_t also takes dof; custom takes table_path
//!
//! [input]
//! kind = "cyclic"       # cyclic (pattern, dither) | uniform (range) | explicit (values)
//! pattern = [-1.0, 2.0, 0.0]
//! dither = 0.1
//! seed = 1
//!
//! [sim]
//! length = 100000
//! seed = 1
//!
//! [pe]
//! window = 3
//!
//! [est]
//! policy = "harmonic"   # harmonic (beta) | normalized (beta, beta_lo, beta_hi) | adaptive (margin)
//! beta = 20.0
//! k0 = 20
//! init = [1.0, 1.0]
//!
//! [mc]
//! runs = 200
//! trace_runs = 1        # optional: jobs
//!
//! [rates]               # optional: window = [lo, hi]
//!
//! [out]
//! dir = "out"
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::bench::ExperimentConfig;
use crate::error::{Error, Result};
use crate::estimate::StepPolicy;
use crate::model::{CdfTable, NoiseModel, Sensor, SystemModel};
use crate::simulate::{pe_check, regressors_for, InputKind, InputPlan, REFERENCE_PATTERN};

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    Gaussian { sigma2: f64 },
    Laplacian { sigma2: f64 },
    StudentT { sigma2: f64, dof: f64 },
    Custom { table_path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    Cyclic { pattern: Vec<f64>, dither: f64 },
    Uniform { low: f64, high: f64 },
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    Harmonic { beta: f64 },
    Normalized { beta: f64, beta_lo: f64, beta_hi: f64 },
    Adaptive { margin: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub theta: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub memory: usize,
    pub noise: NoiseSpec,
    pub input: InputSpec,
    pub input_seed: u64,
    /// Horizon `K`.
    pub length: usize,
    /// Master noise seed; single-run commands use its first child stream.
    pub seed: u64,
    pub pe_window: usize,
    pub policy: PolicySpec,
    pub k0: usize,
    pub init: Vec<f64>,
    pub runs: usize,
    pub jobs: Option<usize>,
    pub trace_runs: usize,
    pub rates_window: Option<(usize, usize)>,
    pub out_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        let preset = Config::paper_v();
        Config {
            k0: 1,
            init: vec![0.0; preset.theta.len()],
            ..preset
        }
    }
}

impl Config {
    /// The reference experiment (see [`ExperimentConfig::reference`]).
    pub fn paper_v() -> Self {
        Config {
            theta: vec![3.0, -1.0],
            thresholds: vec![1.0],
            memory: 2,
            noise: NoiseSpec::Gaussian { sigma2: 25.0 },
            input: InputSpec::Cyclic {
                pattern: REFERENCE_PATTERN.to_vec(),
                dither: 0.1,
            },
            input_seed: 1,
            length: 100_000,
            seed: 1,
            pe_window: 3,
            policy: PolicySpec::Harmonic { beta: 20.0 },
            k0: 20,
            init: vec![1.0, 1.0],
            runs: 200,
            jobs: None,
            trace_runs: 1,
            rates_window: None,
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))?;
        let mut r = Reader::new(&table)?;
        let d = Config::default();

        let theta = r.floats("system.theta")?.unwrap_or(d.theta);
        let thresholds = r.floats("system.thresholds")?.unwrap_or(d.thresholds);
        let memory = r.uint("system.memory")?.unwrap_or(theta.len());

        let family = r.string("noise.family")?.unwrap_or_else(|| "gaussian".into());
        let noise = match family.as_str() {
            "gaussian" => NoiseSpec::Gaussian {
                sigma2: r.float("noise.sigma2")?.unwrap_or(25.0),
            },
            "laplacian" => NoiseSpec::Laplacian {
                sigma2: r.float("noise.sigma2")?.unwrap_or(25.0),
            },
            "student_t" => NoiseSpec::StudentT {
                sigma2: r.float("noise.sigma2")?.unwrap_or(25.0),
                dof: r.require_float("noise.dof")?,
            },
            "custom" => NoiseSpec::Custom {
                table_path: PathBuf::from(r.require_string("noise.table_path")?),
            },
            other => return Err(unknown_choice("noise.family", other, "gaussian, laplacian, student_t, custom")),
        };

        let kind = r.string("input.kind")?.unwrap_or_else(|| "cyclic".into());
        let input = match kind.as_str() {
            "cyclic" => InputSpec::Cyclic {
                pattern: r.floats("input.pattern")?.unwrap_or_else(|| REFERENCE_PATTERN.to_vec()),
                dither: r.float("input.dither")?.unwrap_or(0.1),
            },
            "uniform" => {
                let range = r.require_floats("input.range")?;
                if range.len() != 2 {
                    return Err(Error::config("input.range", "expected [low, high]"));
                }
                InputSpec::Uniform {
                    low: range[0],
                    high: range[1],
                }
            }
            "explicit" => InputSpec::Explicit {
                values: r.require_floats("input.values")?,
            },
            other => return Err(unknown_choice("input.kind", other, "cyclic, uniform, explicit")),
        };
        let input_seed = r.uint("input.seed")?.map_or(d.input_seed, |s| s as u64);

        let length = r.uint("sim.length")?.unwrap_or(d.length);
        let seed = r.uint("sim.seed")?.map_or(d.seed, |s| s as u64);
        let period = match &input {
            InputSpec::Cyclic { pattern, .. } => pattern.len(),
            _ => 0,
        };
        let pe_window = r.uint("pe.window")?.unwrap_or(theta.len().max(period));

        let policy_name = r.string("est.policy")?.unwrap_or_else(|| "harmonic".into());
        let policy = match policy_name.as_str() {
            "harmonic" => PolicySpec::Harmonic {
                beta: r.float("est.beta")?.unwrap_or(20.0),
            },
            "normalized" => PolicySpec::Normalized {
                beta: r.float("est.beta")?.unwrap_or(20.0),
                beta_lo: r.require_float("est.beta_lo")?,
                beta_hi: r.require_float("est.beta_hi")?,
            },
            "adaptive" => PolicySpec::Adaptive {
                margin: r.require_float("est.margin")?,
            },
            other => return Err(unknown_choice("est.policy", other, "harmonic, normalized, adaptive")),
        };
        let k0 = r.uint("est.k0")?.unwrap_or(d.k0);
        let init = r.floats("est.init")?.unwrap_or_else(|| vec![0.0; theta.len()]);

        let runs = r.uint("mc.runs")?.unwrap_or(d.runs);
        let jobs = r.uint("mc.jobs")?;
        let trace_runs = r.uint("mc.trace_runs")?.unwrap_or(d.trace_runs);
        let rates_window = match r.floats("rates.window")? {
            None => None,
            Some(w) => {
                let ok = w.len() == 2 && w.iter().all(|x| x.fract() == 0.0 && *x >= 1.0);
                if !ok {
                    return Err(Error::config("rates.window", "expected [lo, hi] with integer bounds >= 1"));
                }
                Some((w[0] as usize, w[1] as usize))
            }
        };
        let out_dir = r.string("out.dir")?.map_or(d.out_dir, PathBuf::from);
        r.finish()?;

        let config = Config {
            theta,
            thresholds,
            memory,
            noise,
            input,
            input_seed,
            length,
            seed,
            pe_window,
            policy,
            k0,
            init,
            runs,
            jobs,
            trace_runs,
            rates_window,
            out_dir,
        };
        config.validate()?;
        Ok(config)
    }

    /// Range checks; every error names its key.
    pub fn validate(&self) -> Result<()> {
        let finite = |key: &str, xs: &[f64]| {
            if xs.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::config(key, "values must be finite"))
            }
        };
        let n = self.theta.len();
        if n == 0 {
            return Err(Error::config("system.theta", "must not be empty"));
        }
        finite("system.theta", &self.theta)?;
        if self.thresholds.is_empty() {
            return Err(Error::config("system.thresholds", "need at least one threshold"));
        }
        finite("system.thresholds", &self.thresholds)?;
        if self.thresholds.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("system.thresholds", "must be strictly increasing"));
        }
        if self.memory != n {
            return Err(Error::config(
                "system.memory",
                format!("delay-line memory {} must equal the length of system.theta ({n})", self.memory),
            ));
        }
        match &self.noise {
            NoiseSpec::Gaussian { sigma2 } if !(sigma2.is_finite() && *sigma2 >= 0.0) => {
                return Err(Error::config("noise.sigma2", format!("must be >= 0, got {sigma2}")))
            }
            NoiseSpec::Laplacian { sigma2 } | NoiseSpec::StudentT { sigma2, .. }
                if !(sigma2.is_finite() && *sigma2 > 0.0) =>
            {
                return Err(Error::config("noise.sigma2", format!("must be > 0, got {sigma2}")))
            }
            NoiseSpec::StudentT { dof, .. } if !(dof.is_finite() && *dof > 2.0) => {
                return Err(Error::config("noise.dof", format!("must exceed 2, got {dof}")))
            }
            _ => {}
        }
        match &self.input {
            InputSpec::Cyclic { pattern, dither } => {
                if pattern.is_empty() {
                    return Err(Error::config("input.pattern", "must not be empty"));
                }
                finite("input.pattern", pattern)?;
                if !(dither.is_finite() && *dither >= 0.0) {
                    return Err(Error::config("input.dither", format!("must be >= 0, got {dither}")));
                }
            }
            InputSpec::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return Err(Error::config("input.range", format!("need low < high, got [{low}, {high}]")));
                }
            }
            InputSpec::Explicit { values } => {
                finite("input.values", values)?;
                if values.len() < self.length + 1 {
                    return Err(Error::config(
                        "input.values",
                        format!("{} values given, sim.length = {} needs u_0 ..= u_K", values.len(), self.length),
                    ));
                }
                if self.memory > 2 {
                    return Err(Error::config("input.values", "explicit inputs support memory <= 2 only"));
                }
            }
        }
        if self.length == 0 {
            return Err(Error::config("sim.length", "must be >= 1"));
        }
        if self.pe_window < n || self.pe_window > self.length {
            return Err(Error::config(
                "pe.window",
                format!("need {n} <= window <= sim.length, got {}", self.pe_window),
            ));
        }
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be > 0, got {v}")))
            }
        };
        match self.policy {
            PolicySpec::Harmonic { beta } => positive("est.beta", beta)?,
            PolicySpec::Normalized { beta, beta_lo, beta_hi } => {
                positive("est.beta", beta)?;
                positive("est.beta_lo", beta_lo)?;
                positive("est.beta_hi", beta_hi)?;
                if beta_lo > beta_hi {
                    return Err(Error::config("est.beta_lo", "exceeds est.beta_hi"));
                }
            }
            PolicySpec::Adaptive { margin } => {
                if !(margin.is_finite() && margin > 1.0) {
                    return Err(Error::config("est.margin", format!("must exceed 1, got {margin}")));
                }
            }
        }
        if self.k0 == 0 || self.k0 >= self.length {
            return Err(Error::config("est.k0", format!("need 1 <= k0 < sim.length, got {}", self.k0)));
        }
        if self.init.len() != n {
            return Err(Error::config("est.init", format!("expected {n} components, got {}", self.init.len())));
        }
        finite("est.init", &self.init)?;
        if self.runs == 0 {
            return Err(Error::config("mc.runs", "must be >= 1"));
        }
        if self.jobs == Some(0) {
            return Err(Error::config("mc.jobs", "must be >= 1"));
        }
        if self.trace_runs > self.runs {
            return Err(Error::config("mc.trace_runs", "cannot exceed mc.runs"));
        }
        if let Some((lo, hi)) = self.rates_window {
            if lo >= hi || hi > self.length {
                return Err(Error::config("rates.window", format!("need lo < hi <= sim.length, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        match &self.noise {
            NoiseSpec::Gaussian { sigma2 } => NoiseModel::gaussian(*sigma2),
            NoiseSpec::Laplacian { sigma2 } => NoiseModel::laplacian(*sigma2),
            NoiseSpec::StudentT { sigma2, dof } => NoiseModel::student_t(*dof, *sigma2),
            NoiseSpec::Custom { table_path } => Ok(NoiseModel::tabulated(CdfTable::from_csv(table_path)?)),
        }
    }

    pub fn system(&self) -> Result<SystemModel> {
        let sensor = Sensor::new(self.thresholds.clone(), self.noise_model()?)?;
        SystemModel::new(self.theta.clone(), sensor, self.memory)
    }

    pub fn input_plan(&self) -> InputPlan {
        let kind = match &self.input {
            InputSpec::Cyclic { pattern, dither } => InputKind::CyclicDither {
                pattern: pattern.clone(),
                halfwidth: *dither,
            },
            InputSpec::Uniform { low, high } => InputKind::IidUniform { low: *low, high: *high },
            InputSpec::Explicit { values } => InputKind::Explicit(values.clone()),
        };
        InputPlan {
            kind,
            length: self.length,
            seed: self.input_seed,
        }
    }

    /// The adaptive policy needs the excitation certificate, so this may
    /// build the regressors once.
    pub fn step_policy(&self, system: &SystemModel) -> Result<StepPolicy> {
        let policy = match self.policy {
            PolicySpec::Harmonic { beta } => StepPolicy::harmonic(beta),
            PolicySpec::Normalized { beta, beta_lo, beta_hi } => StepPolicy::normalized(beta, beta_lo, beta_hi),
            PolicySpec::Adaptive { margin } => {
                let regs = regressors_for(system, &self.input_plan(), self.length)?;
                StepPolicy::adaptive(margin, &pe_check(&regs, self.pe_window)?)
            }
        };
        Ok(policy.with_warm_start(self.k0))
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let system = self.system()?;
        let policy = self.step_policy(&system)?;
        Ok(ExperimentConfig {
            inputs: self.input_plan(),
            policy,
            init: self.init.clone(),
            horizon: self.length,
            runs: self.runs,
            seed: self.seed,
            pe_window: self.pe_window,
            jobs: self.jobs,
            slope_window: self.rates_window,
            grid: None,
            output_dir: Some(self.out_dir.clone()),
            system,
        })
    }

    /// Canonical TOML tree; [`Config::parse`] of its text gives `self` back.
    pub fn to_table(&self) -> Table {
        let floats = |xs: &[f64]| Value::Array(xs.iter().map(|&x| Value::Float(x)).collect());
        let int = |x: u64| Value::Integer(x as i64);
        let mut root = Table::new();
        let mut section = |name: &str, entries: Vec<(&str, Value)>| {
            let t: Table = entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
            root.insert(name.to_string(), Value::Table(t));
        };
        section(
            "system",
            vec![
                ("theta", floats(&self.theta)),
                ("thresholds", floats(&self.thresholds)),
                ("memory", int(self.memory as u64)),
            ],
        );
        section(
            "noise",
            match &self.noise {
                NoiseSpec::Gaussian { sigma2 } => vec![("family", "gaussian".into()), ("sigma2", (*sigma2).into())],
                NoiseSpec::Laplacian { sigma2 } => vec![("family", "laplacian".into()), ("sigma2", (*sigma2).into())],
                NoiseSpec::StudentT { sigma2, dof } => vec![
                    ("family", "student_t".into()),
                    ("sigma2", (*sigma2).into()),
                    ("dof", (*dof).into()),
                ],
                NoiseSpec::Custom { table_path } => vec![
                    ("family", "custom".into()),
                    ("table_path", table_path.to_string_lossy().into_owned().into()),
                ],
            },
        );
        let mut input = match &self.input {
            InputSpec::Cyclic { pattern, dither } => vec![
                ("kind", "cyclic".into()),
                ("pattern", floats(pattern)),
                ("dither", (*dither).into()),
            ],
            InputSpec::Uniform { low, high } => vec![("kind", "uniform".into()), ("range", floats(&[*low, *high]))],
            InputSpec::Explicit { values } => vec![("kind", "explicit".into()), ("values", floats(values))],
        };
        input.push(("seed", int(self.input_seed)));
        section("input", input);
        section("sim", vec![("length", int(self.length as u64)), ("seed", int(self.seed))]);
        section("pe", vec![("window", int(self.pe_window as u64))]);
        let mut est = match self.policy {
            PolicySpec::Harmonic { beta } => vec![("policy", "harmonic".into()), ("beta", beta.into())],
            PolicySpec::Normalized { beta, beta_lo, beta_hi } => vec![
                ("policy", "normalized".into()),
                ("beta", beta.into()),
                ("beta_lo", beta_lo.into()),
                ("beta_hi", beta_hi.into()),
            ],
            PolicySpec::Adaptive { margin } => vec![("policy", "adaptive".into()), ("margin", margin.into())],
        };
        est.push(("k0", int(self.k0 as u64)));
        est.push(("init", floats(&self.init)));
        section("est", est);
        let mut mc = vec![("runs", int(self.runs as u64)), ("trace_runs", int(self.trace_runs as u64))];
        if let Some(j) = self.jobs {
            mc.push(("jobs", int(j as u64)));
        }
        section("mc", mc);
        if let Some((lo, hi)) = self.rates_window {
            section("rates", vec![("window", floats(&[lo as f64, hi as f64]))]);
        }
        section("out", vec![("dir", self.out_dir.to_string_lossy().into_owned().into())]);
        root
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_table()).expect("config tree serialises")
    }
}

fn unknown_choice(key: &str, got: &str, allowed: &str) -> Error {
    Error::config(key, format!("unknown value {got:?}, expected one of {allowed}"))
}

/// Tracks which dotted keys were read so leftovers can be rejected.
struct Reader<'a> {
    table: &'a Table,
    seen: BTreeSet<String>,
}

impl<'a> Reader<'a> {
    fn new(table: &'a Table) -> Result<Self> {
        for (name, v) in table {
            if !v.is_table() {
                return Err(Error::config(name.clone(), "unknown key (expected a [section])"));
            }
        }
        Ok(Reader {
            table,
            seen: BTreeSet::new(),
        })
    }

    fn get(&mut self, key: &str) -> Option<&'a Value> {
        self.seen.insert(key.to_string());
        let (section, name) = key.split_once('.').expect("dotted key");
        self.table.get(section)?.as_table()?.get(name)
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| as_float(key, v)).transpose()
    }

    fn require_float(&mut self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| missing(key))
    }

    fn floats(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                let arr = v
                    .as_array()
                    .ok_or_else(|| Error::config(key, "expected an array of numbers"))?;
                arr.iter().map(|x| as_float(key, x)).collect()
            })
            .transpose()
    }

    fn require_floats(&mut self, key: &str) -> Result<Vec<f64>> {
        self.floats(key)?.ok_or_else(|| missing(key))
    }

    fn uint(&mut self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| match v.as_integer() {
                Some(i) if i >= 0 => Ok(i as usize),
                Some(i) => Err(Error::config(key, format!("must be >= 0, got {i}"))),
                None => Err(Error::config(key, "expected a non-negative integer")),
            })
            .transpose()
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        self.get(key)
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::config(key, "expected a string"))
            })
            .transpose()
    }

    fn require_string(&mut self, key: &str) -> Result<String> {
        self.string(key)?.ok_or_else(|| missing(key))
    }

    /// Any key present in the file but never read is unknown or does not
    /// apply to the selected variant.
    fn finish(self) -> Result<()> {
        for (section, v) in self.table {
            for name in v.as_table().into_iter().flat_map(|t| t.keys()) {
                let key = format!("{section}.{name}");
                if !self.seen.contains(&key) {
                    return Err(Error::config(key, "unknown key, or not used by the selected variant"));
                }
            }
        }
        Ok(())
    }
}

fn as_float(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::config(key, "expected a number")),
    }
}

fn missing(key: &str) -> Error {
    Error::config(key, "required by the selected variant but missing")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
        assert_eq!(Config::default().k0, 1);
    }

    #[test]
    fn preset_round_trips() {
        let c = Config::paper_v();
        let text = c.to_toml();
        let back = Config::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_table(), c.to_table());
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn variants_round_trip() {
        let mut c = Config::paper_v();
        c.noise = NoiseSpec::StudentT { sigma2: 4.0, dof: 5.0 };
        c.input = InputSpec::Uniform { low: -1.0, high: 2.5 };
        c.policy = PolicySpec::Normalized {
            beta: 3.0,
            beta_lo: 1.0,
            beta_hi: 10.0,
        };
        c.jobs = Some(2);
        c.rates_window = Some((100, 1000));
        assert_eq!(Config::parse(&c.to_toml()).unwrap(), c);
        c.policy = PolicySpec::Adaptive { margin: 1.5 };
        c.noise = NoiseSpec::Custom {
            table_path: "tables/tri.csv".into(),
        };
        c.input = InputSpec::Explicit {
            values: vec![0.5; c.length + 1],
        };
        assert_eq!(Config::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn dotted_and_section_forms_agree() {
        let a = Config::parse("sim.length = 500\nest.beta = 3.5\n").unwrap();
        let b = Config::parse("[sim]\nlength = 500\n[est]\nbeta = 3.5\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.policy, PolicySpec::Harmonic { beta: 3.5 });
    }

    #[test]
    fn unknown_and_inapplicable_keys_rejected() {
        assert_eq!(key_of(Config::parse("sim.lenght = 5").unwrap_err()), "sim.lenght");
        assert_eq!(key_of(Config::parse("seed = 5").unwrap_err()), "seed");
        assert_eq!(key_of(Config::parse("noise.dof = 5.0").unwrap_err()), "noise.dof");
        assert_eq!(key_of(Config::parse("[bogus]\nx = 1").unwrap_err()), "bogus.x");
    }

    #[test]
    fn range_checks_name_the_key() {
        let cases = [
            ("sim.length = 0", "sim.length"),
            ("noise.sigma2 = -1.0", "noise.sigma2"),
            ("noise.family = \"student_t\"\nnoise.dof = 2.0", "noise.dof"),
            ("noise.family = \"student_t\"", "noise.dof"),
            ("noise.family = \"cauchy\"", "noise.family"),
            ("input.dither = -0.5", "input.dither"),
            ("input.kind = \"explicit\"\ninput.values = [1.0, 2.0]", "input.values"),
            ("pe.window = 1", "pe.window"),
            ("est.beta = 0.0", "est.beta"),
            ("est.policy = \"adaptive\"\nest.margin = 1.0", "est.margin"),
            ("est.k0 = 0", "est.k0"),
            ("est.init = [1.0]", "est.init"),
            ("mc.runs = 0", "mc.runs"),
            ("mc.jobs = 0", "mc.jobs"),
            ("mc.runs = 2\nmc.trace_runs = 3", "mc.trace_runs"),
            ("rates.window = [10.0, 5.0]", "rates.window"),
            ("system.thresholds = [2.0, 1.0]", "system.thresholds"),
            ("system.memory = 3", "system.memory"),
            ("sim.seed = -4", "sim.seed"),
            ("sim.length = \"long\"", "sim.length"),
        ];
        for (text, key) in cases {
            assert_eq!(key_of(Config::parse(text).unwrap_err()), key, "{text}");
        }
    }

    #[test]
    fn experiment_matches_reference() {
        let e = Config::paper_v().experiment().unwrap();
        let r = ExperimentConfig::reference();
        assert_eq!(
            ExperimentConfig {
                output_dir: None,
                ..e
            },
            r
        );
    }
}
