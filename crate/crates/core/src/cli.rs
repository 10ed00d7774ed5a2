//! `setvalued-id` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 config or usage error,
//! 3 numerical fault. The output directory is `out.dir` from the config,
//! overridden by `SETVALUED_ID_OUT`, overridden by `--out`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::bench::{crlb, monte_carlo};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::estimate::run_estimator;
use crate::export;
use crate::simulate::{pe_check, regressors_for, simulate_run, RunTrace};
use crate::spao::{compute_psi, compute_t, decomposition_gap, psi_by_recursion, recursion_residual};

pub const OUT_ENV: &str = "SETVALUED_ID_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// One simulated run: trace.csv
    Simulate,
    /// One run plus the estimator: estimates.csv
    Identify,
    /// Error decomposition of one run: spao.csv
    Spao,
    /// Ensemble rate diagnostics: rates.csv, rates_summary.json
    Rates,
    /// Cramér–Rao bound for the configured regressors
    Crlb,
    /// Full Monte Carlo experiment
    Mc,
    /// Persistent-excitation certificate
    Pecheck,
}

#[derive(Debug, Parser)]
#[command(name = "setvalued-id", version, about = "Identification of MA systems behind binary and quantised sensors")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Experiment config (TOML with dotted sections).
    #[arg(long, conflicts_with = "paper_v")]
    config: Option<PathBuf>,
    /// Use the built-in reference experiment instead of a config file.
    #[arg(long)]
    paper_v: bool,
    /// Master seed (sim.seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo replications (mc.runs).
    #[arg(long)]
    runs: Option<usize>,
    /// Number of samples K (sim.length).
    #[arg(long)]
    horizon: Option<usize>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory; overrides SETVALUED_ID_OUT and out.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the effective config and exit.
    #[arg(long)]
    emit_config: bool,
}

/// Entry point of the binary.
pub fn main() {
    std::process::exit(run(std::env::args_os()));
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&args, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Ensemble { source, .. } => exit_code(source),
        Error::Io { .. } => 1,
        e if e.is_config() => 2,
        _ => 3,
    }
}

fn effective_config(args: &Args) -> Result<Config> {
    let mut config = match (&args.config, args.paper_v) {
        (Some(path), _) => Config::load(path).map_err(|e| match e {
            Error::Io { .. } => Error::config("--config", format!("cannot read {}", path.display())),
            other => other,
        })?,
        (None, true) => Config::paper_v(),
        (None, false) => return Err(Error::config("--config", "pass a config file or --paper-v")),
    };
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(r) = args.runs {
        config.runs = r;
        config.trace_runs = config.trace_runs.min(r);
    }
    if let Some(k) = args.horizon {
        config.length = k;
    }
    if args.jobs.is_some() {
        config.jobs = args.jobs;
    }
    if let Some(dir) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        config.out_dir = PathBuf::from(dir);
    }
    if let Some(dir) = &args.out {
        config.out_dir = dir.clone();
    }
    config.validate()?;
    Ok(config)
}

fn execute(args: &Args, out: &mut dyn Write) -> Result<()> {
    let config = effective_config(args)?;
    if args.emit_config {
        return write!(out, "{}", config.to_toml()).map_err(|e| Error::io("<stdout>", e));
    }
    let dir = config.out_dir.clone();
    export::write_file(&dir.join("config.toml"), &config.to_toml())?;
    let mut say = |line: String| writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e));

    match args.command {
        Command::Simulate => {
            let trace = single_run(&config)?;
            export::write_file(&dir.join("trace.csv"), &export::trace_csv(&trace))?;
            let ones = trace.readings().iter().map(|&s| s as usize).sum::<usize>();
            say(format!("steps = {}", trace.len()))?;
            say(format!("mean reading = {}", ones as f64 / trace.len() as f64))?;
            say(format!("wrote {}", dir.join("trace.csv").display()))?;
        }
        Command::Identify => {
            let trace = single_run(&config)?;
            let system = trace.system().clone();
            let traj = naming_seed(
                single_run_seed(&config),
                run_estimator(&trace, config.step_policy(&system)?, &config.init),
            )?;
            export::write_file(&dir.join("estimates.csv"), &export::estimates_csv(&traj))?;
            say(format!("theta_hat = {:?}", traj.last()))?;
            if let Some(e) = traj.err_sq_at(traj.end()) {
                say(format!("err_sq = {}", export::fmt_f64(e)))?;
            }
            say(format!("wrote {}", dir.join("estimates.csv").display()))?;
        }
        Command::Spao => {
            let trace = single_run(&config)?;
            let system = trace.system().clone();
            let policy = config.step_policy(&system)?;
            let beta = policy
                .harmonic_beta()
                .ok_or_else(|| Error::config("est.policy", "spao needs the harmonic policy"))?;
            if !system.sensor().is_binary() {
                return Err(Error::config("system.thresholds", "spao needs a single threshold"));
            }
            let theta = system.theta();
            let traj = naming_seed(single_run_seed(&config), run_estimator(&trace, policy, &config.init))?;
            let t = compute_t(&trace, beta, theta)?;
            let spao = compute_psi(&traj, &t, theta)?;
            let residual = recursion_residual(&spao, &trace, beta, theta)?;
            let k0 = traj.start();
            let psi_rec = psi_by_recursion(&trace, &t, theta, beta, k0, spao.psi.get(k0))?;
            let gap = decomposition_gap(&spao.theta_err, &psi_rec, &t);
            export::write_file(&dir.join("spao.csv"), &export::spao_csv(&spao))?;
            say(format!("recursion residual = {}", export::fmt_f64(residual)))?;
            say(format!("decomposition gap = {}", export::fmt_f64(gap)))?;
            say(format!("wrote {}", dir.join("spao.csv").display()))?;
        }
        Command::Rates => {
            let ensemble = monte_carlo(&config.experiment()?)?;
            export::write_file(&dir.join("rates.csv"), &export::rates_csv(&ensemble.rate))?;
            export::write_file(
                &dir.join("rates_summary.json"),
                &export::rates_summary_json(&ensemble.rate),
            )?;
            report_rate(&mut say, &ensemble.rate)?;
        }
        Command::Crlb => {
            let system = config.system()?;
            let regs = regressors_for(&system, &config.input_plan(), config.length)?;
            let bound = crlb(&regs, system.theta(), system.noise(), system.thresholds())?;
            let mut text = format!("k = {}\ntrace = {}\nk_trace = {}\n", bound.k, export::fmt_f64(bound.trace), export::fmt_f64(bound.k_trace));
            for i in 0..bound.dim {
                let row: Vec<String> = bound.matrix[i * bound.dim..(i + 1) * bound.dim]
                    .iter()
                    .map(|x| export::fmt_f64(*x))
                    .collect();
                text.push_str(&format!("row_{} = [{}]\n", i + 1, row.join(", ")));
            }
            export::write_file(&dir.join("crlb.txt"), &text)?;
            say(format!("crlb trace = {:.4} (k = {})", bound.trace, bound.k))?;
            say(format!("k * trace = {:.6}", bound.k_trace))?;
        }
        Command::Mc => {
            let ensemble = monte_carlo(&config.experiment()?)?;
            let files = export::write_experiment(&dir, &ensemble, config.length, config.trace_runs)?;
            say(format!("runs = {}", ensemble.runs.len()))?;
            report_rate(&mut say, &ensemble.rate)?;
            if let Some(c) = ensemble.crlb_k_trace {
                say(format!("crlb k*trace = {c:.6}"))?;
            }
            for f in files {
                say(format!("wrote {}", f.display()))?;
            }
        }
        Command::Pecheck => {
            let system = config.system()?;
            let regs = regressors_for(&system, &config.input_plan(), config.length)?;
            let pe = pe_check(&regs, config.pe_window)?;
            let text = format!(
                "N = {}\ndelta = {}\nM = {}\nvalid = {}\nworst_window_start = {}\n",
                pe.window,
                export::fmt_f64(pe.excitation_level),
                export::fmt_f64(pe.regressor_bound),
                pe.valid,
                pe.worst_window_start
            );
            export::write_file(&dir.join("pe.txt"), &text)?;
            say(format!(
                "delta = {:.12}, N = {}, M = {:.12}, valid = {}",
                pe.excitation_level, pe.window, pe.regressor_bound, pe.valid
            ))?;
        }
    }
    Ok(())
}

/// Single-run commands use the noise stream of replication 0, so their
/// output agrees with run 0 of `mc`.
fn single_run(config: &Config) -> Result<RunTrace> {
    let system = config.system()?;
    let seed = single_run_seed(config);
    naming_seed(
        seed,
        simulate_run(&system, &config.input_plan(), config.length, seed, config.pe_window),
    )
}

fn single_run_seed(config: &Config) -> u64 {
    crate::bench::split_seed(config.seed, 0)
}

/// Attaches the run and seed to numerical failures.
fn naming_seed<T>(seed: u64, result: Result<T>) -> Result<T> {
    result.map_err(|e| {
        if e.is_config() || matches!(e, Error::Io { .. }) {
            e
        } else {
            Error::Ensemble {
                run: 0,
                seed,
                source: Box::new(e),
            }
        }
    })
}

fn report_rate(say: &mut dyn FnMut(String) -> Result<()>, rate: &crate::spao::RateReport) -> Result<()> {
    if let Some(r) = rate.rate {
        say(format!("eta = {:.6} ({})", r.eta, r.regime.label()))?;
    }
    if let Some(f) = rate.f_lower {
        say(format!("f_lower = {f:.6e}"))?;
    }
    say(format!(
        "ms_slope = {:.4} over [{}, {}]",
        rate.ms_slope, rate.window.0, rate.window.1
    ))
}
