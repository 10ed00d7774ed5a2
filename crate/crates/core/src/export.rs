//! CSV and summary writers. Floats are written with 17 significant digits
//! so files reload bit-exactly.
//!
//! | file                | columns                                   |
//! |---------------------|-------------------------------------------|
//! | `trace.csv`         | `k,phi_1..phi_n,y,s`                      |
//! | `estimates.csv`     | `k,theta_hat_1..theta_hat_n[,err_sq]`     |
//! | `spao.csv`          | `k,T_1..T_n,psi_1..psi_n,err_1..err_n`    |
//! | `trace_run<i>.csv`  | `k,theta_hat_1..theta_hat_n,err_sq`       |
//! | `ensemble.csv`      | `k,mean_err_sq,k_mean_err_sq`             |
//! | `rates.csv`         | `k,as_series,mean_k_err_sq`               |
//! | `rates_summary.json`| `{eta, f_lower, ms_slope, regime}`        |
//! | `summary.txt`       | `key = value` lines                       |

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bench::EnsembleResult;
use crate::error::{Error, Result};
use crate::estimate::Trajectory;
use crate::simulate::RunTrace;
use crate::spao::{RateReport, SpaoTrace};

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(prefix: &str, names: &[&str], n: usize) -> String {
    let mut h = String::from(prefix);
    for name in names {
        for j in 1..=n {
            let _ = write!(h, ",{name}_{j}");
        }
    }
    h
}

fn push_floats(line: &mut String, xs: &[f64]) {
    for x in xs {
        line.push(',');
        line.push_str(&fmt_f64(*x));
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn trace_csv(trace: &RunTrace) -> String {
    let n = trace.system().dim();
    let mut out = header("k", &["phi"], n);
    out.push_str(",y,s\n");
    for st in trace.steps() {
        let mut line = st.k.to_string();
        push_floats(&mut line, st.phi);
        let _ = writeln!(line, ",{},{}", fmt_f64(st.y), st.s);
        out.push_str(&line);
    }
    out
}

pub fn estimates_csv(traj: &Trajectory) -> String {
    let mut out = header("k", &["theta_hat"], traj.dim());
    if traj.err_sq().is_some() {
        out.push_str(",err_sq");
    }
    out.push('\n');
    for (k, th) in traj.iter() {
        let mut line = k.to_string();
        push_floats(&mut line, th);
        if let Some(e) = traj.err_sq_at(k) {
            push_floats(&mut line, &[e]);
        }
        line.push('\n');
        out.push_str(&line);
    }
    out
}

pub fn spao_csv(spao: &SpaoTrace) -> String {
    let n = spao.psi.dim();
    let mut out = header("k", &["T", "psi", "err"], n);
    out.push('\n');
    for (k, psi) in spao.psi.iter() {
        let mut line = k.to_string();
        push_floats(&mut line, spao.t.get(k));
        push_floats(&mut line, psi);
        push_floats(&mut line, spao.theta_err.get(k));
        line.push('\n');
        out.push_str(&line);
    }
    out
}

/// Grid-thinned trajectory of replication `run`.
pub fn run_csv(ensemble: &EnsembleResult, run: usize) -> String {
    let n = ensemble.dim;
    let rec = &ensemble.runs[run];
    let mut out = header("k", &["theta_hat"], n);
    out.push_str(",err_sq\n");
    for (i, k) in ensemble.grid.iter().enumerate() {
        let mut line = k.to_string();
        push_floats(&mut line, &rec.estimates[i * n..(i + 1) * n]);
        push_floats(&mut line, &[rec.err_sq[i]]);
        line.push('\n');
        out.push_str(&line);
    }
    out
}

pub fn ensemble_csv(ensemble: &EnsembleResult) -> String {
    let mut out = String::from("k,mean_err_sq,k_mean_err_sq\n");
    for (k, m) in ensemble.grid.iter().zip(&ensemble.mean_err_sq) {
        let _ = writeln!(out, "{k},{},{}", fmt_f64(*m), fmt_f64(*k as f64 * m));
    }
    out
}

/// Rate series of the first run alongside the ensemble mean.
pub fn rates_csv(report: &RateReport) -> String {
    let mut out = String::from("k,as_series,mean_k_err_sq\n");
    let first = report.as_series.first().map(Vec::as_slice).unwrap_or(&[]);
    for &(k, m) in &report.mean_k_err_sq {
        if let Ok(i) = first.binary_search_by_key(&k, |&(kk, _)| kk) {
            let _ = writeln!(out, "{k},{},{}", fmt_f64(first[i].1), fmt_f64(m));
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct RateSummary {
    eta: Option<f64>,
    f_lower: Option<f64>,
    ms_slope: f64,
    regime: Option<&'static str>,
}

pub fn rates_summary_json(report: &RateReport) -> String {
    let summary = RateSummary {
        eta: report.rate.map(|r| r.eta),
        f_lower: report.f_lower,
        ms_slope: report.ms_slope,
        regime: report.rate.map(|r| r.regime.label()),
    };
    serde_json::to_string_pretty(&summary).expect("plain struct serialises") + "\n"
}

pub fn summary_txt(ensemble: &EnsembleResult, horizon: usize) -> String {
    let rate = &ensemble.rate;
    let mut out = String::new();
    let _ = writeln!(out, "runs = {}", ensemble.runs.len());
    let _ = writeln!(out, "horizon = {horizon}");
    let _ = writeln!(out, "pe.window = {}", ensemble.pe.window);
    let _ = writeln!(out, "pe.delta = {}", fmt_f64(ensemble.pe.excitation_level));
    let _ = writeln!(out, "pe.bound = {}", fmt_f64(ensemble.pe.regressor_bound));
    let _ = writeln!(out, "pe.valid = {}", ensemble.pe.valid);
    if let Some(f) = rate.f_lower {
        let _ = writeln!(out, "f_lower = {}", fmt_f64(f));
    }
    match rate.rate {
        Some(r) => {
            let _ = writeln!(out, "eta = {}", fmt_f64(r.eta));
            let _ = writeln!(out, "regime = \"{}\"", r.regime.label());
        }
        None => {
            let _ = writeln!(out, "eta = n/a");
        }
    }
    let _ = writeln!(
        out,
        "ms_slope = {}  # window [{}, {}]",
        fmt_f64(rate.ms_slope),
        rate.window.0,
        rate.window.1
    );
    let last = ensemble.grid.len() - 1;
    let _ = writeln!(
        out,
        "k_mean_err_sq_final = {}",
        fmt_f64(ensemble.grid[last] as f64 * ensemble.mean_err_sq[last])
    );
    match ensemble.crlb_k_trace {
        Some(c) => {
            let _ = writeln!(out, "crlb_k_trace = {}", fmt_f64(c));
            let _ = writeln!(out, "crlb_trace = {}", fmt_f64(c / horizon as f64));
        }
        None => {
            let _ = writeln!(out, "crlb_k_trace = n/a");
        }
    }
    out
}

/// Writes `trace_run<i>.csv` for the first `traced_runs` runs, plus
/// `ensemble.csv`, `rates.csv`, `rates_summary.json` and `summary.txt`.
/// Returns the written paths.
pub fn write_experiment(dir: &Path, ensemble: &EnsembleResult, horizon: usize, traced_runs: usize) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &body)?;
        files.push(path);
        Ok(())
    };
    for i in 0..traced_runs.min(ensemble.runs.len()) {
        put(format!("trace_run{i}.csv"), run_csv(ensemble, i))?;
    }
    put("ensemble.csv".into(), ensemble_csv(ensemble))?;
    put("rates.csv".into(), rates_csv(&ensemble.rate))?;
    put("rates_summary.json".into(), rates_summary_json(&ensemble.rate))?;
    put("summary.txt".into(), summary_txt(ensemble, horizon))?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 7.0, std::f64::consts::PI * 1e10] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 17);
        }
    }

    #[test]
    fn header_layout() {
        assert_eq!(header("k", &["T", "psi"], 2), "k,T_1,T_2,psi_1,psi_2");
    }
}
