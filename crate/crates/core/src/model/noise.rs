//! Noise distributions for the additive disturbance `d_k`.
//!
//! Every built-in family is zero mean, symmetric and unimodal, and is
//! parametrised by its variance so that config files can switch families
//! without re-deriving scale parameters. The estimator treats the CDF as
//! known, so accuracy of [`NoiseModel::cdf`] matters directly.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use libm::erfc;
use statrs::function::{beta::beta_reg, gamma::ln_gamma};

use crate::error::{Error, Result};

/// Absolute tolerance of [`NoiseModel::quantile`].
pub const QUANTILE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseFamily {
    /// `sigma == 0` is a point mass at zero (noise-free simulation).
    Gaussian { sigma: f64 },
    Laplacian { scale: f64 },
    /// Scaled Student-t; `dof > 2` so the variance is finite.
    StudentT { dof: f64, scale: f64 },
    TabulatedCustom(CdfTable),
}

/// Piecewise-linear CDF through `(x, F)` knots. The density is the slope of
/// each segment, right-continuous at the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
    slopes: Vec<f64>,
}

impl CdfTable {
    /// Knots must have strictly increasing `x`, strictly increasing `F`
    /// (no zero-density interior segment), `F = 0` at the first knot and
    /// `F = 1` at the last. The resulting distribution must be zero mean.
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        const KEY: &str = "noise.table_path";
        if points.len() < 2 {
            return Err(Error::config(KEY, "table needs at least two knots"));
        }
        if points.iter().any(|(x, f)| !x.is_finite() || !f.is_finite()) {
            return Err(Error::config(KEY, "table contains non-finite values"));
        }
        let (x0, f0) = points[0];
        let (_, f_last) = points[points.len() - 1];
        if f0.abs() > 1e-12 || (f_last - 1.0).abs() > 1e-12 {
            return Err(Error::config(
                KEY,
                format!("table must run from F = 0 to F = 1, got {f0} .. {f_last}"),
            ));
        }
        let mut xs = Vec::with_capacity(points.len());
        let mut fs = Vec::with_capacity(points.len());
        xs.push(x0);
        fs.push(0.0);
        for (i, w) in points.windows(2).enumerate() {
            let ((xa, fa), (xb, fb)) = (w[0], w[1]);
            if xb <= xa {
                return Err(Error::config(
                    KEY,
                    format!("x must be strictly increasing (row {})", i + 2),
                ));
            }
            if fb <= fa {
                return Err(Error::config(
                    KEY,
                    format!("zero or negative density on [{xa}, {xb}] (row {})", i + 2),
                ));
            }
            xs.push(xb);
            fs.push(if i + 2 == points.len() { 1.0 } else { fb });
        }
        let slopes = xs
            .windows(2)
            .zip(fs.windows(2))
            .map(|(x, f)| (f[1] - f[0]) / (x[1] - x[0]))
            .collect();
        let table = CdfTable { xs, fs, slopes };
        let (mean, _) = table.moments();
        let width = table.hi() - table.lo();
        if mean.abs() > 1e-8 * width {
            return Err(Error::config(
                KEY,
                format!("tabulated noise must be zero mean, got mean {mean:e}"),
            ));
        }
        Ok(table)
    }

    /// Reads a headerless or headed two-column CSV of `x,F` pairs.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::config("noise.table_path", format!("{}: {e}", path.display())))?;
        let mut points = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record
                .map_err(|e| Error::config("noise.table_path", format!("row {}: {e}", row + 1)))?;
            if record.len() != 2 {
                return Err(Error::config(
                    "noise.table_path",
                    format!("row {} has {} columns, expected 2", row + 1, record.len()),
                ));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(f)) => points.push((x, f)),
                // a header line is allowed on the first row only
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::config(
                        "noise.table_path",
                        format!("row {} is not numeric", row + 1),
                    ))
                }
            }
        }
        CdfTable::new(&points)
    }

    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.fs.iter().copied())
    }

    /// Mean and variance of the piecewise-uniform density.
    fn moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (x, f) in self.xs.windows(2).zip(self.fs.windows(2)) {
            let (a, b) = (x[0], x[1]);
            let mass = f[1] - f[0];
            m1 += mass * 0.5 * (a + b);
            m2 += mass * (a * a + a * b + b * b) / 3.0;
        }
        (m1, m2 - m1 * m1)
    }

    fn segment(&self, x: f64) -> usize {
        // index i with xs[i] <= x < xs[i+1], clamped to the last segment
        let i = self.xs.partition_point(|&k| k <= x);
        i.saturating_sub(1).min(self.slopes.len() - 1)
    }

    fn check(&self, x: f64) -> Result<()> {
        if x < self.lo() || x > self.hi() || x.is_nan() {
            return Err(Error::Domain {
                x,
                lo: self.lo(),
                hi: self.hi(),
            });
        }
        Ok(())
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let i = self.segment(x);
        Ok((self.fs[i] + self.slopes[i] * (x - self.xs[i])).clamp(0.0, 1.0))
    }

    fn pdf(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.slopes[self.segment(x)])
    }

    fn inverse(&self, p: f64) -> f64 {
        let i = self.fs.partition_point(|&f| f <= p);
        let i = i.saturating_sub(1).min(self.slopes.len() - 1);
        (self.xs[i] + (p - self.fs[i]) / self.slopes[i]).clamp(self.lo(), self.hi())
    }

    /// Right-limit infimum of the density over `[lo, hi]`; zero outside the table.
    fn inf_density(&self, lo: f64, hi: f64) -> f64 {
        if lo <= self.lo() || hi >= self.hi() {
            return 0.0;
        }
        self.xs
            .windows(2)
            .zip(&self.slopes)
            .filter(|(x, _)| x[1] >= lo && x[0] <= hi)
            .map(|(_, &s)| s)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    family: NoiseFamily,
    variance: f64,
}

impl NoiseModel {
    /// Zero-mean Gaussian with the given variance. Variance 0 is allowed and
    /// gives a noise-free sensor.
    pub fn gaussian(variance: f64) -> Result<Self> {
        check_variance(variance, true)?;
        Ok(NoiseModel {
            family: NoiseFamily::Gaussian {
                sigma: variance.sqrt(),
            },
            variance,
        })
    }

    pub fn laplacian(variance: f64) -> Result<Self> {
        check_variance(variance, false)?;
        Ok(NoiseModel {
            family: NoiseFamily::Laplacian {
                scale: (variance / 2.0).sqrt(),
            },
            variance,
        })
    }

    pub fn student_t(dof: f64, variance: f64) -> Result<Self> {
        if !(dof.is_finite() && dof > 2.0) {
            return Err(Error::config(
                "noise.dof",
                format!("degrees of freedom must exceed 2, got {dof}"),
            ));
        }
        check_variance(variance, false)?;
        Ok(NoiseModel {
            family: NoiseFamily::StudentT {
                dof,
                scale: (variance * (dof - 2.0) / dof).sqrt(),
            },
            variance,
        })
    }

    pub fn tabulated(table: CdfTable) -> Self {
        let (_, variance) = table.moments();
        NoiseModel {
            family: NoiseFamily::TabulatedCustom(table),
            variance,
        }
    }

    pub fn family(&self) -> &NoiseFamily {
        &self.family
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Short family name as used in config files.
    pub fn family_name(&self) -> &'static str {
        match self.family {
            NoiseFamily::Gaussian { .. } => "gaussian",
            NoiseFamily::Laplacian { .. } => "laplacian",
            NoiseFamily::StudentT { .. } => "student_t",
            NoiseFamily::TabulatedCustom(_) => "custom",
        }
    }

    /// `F(x) = P(d <= x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(match &self.family {
            NoiseFamily::Gaussian { sigma } => {
                if *sigma == 0.0 {
                    if x >= 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    0.5 * erfc(-x / (sigma * SQRT_2))
                }
            }
            NoiseFamily::Laplacian { scale } => {
                let e = 0.5 * (-x.abs() / scale).exp();
                if x < 0.0 {
                    e
                } else {
                    1.0 - e
                }
            }
            NoiseFamily::StudentT { dof, scale } => {
                if x.is_infinite() {
                    return Ok(if x > 0.0 { 1.0 } else { 0.0 });
                }
                let t = x / scale;
                let t2 = t * t;
                // P(T <= -|t|); the regularized beta is poorly conditioned
                // near 1, so switch to the complement for small |t|
                let tail = if t2 < *dof {
                    0.5 - 0.5 * beta_reg(0.5, 0.5 * dof, t2 / (dof + t2))
                } else {
                    0.5 * beta_reg(0.5 * dof, 0.5, dof / (dof + t2))
                };
                if t > 0.0 {
                    1.0 - tail
                } else {
                    tail
                }
            }
            NoiseFamily::TabulatedCustom(table) => table.cdf(x)?,
        })
    }

    /// Density `f(x)`. For the zero-variance Gaussian the density is
    /// reported as 0 away from the origin and `+inf` at it.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(match &self.family {
            NoiseFamily::Gaussian { sigma } => {
                if *sigma == 0.0 {
                    if x == 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else {
                    let z = x / sigma;
                    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
                }
            }
            NoiseFamily::Laplacian { scale } => (-x.abs() / scale).exp() / (2.0 * scale),
            NoiseFamily::StudentT { dof, scale } => {
                let t = x / scale;
                let log_norm = ln_gamma(0.5 * (dof + 1.0))
                    - ln_gamma(0.5 * dof)
                    - 0.5 * (dof * PI).ln()
                    - scale.ln();
                (log_norm - 0.5 * (dof + 1.0) * (t * t / dof).ln_1p()).exp()
            }
            NoiseFamily::TabulatedCustom(table) => table.pdf(x)?,
        })
    }

    /// One draw of `d_k`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.family {
            NoiseFamily::Gaussian { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
            NoiseFamily::Laplacian { scale } => {
                let u: f64 = rng.random::<f64>() - 0.5;
                -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
            NoiseFamily::StudentT { dof, scale } => {
                // t = Z / sqrt(V / dof), V ~ chi^2(dof)
                let z: f64 = StandardNormal.sample(rng);
                let v: f64 = rand_distr::ChiSquared::new(*dof)
                    .expect("dof validated at construction")
                    .sample(rng);
                scale * z / (v / dof).sqrt()
            }
            NoiseFamily::TabulatedCustom(table) => table.inverse(rng.random::<f64>()),
        }
    }

    /// `F^{-1}(p)` by bisection on [`NoiseModel::cdf`] to [`QUANTILE_TOL`].
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Statistics(format!(
                "quantile requires p in (0, 1), got {p}"
            )));
        }
        let (mut lo, mut hi) = match &self.family {
            NoiseFamily::TabulatedCustom(t) => (t.lo(), t.hi()),
            NoiseFamily::Gaussian { sigma } if *sigma == 0.0 => return Ok(0.0),
            _ => {
                let mut w = self.variance.sqrt().max(1e-300);
                while self.cdf(-w)? >= p || self.cdf(w)? <= p {
                    w *= 2.0;
                    if !w.is_finite() {
                        return Err(Error::Statistics(format!("quantile bracket for p = {p}")));
                    }
                }
                (-w, w)
            }
        };
        while hi - lo > QUANTILE_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid)? < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Infimum of the density over `[lo, hi]`, taking the right limit in
    /// the interval half-width. Built-in families are symmetric unimodal, so
    /// this is the density at the endpoint farthest from zero.
    pub fn inf_density(&self, lo: f64, hi: f64) -> f64 {
        match &self.family {
            NoiseFamily::TabulatedCustom(table) => table.inf_density(lo, hi),
            NoiseFamily::Gaussian { sigma } if *sigma == 0.0 => 0.0,
            _ => self
                .pdf(lo.abs().max(hi.abs()))
                .expect("built-in families have unbounded support"),
        }
    }

    /// True when the density is bounded away from zero on every bounded set.
    pub fn has_positive_density(&self) -> bool {
        match &self.family {
            NoiseFamily::Gaussian { sigma } => *sigma > 0.0,
            NoiseFamily::TabulatedCustom(_) => false,
            _ => true,
        }
    }
}

fn check_variance(variance: f64, allow_zero: bool) -> Result<()> {
    let ok = variance.is_finite() && (variance > 0.0 || (allow_zero && variance == 0.0));
    if ok {
        Ok(())
    } else {
        Err(Error::config(
            "noise.sigma2",
            format!("variance must be positive and finite, got {variance}"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn builtins() -> Vec<NoiseModel> {
        vec![
            NoiseModel::gaussian(25.0).unwrap(),
            NoiseModel::laplacian(25.0).unwrap(),
            NoiseModel::student_t(5.0, 25.0).unwrap(),
        ]
    }

    fn triangle() -> NoiseModel {
        // symmetric triangular density on [-2, 2] with knots every 0.5
        let pts: Vec<(f64, f64)> = (0..=8)
            .map(|i| {
                let x = -2.0 + 0.5 * i as f64;
                let f = if x <= 0.0 {
                    (x + 2.0).powi(2) / 8.0
                } else {
                    1.0 - (2.0 - x).powi(2) / 8.0
                };
                (x, f)
            })
            .collect();
        NoiseModel::tabulated(CdfTable::new(&pts).unwrap())
    }

    /// Composite Simpson integral of the Gaussian density from 0, an
    /// oracle independent of the erfc route.
    fn gaussian_cdf_by_quadrature(sigma: f64, x: f64) -> f64 {
        let n = 20_000;
        let h = x / n as f64;
        let f = |t: f64| (-0.5 * (t / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt());
        let mut acc = f(0.0) + f(x);
        for i in 1..n {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        0.5 + acc * h / 3.0
    }

    #[test]
    fn gaussian_reference_values() {
        let g = NoiseModel::gaussian(25.0).unwrap();
        assert_eq!(g.cdf(0.0).unwrap(), 0.5);
        // Phi(1.2), 30-digit mpmath
        assert!((g.cdf(6.0).unwrap() - 0.884_930_329_778_291_7).abs() < 1e-12);
        assert!((g.cdf(6.0).unwrap() - gaussian_cdf_by_quadrature(5.0, 6.0)).abs() < 1e-12);
        assert_eq!(g.cdf(f64::INFINITY).unwrap(), 1.0);
        assert!((g.pdf(0.0).unwrap() - 0.079_788_456_080_286_54).abs() < 1e-15);
        assert!((g.pdf(3.0).unwrap() - 0.066_644_920_578_359_93).abs() < 1e-15);
    }

    #[test]
    fn cdf_quadrature_agreement_over_grid() {
        let g = NoiseModel::gaussian(25.0).unwrap();
        for i in 1..=40 {
            let x = -20.0 + i as f64;
            let want = gaussian_cdf_by_quadrature(5.0, x);
            assert!((g.cdf(x).unwrap() - want).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn symmetric_densities() {
        for m in builtins().into_iter().chain([triangle()]) {
            // off the table knots, where the tabulated density jumps
            for x in [0.3, 0.7, 1.1, 1.7] {
                let (a, b) = (m.pdf(x).unwrap(), m.pdf(-x).unwrap());
                assert!((a - b).abs() <= 1e-15 * a.max(1e-300), "{}", m.family_name());
                let s = m.cdf(x).unwrap() + m.cdf(-x).unwrap();
                assert!((s - 1.0).abs() < 1e-12, "{}", m.family_name());
            }
        }
    }

    #[test]
    fn cdf_monotone_and_matches_density() {
        for m in builtins() {
            let dx = 1e-4;
            let mut prev = 0.0;
            for i in 0..1000 {
                let x = -30.0 + 0.06 * i as f64;
                let (a, b) = (m.cdf(x).unwrap(), m.cdf(x + dx).unwrap());
                assert!(a >= prev && b >= a);
                assert!((0.0..=1.0).contains(&a));
                let slope = (b - a) / dx;
                assert!(
                    (slope - m.pdf(x + 0.5 * dx).unwrap()).abs() <= 1e-4,
                    "{} at {x}",
                    m.family_name()
                );
                prev = a;
            }
        }
    }

    #[test]
    fn density_positive_on_bounded_grid() {
        for m in builtins() {
            assert!(m.has_positive_density());
            for i in 0..=200 {
                let x = -50.0 + 0.5 * i as f64;
                assert!(m.pdf(x).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn student_t_density_integrates_to_cdf() {
        let m = NoiseModel::student_t(3.0, 4.0).unwrap();
        // Simpson from 0 to 2 against F(2) - F(0)
        let n = 4000;
        let h = 2.0 / n as f64;
        let mut acc = m.pdf(0.0).unwrap() + m.pdf(2.0).unwrap();
        for i in 1..n {
            acc += m.pdf(i as f64 * h).unwrap() * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let want = m.cdf(2.0).unwrap() - 0.5;
        assert!((acc * h / 3.0 - want).abs() < 1e-12);
    }

    #[test]
    fn student_t_rejects_low_dof() {
        assert!(matches!(
            NoiseModel::student_t(2.0, 1.0),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        for m in builtins().into_iter().chain([triangle()]) {
            let mut a = ChaCha8Rng::seed_from_u64(9);
            let mut b = ChaCha8Rng::seed_from_u64(9);
            let xs: Vec<f64> = (0..50).map(|_| m.sample(&mut a)).collect();
            let ys: Vec<f64> = (0..50).map(|_| m.sample(&mut b)).collect();
            assert_eq!(xs, ys);
        }
    }

    #[test]
    fn gaussian_sample_mean_and_median() {
        let g = NoiseModel::gaussian(25.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut below = 0usize;
        for _ in 0..n {
            let d = g.sample(&mut rng);
            sum += d;
            below += (d <= 0.0) as usize;
        }
        assert!((sum / n as f64).abs() < 3.0 * 5.0 / 1e3);
        let frac = below as f64 / n as f64;
        assert!((frac - 0.5).abs() < 3.0 * 0.5 / 1e3);
    }

    #[test]
    fn sample_variance_matches_declared() {
        // (model, excess fourth moment factor mu4 / sigma^4)
        let cases = [
            (NoiseModel::gaussian(25.0).unwrap(), 3.0),
            (NoiseModel::laplacian(25.0).unwrap(), 6.0),
            (NoiseModel::student_t(10.0, 25.0).unwrap(), 3.0 + 6.0 / 6.0),
        ];
        let n = 1_000_000;
        for (i, (m, kurt)) in cases.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
            let xs: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se_mean = (m.variance() / n as f64).sqrt();
            let se_var = m.variance() * ((kurt - 1.0) / n as f64).sqrt();
            assert!(mean.abs() < 3.0 * se_mean, "{} mean {mean}", m.family_name());
            assert!(
                (var - m.variance()).abs() < 3.0 * se_var,
                "{} var {var}",
                m.family_name()
            );
        }
    }

    #[test]
    fn kolmogorov_smirnov_below_one_percent_critical_value() {
        let n = 100_000;
        let critical = 1.628 / (n as f64).sqrt();
        for (i, m) in builtins().into_iter().chain([triangle()]).enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(7 + i as u64);
            let mut xs: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
            xs.sort_by(f64::total_cmp);
            let d = xs
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let f = m.cdf(x).unwrap();
                    (f - j as f64 / n as f64).max((j + 1) as f64 / n as f64 - f)
                })
                .fold(0.0, f64::max);
            assert!(d < critical, "{}: D = {d}", m.family_name());
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for m in builtins().into_iter().chain([triangle()]) {
            for p in [0.01, 0.2, 0.5, 0.77, 0.999] {
                let x = m.quantile(p).unwrap();
                assert!((m.cdf(x).unwrap() - p).abs() < 1e-11, "{}", m.family_name());
            }
        }
        let g = NoiseModel::gaussian(25.0).unwrap();
        assert!((g.quantile(0.884_930_329_778_291_7).unwrap() - 6.0).abs() < 1e-11);
        assert!(g.quantile(1.0).is_err());
    }

    #[test]
    fn table_domain_and_validation() {
        let m = triangle();
        assert!(matches!(m.cdf(2.5), Err(Error::Domain { .. })));
        assert!(matches!(m.pdf(-3.0), Err(Error::Domain { .. })));
        assert_eq!(m.cdf(-2.0).unwrap(), 0.0);
        assert_eq!(m.cdf(2.0).unwrap(), 1.0);
        // midpoint quadrature of x^2 f(x)
        let n = 40_000;
        let h = 4.0 / n as f64;
        let var: f64 = (0..n)
            .map(|i| {
                let x = -2.0 + (i as f64 + 0.5) * h;
                x * x * m.pdf(x).unwrap() * h
            })
            .sum();
        assert!((m.variance() - var).abs() < 1e-6);

        // flat interior segment
        let flat = [(-1.0, 0.0), (-0.5, 0.5), (0.5, 0.5), (1.0, 1.0)];
        assert!(CdfTable::new(&flat).is_err());
        // not normalised
        assert!(CdfTable::new(&[(-1.0, 0.0), (1.0, 0.9)]).is_err());
        // nonzero mean
        assert!(CdfTable::new(&[(0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(CdfTable::new(&[(-1.0, 0.0), (1.0, 1.0)]).is_ok());
    }

    #[test]
    fn table_inf_density_uses_right_limit() {
        let t = CdfTable::new(&[(-2.0, 0.0), (-1.0, 0.1), (1.0, 0.9), (2.0, 1.0)]).unwrap();
        let m = NoiseModel::tabulated(t);
        assert!((m.inf_density(-0.5, 0.5) - 0.4).abs() < 1e-15);
        // touching the knot at 1 pulls in the outer segment
        assert!((m.inf_density(-1.0, 1.0) - 0.1).abs() < 1e-15);
        assert_eq!(m.inf_density(-2.5, 0.0), 0.0);
    }

    #[test]
    fn csv_table_loads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "x,F\n-1,0\n0,0.5\n1,1\n").unwrap();
        let t = CdfTable::from_csv(&path).unwrap();
        assert_eq!(t.knots().count(), 3);
        std::fs::write(&path, "-1,0\n0,abc\n1,1\n").unwrap();
        assert!(CdfTable::from_csv(&path).is_err());
    }

    #[test]
    fn degenerate_gaussian() {
        let g = NoiseModel::gaussian(0.0).unwrap();
        assert_eq!(g.cdf(0.0).unwrap(), 1.0);
        assert_eq!(g.cdf(-1e-300).unwrap(), 0.0);
        assert!(!g.has_positive_density());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(g.sample(&mut rng), 0.0);
    }
}
