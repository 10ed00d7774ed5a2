//! Small dense helpers for symmetric matrices stored row-major in a flat slice.

/// Eigenvalues of a symmetric `n x n` matrix, ascending.
///
/// `n = 1` and `n = 2` are closed form; larger orders use cyclic Jacobi
/// rotations until the off-diagonal mass drops below `1e-12` relative to
/// the Frobenius norm.
pub fn sym_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    match n {
        0 => Vec::new(),
        1 => vec![a[0]],
        2 => {
            let (p, q, r) = (a[0], a[1], a[3]);
            let mid = 0.5 * (p + r);
            let rad = (0.5 * (p - r)).hypot(q);
            vec![mid - rad, mid + rad]
        }
        _ => jacobi(a, n),
    }
}

pub fn min_eigenvalue(a: &[f64], n: usize) -> f64 {
    sym_eigenvalues(a, n)[0]
}

/// Numerical rank of a symmetric PSD matrix.
pub fn psd_rank(a: &[f64], n: usize) -> usize {
    let eig = sym_eigenvalues(a, n);
    let top = eig.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let tol = top * n as f64 * 1e-12;
    eig.iter().filter(|&&e| e > tol).count()
}

fn jacobi(a: &[f64], n: usize) -> Vec<f64> {
    const TOL: f64 = 1e-12;
    let mut m = a.to_vec();
    let frob = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= TOL * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `acc += w * v v^T`.
pub fn add_outer(acc: &mut [f64], v: &[f64], w: f64) {
    let n = v.len();
    for i in 0..n {
        for j in 0..n {
            acc[i * n + j] += w * v[i] * v[j];
        }
    }
}
