//! Dense symmetric eigenvalues by the cyclic Jacobi method, and von Neumann
//! entropy of a spectrum.

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, lit, Scalar};
use crate::series::{xlnx_neg, Nats};

/// Relative asymmetry tolerated by [`symmetric_eigenvalues`].
const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues of the symmetric `n × n` matrix `a` (row-major), ascending.
pub fn symmetric_eigenvalues<T: Scalar>(a: &[T], n: usize) -> Result<Vec<T>> {
    if a.len() != n * n {
        return Err(Error::Config {
            key: "matrix".into(),
            message: format!("expected {} entries, found {}", n * n, a.len()),
        });
    }
    let scale = a.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (a[i * n + j] - a[j * n + i]).abs();
            if !(gap <= lit::<T>(SYMMETRY_TOL) * scale.max(T::min_positive_value())) {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    gap: gap.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    let mut m: Vec<T> = a.to_vec();
    // Symmetrize exactly so rotations preserve symmetry.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = lit::<T>(0.5) * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    for _sweep in 0..100 {
        let off: T = compensated_sum((0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| {
            let v = m[i * n + j];
            v * v
        }));
        let diag: T = compensated_sum((0..n).map(|i| m[i * n + i] * m[i * n + i]));
        if off <= T::epsilon() * T::epsilon() * diag.max(T::min_positive_value()) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (lit::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig)
}

/// `−Σ λ ln λ` of a density-matrix spectrum. Eigenvalues down to `−tol` are
/// treated as rounding and clamped to zero; anything more negative is
/// reported.
pub fn spectrum_entropy<T: Scalar>(eigenvalues: &[T], tol: T) -> Result<Nats<T>> {
    if let Some(&min) = eigenvalues.iter().min_by(|a, b| a.partial_cmp(b).expect("finite")) {
        if min < -tol {
            return Err(Error::NotPositiveSemidefinite(min.to_f64().unwrap_or(f64::NAN)));
        }
    }
    Ok(Nats(compensated_sum(eigenvalues.iter().map(|&l| xlnx_neg(l)))))
}

/// von Neumann entropy of a symmetric density matrix.
pub fn von_neumann_entropy<T: Scalar>(a: &[T], n: usize) -> Result<Nats<T>> {
    let eig = symmetric_eigenvalues(a, n)?;
    spectrum_entropy(&eig, lit(1e-12))
}
