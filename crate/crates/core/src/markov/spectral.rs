use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::TransitionMatrix;
use crate::error::{Error, Result};

/// Residual above which an eigendecomposition is rejected.
const EIGEN_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Real parts, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Largest imaginary part magnitude, zero for reversible chains.
    pub max_imaginary: f64,
    pub lambda2: f64,
    pub lambda_min: f64,
    /// `min(1 - λ₂, 1 + λ_min)`.
    pub gap: f64,
    pub stationary: Vec<f64>,
    pub reversible: bool,
    pub residual: f64,
}

impl SpectralReport {
    /// Number of eigenvalues within `tol` of `value`.
    pub fn multiplicity(&self, value: f64, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&x| (x - value).abs() <= tol).count()
    }
}

/// Solves `πQ = π`, `Σπ = 1`.
pub fn stationary_distribution(q: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = q.nrows();
    let mut a = q.transpose() - DMatrix::identity(n, n);
    let mut b = DVector::zeros(n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    b[n - 1] = 1.0;
    let pi = a.lu().solve(&b).ok_or_else(|| Error::Transition("stationary system is singular".into()))?;
    Ok(pi.iter().copied().collect())
}

fn is_reversible(q: &DMatrix<f64>, pi: &[f64]) -> bool {
    let n = q.nrows();
    (0..n).all(|i| (0..n).all(|j| (pi[i] * q[(i, j)] - pi[j] * q[(j, i)]).abs() <= 1e-13))
}

/// Eigenvalues and stationary distribution of a row-stochastic matrix.
///
/// Reversible chains are symmetrized by `D^{1/2} Q D^{-1/2}` with `D = diag(π)`
/// and solved with a symmetric eigensolver; others go through a real Schur
/// decomposition.
pub fn spectral_report<S>(q: &TransitionMatrix<S>) -> Result<SpectralReport> {
    spectral_report_dense(&q.to_dmatrix())
}

pub fn spectral_report_dense(q: &DMatrix<f64>) -> Result<SpectralReport> {
    let n = q.nrows();
    if n == 0 {
        return Err(Error::Transition("empty matrix".into()));
    }
    let stationary = stationary_distribution(q)?;
    let reversible = stationary.iter().all(|&p| p > 0.0) && is_reversible(q, &stationary);
    let (mut eigenvalues, max_imaginary, residual) = if reversible {
        let sq: Vec<f64> = stationary.iter().map(|p| p.sqrt()).collect();
        let s = DMatrix::from_fn(n, n, |i, j| sq[i] * q[(i, j)] / sq[j]);
        let s = (&s + s.transpose()) * 0.5;
        let eig = SymmetricEigen::new(s.clone());
        let residual = (0..n)
            .map(|k| {
                let v = eig.eigenvectors.column(k);
                (&s * v - v * eig.eigenvalues[k]).amax()
            })
            .fold(0.0, f64::max);
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), 0.0, residual)
    } else {
        let schur = q.clone().try_schur(1e-14, 10_000).ok_or(Error::Eigensolver { residual: f64::NAN })?;
        let (u, t) = schur.clone().unpack();
        let residual = (&u * &t * u.transpose() - q).amax();
        let complex = schur.complex_eigenvalues();
        let max_im = complex.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        (complex.iter().map(|z| z.re).collect(), max_im, residual)
    };
    if !(residual <= EIGEN_TOLERANCE) {
        return Err(Error::Eigensolver { residual });
    }
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    if (eigenvalues[0] - 1.0).abs() > 1e-8 {
        return Err(Error::Transition(format!("leading eigenvalue {} is not 1", eigenvalues[0])));
    }
    let lambda2 = eigenvalues.get(1).copied().unwrap_or(0.0);
    let lambda_min = *eigenvalues.last().expect("nonempty");
    Ok(SpectralReport {
        gap: (1.0 - lambda2).min(1.0 + lambda_min),
        eigenvalues,
        max_imaginary,
        lambda2,
        lambda_min,
        stationary,
        reversible,
        residual,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularValueReport {
    pub sigma_max: f64,
    pub bound: f64,
    pub within_bound: bool,
    pub equality: bool,
}

/// Largest singular value of `R` against `3√2·N`, with tolerance `1e-9`.
pub fn singular_check_r(r: &[Vec<i64>], m: usize) -> SingularValueReport {
    let rows = r.len();
    let cols = r.first().map_or(0, Vec::len);
    let mat = DMatrix::from_fn(rows, cols, |i, j| r[i][j] as f64);
    let sigma_max = mat.singular_values().iter().copied().fold(0.0, f64::max);
    let bound = 3.0 * 2f64.sqrt() * (1u64 << m) as f64;
    SingularValueReport { sigma_max, bound, within_bound: sigma_max <= bound + 1e-9, equality: (sigma_max - bound).abs() <= 1e-9 }
}

/// `TV(t) = ½‖sQᵗ − π‖₁` for `t = 0..=t_max`.
///
/// Evolves the difference `(s − π)Qᵗ` rather than `sQᵗ`. The two agree when
/// `π` is stationary, but the difference keeps small distances free of
/// cancellation against `π`. Its total mass is zero; rounding drift in that
/// mass is removed along `π` each step so it cannot set a floor.
pub fn tv_curve(q: &DMatrix<f64>, start: &[f64], stationary: &[f64], t_max: usize) -> Vec<f64> {
    let pi = DVector::from_column_slice(stationary).transpose();
    let mut d = DVector::from_column_slice(start).transpose() - &pi;
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let drift = d.sum();
        d -= &pi * drift;
        out.push(0.5 * d.abs().sum());
        if t < t_max {
            d = &d * q;
        }
    }
    out
}
