//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result, C64};

/// Induced ∞-norm (largest absolute row sum).
pub fn norm_inf(m: &DMatrix<C64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Induced ∞-norm of a real matrix.
pub fn norm_inf_real(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

pub fn identity(n: usize) -> DMatrix<C64> {
    DMatrix::identity(n, n)
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn sigma_min(m: &DMatrix<C64>) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Numerical rank with threshold `tol · σ_max`.
pub fn rank(m: &DMatrix<C64>, tol: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > tol * top).count()
}

/// Inverse through LU after a relative singularity test.
pub fn inverse(m: &DMatrix<C64>, rel_tol: f64) -> Result<DMatrix<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "inverse of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    let bottom = s.last().copied().unwrap_or(0.0);
    if top == 0.0 || bottom <= rel_tol * top {
        return Err(Error::SingularX { sigma_min: bottom });
    }
    m.clone().lu().try_inverse().ok_or(Error::SingularX { sigma_min: bottom })
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues and eigenvectors of a real symmetric matrix, ascending.
pub fn symmetric_eigen_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let h = (m + m.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// `m = M J M*` with `J = diag(±1)`, positive entries first.
///
/// Returns `(M, J)`. Fails if `m` is numerically singular.
pub fn hermitian_signature_factor(m: &DMatrix<C64>, rel_tol: f64) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let n = m.nrows();
    let (vals, vecs) = hermitian_eigen(m);
    let top = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let bottom = vals.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if n == 0 || top == 0.0 || bottom <= rel_tol * top {
        return Err(Error::SingularX { sigma_min: if bottom.is_finite() { bottom } else { 0.0 } });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut mm = DMatrix::zeros(n, n);
    let mut j = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let s = vals[k].abs().sqrt();
        for i in 0..n {
            mm[(i, col)] = vecs[(i, k)] * s;
        }
        j[(col, col)] = C64::new(vals[k].signum(), 0.0);
    }
    Ok((mm, j))
}
