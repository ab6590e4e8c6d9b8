//! Shared dense-matrix helpers.

use nalgebra::{DMatrix, DVector};

/// Symplectic form `Omega = [[0, I], [-I, 0]]` in qqpp ordering.
pub(crate) fn omega(n_modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..n_modes {
        m[(i, n_modes + i)] = 1.0;
        m[(n_modes + i, i)] = -1.0;
    }
    m
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (m + m.transpose())
}

/// Eigenvalues (ascending) and matching eigenvectors of a symmetric matrix.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let se = m.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a symmetric matrix.
pub(crate) fn min_sym_eig(m: &DMatrix<f64>) -> f64 {
    let se = m.clone().symmetric_eigen();
    se.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Cheap feasibility probe: `true` guarantees `min_eig(m) >= -tol`.
/// Falls back on the caller computing the exact eigenvalue when `false`.
pub(crate) fn is_psd_within(m: &DMatrix<f64>, tol: f64) -> bool {
    let dim = m.nrows();
    let shifted = m + DMatrix::<f64>::identity(dim, dim) * tol;
    shifted.cholesky().is_some()
}

/// Symmetric positive-(semi)definite square root.
pub(crate) fn spd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|v| v.max(0.0).sqrt()));
    &vecs * DMatrix::from_diagonal(&d) * vecs.transpose()
}

/// Inverse square root of a symmetric positive-definite matrix.
pub(crate) fn spd_inv_sqrt(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let (vals, vecs) = sym_eigen(m);
    if vals[0] <= 0.0 {
        return None;
    }
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|v| 1.0 / v.sqrt()));
    Some(&vecs * DMatrix::from_diagonal(&d) * vecs.transpose())
}

/// Geometric mean `A # B^{-1}` specialized to the q-p pure-part problem:
/// returns `X = A^{1/2} (A^{1/2} B A^{1/2})^{-1/2} A^{1/2}`, the unique SPD
/// solution of `X B X = A`. With `A = sigma_q`, `B = sigma_p` this is the
/// q-block of the canonical pure part of a q-p state.
pub(crate) fn qp_pure_part_block(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let ra = spd_sqrt(a);
    let c = &ra * b * &ra;
    let c_inv_sqrt = spd_inv_sqrt(&symmetrize(&c))?;
    Some(symmetrize(&(&ra * c_inv_sqrt * &ra)))
}
