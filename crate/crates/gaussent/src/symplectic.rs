//! Symplectic matrices and the `pi(X, Y)` parametrization of pure states.

use nalgebra::DMatrix;

use crate::cov::CovarianceMatrix;
use crate::linalg::{max_abs, max_asymmetry, omega, symmetrize};
use crate::{Error, Result, SYMMETRY_RTOL, SYMPLECTIC_TOL};

/// A real `2N x 2N` matrix `M` with `M Omega M^T = Omega` (qqpp ordering).
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n_modes: usize,
    mat: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Validates the symplectic condition within [`SYMPLECTIC_TOL`]
    /// (scaled by the squared magnitude of the largest entry, so strongly
    /// squeezed matrices are not rejected for benign rounding).
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 || !mat.nrows().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "symplectic matrix must be square with even dimension, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let n = mat.nrows() / 2;
        let om = omega(n);
        let dev = max_abs(&(&mat * &om * mat.transpose() - &om));
        let scale = max_abs(&mat).powi(2).max(1.0);
        if dev > SYMPLECTIC_TOL * scale {
            return Err(Error::NotSymplectic { deviation: dev });
        }
        Ok(Self { n_modes: n, mat })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            n_modes,
            mat: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Deviation from the symplectic condition, `max |M Omega M^T - Omega|`.
    pub fn symplectic_deviation(&self) -> f64 {
        let om = omega(self.n_modes);
        max_abs(&(&self.mat * &om * self.mat.transpose() - &om))
    }

    /// Exact symplectic inverse `M^{-1} = Omega M^T Omega^{-1}`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let om = omega(self.n_modes);
        let inv = &om * self.mat.transpose() * (-&om);
        SymplecticMatrix {
            n_modes: self.n_modes,
            mat: inv,
        }
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                got: other.n_modes,
            });
        }
        Ok(SymplecticMatrix {
            n_modes: self.n_modes,
            mat: &self.mat * &other.mat,
        })
    }

    pub(crate) fn from_valid(mat: DMatrix<f64>) -> Self {
        let n_modes = mat.nrows() / 2;
        Self { n_modes, mat }
    }
}

/// Wolf parametrization of an `N`-mode pure Gaussian covariance matrix:
/// `pi(X, Y) = [[X, XY], [YX, YXY + X^{-1}]]` with `X` symmetric positive
/// definite and `Y` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct PureXy {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl PureXy {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        if x.nrows() != x.ncols() || x.nrows() == 0 {
            return Err(Error::InvalidArgument("X must be square".into()));
        }
        if y.nrows() != x.nrows() || y.ncols() != x.ncols() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                got: y.nrows(),
            });
        }
        for (name, m) in [("X", &x), ("Y", &y)] {
            let asym = max_asymmetry(m);
            if asym > SYMMETRY_RTOL * max_abs(m).max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be symmetric (max asymmetry {asym:.3e})"
                )));
            }
        }
        if x.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            x: symmetrize(&x),
            y: symmetrize(&y),
        })
    }

    /// q-p pure state `X (+) X^{-1}` (i.e. `Y = 0`).
    pub fn qp(x: DMatrix<f64>) -> Result<Self> {
        let n = x.nrows();
        Self::new(x, DMatrix::zeros(n, n))
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn n_modes(&self) -> usize {
        self.x.nrows()
    }

    /// Assembles the pure covariance matrix `pi(X, Y)`.
    pub fn assemble(&self) -> Result<CovarianceMatrix> {
        let n = self.n_modes();
        let chol = self
            .x
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite)?;
        let x_inv = chol.inverse();
        let xy = &self.x * &self.y;
        let yxy = &self.y * &xy;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.x);
        m.view_mut((0, n), (n, n)).copy_from(&xy);
        m.view_mut((n, 0), (n, n)).copy_from(&xy.transpose());
        m.view_mut((n, n), (n, n))
            .copy_from(&symmetrize(&(yxy + x_inv)));
        CovarianceMatrix::new(m)
    }
}

/// Free-function form of [`PureXy::assemble`].
pub fn assemble_pure(xy: &PureXy) -> Result<CovarianceMatrix> {
    xy.assemble()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_is_symplectic() {
        let id = SymplecticMatrix::identity(3);
        assert!(id.symplectic_deviation() < 1e-15);
    }

    #[test]
    fn rejects_non_symplectic() {
        let m = DMatrix::from_diagonal_element(2, 2, 2.0);
        assert!(matches!(
            SymplecticMatrix::new(m),
            Err(Error::NotSymplectic { .. })
        ));
    }

    #[test]
    fn inverse_is_exact() {
        let sq = crate::states::squeeze(0.9).unwrap();
        let rot = crate::states::rotation(1.1);
        let m = rot.compose(&sq).unwrap();
        let prod = m.matrix() * m.inverse().matrix();
        let dev = max_abs(&(prod - DMatrix::identity(2, 2)));
        assert!(dev < 1e-12);
    }

    #[test]
    fn assemble_vacuum() {
        let xy = PureXy::qp(DMatrix::identity(2, 2)).unwrap();
        let pi = xy.assemble().unwrap();
        assert_eq!(pi.matrix(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn assemble_single_mode_squeezed() {
        let r: f64 = 0.6;
        let x = DMatrix::from_diagonal_element(1, 1, (2.0 * r).exp());
        let pi = PureXy::qp(x).unwrap().assemble().unwrap();
        assert_abs_diff_eq!(pi.matrix()[(0, 0)], (2.0 * r).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(pi.matrix()[(1, 1)], (-2.0 * r).exp(), epsilon = 1e-12);
        assert!(pi.is_pure(1e-9));
    }

    #[test]
    fn assemble_rejects_indefinite_x() {
        let x = DMatrix::from_diagonal_element(1, 1, -1.0);
        assert!(PureXy::qp(x).is_err());
    }
}
