//! Covariance matrices, Gaussian states, and the symplectic operations on
//! them: symplectic eigenvalues, physicality/purity diagnosis, partial
//! trace, direct sums, symplectic conjugation, and the Williamson
//! decomposition.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{max_abs, max_asymmetry, omega, sym_eigen, symmetrize};
use crate::symplectic::SymplecticMatrix;
use crate::{Error, Result, PAIRING_RTOL, PHYSICALITY_TOL, PURITY_TOL, SYMMETRY_RTOL};

/// Real symmetric `2N x 2N` second-moment matrix of an `N`-mode Gaussian
/// state, in qqpp ordering and vacuum-normalized (vacuum = identity).
///
/// Symmetry is enforced at construction; physicality is not, so that
/// diagnostic workflows can load and inspect unphysical matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    mat: DMatrix<f64>,
}

/// Outcome of the physicality check `nu_min >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Physicality {
    Physical { min_nu: f64 },
    Unphysical { min_nu: f64 },
}

impl Physicality {
    pub fn is_physical(&self) -> bool {
        matches!(self, Physicality::Physical { .. })
    }

    /// Worst (smallest) symplectic eigenvalue.
    pub fn min_nu(&self) -> f64 {
        match *self {
            Physicality::Physical { min_nu } | Physicality::Unphysical { min_nu } => min_nu,
        }
    }
}

impl CovarianceMatrix {
    /// Wraps a `2N x 2N` matrix, checking squareness, even dimension and
    /// symmetry (relative tolerance [`SYMMETRY_RTOL`]). The stored matrix
    /// is symmetrized so downstream algebra sees an exactly symmetric
    /// input.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        if mat.nrows() == 0 || !mat.nrows().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "covariance matrix dimension must be a positive even number, got {}",
                mat.nrows()
            )));
        }
        let asym = max_asymmetry(&mat);
        if asym > SYMMETRY_RTOL * max_abs(&mat).max(1.0) {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
            });
        }
        let n_modes = mat.nrows() / 2;
        Ok(Self {
            n_modes,
            mat: symmetrize(&mat),
        })
    }

    /// Vacuum state of `n_modes` modes (identity matrix).
    pub fn vacuum(n_modes: usize) -> Self {
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

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    /// Symplectic eigenvalues in descending order: the `N` distinct
    /// magnitudes of the eigenvalues of `i Omega sigma`, obtained by
    /// pairing the `2N` magnitudes (relative pairing tolerance
    /// [`PAIRING_RTOL`]).
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let prod = omega(self.n_modes) * &self.mat;
        let eigs = prod.complex_eigenvalues();
        let mut mags: Vec<f64> = eigs.iter().map(|c| c.norm()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let mut nus = Vec::with_capacity(self.n_modes);
        for k in 0..self.n_modes {
            let (hi, lo) = (mags[2 * k], mags[2 * k + 1]);
            let mean = 0.5 * (hi + lo);
            if hi - lo > PAIRING_RTOL * mean.max(1.0) {
                return Err(Error::Numerical {
                    context: "symplectic eigenvalue pairing".into(),
                    residual: hi - lo,
                });
            }
            nus.push(mean);
        }
        Ok(nus)
    }

    /// Physicality diagnosis: physical iff `min nu >= 1 - PHYSICALITY_TOL`.
    pub fn validate_physical(&self) -> Result<Physicality> {
        let nus = self.symplectic_eigenvalues()?;
        let min_nu = nus.last().copied().unwrap_or(f64::INFINITY);
        if min_nu >= 1.0 - PHYSICALITY_TOL {
            Ok(Physicality::Physical { min_nu })
        } else {
            Ok(Physicality::Unphysical { min_nu })
        }
    }

    pub fn is_physical(&self) -> bool {
        matches!(self.validate_physical(), Ok(p) if p.is_physical())
    }

    /// Largest deviation of any symplectic eigenvalue from 1.
    pub fn purity_deviation(&self) -> Result<f64> {
        let nus = self.symplectic_eigenvalues()?;
        Ok(nus
            .iter()
            .fold(0.0_f64, |acc, nu| acc.max((nu - 1.0).abs())))
    }

    /// Purity test via the full nu-spectrum (the determinant alone is
    /// necessary but ill-conditioned at N = 3).
    pub fn is_pure(&self, tol: f64) -> bool {
        matches!(self.purity_deviation(), Ok(d) if d <= tol)
    }

    pub fn is_pure_default(&self) -> bool {
        self.is_pure(PURITY_TOL)
    }

    /// Reduced covariance matrix on the given modes (partial trace over
    /// the rest). Mode indices are zero-based.
    pub fn reduced(&self, keep: &[usize]) -> Result<CovarianceMatrix> {
        let keep = validate_keep(keep, self.n_modes)?;
        let k = keep.len();
        let idx: Vec<usize> = keep
            .iter()
            .copied()
            .chain(keep.iter().map(|&m| m + self.n_modes))
            .collect();
        let mut sub = DMatrix::zeros(2 * k, 2 * k);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                sub[(r, c)] = self.mat[(i, j)];
            }
        }
        Ok(CovarianceMatrix { n_modes: k, mat: sub })
    }

    /// Williamson decomposition `sigma = S D S^T` with `S` symplectic and
    /// `D = diag(nu_1..nu_N, nu_1..nu_N)`. Requires `sigma > 0`.
    ///
    /// Returned eigenvalues are in descending order, matching
    /// [`Self::symplectic_eigenvalues`].
    pub fn williamson(&self) -> Result<(SymplecticMatrix, Vec<f64>)> {
        let n = self.n_modes;
        let dim = 2 * n;
        let (evals, evecs) = sym_eigen(&self.mat);
        if evals[0] <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let sqrt_d = DVector::from_iterator(dim, evals.iter().map(|v| v.sqrt()));
        let p = &evecs * DMatrix::from_diagonal(&sqrt_d) * evecs.transpose();
        let inv_sqrt_d = DVector::from_iterator(dim, evals.iter().map(|v| 1.0 / v.sqrt()));
        let p_inv = &evecs * DMatrix::from_diagonal(&inv_sqrt_d) * evecs.transpose();

        // K is antisymmetric with eigenvalues +- i/nu_k; pair its invariant
        // planes via the symmetric matrix -K^2.
        let k_mat = &p_inv * omega(n) * &p_inv;
        let m = symmetrize(&(-(&k_mat * &k_mat)));
        let (_, w) = sym_eigen(&m);

        let mut us: Vec<DVector<f64>> = Vec::with_capacity(n);
        let mut vs: Vec<DVector<f64>> = Vec::with_capacity(n);
        let mut kappas: Vec<f64> = Vec::with_capacity(n);
        for idx in (0..dim).rev() {
            if us.len() == n {
                break;
            }
            let mut cand = w.column(idx).clone_owned();
            for u in &us {
                let c = u.dot(&cand);
                cand -= u * c;
            }
            for v in &vs {
                let c = v.dot(&cand);
                cand -= v * c;
            }
            let nrm = cand.norm();
            if nrm < 0.5 {
                continue; // partner of an already-chosen plane
            }
            let u = cand / nrm;
            let ku = &k_mat * &u;
            let kappa = ku.norm();
            if kappa <= 0.0 {
                return Err(Error::Numerical {
                    context: "Williamson pairing".into(),
                    residual: kappa,
                });
            }
            let mut v = ku / kappa;
            for uu in &us {
                let c = uu.dot(&v);
                v -= uu * c;
            }
            for vv in &vs {
                let c = vv.dot(&v);
                v -= vv * c;
            }
            let c = u.dot(&v);
            v -= &u * c;
            let vn = v.norm();
            if vn < 0.5 {
                return Err(Error::Numerical {
                    context: "Williamson orthogonalization".into(),
                    residual: vn,
                });
            }
            v /= vn;
            us.push(u);
            vs.push(v);
            kappas.push(kappa);
        }
        if us.len() != n {
            return Err(Error::Numerical {
                context: "Williamson plane extraction".into(),
                residual: (n - us.len()) as f64,
            });
        }

        // nu = 1/kappa; order modes by nu descending for determinism.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| kappas[a].total_cmp(&kappas[b]));
        let nus: Vec<f64> = order.iter().map(|&i| 1.0 / kappas[i]).collect();

        // O = [v's | u's] satisfies O C O^T = K with C the canonical
        // antisymmetric form; S = sigma^{1/2} O D^{-1/2}.
        let mut o = DMatrix::zeros(dim, dim);
        for (col, &i) in order.iter().enumerate() {
            o.set_column(col, &vs[i]);
            o.set_column(n + col, &us[i]);
        }
        let d_inv_half = DVector::from_iterator(
            dim,
            nus.iter().chain(nus.iter()).map(|nu| 1.0 / nu.sqrt()),
        );
        let s = p * o * DMatrix::from_diagonal(&d_inv_half);
        let s = SymplecticMatrix::new(s)?;
        Ok((s, nus))
    }

    /// Pure covariance matrix `S S^T` from the Williamson decomposition;
    /// always satisfies `sigma - S S^T >= 0`.
    pub fn pure_part(&self) -> Result<CovarianceMatrix> {
        let (s, _) = self.williamson()?;
        let m = s.matrix() * s.matrix().transpose();
        Ok(CovarianceMatrix {
            n_modes: self.n_modes,
            mat: symmetrize(&m),
        })
    }
}

fn validate_keep(keep: &[usize], n_modes: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "keep set must be nonempty".into(),
        ));
    }
    let mut sorted: Vec<usize> = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(Error::InvalidArgument(
            "keep set contains duplicate modes".into(),
        ));
    }
    if let Some(&worst) = sorted.iter().find(|&&m| m >= n_modes) {
        return Err(Error::InvalidArgument(format!(
            "mode index {worst} out of range for {n_modes} modes"
        )));
    }
    Ok(sorted)
}

/// An `N`-mode Gaussian state: covariance matrix plus a `2N` displacement
/// vector. All entanglement measures in this crate depend on the
/// covariance matrix only.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cov: CovarianceMatrix,
    displacement: DVector<f64>,
}

impl GaussianState {
    pub fn new(cov: CovarianceMatrix, displacement: DVector<f64>) -> Result<Self> {
        if displacement.len() != 2 * cov.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: 2 * cov.n_modes(),
                got: displacement.len(),
            });
        }
        Ok(Self { cov, displacement })
    }

    /// State with zero displacement.
    pub fn centered(cov: CovarianceMatrix) -> Self {
        let dim = 2 * cov.n_modes();
        Self {
            cov,
            displacement: DVector::zeros(dim),
        }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self::centered(CovarianceMatrix::vacuum(n_modes))
    }

    pub fn n_modes(&self) -> usize {
        self.cov.n_modes()
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.displacement
    }

    pub fn into_parts(self) -> (CovarianceMatrix, DVector<f64>) {
        (self.cov, self.displacement)
    }
}

/// Reduced state on `keep` (partial trace over all other modes).
/// Mode indices are zero-based.
pub fn partial_trace(state: &GaussianState, keep: &[usize]) -> Result<GaussianState> {
    let cov = state.cov.reduced(keep)?;
    let sorted = validate_keep(keep, state.n_modes())?;
    let n = state.n_modes();
    let disp = DVector::from_iterator(
        2 * sorted.len(),
        sorted
            .iter()
            .map(|&m| state.displacement[m])
            .chain(sorted.iter().map(|&m| state.displacement[n + m])),
    );
    Ok(GaussianState {
        cov,
        displacement: disp,
    })
}

/// Tensor product of two states as a block embedding, preserving qqpp
/// ordering: q-blocks of `a` then `b`, followed by the p-blocks.
pub fn direct_sum(a: &GaussianState, b: &GaussianState) -> GaussianState {
    let (na, nb) = (a.n_modes(), b.n_modes());
    let n = na + nb;
    // index of quadrature k of a (k < 2 na) in the combined matrix
    let map_a = |k: usize| if k < na { k } else { n + (k - na) };
    let map_b = |k: usize| if k < nb { na + k } else { n + na + (k - nb) };

    let mut mat = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..2 * na {
        for j in 0..2 * na {
            mat[(map_a(i), map_a(j))] = a.cov.mat[(i, j)];
        }
    }
    for i in 0..2 * nb {
        for j in 0..2 * nb {
            mat[(map_b(i), map_b(j))] = b.cov.mat[(i, j)];
        }
    }
    let mut disp = DVector::zeros(2 * n);
    for i in 0..2 * na {
        disp[map_a(i)] = a.displacement[i];
    }
    for i in 0..2 * nb {
        disp[map_b(i)] = b.displacement[i];
    }
    GaussianState {
        cov: CovarianceMatrix {
            n_modes: n,
            mat,
        },
        displacement: disp,
    }
}

/// Conjugates the state by a symplectic matrix: `sigma -> M sigma M^T`,
/// `d -> M d`.
pub fn apply_symplectic(state: &GaussianState, m: &SymplecticMatrix) -> Result<GaussianState> {
    if m.n_modes() != state.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: state.n_modes(),
            got: m.n_modes(),
        });
    }
    let new_mat = symmetrize(&(m.matrix() * &state.cov.mat * m.matrix().transpose()));
    Ok(GaussianState {
        cov: CovarianceMatrix {
            n_modes: state.n_modes(),
            mat: new_mat,
        },
        displacement: m.matrix() * &state.displacement,
    })
}
