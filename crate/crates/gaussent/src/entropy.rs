//! Entropy functionals on covariance matrices: the auxiliary function
//! `h`, von Neumann entropy, partition entropy, and entropy of
//! entanglement for pure states. All values are in bits.

use nalgebra::DMatrix;

use crate::cov::CovarianceMatrix;
use crate::linalg::omega;
use crate::partition::Partition;
use crate::{Error, Result, MEASURE_PURITY_TOL, PHYSICALITY_TOL};

/// Nonnegative entropy value in bits (base-2 logarithms).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyValue(f64);

impl EntropyValue {
    pub const ZERO: EntropyValue = EntropyValue(0.0);

    pub(crate) fn from_bits(bits: f64) -> Self {
        EntropyValue(bits.max(0.0))
    }

    pub fn bits(self) -> f64 {
        self.0
    }

    /// The same value in nats.
    pub fn nats(self) -> f64 {
        self.0 * std::f64::consts::LN_2
    }
}

/// `h(x) = (x+1)/2 log2((x+1)/2) - (x-1)/2 log2((x-1)/2)`, with the
/// `x -> 1` limit defined as 0. Inputs within `1e-6` below 1 are clamped
/// to 1 (eigensolver noise); anything lower is a domain error.
pub fn h_aux(x: f64) -> Result<EntropyValue> {
    if !x.is_finite() || x < 1.0 - 1e-6 {
        return Err(Error::Domain(format!(
            "h is defined for x >= 1, got {x}"
        )));
    }
    Ok(EntropyValue::from_bits(h_raw(x)))
}

/// Clamped evaluation of `h` used in inner loops; returns 0 for `x <= 1`.
pub(crate) fn h_raw(x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    let xp = 0.5 * (x + 1.0);
    let xm = 0.5 * (x - 1.0);
    let second = if xm > 0.0 { xm * xm.log2() } else { 0.0 };
    xp * xp.log2() - second
}

/// `h` of a numerically obtained symplectic eigenvalue: values within
/// [`crate::PURITY_TOL`] of 1 count as exactly 1 (eigensolver noise).
pub(crate) fn h_of_nu(nu: f64) -> f64 {
    if (nu - 1.0).abs() <= crate::PURITY_TOL {
        0.0
    } else {
        h_raw(nu)
    }
}

/// Von Neumann entropy `S(sigma) = sum_n h(nu_n)` in bits.
///
/// With this normalization a thermal mode with `nu = 2 nbar + 1` has the
/// standard entropy `(nbar+1) log2(nbar+1) - nbar log2(nbar)` and the
/// single-mode formula `S = h(sqrt(det))` holds exactly.
pub fn entropy(cov: &CovarianceMatrix) -> Result<EntropyValue> {
    let nus = cov.symplectic_eigenvalues()?;
    let min_nu = nus.last().copied().unwrap_or(f64::INFINITY);
    if min_nu < 1.0 - PHYSICALITY_TOL {
        return Err(Error::Unphysical { min_nu });
    }
    Ok(EntropyValue::from_bits(
        nus.iter().map(|&nu| h_of_nu(nu)).sum(),
    ))
}

/// Single-mode entropy via `h(sqrt(det))`; agrees with [`entropy`] on
/// 2x2 covariance matrices.
pub fn single_mode_entropy(cov: &CovarianceMatrix) -> Result<EntropyValue> {
    if cov.n_modes() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: cov.n_modes(),
        });
    }
    let det = cov.matrix().determinant();
    if det < (1.0 - 1e-6) * (1.0 - 1e-6) {
        return Err(Error::Domain(format!(
            "single-mode determinant {det} is below the vacuum bound"
        )));
    }
    h_aux(det.max(0.0).sqrt())
}

/// Partition entropy `S_alpha(sigma) = 1/2 sum_i S(sigma_{s_i})`, where
/// `sigma_{s_i}` is the reduced state on block `s_i`.
pub fn alpha_entropy(cov: &CovarianceMatrix, alpha: &Partition) -> Result<EntropyValue> {
    if alpha.n_modes() != cov.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: cov.n_modes(),
            got: alpha.n_modes(),
        });
    }
    let phys = cov.validate_physical()?;
    if !phys.is_physical() {
        return Err(Error::Unphysical {
            min_nu: phys.min_nu(),
        });
    }
    let mut total = 0.0;
    for block in alpha.blocks() {
        let red = cov.reduced(block)?;
        total += entropy(&red)?.bits();
    }
    Ok(EntropyValue::from_bits(0.5 * total))
}

/// Entropy of entanglement of a pure state for the partition `alpha`:
/// equal to [`alpha_entropy`], defined on pure states only.
pub fn alpha_eoe(pure_cov: &CovarianceMatrix, alpha: &Partition) -> Result<EntropyValue> {
    let dev = pure_cov.purity_deviation()?;
    if dev > MEASURE_PURITY_TOL {
        return Err(Error::NotPure { deviation: dev });
    }
    alpha_entropy(pure_cov, alpha)
}

/// Entropy of entanglement at the finest partition: the total
/// entanglement of a pure state, maximal among all partitions.
pub fn n_mode_eoe(pure_cov: &CovarianceMatrix) -> Result<EntropyValue> {
    alpha_eoe(pure_cov, &Partition::finest(pure_cov.n_modes()))
}

/// Unvalidated partition entropy on a raw symmetric matrix; used by the
/// optimizer where candidates are pure by construction. Single-mode
/// blocks use the determinant shortcut; larger blocks fall back on the
/// eigenvalues of `Omega sigma_block` with clamping instead of errors.
pub(crate) fn alpha_entropy_of_matrix(mat: &DMatrix<f64>, blocks: &[Vec<usize>]) -> f64 {
    let n = mat.nrows() / 2;
    let mut total = 0.0;
    for block in blocks {
        if block.len() == 1 {
            let m = block[0];
            let det = mat[(m, m)] * mat[(n + m, n + m)] - mat[(m, n + m)] * mat[(n + m, m)];
            total += h_of_nu(det.max(1.0).sqrt());
        } else {
            let k = block.len();
            let idx: Vec<usize> = block
                .iter()
                .copied()
                .chain(block.iter().map(|&m| m + n))
                .collect();
            let mut sub = DMatrix::zeros(2 * k, 2 * k);
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    sub[(r, c)] = mat[(i, j)];
                }
            }
            let prod = omega(k) * sub;
            let eigs = prod.complex_eigenvalues();
            let mut mags: Vec<f64> = eigs.iter().map(|c| c.norm()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            for kk in 0..k {
                let nu = 0.5 * (mags[2 * kk] + mags[2 * kk + 1]);
                total += h_of_nu(nu);
            }
        }
    }
    0.5 * total
}
