//! State factories and canonical forms: thermal inputs, local (GLUO)
//! building blocks, two- and three-mode squeezers, the GHZ/W family,
//! pure and mixed three-mode standard forms, and q-p structure detection.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use crate::cov::{apply_symplectic, CovarianceMatrix, GaussianState};
use crate::linalg::{max_abs, symmetrize};
use crate::symplectic::SymplecticMatrix;
use crate::{Error, Result, QP_TOL};

/// Bound on single-mode squeezing parameters accepted by the factories.
pub const R_MAX: f64 = 5.0;

/// Slack allowed when checking the pure-state triangle condition.
const TRIANGLE_TOL: f64 = 1e-9;

/// Thermal state with mean occupation `nbar`: covariance `(2 nbar + 1) I`.
pub fn thermal(nbar: f64) -> Result<GaussianState> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mean occupation must be nonnegative, got {nbar}"
        )));
    }
    let cov = CovarianceMatrix::new(DMatrix::from_diagonal_element(2, 2, 2.0 * nbar + 1.0))?;
    Ok(GaussianState::centered(cov))
}

/// Vacuum state of `n_modes` modes.
pub fn vacuum(n_modes: usize) -> GaussianState {
    GaussianState::vacuum(n_modes)
}

/// Single-mode phase rotation `[[cos, sin], [-sin, cos]]`.
pub fn rotation(phi: f64) -> SymplecticMatrix {
    SymplecticMatrix::from_valid(rotation_matrix(phi))
}

fn rotation_matrix(phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, s, -s, c])
}

/// Single-mode squeezer `diag(e^r, e^{-r})`.
pub fn squeeze(r: f64) -> Result<SymplecticMatrix> {
    check_squeeze_bound(r)?;
    Ok(SymplecticMatrix::from_valid(squeeze_matrix(r)))
}

fn squeeze_matrix(r: f64) -> DMatrix<f64> {
    DMatrix::from_partial_diagonal(2, 2, &[r.exp(), (-r).exp()])
}

fn check_squeeze_bound(r: f64) -> Result<()> {
    if !r.is_finite() || r.abs() > R_MAX {
        return Err(Error::InvalidArgument(format!(
            "squeeze parameter must satisfy |r| <= {R_MAX}, got {r}"
        )));
    }
    Ok(())
}

/// Two-mode squeezer in qqpp ordering: `cosh r` on the diagonal,
/// `+sinh r` coupling the q quadratures and `-sinh r` the p quadratures.
pub fn two_mode_squeezer(r: f64) -> Result<SymplecticMatrix> {
    check_squeeze_bound(r)?;
    let (ch, sh) = (r.cosh(), r.sinh());
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            ch, sh, 0.0, 0.0, //
            sh, ch, 0.0, 0.0, //
            0.0, 0.0, ch, -sh, //
            0.0, 0.0, -sh, ch,
        ],
    );
    SymplecticMatrix::new(m)
}

/// Symmetric three-mode squeezer: block-diagonal in qqpp ordering with
/// q-block `(cosh r - sinh r / 3) I + (2 sinh r / 3)(J - I)` and the
/// sign-flipped p-block, `J` the all-ones matrix.
pub fn three_mode_squeezer(r3: f64) -> Result<SymplecticMatrix> {
    check_squeeze_bound(r3)?;
    let (ch, sh) = (r3.cosh(), r3.sinh());
    let (alpha_p, alpha_m) = (ch - sh / 3.0, ch + sh / 3.0);
    let (beta_p, beta_m) = (2.0 * sh / 3.0, -2.0 * sh / 3.0);
    let mut m = DMatrix::zeros(6, 6);
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = if i == j { alpha_p } else { beta_p };
            m[(3 + i, 3 + j)] = if i == j { alpha_m } else { beta_m };
        }
    }
    SymplecticMatrix::new(m)
}

/// GHZ/W state: the three-mode squeezer applied to vacuum, `S3 S3^T`.
pub fn ghzw(r3: f64) -> Result<GaussianState> {
    let s3 = three_mode_squeezer(r3)?;
    apply_symplectic(&GaussianState::vacuum(3), &s3)
}

/// Single-mode mixedness of the GHZ/W state:
/// `alpha' = sqrt(9 cosh(2 r3)^2 - sinh(2 r3)^2) / 3`.
pub fn ghzw_alpha_prime(r3: f64) -> f64 {
    let (c2, s2) = ((2.0 * r3).cosh(), (2.0 * r3).sinh());
    (9.0 * c2 * c2 - s2 * s2).sqrt() / 3.0
}

/// GHZ/W covariance matrix in standard form: fully q-p, `alpha'` on the
/// diagonal and `beta'_+` / `beta'_-` off-diagonals in the q / p blocks.
/// GLUO-equivalent to [`ghzw`] (same spectra, same reduced-mode
/// determinants).
pub fn ghzw_standard_form(r3: f64) -> Result<CovarianceMatrix> {
    check_squeeze_bound(r3)?;
    let alpha = ghzw_alpha_prime(r3);
    let c2 = (2.0 * r3).cosh();
    let s2 = (2.0 * r3).sinh().abs();
    let beta_p = (2.0 * s2 / 3.0) * ((3.0 * c2 + s2) / (3.0 * c2 - s2)).sqrt();
    let beta_m = -(2.0 * s2 / 3.0) * ((3.0 * c2 - s2) / (3.0 * c2 + s2)).sqrt();
    let mut m = DMatrix::zeros(6, 6);
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = if i == j { alpha } else { beta_p };
            m[(3 + i, 3 + j)] = if i == j { alpha } else { beta_m };
        }
    }
    CovarianceMatrix::new(m)
}

/// Per-mode local symplectic in Bloch-Messiah form:
/// `L_n = R(phi_out) S(r) R(phi_in)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGluo {
    pub phi_in: f64,
    pub r: f64,
    pub phi_out: f64,
}

impl ModeGluo {
    pub fn new(phi_in: f64, r: f64, phi_out: f64) -> Result<Self> {
        check_squeeze_bound(r)?;
        if !phi_in.is_finite() || !phi_out.is_finite() {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        Ok(Self {
            phi_in: phi_in.rem_euclid(2.0 * PI),
            r,
            phi_out: phi_out.rem_euclid(2.0 * PI),
        })
    }

    pub fn identity() -> Self {
        Self {
            phi_in: 0.0,
            r: 0.0,
            phi_out: 0.0,
        }
    }
}

/// Parameters of a Gaussian local unitary operation: one rotation,
/// squeeze, rotation triple per mode (3N real parameters).
#[derive(Debug, Clone, PartialEq)]
pub struct GluoParams {
    modes: Vec<ModeGluo>,
}

impl GluoParams {
    pub fn new(modes: Vec<ModeGluo>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument(
                "GLUO needs at least one mode".into(),
            ));
        }
        Ok(Self { modes })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            modes: vec![ModeGluo::identity(); n_modes],
        }
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeGluo] {
        &self.modes
    }

    /// Parameters of the inverse GLUO.
    pub fn inverse(&self) -> Self {
        Self {
            modes: self
                .modes
                .iter()
                .map(|m| ModeGluo {
                    phi_in: (-m.phi_out).rem_euclid(2.0 * PI),
                    r: -m.r,
                    phi_out: (-m.phi_in).rem_euclid(2.0 * PI),
                })
                .collect(),
        }
    }
}

impl fmt::Display for GluoParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.modes.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "mode {}: phi_in={:.12e} r={:.12e} phi_out={:.12e}",
                i + 1,
                m.phi_in,
                m.r,
                m.phi_out
            )?;
        }
        Ok(())
    }
}

/// Direct sum of per-mode rotation-squeeze-rotation blocks, embedded in
/// qqpp ordering.
pub fn gluo(params: &GluoParams) -> SymplecticMatrix {
    SymplecticMatrix::from_valid(gluo_matrix_from_triples(
        &params
            .modes
            .iter()
            .map(|m| (m.phi_in, m.r, m.phi_out))
            .collect::<Vec<_>>(),
    ))
}

/// Raw GLUO assembly used in optimizer loops; no bound checks.
pub(crate) fn gluo_matrix_from_triples(triples: &[(f64, f64, f64)]) -> DMatrix<f64> {
    let n = triples.len();
    let mut l = DMatrix::zeros(2 * n, 2 * n);
    for (i, &(phi_in, r, phi_out)) in triples.iter().enumerate() {
        let m = rotation_matrix(phi_out) * squeeze_matrix(r) * rotation_matrix(phi_in);
        l[(i, i)] = m[(0, 0)];
        l[(i, n + i)] = m[(0, 1)];
        l[(n + i, i)] = m[(1, 0)];
        l[(n + i, n + i)] = m[(1, 1)];
    }
    l
}

/// Local mixednesses `(a_1, a_2, a_3)` of a pure three-mode state; valid
/// iff `a_i >= 1` and `|a_i - a_j| <= a_k - 1` for every permutation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pure3Params {
    a: [f64; 3],
}

impl Pure3Params {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        let a = [a1, a2, a3];
        for &ai in &a {
            if !ai.is_finite() || ai < 1.0 - TRIANGLE_TOL {
                return Err(Error::InvalidArgument(format!(
                    "local mixednesses must be >= 1, got {ai}"
                )));
            }
        }
        let a = [a1.max(1.0), a2.max(1.0), a3.max(1.0)];
        if !triangle_ok(&a) {
            return Err(Error::TriangleViolation { a });
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> [f64; 3] {
        self.a
    }
}

pub(crate) fn triangle_ok(a: &[f64; 3]) -> bool {
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        if (a[i] - a[j]).abs() > a[k] - 1.0 + TRIANGLE_TOL {
            return false;
        }
    }
    true
}

/// The off-diagonal pair `(e_ij^+, e_ij^-)` of the pure three-mode
/// standard form, from the closed form determined by the purity
/// conditions; `k` is the complementary mode index.
fn pure3_e_pair(a: &[f64; 3], i: usize, j: usize, k: usize) -> (f64, f64) {
    let (ai, aj, ak) = (a[i], a[j], a[k]);
    let t1 = ((ai - aj).powi(2) - (ak - 1.0).powi(2)) * ((ai - aj).powi(2) - (ak + 1.0).powi(2));
    let t2 = ((ai + aj).powi(2) - (ak - 1.0).powi(2)) * ((ai + aj).powi(2) - (ak + 1.0).powi(2));
    let s1 = t1.max(0.0).sqrt();
    let s2 = t2.max(0.0).sqrt();
    let den = 4.0 * (ai * aj).sqrt();
    ((s1 + s2) / den, (s1 - s2) / den)
}

pub(crate) fn pure3_sf_matrix(a: &[f64; 3]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(6, 6);
    for i in 0..3 {
        m[(i, i)] = a[i];
        m[(3 + i, 3 + i)] = a[i];
    }
    for (i, j, k) in [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)] {
        let (ep, em) = pure3_e_pair(a, i, j, k);
        m[(i, j)] = ep;
        m[(j, i)] = ep;
        m[(3 + i, 3 + j)] = em;
        m[(3 + j, 3 + i)] = em;
    }
    m
}

/// Pure two-mode standard form (a two-mode squeezed vacuum with local
/// mixedness `a = cosh 2r`).
pub(crate) fn pure2_sf_matrix(a: f64) -> DMatrix<f64> {
    let e = (a * a - 1.0).max(0.0).sqrt();
    DMatrix::from_row_slice(
        4,
        4,
        &[
            a, e, 0.0, 0.0, //
            e, a, 0.0, 0.0, //
            0.0, 0.0, a, -e, //
            0.0, 0.0, -e, a,
        ],
    )
}

/// Standard form of the pure three-mode state with local mixednesses
/// `(a_1, a_2, a_3)`: block-diagonal in q and p, diagonal entries `a_i`,
/// off-diagonals `e_ij^+ >= 0 >= e_ij^-` fixed by purity. The returned
/// matrix is verified to be pure (all `nu = 1` within `1e-8`).
pub fn pure3_standard_form(params: &Pure3Params) -> Result<CovarianceMatrix> {
    let m = pure3_sf_matrix(&params.a);
    let cov = CovarianceMatrix::new(m)?;
    let dev = cov.purity_deviation()?;
    if dev > 1e-8 {
        return Err(Error::Numerical {
            context: "pure three-mode standard form purity".into(),
            residual: dev,
        });
    }
    Ok(cov)
}

/// GLUO conjugation of the pure standard form,
/// `pi = L pi_sf(a_1, a_2, a_3) L^T`; spans all pure three-mode states.
pub fn pure3_family(params: &Pure3Params, g: &GluoParams) -> Result<CovarianceMatrix> {
    if g.n_modes() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: g.n_modes(),
        });
    }
    let sf = pure3_standard_form(params)?;
    let l = gluo(g);
    let m = symmetrize(&(l.matrix() * sf.matrix() * l.matrix().transpose()));
    CovarianceMatrix::new(m)
}

/// `true` iff the q-quadrature block is uncorrelated with the
/// p-quadrature block (all coupling entries below [`QP_TOL`]).
pub fn is_qp(cov: &CovarianceMatrix) -> bool {
    qp_coupling(cov) <= QP_TOL
}

fn qp_coupling(cov: &CovarianceMatrix) -> f64 {
    let n = cov.n_modes();
    let m = cov.matrix();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max(m[(i, n + j)].abs());
        }
    }
    worst
}

/// Splits a q-p covariance matrix into its `sigma_q` and `sigma_p`
/// blocks, so that `sigma = sigma_q (+) sigma_p`.
pub fn qp_split(cov: &CovarianceMatrix) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let coupling = qp_coupling(cov);
    if coupling > QP_TOL {
        return Err(Error::NotQp {
            max_coupling: coupling,
        });
    }
    let n = cov.n_modes();
    let m = cov.matrix();
    Ok((
        m.view((0, 0), (n, n)).into_owned(),
        m.view((n, n), (n, n)).into_owned(),
    ))
}

/// Reduces a physical three-mode covariance matrix to the mixed standard
/// form by a GLUO: per-mode blocks become `a_i I` (local Williamson) and
/// the residual per-mode rotations zero the `(q1,p2)`, `(q2,p1)` and
/// `(q3,p1)` couplings. Returns the canonical matrix together with the
/// GLUO parameters `g` such that `sigma_sf = L(g) sigma L(g)^T`.
///
/// All angles are chosen deterministically in `[0, pi)`, and solves whose
/// target entries already vanish pick the zero angle, so q-p inputs stay
/// q-p.
pub fn mixed3_standard_form(cov: &CovarianceMatrix) -> Result<(CovarianceMatrix, GluoParams)> {
    if cov.n_modes() != 3 {
        return Err(Error::UnsupportedSize {
            n_modes: cov.n_modes(),
        });
    }
    let phys = cov.validate_physical()?;
    if !phys.is_physical() {
        return Err(Error::Unphysical {
            min_nu: phys.min_nu(),
        });
    }
    let m0 = cov.matrix();

    // Local Williamson: rotate each mode's 2x2 block diagonal, then
    // squeeze it to a_i I.
    let mut phi_in = [0.0_f64; 3];
    let mut r = [0.0_f64; 3];
    for i in 0..3 {
        let (aq, b, ap) = (m0[(i, i)], m0[(i, 3 + i)], m0[(3 + i, 3 + i)]);
        let theta = if b.abs() <= 1e-13 * aq.abs().max(ap.abs()).max(1.0) {
            0.0
        } else {
            (0.5 * (2.0 * b).atan2(aq - ap)).rem_euclid(PI)
        };
        let (s, c) = theta.sin_cos();
        let dq = aq * c * c + ap * s * s + 2.0 * b * s * c;
        let dp = aq * s * s + ap * c * c - 2.0 * b * s * c;
        if dq <= 0.0 || dp <= 0.0 {
            return Err(Error::Numerical {
                context: "local Williamson of mode block".into(),
                residual: dq.min(dp),
            });
        }
        phi_in[i] = theta;
        r[i] = 0.25 * (dp / dq).ln();
    }
    let l1 = gluo_matrix_from_triples(&[
        (phi_in[0], r[0], 0.0),
        (phi_in[1], r[1], 0.0),
        (phi_in[2], r[2], 0.0),
    ]);
    let m1 = symmetrize(&(&l1 * m0 * l1.transpose()));

    // Rotation-SVD of the mode-1/mode-2 cross block kills (q1,p2) and
    // (q2,p1) with one residual angle per mode.
    let (k11, k12, k21, k22) = (m1[(0, 1)], m1[(0, 4)], m1[(3, 1)], m1[(3, 4)]);
    let scale = k11.abs().max(k12.abs()).max(k21.abs()).max(k22.abs());
    let (mu, nu) = if k12.abs().max(k21.abs()) <= 1e-13 * scale.max(1.0) {
        (0.0, 0.0)
    } else {
        let sum = (k21 + k12).atan2(k11 - k22);
        let diff = (k21 - k12).atan2(k11 + k22);
        (
            (0.5 * (sum + diff)).rem_euclid(PI),
            (0.5 * (sum - diff)).rem_euclid(PI),
        )
    };
    let l2 = gluo_matrix_from_triples(&[(mu, 0.0, 0.0), (nu, 0.0, 0.0), (0.0, 0.0, 0.0)]);
    let m2 = symmetrize(&(&l2 * m1 * l2.transpose()));

    // Mode-3 rotation kills (q3,p1).
    let (w12, w22) = (m2[(2, 3)], m2[(5, 3)]);
    let theta3 = if w12.abs() <= 1e-13 * w22.abs().max(1.0) {
        0.0
    } else {
        (-w12).atan2(w22).rem_euclid(PI)
    };

    let g = GluoParams::new(vec![
        ModeGluo::new(phi_in[0], r[0], mu)?,
        ModeGluo::new(phi_in[1], r[1], nu)?,
        ModeGluo::new(phi_in[2], r[2], theta3)?,
    ])?;
    let l = gluo(&g);
    let sf = symmetrize(&(l.matrix() * m0 * l.matrix().transpose()));

    // Verify the zero pattern instead of forcing it.
    let targets = [(0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 5)];
    let worst = targets
        .iter()
        .fold(0.0_f64, |acc, &(i, j)| acc.max(sf[(i, j)].abs()));
    if worst > 1e-8 * max_abs(&sf).max(1.0) {
        return Err(Error::Numerical {
            context: "mixed standard-form zero pattern".into(),
            residual: worst,
        });
    }
    Ok((CovarianceMatrix::new(sf)?, g))
}
