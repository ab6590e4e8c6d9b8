//! Cross-module invariants: symplectic-conjugation invariance, purity of
//! assembled states, entropy additivity and monotonicity, and the
//! independence cross-check of the pure three-mode standard form against
//! purity-condition root-finding.

mod common;

use common::*;
use gaussent::nalgebra::DMatrix;
use gaussent::{
    alpha_entropy, alpha_eoe, apply_symplectic, assemble_pure, direct_sum, entropy, feasible,
    geof, h_aux, partial_trace, pure3_standard_form, thermal, vacuum, CovarianceMatrix,
    OptimizationConfig, Partition, PureXy,
};
use rand::Rng;

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

#[test]
fn assemble_pure_yields_pure_states() {
    let mut rng = rng(101);
    for _ in 0..60 {
        let n = rng.gen_range(1..=3);
        // conditioned X: eigenvalues within [0.2, 5], far from singular
        let base: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
        let x = DMatrix::identity(n, n) + &base * base.transpose();
        let y_raw: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.7..0.7));
        let y = 0.5 * (&y_raw + y_raw.transpose());
        let pi = assemble_pure(&PureXy::new(x, y).unwrap()).unwrap();
        assert!(
            pi.purity_deviation().unwrap() < 1e-8,
            "nu deviation {}",
            pi.purity_deviation().unwrap()
        );
        assert!((pi.matrix().determinant() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn constructed_symplectics_satisfy_omega_condition() {
    let mut rng = rng(102);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let m = random_symplectic(&mut rng, n);
        assert!(m.symplectic_deviation() < 1e-10);
    }
    // Williamson factors too
    for _ in 0..20 {
        let n = rng.gen_range(1..=3);
        let st = random_physical_state(&mut rng, n);
        let (s, _) = st.cov().williamson().unwrap();
        assert!(s.symplectic_deviation() < 1e-9);
    }
}

#[test]
fn partial_trace_direct_sum_round_trip_is_exact() {
    let mut rng = rng(103);
    for _ in 0..30 {
        let na = rng.gen_range(1..=2);
        let nb = rng.gen_range(1..=2);
        let a = random_physical_state(&mut rng, na);
        let b = random_physical_state(&mut rng, nb);
        let ab = direct_sum(&a, &b);
        let a_modes: Vec<usize> = (0..a.n_modes()).collect();
        let b_modes: Vec<usize> = (a.n_modes()..a.n_modes() + b.n_modes()).collect();
        let a_back = partial_trace(&ab, &a_modes).unwrap();
        let b_back = partial_trace(&ab, &b_modes).unwrap();
        assert_eq!(a_back.cov().matrix(), a.cov().matrix());
        assert_eq!(b_back.cov().matrix(), b.cov().matrix());
        assert_eq!(a_back.displacement(), a.displacement());
        assert_eq!(b_back.displacement(), b.displacement());
    }
}

#[test]
fn h_is_increasing_and_concave() {
    let xs: Vec<f64> = (0..400).map(|i| 1.001 + 19.0 * i as f64 / 399.0).collect();
    let hs: Vec<f64> = xs.iter().map(|&x| h_aux(x).unwrap().bits()).collect();
    for w in hs.windows(2) {
        assert!(w[1] > w[0], "h must be strictly increasing");
    }
    // concavity via second differences on the uniform grid
    for w in hs.windows(3) {
        let second = w[2] - 2.0 * w[1] + w[0];
        assert!(second < 1e-12, "h must be concave, got {second}");
    }
}

#[test]
fn alpha_entropy_splits_over_direct_sums() {
    let mut rng = rng(104);
    for _ in 0..20 {
        let a = random_physical_state(&mut rng, 2);
        let b = random_physical_state(&mut rng, 1);
        let ab = direct_sum(&a, &b);
        // partitions of the sum that split along the A/B boundary
        for (alpha_ab, alpha_a) in [
            (Partition::finest(3), Partition::finest(2)),
            (Partition::parse("12|3").unwrap(), Partition::coarsest(2)),
        ] {
            let lhs = alpha_entropy(ab.cov(), &alpha_ab).unwrap().bits();
            let rhs = alpha_entropy(a.cov(), &alpha_a).unwrap().bits()
                + alpha_entropy(b.cov(), &Partition::finest(1)).unwrap().bits();
            assert!(
                (lhs - rhs).abs() < 1e-10,
                "additivity violated: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn alpha_eoe_monotone_under_refinement() {
    let mut rng = rng(105);
    let partitions = Partition::all(3);
    for _ in 0..30 {
        let psi = random_pure_state(&mut rng, 3);
        let values: Vec<f64> = partitions
            .iter()
            .map(|p| alpha_eoe(psi.cov(), p).unwrap().bits())
            .collect();
        for (i, a) in partitions.iter().enumerate() {
            for (j, b) in partitions.iter().enumerate() {
                if a.refines(b).unwrap() {
                    assert!(
                        values[i] >= values[j] - 1e-10,
                        "E_{a} = {} < E_{b} = {}",
                        values[i],
                        values[j]
                    );
                }
            }
        }
    }
}

#[test]
fn alpha_eoe_symmetric_under_block_swap() {
    let mut rng = rng(106);
    for _ in 0..20 {
        let psi = random_pure_state(&mut rng, 3);
        for (a, b) in [("1|23", "23|1"), ("12|3", "3|12"), ("13|2", "2|13")] {
            let pa = Partition::parse(a).unwrap();
            let pb = Partition::parse(b).unwrap();
            // canonicalization makes swapped block lists equal partitions
            assert_eq!(pa, pb);
            let va = alpha_eoe(psi.cov(), &pa).unwrap().bits();
            let vb = alpha_eoe(psi.cov(), &pb).unwrap().bits();
            assert_eq!(va, vb);
        }
        // the two halves of a pure bipartition carry equal entropy
        let s_1 = entropy(&psi.cov().reduced(&[0]).unwrap()).unwrap().bits();
        let s_23 = entropy(&psi.cov().reduced(&[1, 2]).unwrap()).unwrap().bits();
        assert!((s_1 - s_23).abs() < 1e-8);
    }
}

#[test]
fn pure3_standard_form_two_mode_limit_decouples() {
    let r: f64 = 0.55;
    let a = (2.0 * r).cosh();
    let params = gaussent::Pure3Params::new(a, a, 1.0).unwrap();
    let sf = pure3_standard_form(&params).unwrap();
    // mode 3 decouples as vacuum
    for idx in [2usize, 5usize] {
        for j in 0..6 {
            if j != idx {
                assert!(sf.matrix()[(idx, j)].abs() < 1e-10);
            }
        }
        assert!((sf.matrix()[(idx, idx)] - 1.0).abs() < 1e-12);
    }
}

/// Independent verification of the closed-form off-diagonals: damped
/// Newton on the purity conditions `diag(Q^{-1}) = a` (with
/// `P = Q^{-1}` exact), continued from the symmetric point `(s, s, s)`
/// whose solution is known analytically from the GHZ/W standard form.
#[test]
fn pure3_standard_form_matches_purity_root_finding() {
    /// Symmetric-point solution: `s = alpha'(r3)` inverts to
    /// `cosh 2r3 = sqrt((9 s^2 - 1) / 8)`, and the q-block off-diagonal
    /// is `beta'_+`.
    fn symmetric_seed(s: f64) -> f64 {
        let c2 = ((9.0 * s * s - 1.0) / 8.0).sqrt();
        let s2 = (c2 * c2 - 1.0).max(0.0).sqrt();
        (2.0 * s2 / 3.0) * ((3.0 * c2 + s2) / (3.0 * c2 - s2)).sqrt()
    }

    fn solve_continuation(a: [f64; 3]) -> Option<[f64; 3]> {
        let s = (a[0] + a[1] + a[2]) / 3.0;
        let beta = symmetric_seed(s);
        let start = [s, s, s];
        let mut e = newton(start, [beta, beta, beta])?;
        let mut t = 0.0_f64;
        let mut dt = 0.25_f64;
        while t < 1.0 {
            let tn = (t + dt).min(1.0);
            let at = [
                start[0] + tn * (a[0] - start[0]),
                start[1] + tn * (a[1] - start[1]),
                start[2] + tn * (a[2] - start[2]),
            ];
            match newton(at, e) {
                Some(en) => {
                    e = en;
                    t = tn;
                }
                None => {
                    dt *= 0.5;
                    if dt < 1e-4 {
                        return None;
                    }
                }
            }
        }
        Some(e)
    }

    fn build_q(a: [f64; 3], e: [f64; 3]) -> DMatrix<f64> {
        DMatrix::from_row_slice(
            3,
            3,
            &[
                a[0], e[0], e[1], //
                e[0], a[1], e[2], //
                e[1], e[2], a[2],
            ],
        )
    }

    fn residual(a: [f64; 3], e: [f64; 3]) -> Option<[f64; 3]> {
        let q = build_q(a, e);
        let qi = q.try_inverse()?;
        Some([qi[(0, 0)] - a[0], qi[(1, 1)] - a[1], qi[(2, 2)] - a[2]])
    }

    fn norm(f: [f64; 3]) -> f64 {
        (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt()
    }

    fn newton(a: [f64; 3], mut e: [f64; 3]) -> Option<[f64; 3]> {
        let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
        for _ in 0..60 {
            let q = build_q(a, e);
            let qi = q.try_inverse()?;
            let f = [qi[(0, 0)] - a[0], qi[(1, 1)] - a[1], qi[(2, 2)] - a[2]];
            if f.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-12 {
                return Some(e);
            }
            // d(Q^{-1})/de_t = -Q^{-1} dQ_t Q^{-1}
            let mut jac = DMatrix::zeros(3, 3);
            for (t, &(i, j)) in pairs.iter().enumerate() {
                for m in 0..3 {
                    jac[(m, t)] = -(qi[(m, i)] * qi[(j, m)] + qi[(m, j)] * qi[(i, m)]);
                }
            }
            let rhs = gaussent::nalgebra::DVector::from_row_slice(&[-f[0], -f[1], -f[2]]);
            let step = jac.lu().solve(&rhs)?;
            let mut lam = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let cand = [
                    e[0] + lam * step[0],
                    e[1] + lam * step[1],
                    e[2] + lam * step[2],
                ];
                if let Some(fc) = residual(a, cand) {
                    if norm(fc) < norm(f) {
                        e = cand;
                        improved = true;
                        break;
                    }
                }
                lam *= 0.5;
            }
            if !improved {
                return None;
            }
        }
        None
    }

    let mut rng = rng(107);
    let mut solved = 0;
    for _ in 0..40 {
        // stay clear of the vacuum corner, where the purity conditions
        // degenerate (e is second order in the mixednesses there)
        let u = [
            rng.gen_range(0.05..1.5),
            rng.gen_range(0.05..1.5),
            rng.gen_range(0.05..1.5),
        ];
        let p = gaussent::Pure3Params::new(
            1.0 + u[1] + u[2],
            1.0 + u[0] + u[2],
            1.0 + u[0] + u[1],
        )
        .unwrap();
        let a = p.a();
        let Some(e) = solve_continuation(a) else {
            continue;
        };
        solved += 1;
        let sf = pure3_standard_form(&p).unwrap();
        let closed = [
            sf.matrix()[(0, 1)],
            sf.matrix()[(0, 2)],
            sf.matrix()[(1, 2)],
        ];
        for (root, cf) in e.iter().zip(closed.iter()) {
            assert!(
                (root - cf).abs() < 1e-8,
                "root-finding {root} vs closed form {cf}"
            );
        }
    }
    assert!(solved >= 35, "continuation solved only {solved}/40 cases");
}

#[test]
fn geof_results_are_verified_upper_bounds() {
    let mut rng = rng(108);
    let cfg = OptimizationConfig {
        restarts: 8,
        max_evals: 2500,
        rng_seed: 9,
        ..OptimizationConfig::default()
    };
    for _ in 0..4 {
        let n = rng.gen_range(2..=3);
        let sigma = random_physical_state(&mut rng, n);
        let alpha = Partition::finest(n);
        let out = geof(&sigma, &alpha, &cfg).unwrap();
        // value equals the objective of the returned pure state
        let direct = alpha_eoe(&out.optimal_pure, &alpha).unwrap().bits();
        assert!((out.value.bits() - direct).abs() < 1e-12);
        // and the decomposition is feasible
        let f = feasible(sigma.cov(), &out.optimal_pure, cfg.feasibility_tol).unwrap();
        assert!(f.satisfied, "residual {}", f.residual);
        assert!(out.optimal_pure.is_pure(1e-7));
    }
}

#[test]
fn geof_invariant_under_gluo() {
    let mut rng = rng(109);
    let cfg = OptimizationConfig {
        restarts: 16,
        max_evals: 6000,
        rng_seed: 11,
        ..OptimizationConfig::default()
    };
    let alpha = Partition::finest(3);
    let sigma = {
        let t = direct_sum(
            &direct_sum(&thermal(0.4).unwrap(), &thermal(0.1).unwrap()),
            &vacuum(1),
        );
        apply_symplectic(&t, &gaussent::three_mode_squeezer(0.5).unwrap()).unwrap()
    };
    let base = geof(&sigma, &alpha, &cfg).unwrap().value.bits();
    for _ in 0..2 {
        let l = gaussent::gluo(&random_gluo_params(&mut rng, 3, 0.8));
        let rotated = apply_symplectic(&sigma, &l).unwrap();
        let v = geof(&rotated, &alpha, &cfg).unwrap().value.bits();
        assert!(
            (v - base).abs() <= 3.0 * cfg.value_tol,
            "GLUO moved GEoF from {base} to {v}"
        );
    }
}

#[test]
fn geof_monotone_under_partition_refinement() {
    let cfg = OptimizationConfig {
        restarts: 12,
        max_evals: 4000,
        rng_seed: 13,
        ..OptimizationConfig::default()
    };
    let sigma = {
        let t = direct_sum(
            &direct_sum(&thermal(0.5).unwrap(), &vacuum(1)),
            &vacuum(1),
        );
        apply_symplectic(&t, &gaussent::three_mode_squeezer(0.45).unwrap()).unwrap()
    };
    let partitions = Partition::all(3);
    let values: Vec<f64> = partitions
        .iter()
        .map(|p| geof(&sigma, p, &cfg).unwrap().value.bits())
        .collect();
    for (i, a) in partitions.iter().enumerate() {
        for (j, b) in partitions.iter().enumerate() {
            if a.refines(b).unwrap() {
                assert!(
                    values[i] >= values[j] - 3.0 * cfg.value_tol,
                    "geof({a}) = {} < geof({b}) = {}",
                    values[i],
                    values[j]
                );
            }
        }
    }
}

#[test]
fn geof_subadditive_on_direct_sums() {
    let cfg = OptimizationConfig {
        restarts: 12,
        max_evals: 4000,
        rng_seed: 17,
        ..OptimizationConfig::default()
    };
    let a = {
        let t = direct_sum(&thermal(0.2).unwrap(), &vacuum(1));
        apply_symplectic(&t, &gaussent::two_mode_squeezer(0.6).unwrap()).unwrap()
    };
    let b = thermal(0.8).unwrap();
    let ab = direct_sum(&a, &b);
    let v_ab = geof(&ab, &Partition::finest(3), &cfg).unwrap().value.bits();
    let v_a = geof(&a, &Partition::finest(2), &cfg).unwrap().value.bits();
    let v_b = geof(&b, &Partition::finest(1), &cfg).unwrap().value.bits();
    assert!(v_ab <= v_a + v_b + 3.0 * cfg.value_tol);
}

#[test]
fn factory_outputs_are_physical() {
    let mut rng = rng(110);
    for _ in 0..10 {
        let nb = rng.gen_range(0.0..2.0);
        assert!(thermal(nb).unwrap().cov().is_physical());
        let r3 = rng.gen_range(0.0..1.0);
        assert!(gaussent::ghzw(r3).unwrap().cov().is_physical());
        assert!(gaussent::ghzw_standard_form(r3).unwrap().is_physical());
        let p = random_pure3_params(&mut rng, 1.2);
        assert!(pure3_standard_form(&p).unwrap().is_physical());
        let g = random_gluo_params(&mut rng, 3, 0.8);
        assert!(gaussent::pure3_family(&p, &g).unwrap().is_physical());
        let mixed = random_physical_state(&mut rng, 3);
        let (sf, _) = gaussent::mixed3_standard_form(mixed.cov()).unwrap();
        assert!(sf.is_physical());
    }
}

#[test]
fn unphysical_states_are_rejected_by_measures() {
    let below = CovarianceMatrix::new(DMatrix::from_diagonal_element(2, 2, 0.5)).unwrap();
    assert!(matches!(
        entropy(&below),
        Err(gaussent::Error::Unphysical { .. })
    ));
    assert!(!below.is_physical());
}

#[test]
fn symplectic_spectrum_reference_values() {
    // vacuum and thermal diagonal cases
    let v = CovarianceMatrix::vacuum(3);
    for nu in v.symplectic_eigenvalues().unwrap() {
        assert!((nu - 1.0).abs() < 1e-12);
    }
    let t = thermal(1.0).unwrap();
    assert!((t.cov().symplectic_eigenvalues().unwrap()[0] - 3.0).abs() < 1e-12);
    // GHZ/W at r3 = 0.5 is pure
    let g = gaussent::ghzw(0.5).unwrap();
    for nu in g.cov().symplectic_eigenvalues().unwrap() {
        assert!((nu - 1.0).abs() < 1e-9);
    }
    let m = max_abs(g.cov().matrix());
    assert!(m > 1.0);
}
