//! Random-state generators shared by the integration suites.
// not every suite uses every generator
#![allow(dead_code)]

use gaussent::nalgebra::DMatrix;
use gaussent::{
    apply_symplectic, direct_sum, gluo, thermal, three_mode_squeezer, two_mode_squeezer, vacuum,
    GaussianState, GluoParams, ModeGluo, Pure3Params, SymplecticMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_gluo_params(rng: &mut ChaCha8Rng, n: usize, r_max: f64) -> GluoParams {
    GluoParams::new(
        (0..n)
            .map(|_| {
                ModeGluo::new(
                    rng.gen_range(0.0..std::f64::consts::TAU),
                    rng.gen_range(-r_max..r_max),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
                .unwrap()
            })
            .collect(),
    )
    .unwrap()
}

/// Embeds a two-mode symplectic acting on modes `(i, j)` of an `n`-mode
/// system (qqpp ordering).
pub fn embed_two_mode(m2: &SymplecticMatrix, n: usize, i: usize, j: usize) -> SymplecticMatrix {
    assert_eq!(m2.n_modes(), 2);
    let src = m2.matrix();
    let mut m = DMatrix::identity(2 * n, 2 * n);
    let map = [i, j, n + i, n + j];
    for (r, &mr) in map.iter().enumerate() {
        for (c, &mc) in map.iter().enumerate() {
            m[(mr, mc)] = src[(r, c)];
        }
    }
    SymplecticMatrix::new(m).expect("embedded two-mode symplectic")
}

/// Random symplectic built from local operations and entanglers.
pub fn random_symplectic(rng: &mut ChaCha8Rng, n: usize) -> SymplecticMatrix {
    let local1 = gluo(&random_gluo_params(rng, n, 1.0));
    let entangler = match n {
        1 => SymplecticMatrix::identity(1),
        2 => two_mode_squeezer(rng.gen_range(-1.0..1.0)).unwrap(),
        3 => {
            let s3 = three_mode_squeezer(rng.gen_range(-0.8..0.8)).unwrap();
            let pair = two_mode_squeezer(rng.gen_range(-0.8..0.8)).unwrap();
            let pairs = [(0, 1), (0, 2), (1, 2)];
            let (i, j) = pairs[rng.gen_range(0..3)];
            s3.compose(&embed_two_mode(&pair, 3, i, j)).unwrap()
        }
        _ => panic!("random_symplectic supports up to 3 modes"),
    };
    let local2 = gluo(&random_gluo_params(rng, n, 1.0));
    local2
        .compose(&entangler)
        .unwrap()
        .compose(&local1)
        .unwrap()
}

/// Random physical (generally mixed) state: thermal inputs conjugated by
/// a random symplectic.
pub fn random_physical_state(rng: &mut ChaCha8Rng, n: usize) -> GaussianState {
    let mut state = thermal(rng.gen_range(0.0..1.5)).unwrap();
    for _ in 1..n {
        state = direct_sum(&state, &thermal(rng.gen_range(0.0..1.5)).unwrap());
    }
    let m = random_symplectic(rng, n);
    apply_symplectic(&state, &m).unwrap()
}

/// Random pure state: vacuum through a random symplectic.
pub fn random_pure_state(rng: &mut ChaCha8Rng, n: usize) -> GaussianState {
    let m = random_symplectic(rng, n);
    apply_symplectic(&vacuum(n), &m).unwrap()
}

/// Random triangle-valid local mixednesses for the pure three-mode form.
pub fn random_pure3_params(rng: &mut ChaCha8Rng, u_max: f64) -> Pure3Params {
    let u = [
        rng.gen_range(0.0..u_max),
        rng.gen_range(0.0..u_max),
        rng.gen_range(0.0..u_max),
    ];
    Pure3Params::new(1.0 + u[1] + u[2], 1.0 + u[0] + u[2], 1.0 + u[0] + u[1]).unwrap()
}
