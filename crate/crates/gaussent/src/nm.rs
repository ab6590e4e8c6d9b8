//! Minimal Nelder-Mead simplex search used by the entanglement-of-
//! formation optimizer. Deterministic given the starting point.

pub(crate) struct NmOptions {
    pub max_evals: usize,
    /// Converged when the simplex function spread falls below this.
    pub f_tol: f64,
    /// ... or when the largest simplex edge falls below this.
    pub x_tol: f64,
}

pub(crate) struct NmOutcome {
    #[allow(dead_code)]
    pub x: Vec<f64>,
    #[allow(dead_code)]
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    opts: &NmOptions,
) -> NmOutcome {
    let n = x0.len();
    // dimension-adaptive coefficients; reduce to the classic values at n = 2
    let nf = n as f64;
    let alpha = 1.0;
    let gamma = 1.0 + 2.0 / nf;
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += if steps[i] != 0.0 { steps[i] } else { 1e-4 };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();

    let mut converged = false;
    while evals < opts.max_evals {
        // order ascending by value
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        let f_spread = values[n] - values[0];
        let x_spread = (1..=n)
            .map(|i| {
                simplex[i]
                    .iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        if f_spread.abs() <= opts.f_tol || x_spread <= opts.x_tol {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; n];
        for point in simplex.iter().take(n) {
            for (c, &x) in centroid.iter_mut().zip(point) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let worst = simplex[n].clone();
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(&c, &w)| c + alpha * (c - w))
            .collect();
        let f_r = eval(&reflected, &mut evals);

        if f_r < values[0] {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(&c, &w)| c + gamma * (c - w))
                .collect();
            let f_e = eval(&expanded, &mut evals);
            if f_e < f_r {
                simplex[n] = expanded;
                values[n] = f_e;
            } else {
                simplex[n] = reflected;
                values[n] = f_r;
            }
        } else if f_r < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_r;
        } else {
            let (base, f_base) = if f_r < values[n] {
                (&reflected, f_r)
            } else {
                (&worst, values[n])
            };
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(base)
                .map(|(&c, &b)| c + rho * (b - c))
                .collect();
            let f_c = eval(&contracted, &mut evals);
            if f_c < f_base {
                simplex[n] = contracted;
                values[n] = f_c;
            } else {
                // shrink toward the best vertex
                for i in 1..=n {
                    let best = simplex[0].clone();
                    for (x, &b) in simplex[i].iter_mut().zip(&best) {
                        *x = b + sigma * (*x - b);
                    }
                    values[i] = eval(&simplex[i].clone(), &mut evals);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    NmOutcome {
        x: simplex[best].clone(),
        f: values[best],
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let out = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
            &NmOptions {
                max_evals: 2000,
                f_tol: 1e-14,
                x_tol: 1e-10,
            },
        );
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-5, "x0 = {}", out.x[0]);
        assert!((out.x[1] + 0.5).abs() < 1e-5, "x1 = {}", out.x[1]);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let out = nelder_mead(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.5, 0.5],
            &NmOptions {
                max_evals: 5000,
                f_tol: 1e-14,
                x_tol: 1e-12,
            },
        );
        assert!((out.x[0] - 1.0).abs() < 1e-4);
        assert!((out.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn respects_eval_budget() {
        let out = nelder_mead(
            |x| x.iter().map(|v| v * v).sum(),
            &[1.0; 8],
            &[0.3; 8],
            &NmOptions {
                max_evals: 100,
                f_tol: 0.0,
                x_tol: 0.0,
            },
        );
        assert!(out.evals <= 100 + 9);
        assert!(!out.converged);
    }
}
