//! Derivative-free minimisation (Nelder–Mead with dimension-adapted coefficients).

use serde::Serialize;

/// Outcome of one simplex run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexOptions {
    /// Converged once every vertex lies within this distance of the best one.
    pub x_tol: f64,
    pub max_evaluations: usize,
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { x_tol: 1e-8, max_evaluations: 20_000, initial_step: 0.25 }
    }
}

/// Minimises `f`; non-finite values are treated as `+∞`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        return SimplexResult { x: vec![], value: eval(x0), converged: true, evaluations: 1 };
    }
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step * (1.0 + x0[i].abs()).min(10.0);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut evals = n + 1;
    let mut converged = false;
    while evals < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.x_tol && values[n].is_finite() {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / nf).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };
        let xr = along(-alpha);
        let fr = eval(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = along(-alpha * beta);
            let fe = eval(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(-alpha * gamma);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(gamma);
            let fc = eval(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            for j in 0..n {
                simplex[i][j] = simplex[0][j] + delta * (simplex[i][j] - simplex[0][j]);
            }
            values[i] = eval(&simplex[i]);
        }
        evals += n;
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    SimplexResult { x: simplex[best].clone(), value: values[best], converged, evaluations: evals }
}

/// Runs the simplex, then restarts it once from the optimum to guard against collapse.
pub fn nelder_mead_polished<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: SimplexOptions) -> SimplexResult {
    let first = nelder_mead(&f, x0, opts);
    let remaining = SimplexOptions { max_evaluations: opts.max_evaluations.saturating_sub(first.evaluations).max(100), ..opts };
    let second = nelder_mead(&f, &first.x, SimplexOptions { initial_step: 0.05, ..remaining });
    let total = first.evaluations + second.evaluations;
    if second.value <= first.value {
        SimplexResult { evaluations: total, ..second }
    } else {
        SimplexResult { evaluations: total, ..first }
    }
}
