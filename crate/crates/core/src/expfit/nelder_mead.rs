//! Derivative-free Nelder–Mead minimization with dimension-adaptive
//! coefficients.

use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    /// `true` when the evaluation budget ran out before convergence.
    pub stalled: bool,
}

/// Minimizes `f` starting from `x0` with per-coordinate initial steps.
pub fn minimize<T: Real, F>(mut f: F, x0: &[T], steps: &[T], max_evals: usize, ftol: T) -> Minimum<T>
where
    F: FnMut(&[T]) -> T,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[T], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            T::max_value().unwrap()
        }
    };
    if n == 0 {
        let v = eval(x0, &mut evals);
        return Minimum { x: vec![], value: v, evaluations: evals, stalled: false };
    }
    let nf = T::from_usize_lossy(n);
    let one = T::one();
    let two = T::lit(2.0);
    let (alpha, beta) = (one, one + two / nf);
    let gamma = T::lit(0.75) - one / (two * nf);
    let delta = one - one / nf;

    let mut simplex: Vec<Vec<T>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut vals: Vec<T> = simplex.iter().map(|x| eval(x, &mut evals)).collect();

    let mut stalled = true;
    while evals < max_evals {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();

        let spread = vals[n] - vals[0];
        if spread <= ftol * (vals[0].abs() + T::eps()) {
            stalled = false;
            break;
        }

        let centroid: Vec<T> = (0..n).map(|j| simplex[..n].iter().fold(T::zero(), |s, v| s + v[j]) / nf).collect();
        let along = |t: T| -> Vec<T> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };

        let xr = along(-alpha);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-alpha * beta);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc, ok) = if fr < vals[n] {
            let xc = along(-alpha * gamma);
            let fc = eval(&xc, &mut evals);
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = along(gamma);
            let fc = eval(&xc, &mut evals);
            let ok = fc < vals[n];
            (xc, fc, ok)
        };
        if ok {
            simplex[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            for j in 0..n {
                simplex[i][j] = simplex[0][j] + delta * (simplex[i][j] - simplex[0][j]);
            }
            vals[i] = eval(&simplex[i], &mut evals);
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal)).unwrap();
    Minimum { x: simplex[best].clone(), value: vals[best], evaluations: evals, stalled }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = minimize(f, &[-1.2, 1.0], &[0.1, 0.1], 5000, 1e-16);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let m = minimize(f, &[3.0; 6], &[0.5; 6], 20, 1e-16);
        assert!(m.stalled);
        assert!(m.evaluations <= 20 + 7);
    }
}
