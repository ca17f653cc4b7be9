//! Adaptive Dormand–Prince 5(4) integration of complex linear or
//! nonlinear systems, reporting the state at requested output times.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs, czero, Real};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    /// Abort cleanly once any state component exceeds this magnitude.
    pub blowup: Option<T>,
}

impl<T: Real> OdeOptions<T> {
    pub fn new(rtol: T) -> Self {
        Self { rtol, atol: rtol * T::lit(1e-3), max_steps: 5_000_000, blowup: None }
    }

    pub fn with_blowup(mut self, cap: T) -> Self {
        self.blowup = Some(cap);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeStats<T> {
    pub steps: usize,
    pub rejected: usize,
    /// Time at which the blowup cap was crossed, if it was.
    pub diverged_at: Option<T>,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights are the last row of A; these are (5th - 4th)
const E: [f64; 7] = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Integrates `y' = f(t, y)` from `grid[0]`, calling `observe(i, y)` at
/// every `grid[i]` (including the initial point).
pub fn integrate<T, F, O>(mut f: F, y0: &[Complex<T>], grid: &[T], opts: &OdeOptions<T>, mut observe: O) -> Result<OdeStats<T>>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    O: FnMut(usize, &[Complex<T>]),
{
    let n = y0.len();
    let mut stats = OdeStats { steps: 0, rejected: 0, diverged_at: None };
    if grid.is_empty() {
        return Ok(stats);
    }
    let mut y = y0.to_vec();
    let mut t = grid[0];
    observe(0, &y);
    let mut k: Vec<Vec<Complex<T>>> = vec![vec![czero(); n]; 7];
    let mut tmp = vec![czero(); n];
    let mut ynew = vec![czero(); n];
    f(t, &y, &mut k[0]);
    let span = (grid[grid.len() - 1] - grid[0]).abs();
    let mut h = initial_step(&y, &k[0], opts, span);
    let lit = |x: f64| T::lit(x);

    for (gi, &target) in grid.iter().enumerate().skip(1) {
        while t < target {
            if stats.steps + stats.rejected >= opts.max_steps {
                return Err(Error::StepUnderflow { t: t.as_f64(), h: h.as_f64() });
            }
            let last = t + h >= target;
            let hs = if last { target - t } else { h };
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        let a = A[s][j];
                        if a != 0.0 {
                            acc += kj[i] * (hs * lit(a));
                        }
                    }
                    tmp[i] = acc;
                }
                f(t + hs * lit(C[s]), &tmp, &mut k[s]);
                if s == 6 {
                    ynew.copy_from_slice(&tmp);
                }
            }
            let mut err = T::zero();
            for i in 0..n {
                let mut e = czero::<T>();
                for (j, kj) in k.iter().enumerate() {
                    if E[j] != 0.0 {
                        e += kj[i] * lit(E[j]);
                    }
                }
                let sc = opts.atol + opts.rtol * cabs(y[i]).max(cabs(ynew[i]));
                let r = cabs(e * hs) / sc;
                err += r * r;
            }
            err = (err / T::from_usize_lossy(n.max(1))).sqrt();
            if !err.is_finite() {
                err = T::lit(1e10);
            }
            if err <= T::one() {
                t = if last { target } else { t + hs };
                std::mem::swap(&mut y, &mut ynew);
                // first-same-as-last: stage 7 derivative starts the next step
                k.swap(0, 6);
                stats.steps += 1;
                if let Some(cap) = opts.blowup {
                    if y.iter().any(|v| !(cabs(*v) <= cap)) {
                        stats.diverged_at = Some(t);
                        return Ok(stats);
                    }
                }
            } else {
                stats.rejected += 1;
            }
            let fac = if err == T::zero() { lit(5.0) } else { (lit(0.9) * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2)) };
            let proposal = hs * fac;
            if last && err <= T::one() {
                h = h.max(proposal);
            } else {
                h = proposal;
            }
            let floor = T::eps() * lit(16.0) * t.abs().max(span).max(T::one());
            if h < floor {
                return Err(Error::StepUnderflow { t: t.as_f64(), h: h.as_f64() });
            }
        }
        observe(gi, &y);
    }
    Ok(stats)
}

fn initial_step<T: Real>(y: &[Complex<T>], f0: &[Complex<T>], opts: &OdeOptions<T>, span: T) -> T {
    let n = T::from_usize_lossy(y.len().max(1));
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for (yi, fi) in y.iter().zip(f0) {
        let sc = opts.atol + opts.rtol * cabs(*yi);
        d0 += (cabs(*yi) / sc).powi(2);
        d1 += (cabs(*fi) / sc).powi(2);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) { T::lit(1e-6) } else { T::lit(0.01) * d0 / d1 };
    let cap = if span > T::zero() { span } else { T::one() };
    h.min(cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_rotation() {
        let z = Complex::new(-0.5, 3.0);
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let mut out = vec![];
        integrate(|_, y, dy| dy[0] = z * y[0], &[Complex::new(1.0, 0.0)], &grid, &OdeOptions::new(1e-10), |_, y| out.push(y[0])).unwrap();
        for (t, v) in grid.iter().zip(&out) {
            assert!((v - (z * t).exp()).norm() < 1e-8);
        }
    }

    #[test]
    fn blowup_stops_integration() {
        let grid = [0.0, 10.0, 20.0];
        let mut seen = 0;
        let st = integrate(
            |_, y, dy| dy[0] = y[0] * 3.0,
            &[Complex::new(1.0, 0.0)],
            &grid,
            &OdeOptions::new(1e-8).with_blowup(1e6),
            |_, _| seen += 1,
        )
        .unwrap();
        assert!(st.diverged_at.unwrap() < 10.0);
        assert_eq!(seen, 1);
    }
}
