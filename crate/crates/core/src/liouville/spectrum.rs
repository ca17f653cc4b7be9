use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex;

use super::build::Liouvillian;
use crate::error::{Error, Result};
use crate::scalar::{c_from64, Real};

/// Default cap on the superoperator dimension handled by dense spectra.
pub const DENSE_CAP: usize = 8100;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub max_re: T,
}

impl<T: Real> Spectrum<T> {
    fn from_values(mut eigenvalues: Vec<Complex<T>>) -> Self {
        eigenvalues.sort_by(|a, b| {
            b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
        });
        let max_re = eigenvalues.first().map_or(T::zero(), |z| z.re);
        Self { eigenvalues, max_re }
    }
}

/// Unitary, self-inverse signed permutation `P|i> = s_i |pi(i)>` of the
/// Hilbert space. When `rho -> P rho P` commutes with a generator, the
/// spectrum splits into the two eigenspaces of that map.
#[derive(Debug, Clone, PartialEq)]
pub struct Parity {
    pub perm: Vec<usize>,
    pub sign: Vec<f64>,
}

impl Parity {
    /// System signed permutation tensored with the boson parity
    /// `(-1)^{n_1 + n_2 + ...}` of every mode.
    pub fn with_boson_parity(sys_perm: &[usize], sys_sign: &[f64], dims: &[usize]) -> Self {
        let db: usize = dims[1..].iter().product();
        let mut perm = Vec::with_capacity(dims[0] * db);
        let mut sign = Vec::with_capacity(dims[0] * db);
        for s in 0..dims[0] {
            for b in 0..db {
                let mut rem = b;
                let mut total = 0;
                for &dk in dims[1..].iter().rev() {
                    total += rem % dk;
                    rem /= dk;
                }
                perm.push(sys_perm[s] * db + b);
                sign.push(sys_sign[s] * if total % 2 == 0 { 1.0 } else { -1.0 });
            }
        }
        Self { perm, sign }
    }

    /// `sigma_x` on a spin times boson parity: a symmetry of spin-boson
    /// generators with `H_S ~ sigma_x` and `sigma_z` coupling.
    pub fn spin_flip(dims: &[usize]) -> Self {
        Self::with_boson_parity(&[1, 0], &[1.0, 1.0], dims)
    }

    fn apply(&self, d: usize, vec_rho: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let mut out = vec![Complex::new(0.0, 0.0); d * d];
        for c in 0..d {
            for r in 0..d {
                out[self.perm[c] * d + self.perm[r]] = vec_rho[c * d + r] * (self.sign[r] * self.sign[c]);
            }
        }
        out
    }
}

/// Hermitian basis element: diagonal `E_rr`, symmetric or antisymmetric
/// combination of `E_rc` and `E_cr` with `r < c`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Herm {
    Diag(usize),
    Sym(usize, usize),
    Anti(usize, usize),
}

impl Herm {
    fn entries(self, d: usize) -> Vec<(usize, Complex<f64>)> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Herm::Diag(r) => vec![(r * d + r, Complex::new(1.0, 0.0))],
            Herm::Sym(r, c) => vec![(c * d + r, Complex::new(h, 0.0)), (r * d + c, Complex::new(h, 0.0))],
            Herm::Anti(r, c) => vec![(c * d + r, Complex::new(0.0, h)), (r * d + c, Complex::new(0.0, -h))],
        }
    }

    fn mapped(self, p: &Parity) -> (Herm, f64) {
        match self {
            Herm::Diag(r) => (Herm::Diag(p.perm[r]), 1.0),
            Herm::Sym(r, c) => {
                let (a, b) = (p.perm[r], p.perm[c]);
                (Herm::Sym(a.min(b), a.max(b)), p.sign[r] * p.sign[c])
            }
            Herm::Anti(r, c) => {
                let (a, b) = (p.perm[r], p.perm[c]);
                let s = p.sign[r] * p.sign[c];
                if a < b {
                    (Herm::Anti(a, b), s)
                } else {
                    (Herm::Anti(b, a), -s)
                }
            }
        }
    }
}

fn hermitian_basis(d: usize) -> Vec<Herm> {
    let mut out: Vec<Herm> = (0..d).map(Herm::Diag).collect();
    for r in 0..d {
        for c in r + 1..d {
            out.push(Herm::Sym(r, c));
            out.push(Herm::Anti(r, c));
        }
    }
    out
}

/// Orthonormal real-coefficient sector bases as sparse vectors in vec space.
fn sector_bases(d: usize, parity: Option<&Parity>) -> Vec<Vec<Vec<(usize, Complex<f64>)>>> {
    let basis = hermitian_basis(d);
    let Some(p) = parity else {
        return vec![basis.iter().map(|b| b.entries(d)).collect()];
    };
    let mut even = vec![];
    let mut odd = vec![];
    let mut seen = std::collections::HashSet::new();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for &b in &basis {
        if seen.contains(&b) {
            continue;
        }
        let (ub, s) = b.mapped(p);
        seen.insert(b);
        if ub == b {
            if s > 0.0 {
                even.push(b.entries(d));
            } else {
                odd.push(b.entries(d));
            }
            continue;
        }
        seen.insert(ub);
        let (e1, e2) = (b.entries(d), ub.entries(d));
        let combo = |sg: f64| -> Vec<(usize, Complex<f64>)> {
            e1.iter().map(|&(i, c)| (i, c * h)).chain(e2.iter().map(|&(i, c)| (i, c * (h * s * sg)))).collect()
        };
        even.push(combo(1.0));
        odd.push(combo(-1.0));
    }
    vec![even, odd]
}

/// Eigenvalues of the generator, computed as a real matrix in a Hermitian
/// operator basis and split by `parity` when given.
pub fn spectrum<T: Real>(l: &Liouvillian<T>, parity: Option<&Parity>) -> Result<Spectrum<T>> {
    spectrum_capped(l, parity, DENSE_CAP)
}

pub fn spectrum_capped<T: Real>(l: &Liouvillian<T>, parity: Option<&Parity>, cap: usize) -> Result<Spectrum<T>> {
    let n = l.dim();
    if n > cap {
        return Err(Error::DimensionOverflow { dim: n, cap });
    }
    let d = l.hilbert_dim();
    let lt: Vec<Vec<(usize, Complex<f64>)>> = {
        let t = l.generator.transpose();
        (0..n).map(|j| (t.indptr[j]..t.indptr[j + 1]).map(|p| (t.indices[p], crate::scalar::c64_of(t.data[p]))).collect()).collect()
    };
    if let Some(p) = parity {
        check_symmetry(&lt, d, p)?;
    }
    let mut all = vec![];
    for sector in sector_bases(d, parity) {
        let m = sector.len();
        if m == 0 {
            continue;
        }
        let mut inv: HashMap<usize, Vec<(usize, Complex<f64>)>> = HashMap::new();
        for (k, v) in sector.iter().enumerate() {
            for &(i, c) in v {
                inv.entry(i).or_default().push((k, c));
            }
        }
        let mut buf = vec![0.0f64; m * m];
        let mut acc = vec![Complex::new(0.0, 0.0); n];
        let mut touched = vec![];
        let mut mark = vec![false; n];
        for (col, v) in sector.iter().enumerate() {
            for &(j, c) in v {
                for &(i, a) in &lt[j] {
                    if !mark[i] {
                        mark[i] = true;
                        touched.push(i);
                    }
                    acc[i] += a * c;
                }
            }
            for &i in &touched {
                if let Some(list) = inv.get(&i) {
                    for &(row, c) in list {
                        buf[col * m + row] += (c.conj() * acc[i]).re;
                    }
                }
                acc[i] = Complex::new(0.0, 0.0);
                mark[i] = false;
            }
            touched.clear();
        }
        let mat = faer::Mat::<f64>::from_fn(m, m, |i, j| buf[j * m + i]);
        let ev = mat.eigenvalues().map_err(|e| Error::Linalg(format!("{e:?}")))?;
        all.extend(ev.into_iter().map(c_from64::<T>));
    }
    Ok(Spectrum::from_values(all))
}

fn check_symmetry(lt: &[Vec<(usize, Complex<f64>)>], d: usize, p: &Parity) -> Result<()> {
    let n = d * d;
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let x: Vec<Complex<f64>> = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            Complex::new((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5, ((state >> 3) % 1000) as f64 / 1000.0 - 0.5)
        })
        .collect();
    let apply_l = |v: &[Complex<f64>]| {
        let mut y = vec![Complex::new(0.0, 0.0); n];
        for (j, col) in lt.iter().enumerate() {
            for &(i, a) in col {
                y[i] += a * v[j];
            }
        }
        y
    };
    let lhs = apply_l(&p.apply(d, &x));
    let rhs = p.apply(d, &apply_l(&x));
    let diff = lhs.iter().zip(&rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let scale = rhs.iter().fold(0.0f64, |m, a| m.max(a.norm())).max(1.0);
    if diff > 1e-9 * scale {
        return Err(Error::InvalidInput(format!("parity does not commute with the generator (defect {diff:.2e})")));
    }
    Ok(())
}

/// Eigenvalues of a dense complex matrix.
pub fn dense_eigenvalues<T: Real>(m: &DMatrix<Complex<T>>) -> Result<Vec<Complex<T>>> {
    crate::linalg::eigenvalues(m)
}
