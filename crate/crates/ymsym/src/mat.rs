//! Dense complex matrix helpers used by the gauge and superspace layers.
//!
//! Gauge ranks here are small (n <= 4), so inversion and the exponential are
//! done directly rather than through an external LAPACK binding.

use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;

pub type C = Complex64;
pub type CMat = Array2<C>;

pub const I: C = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> C {
    Complex64::new(re, 0.0)
}

pub fn eye(n: usize) -> CMat {
    Array2::eye(n)
}

pub fn zeros(n: usize) -> CMat {
    Array2::zeros((n, n))
}

/// Frobenius norm.
pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fro4(ms: &[CMat; 4]) -> f64 {
    ms.iter().map(|m| fro(m).powi(2)).sum::<f64>().sqrt()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inv(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::ShapeMismatch(format!("inv of {}x{}", m.nrows(), m.ncols())));
    }
    let mut a = m.clone();
    let mut b = eye(n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[[col, col]].norm();
        for r in col + 1..n {
            let v = a[[r, col]].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return Err(Error::SingularMatrix);
        }
        if piv != col {
            for k in 0..n {
                let t = a[[col, k]];
                a[[col, k]] = a[[piv, k]];
                a[[piv, k]] = t;
                let t = b[[col, k]];
                b[[col, k]] = b[[piv, k]];
                b[[piv, k]] = t;
            }
        }
        let d = a[[col, col]];
        for k in 0..n {
            a[[col, k]] /= d;
            b[[col, k]] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[[r, col]];
            if f.norm() == 0.0 {
                continue;
            }
            for k in 0..n {
                let ac = a[[col, k]];
                let bc = b[[col, k]];
                a[[r, k]] -= f * ac;
                b[[r, k]] -= f * bc;
            }
        }
    }
    Ok(b)
}

/// Matrix exponential by scaling-and-squaring on a Taylor series.
/// Adequate for the small, well-scaled arguments produced by the Wilson
/// integrator (norms are kept below ~1 by step refinement).
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm = fro(m);
    let k = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
    let scale = cr((0.5f64).powi(k as i32));
    let b = m.mapv(|z| z * scale);
    let mut term = eye(n);
    let mut sum = eye(n);
    for j in 1..60 {
        term = term.dot(&b).mapv(|z| z / cr(j as f64));
        sum = &sum + &term;
        if fro(&term) < 1e-18 * (1.0 + fro(&sum)) {
            break;
        }
    }
    let mut out = sum;
    for _ in 0..k {
        out = out.dot(&out);
    }
    out
}

pub fn approx_eq(a: &CMat, b: &CMat, tol: f64) -> bool {
    fro(&(a - b)) <= tol
}
