//! Polynomial coefficient functions of the four spacetime coordinates, and
//! superfields: Grassmann polynomials whose coefficients are such functions.
//!
//! Everything the superspace layer touches is polynomial in x, so operator
//! algebra, embeddings and pullbacks are evaluated exactly; no finite
//! differences enter the odd sector.

use crate::error::{Error, Result};
use crate::grassmann::{coeff_mul, merge_sign, GrassmannPoly, Parity};
use crate::mat::{fro, CMat, C};
use crate::spinor::Bispinor;
use std::collections::BTreeMap;

/// Matrix-valued polynomial in x^{00}, x^{01}, x^{10}, x^{11}; keys are
/// exponent vectors on the flat coordinate index.
#[derive(Clone, Debug)]
pub struct XPoly {
    pub terms: BTreeMap<[u8; 4], CMat>,
}

fn is_zero_mat(m: &CMat) -> bool {
    m.iter().all(|z| z.norm_sqr() == 0.0)
}

impl XPoly {
    pub fn zero() -> Self {
        XPoly { terms: BTreeMap::new() }
    }

    pub fn constant(m: CMat) -> Self {
        let mut p = Self::zero();
        p.insert([0; 4], m);
        p
    }

    pub fn scalar(v: C) -> Self {
        let mut m = CMat::zeros((1, 1));
        m[[0, 0]] = v;
        Self::constant(m)
    }

    /// The coordinate x^{dir} as a scalar polynomial.
    pub fn coord(dir: usize) -> Self {
        let mut e = [0u8; 4];
        e[dir] = 1;
        let mut m = CMat::zeros((1, 1));
        m[[0, 0]] = C::new(1.0, 0.0);
        let mut p = Self::zero();
        p.insert(e, m);
        p
    }

    pub fn monomial(expo: [u8; 4], coeff: CMat) -> Self {
        let mut p = Self::zero();
        p.insert(expo, coeff);
        p
    }

    pub fn insert(&mut self, expo: [u8; 4], coeff: CMat) {
        if is_zero_mat(&coeff) {
            return;
        }
        match self.terms.get_mut(&expo) {
            Some(c) => {
                let s = &*c + &coeff;
                if is_zero_mat(&s) {
                    self.terms.remove(&expo);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(expo, coeff);
            }
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| fro(c) <= tol)
    }

    pub fn add(&self, other: &XPoly) -> XPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &XPoly) -> XPoly {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C) -> XPoly {
        if s.norm_sqr() == 0.0 {
            return XPoly::zero();
        }
        XPoly { terms: self.terms.iter().map(|(e, c)| (*e, c.mapv(|z| z * s))).collect() }
    }

    pub fn mul(&self, other: &XPoly) -> XPoly {
        let mut out = XPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = *ea;
                for k in 0..4 {
                    e[k] += eb[k];
                }
                out.insert(e, coeff_mul(ca, cb));
            }
        }
        out
    }

    /// Exact partial derivative along a flat coordinate.
    pub fn derive(&self, dir: usize) -> XPoly {
        let mut out = XPoly::zero();
        for (e, c) in &self.terms {
            if e[dir] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[dir] -= 1;
            out.insert(e2, c.mapv(|z| z * C::new(e[dir] as f64, 0.0)));
        }
        out
    }

    pub fn eval(&self, x: &Bispinor) -> CMat {
        let flat = [x.m[0][0], x.m[0][1], x.m[1][0], x.m[1][1]];
        let n = self.terms.values().next().map(|m| m.nrows()).unwrap_or(1);
        let mut acc = CMat::zeros((n, n));
        for (e, c) in &self.terms {
            let mut s = C::new(1.0, 0.0);
            for k in 0..4 {
                for _ in 0..e[k] {
                    s *= flat[k];
                }
            }
            acc = acc + c.mapv(|z| z * s);
        }
        acc
    }

    pub fn max_degree(&self) -> u8 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn norm_at(&self, x: &Bispinor) -> f64 {
        fro(&self.eval(x))
    }

    /// Evaluate at x = body + soul with nilpotent even souls; the binomial
    /// expansion truncates on its own.
    pub fn eval_super(&self, body: &Bispinor, soul: &[GrassmannPoly; 4], n_gen: usize) -> GrassmannPoly {
        let flat = [body.m[0][0], body.m[0][1], body.m[1][0], body.m[1][1]];
        // powers of each soul component up to needed exponent
        let max_e = self
            .terms
            .keys()
            .fold([0u8; 4], |acc, e| [acc[0].max(e[0]), acc[1].max(e[1]), acc[2].max(e[2]), acc[3].max(e[3])]);
        let mut soul_pows: Vec<Vec<GrassmannPoly>> = Vec::with_capacity(4);
        for k in 0..4 {
            let mut pows = vec![GrassmannPoly::scalar(n_gen, C::new(1.0, 0.0))];
            for j in 1..=max_e[k] as usize {
                let next = pows[j - 1].mul(&soul[k]);
                pows.push(next);
            }
            soul_pows.push(pows);
        }
        let binom = |n: u8, k: u8| -> f64 {
            let mut r = 1.0;
            for j in 0..k {
                r = r * (n - j) as f64 / (j + 1) as f64;
            }
            r
        };
        let mut out = GrassmannPoly::zero(n_gen);
        for (e, c) in &self.terms {
            // prod_k (b_k + s_k)^{e_k}
            let mut factor = GrassmannPoly::scalar(n_gen, C::new(1.0, 0.0));
            for k in 0..4 {
                let mut comp = GrassmannPoly::zero(n_gen);
                for j in 0..=e[k] {
                    let mut bpow = C::new(1.0, 0.0);
                    for _ in 0..(e[k] - j) {
                        bpow *= flat[k];
                    }
                    let term = soul_pows[k][j as usize].scale(bpow * C::new(binom(e[k], j), 0.0));
                    comp = comp.add(&term);
                }
                factor = factor.mul(&comp);
            }
            for (mask, fc) in factor.terms {
                out.insert(mask, coeff_mul(c, &fc));
            }
        }
        out
    }
}

/// Grassmann polynomial with x-dependent coefficients.
#[derive(Clone, Debug)]
pub struct SuperField {
    pub n_gen: usize,
    pub terms: BTreeMap<u32, XPoly>,
}

impl SuperField {
    pub fn zero(n_gen: usize) -> Self {
        SuperField { n_gen, terms: BTreeMap::new() }
    }

    pub fn constant(n_gen: usize, p: XPoly) -> Self {
        let mut s = Self::zero(n_gen);
        s.insert(0, p);
        s
    }

    pub fn scalar(n_gen: usize, v: C) -> Self {
        Self::constant(n_gen, XPoly::scalar(v))
    }

    pub fn generator(n_gen: usize, g: usize) -> Self {
        let mut s = Self::zero(n_gen);
        s.insert(1 << g, XPoly::scalar(C::new(1.0, 0.0)));
        s
    }

    pub fn from_gp(gp: &GrassmannPoly) -> Self {
        let mut s = Self::zero(gp.n_gen);
        for (mask, c) in &gp.terms {
            s.insert(*mask, XPoly::constant(c.clone()));
        }
        s
    }

    pub fn monomial(n_gen: usize, mask: u32, p: XPoly) -> Self {
        let mut s = Self::zero(n_gen);
        s.insert(mask, p);
        s
    }

    pub fn insert(&mut self, mask: u32, p: XPoly) {
        if p.terms.is_empty() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(q) => {
                let s = q.add(&p);
                if s.terms.is_empty() {
                    self.terms.remove(&mask);
                } else {
                    *q = s;
                }
            }
            None => {
                self.terms.insert(mask, p);
            }
        }
    }

    pub fn add(&self, other: &SuperField) -> SuperField {
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.insert(*m, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &SuperField) -> SuperField {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C) -> SuperField {
        if s.norm_sqr() == 0.0 {
            return SuperField::zero(self.n_gen);
        }
        SuperField { n_gen: self.n_gen, terms: self.terms.iter().map(|(m, p)| (*m, p.scale(s))).collect() }
    }

    pub fn mul(&self, other: &SuperField) -> SuperField {
        let mut out = SuperField::zero(self.n_gen.max(other.n_gen));
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                if let Some(sign) = merge_sign(*ma, *mb) {
                    let mut p = pa.mul(pb);
                    if sign < 0.0 {
                        p = p.scale(C::new(-1.0, 0.0));
                    }
                    out.insert(ma | mb, p);
                }
            }
        }
        out
    }

    pub fn left_derive(&self, g: usize) -> SuperField {
        let bit = 1u32 << g;
        let mut out = SuperField::zero(self.n_gen);
        for (mask, p) in &self.terms {
            if mask & bit == 0 {
                continue;
            }
            let below = (mask & (bit - 1)).count_ones();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            out.insert(mask & !bit, p.scale(C::new(sign, 0.0)));
        }
        out
    }

    pub fn x_derive(&self, dir: usize) -> SuperField {
        let mut out = SuperField::zero(self.n_gen);
        for (mask, p) in &self.terms {
            out.insert(*mask, p.derive(dir));
        }
        out
    }

    pub fn eval_x(&self, x: &Bispinor) -> GrassmannPoly {
        let mut out = GrassmannPoly::zero(self.n_gen);
        for (mask, p) in &self.terms {
            out.insert(*mask, p.eval(x));
        }
        out
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|p| p.is_zero(tol))
    }

    pub fn norm_at(&self, x: &Bispinor) -> f64 {
        self.eval_x(x).norm()
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut p = None;
        for mask in self.terms.keys() {
            let q = Parity::of_mask(*mask);
            match p {
                None => p = Some(q),
                Some(prev) if prev != q => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(Parity::Even))
    }

    /// Evaluate along a super argument: x goes to body + soul and each
    /// generator goes to the given (odd) image in the target algebra.
    pub fn eval_super(
        &self,
        body: &Bispinor,
        soul: &[GrassmannPoly; 4],
        gen_images: &[GrassmannPoly],
        target_gen: usize,
    ) -> Result<GrassmannPoly> {
        if gen_images.len() != self.n_gen {
            return Err(Error::ShapeMismatch(format!(
                "expected {} generator images, got {}",
                self.n_gen,
                gen_images.len()
            )));
        }
        let mut out = GrassmannPoly::zero(target_gen);
        for (mask, p) in &self.terms {
            let coeff = p.eval_super(body, soul, target_gen);
            let mut gen_prod = GrassmannPoly::scalar(target_gen, C::new(1.0, 0.0));
            let mut bits = *mask;
            while bits != 0 {
                let g = bits.trailing_zeros() as usize;
                gen_prod = gen_prod.mul(&gen_images[g]);
                bits &= bits - 1;
            }
            // coefficient (even in target souls) multiplies from the left
            for (m, c) in coeff.mul(&gen_prod).terms {
                out.insert(m, c);
            }
        }
        Ok(out)
    }
}
