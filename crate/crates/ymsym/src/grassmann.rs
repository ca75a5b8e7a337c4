//! Sparse Grassmann algebra over up to 16 anticommuting generators with
//! matrix-valued coefficients.
//!
//! Monomials are generator bitmasks in canonical ascending order; products
//! carry the inversion-count sign and vanish on repeated generators. A 1x1
//! coefficient acts as a scalar against any matrix coefficient.

use crate::error::{Error, Result};
use crate::mat::{fro, CMat, C};
use std::collections::BTreeMap;

pub const MAX_GENERATORS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_mask(mask: u32) -> Parity {
        if mask.count_ones() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Sign of e_S * e_T as (-1)^inversions, or None when S and T overlap.
pub fn merge_sign(s: u32, t: u32) -> Option<f64> {
    if s & t != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut t_bits = t;
    while t_bits != 0 {
        let g = t_bits.trailing_zeros();
        inversions += (s >> (g + 1)).count_ones();
        t_bits &= t_bits - 1;
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Multiply coefficients, promoting a 1x1 block to a scalar.
pub fn coeff_mul(a: &CMat, b: &CMat) -> CMat {
    if a.nrows() == 1 && a.ncols() == 1 {
        let s = a[[0, 0]];
        return b.mapv(|z| z * s);
    }
    if b.nrows() == 1 && b.ncols() == 1 {
        let s = b[[0, 0]];
        return a.mapv(|z| z * s);
    }
    a.dot(b)
}

fn coeff_is_zero(m: &CMat, tol: f64) -> bool {
    m.iter().all(|z| z.norm_sqr() <= tol * tol)
}

/// Sparse polynomial in anticommuting generators.
#[derive(Clone, Debug)]
pub struct GrassmannPoly {
    pub n_gen: usize,
    pub terms: BTreeMap<u32, CMat>,
}

impl GrassmannPoly {
    pub fn zero(n_gen: usize) -> Self {
        assert!(n_gen <= MAX_GENERATORS);
        GrassmannPoly { n_gen, terms: BTreeMap::new() }
    }

    pub fn constant(n_gen: usize, coeff: CMat) -> Self {
        let mut p = Self::zero(n_gen);
        p.insert(0, coeff);
        p
    }

    pub fn scalar(n_gen: usize, v: C) -> Self {
        let mut m = CMat::zeros((1, 1));
        m[[0, 0]] = v;
        Self::constant(n_gen, m)
    }

    /// Single generator with unit scalar coefficient.
    pub fn generator(n_gen: usize, g: usize) -> Self {
        assert!(g < n_gen);
        let mut m = CMat::zeros((1, 1));
        m[[0, 0]] = C::new(1.0, 0.0);
        let mut p = Self::zero(n_gen);
        p.insert(1 << g, m);
        p
    }

    pub fn monomial(n_gen: usize, mask: u32, coeff: CMat) -> Self {
        let mut p = Self::zero(n_gen);
        p.insert(mask, coeff);
        p
    }

    /// Insert with zero-pruning.
    pub fn insert(&mut self, mask: u32, coeff: CMat) {
        if coeff_is_zero(&coeff, 0.0) {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(c) => {
                let s = &*c + &coeff;
                if coeff_is_zero(&s, 0.0) {
                    self.terms.remove(&mask);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(mask, coeff);
            }
        }
    }

    pub fn coeff(&self, mask: u32) -> Option<&CMat> {
        self.terms.get(&mask)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| coeff_is_zero(c, tol))
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| fro(c).powi(2)).sum::<f64>().sqrt()
    }

    /// Some(parity) when every term agrees; zero counts as even.
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

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &GrassmannPoly) -> GrassmannPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GrassmannPoly) -> GrassmannPoly {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C) -> GrassmannPoly {
        if s.norm_sqr() == 0.0 {
            return GrassmannPoly::zero(self.n_gen);
        }
        GrassmannPoly {
            n_gen: self.n_gen,
            terms: self.terms.iter().map(|(m, c)| (*m, c.mapv(|z| z * s))).collect(),
        }
    }

    pub fn mul(&self, other: &GrassmannPoly) -> GrassmannPoly {
        let mut out = GrassmannPoly::zero(self.n_gen.max(other.n_gen));
        for (ms, cs) in &self.terms {
            for (mt, ct) in &other.terms {
                if let Some(sign) = merge_sign(*ms, *mt) {
                    let mut c = coeff_mul(cs, ct);
                    if sign < 0.0 {
                        c = c.mapv(|z| -z);
                    }
                    out.insert(ms | mt, c);
                }
            }
        }
        out
    }

    /// Left derivative with respect to generator g.
    pub fn left_derive(&self, g: usize) -> GrassmannPoly {
        let bit = 1u32 << g;
        let mut out = GrassmannPoly::zero(self.n_gen);
        for (mask, coeff) in &self.terms {
            if mask & bit == 0 {
                continue;
            }
            let below = (mask & (bit - 1)).count_ones();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            out.insert(mask & !bit, coeff.mapv(|z| z * C::new(sign, 0.0)));
        }
        out
    }

    /// Substitute each generator by an odd element of the same algebra;
    /// products of images are formed in the monomial's canonical order.
    pub fn substitute(&self, images: &[GrassmannPoly]) -> Result<GrassmannPoly> {
        if images.len() != self.n_gen {
            return Err(Error::ShapeMismatch(format!(
                "substitution needs {} images, got {}",
                self.n_gen,
                images.len()
            )));
        }
        for img in images {
            if img.parity() != Some(Parity::Odd) && !img.is_zero(0.0) {
                return Err(Error::ShapeMismatch("substitution image must be odd".into()));
            }
        }
        let mut out = GrassmannPoly::zero(self.n_gen);
        for (mask, coeff) in &self.terms {
            let mut prod = GrassmannPoly::scalar(self.n_gen, C::new(1.0, 0.0));
            let mut bits = *mask;
            while bits != 0 {
                let g = bits.trailing_zeros() as usize;
                prod = prod.mul(&images[g]);
                bits &= bits - 1;
            }
            for (m, c) in prod.terms {
                out.insert(m, coeff_mul(coeff, &c));
            }
        }
        Ok(out)
    }

    /// Drop all terms involving generators flagged in `mask` (evaluation at
    /// zero of those generators).
    pub fn strip_generators(&self, mask: u32) -> GrassmannPoly {
        GrassmannPoly {
            n_gen: self.n_gen,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| *m & mask == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Geometric-series inverse of an even element with invertible scalar
    /// body; the nilpotent remainder terminates the series.
    pub fn inverse(&self) -> Result<GrassmannPoly> {
        let body = self.coeff(0).cloned().ok_or(Error::SingularMatrix)?;
        if body.nrows() != 1 {
            return Err(Error::ShapeMismatch("inverse implemented for scalar coefficients".into()));
        }
        let b = body[[0, 0]];
        if b.norm() < 1e-300 {
            return Err(Error::SingularMatrix);
        }
        let mut soul = self.clone();
        soul.terms.remove(&0);
        let neg = soul.scale(-C::new(1.0, 0.0) / b);
        let mut acc = GrassmannPoly::scalar(self.n_gen, C::new(1.0, 0.0) / b);
        let mut pw = GrassmannPoly::scalar(self.n_gen, C::new(1.0, 0.0));
        for _ in 0..MAX_GENERATORS {
            pw = pw.mul(&neg);
            if pw.is_zero(0.0) {
                break;
            }
            acc = acc.add(&pw.scale(C::new(1.0, 0.0) / b));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{c, cr};
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn random_poly(rng: &mut Rng, n_gen: usize, terms: usize) -> GrassmannPoly {
        let mut p = GrassmannPoly::zero(n_gen);
        for _ in 0..terms {
            let mask = (rng.next_u64() as u32) & ((1 << n_gen) - 1);
            p.insert(mask, {
                let mut m = CMat::zeros((1, 1));
                m[[0, 0]] = rng.complex_unit();
                m
            });
        }
        p
    }

    #[test]
    fn generators_are_nilpotent() {
        let t = GrassmannPoly::generator(4, 1);
        assert!(t.mul(&t).is_zero(0.0));
    }

    #[test]
    fn generators_anticommute() {
        let a = GrassmannPoly::generator(4, 0);
        let b = GrassmannPoly::generator(4, 2);
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        assert!(ab.add(&ba).is_zero(0.0));
        assert_eq!(ab.coeff(0b101).unwrap()[[0, 0]], cr(1.0));
        assert_eq!(ba.coeff(0b101).unwrap()[[0, 0]], cr(-1.0));
    }

    #[test]
    fn left_derivative_signs() {
        // d/dg1 (g0 g1) = -g0
        let p = GrassmannPoly::generator(4, 0).mul(&GrassmannPoly::generator(4, 1));
        let d = p.left_derive(1);
        assert_eq!(d.coeff(0b1).unwrap()[[0, 0]], cr(-1.0));
        // d/dg0 (g0 g1) = g1
        let d0 = p.left_derive(0);
        assert_eq!(d0.coeff(0b10).unwrap()[[0, 0]], cr(1.0));
    }

    #[test]
    fn graded_leibniz_for_left_derivative() {
        let mut rng = Rng::new(77);
        for _ in 0..50 {
            let a = random_poly(&mut rng, 6, 4);
            let b = random_poly(&mut rng, 6, 4);
            for g in 0..6 {
                // d(ab) = d(a) b + (-1)^{|a|} a d(b), for homogeneous a
                for (mask, coeff) in &a.terms {
                    let amono = GrassmannPoly::monomial(6, *mask, coeff.clone());
                    let sign = match Parity::of_mask(*mask) {
                        Parity::Even => 1.0,
                        Parity::Odd => -1.0,
                    };
                    let lhs = amono.mul(&b).left_derive(g);
                    let rhs = amono
                        .left_derive(g)
                        .mul(&b)
                        .add(&amono.mul(&b.left_derive(g)).scale(cr(sign)));
                    assert!(lhs.sub(&rhs).is_zero(1e-13));
                }
            }
        }
    }

    #[test]
    fn substitution_is_algebra_map() {
        let mut rng = Rng::new(5);
        let n = 6;
        let images: Vec<GrassmannPoly> = (0..n)
            .map(|_| {
                let mut p = GrassmannPoly::zero(n);
                for g in 0..n {
                    p = p.add(&GrassmannPoly::generator(n, g).scale(rng.complex_unit()));
                }
                p
            })
            .collect();
        for _ in 0..20 {
            let a = random_poly(&mut rng, n, 3);
            let b = random_poly(&mut rng, n, 3);
            let lhs = a.mul(&b).substitute(&images).unwrap();
            let rhs = a.substitute(&images).unwrap().mul(&b.substitute(&images).unwrap());
            assert!(lhs.sub(&rhs).is_zero(1e-12), "substitution not multiplicative");
        }
    }

    #[test]
    fn inverse_of_even_element() {
        let mut p = GrassmannPoly::scalar(4, c(2.0, 1.0));
        p = p.add(&GrassmannPoly::generator(4, 0).mul(&GrassmannPoly::generator(4, 1)).scale(c(0.3, -0.2)));
        let inv = p.inverse().unwrap();
        let prod = p.mul(&inv);
        assert!((prod.coeff(0).unwrap()[[0, 0]] - cr(1.0)).norm() < 1e-14);
        assert!(prod.sub(&GrassmannPoly::scalar(4, cr(1.0))).is_zero(1e-13));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mul_is_associative(seed in 0u64..1_000_000) {
            let mut rng = Rng::new(seed);
            let a = random_poly(&mut rng, 12, 5);
            let b = random_poly(&mut rng, 12, 5);
            let c = random_poly(&mut rng, 12, 5);
            let lhs = a.mul(&b).mul(&c);
            let rhs = a.mul(&b.mul(&c));
            prop_assert!(lhs.sub(&rhs).is_zero(1e-11));
        }

        #[test]
        fn odd_elements_square_to_zero(seed in 0u64..1_000_000) {
            let mut rng = Rng::new(seed);
            let mut p = GrassmannPoly::zero(12);
            for g in 0..12 {
                p = p.add(&GrassmannPoly::generator(12, g).scale(rng.complex_unit()));
            }
            prop_assert!(p.mul(&p).is_zero(1e-12));
        }

        #[test]
        fn derivative_kills_squares(seed in 0u64..1_000_000) {
            // second left derivative with the same generator is zero
            let mut rng = Rng::new(seed);
            let p = random_poly(&mut rng, 12, 8);
            for g in [0usize, 5, 11] {
                prop_assert!(p.left_derive(g).left_derive(g).is_zero(0.0));
            }
        }
    }
}
