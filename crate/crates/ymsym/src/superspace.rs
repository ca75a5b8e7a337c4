//! First-order graded differential operators on superspace, the
//! supersymmetry algebra, covariant line operators of a superconnection, and
//! the integrability residual on super null lines.
//!
//! Generator layout for N supersymmetries: theta^{i alpha} at 2i + alpha,
//! thetatilde_j^{alphadot} at 2N + 2j + alphadot; 4N generators total.
//!
//! Derivation coefficients are kept scalar (the catalog never needs more);
//! together with the parity discipline this makes the odd-odd anticommutator
//! close exactly on first-order operators plus a multiplication part, which
//! the apply-route oracle in the tests confirms.

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannPoly, Parity};
use crate::mat::{c, cr, C};
use crate::spinor::{Bispinor, CoSpinor, Spinor};
use crate::xpoly::{SuperField, XPoly};

pub fn g_theta(i: usize, al: usize) -> usize {
    2 * i + al
}

pub fn g_tbar(nsusy: usize, j: usize, ad: usize) -> usize {
    2 * nsusy + 2 * j + ad
}

pub fn n_generators(nsusy: usize) -> usize {
    4 * nsusy
}

/// tau^{al ad} = sum_i theta^{i al} thetatilde_i^{ad} over the point
/// generators; Grassmann-even and nilpotent.
pub fn tau_component(nsusy: usize, al: usize, ad: usize) -> GrassmannPoly {
    let n_gen = n_generators(nsusy);
    let mut out = GrassmannPoly::zero(n_gen);
    for i in 0..nsusy {
        let mask = (1u32 << g_theta(i, al)) | (1u32 << g_tbar(nsusy, i, ad));
        // theta-generator index is below the tbar index, so the canonical
        // order carries no sign
        out = out.add(&GrassmannPoly::monomial(n_gen, mask, {
            let mut m = ndarray::Array2::zeros((1, 1));
            m[[0, 0]] = cr(1.0);
            m
        }));
    }
    out
}

pub fn tau_bispinor(nsusy: usize) -> [GrassmannPoly; 4] {
    [
        tau_component(nsusy, 0, 0),
        tau_component(nsusy, 0, 1),
        tau_component(nsusy, 1, 0),
        tau_component(nsusy, 1, 1),
    ]
}

/// First-order operator a . d_x + b . d_theta + c . d_thetatilde + m.
#[derive(Clone)]
pub struct SuperVectorOp {
    pub nsusy: usize,
    pub n_gen: usize,
    pub n: usize,
    pub parity: Parity,
    pub a: [SuperField; 4],
    pub b: Vec<SuperField>,
    pub c: Vec<SuperField>,
    pub m: SuperField,
}

impl SuperVectorOp {
    pub fn zero(nsusy: usize, n: usize, parity: Parity) -> Self {
        let n_gen = n_generators(nsusy);
        SuperVectorOp {
            nsusy,
            n_gen,
            n,
            parity,
            a: [
                SuperField::zero(n_gen),
                SuperField::zero(n_gen),
                SuperField::zero(n_gen),
                SuperField::zero(n_gen),
            ],
            b: vec![SuperField::zero(n_gen); 2 * nsusy],
            c: vec![SuperField::zero(n_gen); 2 * nsusy],
            m: SuperField::zero(n_gen),
        }
    }

    pub fn add(&self, other: &SuperVectorOp) -> SuperVectorOp {
        assert_eq!(self.nsusy, other.nsusy);
        let mut out = self.clone();
        for dir in 0..4 {
            out.a[dir] = out.a[dir].add(&other.a[dir]);
        }
        for k in 0..2 * self.nsusy {
            out.b[k] = out.b[k].add(&other.b[k]);
            out.c[k] = out.c[k].add(&other.c[k]);
        }
        out.m = out.m.add(&other.m);
        out.n = out.n.max(other.n);
        out
    }

    pub fn sub(&self, other: &SuperVectorOp) -> SuperVectorOp {
        self.add(&other.scale(cr(-1.0)))
    }

    pub fn scale(&self, s: C) -> SuperVectorOp {
        let mut out = self.clone();
        for dir in 0..4 {
            out.a[dir] = out.a[dir].scale(s);
        }
        for k in 0..2 * self.nsusy {
            out.b[k] = out.b[k].scale(s);
            out.c[k] = out.c[k].scale(s);
        }
        out.m = out.m.scale(s);
        out
    }

    /// Apply to a superfield; coefficients multiply from the left.
    pub fn apply(&self, psi: &SuperField) -> SuperField {
        let mut out = SuperField::zero(self.n_gen);
        for dir in 0..4 {
            if !self.a[dir].terms.is_empty() {
                out = out.add(&self.a[dir].mul(&psi.x_derive(dir)));
            }
        }
        for i in 0..self.nsusy {
            for al in 0..2 {
                let k = g_theta(i, al);
                if !self.b[k].terms.is_empty() {
                    out = out.add(&self.b[k].mul(&psi.left_derive(k)));
                }
                let kd = 2 * i + al;
                let g = g_tbar(self.nsusy, i, al);
                if !self.c[kd].terms.is_empty() {
                    out = out.add(&self.c[kd].mul(&psi.left_derive(g)));
                }
            }
        }
        if !self.m.terms.is_empty() {
            out = out.add(&self.m.mul(psi));
        }
        out
    }

    /// Derivation part applied to a coefficient field (no multiplication).
    fn derive_field(&self, f: &SuperField) -> SuperField {
        let mut out = SuperField::zero(self.n_gen);
        for dir in 0..4 {
            if !self.a[dir].terms.is_empty() {
                out = out.add(&self.a[dir].mul(&f.x_derive(dir)));
            }
        }
        for i in 0..self.nsusy {
            for al in 0..2 {
                let k = g_theta(i, al);
                if !self.b[k].terms.is_empty() {
                    out = out.add(&self.b[k].mul(&f.left_derive(k)));
                }
                let g = g_tbar(self.nsusy, i, al);
                let kd = 2 * i + al;
                if !self.c[kd].terms.is_empty() {
                    out = out.add(&self.c[kd].mul(&f.left_derive(g)));
                }
            }
        }
        out
    }

    /// Largest coefficient norm over the sample points.
    pub fn coeff_norm(&self, xs: &[Bispinor]) -> f64 {
        let mut worst = 0.0f64;
        for x in xs {
            for dir in 0..4 {
                worst = worst.max(self.a[dir].norm_at(x));
            }
            for k in 0..2 * self.nsusy {
                worst = worst.max(self.b[k].norm_at(x));
                worst = worst.max(self.c[k].norm_at(x));
            }
            worst = worst.max(self.m.norm_at(x));
        }
        worst
    }

    /// Largest norm of the operator applied across the spanning family,
    /// evaluated at the sample points.
    pub fn family_norm(&self, family: &[SuperField], xs: &[Bispinor]) -> f64 {
        let mut worst = 0.0f64;
        for psi in family {
            let out = self.apply(psi);
            if out.terms.is_empty() {
                continue;
            }
            for x in xs {
                worst = worst.max(out.norm_at(x));
            }
        }
        worst
    }
}

/// Graded anticommutator of two odd first-order operators. With scalar
/// derivation coefficients the second-order parts cancel pairwise, leaving
/// a first-order operator plus multiplication.
pub fn anticommutator(x: &SuperVectorOp, y: &SuperVectorOp) -> Result<SuperVectorOp> {
    if x.parity != Parity::Odd || y.parity != Parity::Odd {
        return Err(Error::ShapeMismatch("anticommutator expects odd operators".into()));
    }
    if x.nsusy != y.nsusy {
        return Err(Error::ShapeMismatch("operator susy counts differ".into()));
    }
    let mut out = SuperVectorOp::zero(x.nsusy, x.n.max(y.n), Parity::Even);
    for dir in 0..4 {
        out.a[dir] = x.derive_field(&y.a[dir]).add(&y.derive_field(&x.a[dir]));
    }
    for k in 0..2 * x.nsusy {
        out.b[k] = x.derive_field(&y.b[k]).add(&y.derive_field(&x.b[k]));
        out.c[k] = x.derive_field(&y.c[k]).add(&y.derive_field(&x.c[k]));
    }
    out.m = x
        .derive_field(&y.m)
        .add(&y.derive_field(&x.m))
        .add(&x.m.mul(&y.m))
        .add(&y.m.mul(&x.m));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Q,
    Qt,
}

/// Flat supersymmetry generator: q_{i al} = d_theta + i thetatilde d_x and
/// its dotted partner.
pub fn susy_generator(kind: GenKind, i: usize, spin: usize, nsusy: usize) -> Result<SuperVectorOp> {
    if i >= nsusy || spin >= 2 {
        return Err(Error::IndexOutOfRange(format!("generator ({i}, {spin}) at N = {nsusy}")));
    }
    let n_gen = n_generators(nsusy);
    let mut op = SuperVectorOp::zero(nsusy, 1, Parity::Odd);
    match kind {
        GenKind::Q => {
            op.b[g_theta(i, spin)] = SuperField::scalar(n_gen, cr(1.0));
            for ad in 0..2 {
                let tb = SuperField::generator(n_gen, g_tbar(nsusy, i, ad));
                op.a[2 * spin + ad] = tb.scale(c(0.0, 1.0));
            }
        }
        GenKind::Qt => {
            op.c[2 * i + spin] = SuperField::scalar(n_gen, cr(1.0));
            for al in 0..2 {
                let th = SuperField::generator(n_gen, g_theta(i, al));
                op.a[2 * al + spin] = th.scale(c(0.0, 1.0));
            }
        }
    }
    Ok(op)
}

/// Superconnection (omega_{i al}, omegatilde^i_{ad}, A_{al ad}) with
/// x-polynomial coefficients. omega components must be Grassmann-odd and A
/// even for the covariant operators to be well graded.
#[derive(Clone)]
pub struct SuperConnection {
    pub nsusy: usize,
    pub n: usize,
    /// omega_{i al} at 2i + al
    pub omega: Vec<SuperField>,
    /// omegatilde^j_{ad} at 2j + ad
    pub omegabar: Vec<SuperField>,
    /// A_{al ad} on the flat coordinate index
    pub a: [SuperField; 4],
}

impl SuperConnection {
    pub fn zero(nsusy: usize, n: usize) -> Self {
        let n_gen = n_generators(nsusy);
        SuperConnection {
            nsusy,
            n,
            omega: vec![SuperField::zero(n_gen); 2 * nsusy],
            omegabar: vec![SuperField::zero(n_gen); 2 * nsusy],
            a: [
                SuperField::zero(n_gen),
                SuperField::zero(n_gen),
                SuperField::zero(n_gen),
                SuperField::zero(n_gen),
            ],
        }
    }

    fn check_parities(&self) -> Result<()> {
        for w in self.omega.iter().chain(self.omegabar.iter()) {
            if w.parity() != Some(Parity::Odd) && !w.is_zero(0.0) {
                return Err(Error::ShapeMismatch("odd connection component has even terms".into()));
            }
        }
        for comp in &self.a {
            if comp.parity() != Some(Parity::Even) && !comp.is_zero(0.0) {
                return Err(Error::ShapeMismatch("A component must be even".into()));
            }
        }
        Ok(())
    }
}

/// Covariant line operators (T_i, Ttilde^j, D) of the connection along the
/// spinor pair: T_i = lambda^al (q_{i al} + omega_{i al}) and partners.
pub fn covariant_line_ops(
    phi: &SuperConnection,
    l: &Spinor,
    lt: &CoSpinor,
) -> Result<(Vec<SuperVectorOp>, Vec<SuperVectorOp>, SuperVectorOp)> {
    phi.check_parities()?;
    let nsusy = phi.nsusy;
    let mut ts = Vec::with_capacity(nsusy);
    let mut tts = Vec::with_capacity(nsusy);
    for i in 0..nsusy {
        let mut t = SuperVectorOp::zero(nsusy, phi.n, Parity::Odd);
        let mut tt = SuperVectorOp::zero(nsusy, phi.n, Parity::Odd);
        for spin in 0..2 {
            t = t.add(&susy_generator(GenKind::Q, i, spin, nsusy)?.scale(l.0[spin]));
            t.m = t.m.add(&phi.omega[g_theta(i, spin)].scale(l.0[spin]));
            tt = tt.add(&susy_generator(GenKind::Qt, i, spin, nsusy)?.scale(lt.0[spin]));
            tt.m = tt.m.add(&phi.omegabar[2 * i + spin].scale(lt.0[spin]));
        }
        t.n = phi.n;
        tt.n = phi.n;
        ts.push(t);
        tts.push(tt);
    }
    let mut d = SuperVectorOp::zero(nsusy, phi.n, Parity::Even);
    let n_gen = n_generators(nsusy);
    for al in 0..2 {
        for ad in 0..2 {
            let coef = l.0[al] * lt.0[ad];
            d.a[2 * al + ad] = SuperField::scalar(n_gen, coef);
            d.m = d.m.add(&phi.a[2 * al + ad].scale(coef));
        }
    }
    Ok((ts, tts, d))
}

/// Coordinate monomials of degree <= 2 times Grassmann monomials of degree
/// <= 2, scalar coefficients; spans enough jets to expose any first-order
/// operator with polynomial coefficients (and any stray second-order part).
pub fn spanning_family(nsusy: usize) -> Vec<SuperField> {
    let n_gen = n_generators(nsusy);
    let mut xmonos: Vec<XPoly> = vec![XPoly::scalar(cr(1.0))];
    for d1 in 0..4 {
        xmonos.push(XPoly::coord(d1));
        for d2 in d1..4 {
            xmonos.push(XPoly::coord(d1).mul(&XPoly::coord(d2)));
        }
    }
    let mut masks: Vec<u32> = vec![0];
    for g1 in 0..n_gen {
        masks.push(1 << g1);
        for g2 in g1 + 1..n_gen {
            masks.push((1 << g1) | (1 << g2));
        }
    }
    let mut family = Vec::with_capacity(xmonos.len() * masks.len());
    for mask in &masks {
        for xm in &xmonos {
            family.push(SuperField::monomial(n_gen, *mask, xm.clone()));
        }
    }
    family
}

/// Worst violation of the super null line integrability relations for the
/// connection along (lambda, lambdatilde): the anticommutator blocks
/// {T, T}, {Tt, Tt} and {T, Tt} - 2i delta D, measured as operators on the
/// spanning family at the sample points.
pub fn line_integrability_residual(
    phi: &SuperConnection,
    l: &Spinor,
    lt: &CoSpinor,
    xs: &[Bispinor],
    family: &[SuperField],
) -> Result<f64> {
    let (ts, tts, d) = covariant_line_ops(phi, l, lt)?;
    let mut worst = 0.0f64;
    for i in 0..phi.nsusy {
        for j in i..phi.nsusy {
            worst = worst.max(anticommutator(&ts[i], &ts[j])?.family_norm(family, xs));
            worst = worst.max(anticommutator(&tts[i], &tts[j])?.family_norm(family, xs));
        }
        for j in 0..phi.nsusy {
            let mut rel = anticommutator(&ts[i], &tts[j])?;
            if i == j {
                rel = rel.sub(&d.scale(c(0.0, 2.0)));
            }
            worst = worst.max(rel.family_norm(family, xs));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn sample_points() -> Vec<Bispinor> {
        vec![
            Bispinor::from_rows([cr(0.3), c(0.1, -0.4)], [c(-0.2, 0.5), cr(0.7)]),
            Bispinor::from_rows([c(0.9, 0.2), cr(-0.6)], [cr(0.4), c(0.0, -0.3)]),
        ]
    }

    #[test]
    fn flat_algebra_all_indices() {
        for nsusy in [1usize, 3] {
            let xs = sample_points();
            let family = spanning_family(nsusy);
            for i in 0..nsusy {
                for al in 0..2 {
                    for j in 0..nsusy {
                        for be in 0..2 {
                            let qa = susy_generator(GenKind::Q, i, al, nsusy).unwrap();
                            let qb = susy_generator(GenKind::Q, j, be, nsusy).unwrap();
                            let r = anticommutator(&qa, &qb).unwrap();
                            assert!(r.family_norm(&family, &xs) < 1e-12);

                            let ta = susy_generator(GenKind::Qt, i, al, nsusy).unwrap();
                            let tb = susy_generator(GenKind::Qt, j, be, nsusy).unwrap();
                            let r = anticommutator(&ta, &tb).unwrap();
                            assert!(r.family_norm(&family, &xs) < 1e-12);

                            // {q_{i al}, qt^j_{bd}} = 2i delta_i^j d_{al bd}
                            let r = anticommutator(&qa, &tb).unwrap();
                            let mut want = SuperVectorOp::zero(nsusy, 1, Parity::Even);
                            if i == j {
                                want.a[2 * al + be] =
                                    SuperField::scalar(n_generators(nsusy), c(0.0, 2.0));
                            }
                            let diff = r.sub(&want);
                            assert!(diff.family_norm(&family, &xs) < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn generator_index_bounds() {
        assert!(matches!(
            susy_generator(GenKind::Q, 3, 0, 3),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            susy_generator(GenKind::Qt, 0, 2, 1),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn generator_applied_to_superfield_frozen() {
        // q_{0 0} (x^{00} theta^{00}) = x^{00} - i theta^{00} thetatilde_0^{0}
        let nsusy = 3;
        let n_gen = n_generators(nsusy);
        let q = susy_generator(GenKind::Q, 0, 0, nsusy).unwrap();
        let psi = SuperField::monomial(n_gen, 1 << g_theta(0, 0), XPoly::coord(0));
        let out = q.apply(&psi);
        let x = sample_points()[0];
        let gp = out.eval_x(&x);
        assert!((gp.coeff(0).unwrap()[[0, 0]] - x.m[0][0]).norm() < 1e-14);
        let mask = (1u32 << g_theta(0, 0)) | (1u32 << g_tbar(nsusy, 0, 0));
        assert!((gp.coeff(mask).unwrap()[[0, 0]] - c(0.0, -1.0)).norm() < 1e-14);
        assert_eq!(gp.terms.len(), 2);

        // cross-slot case: q_{0 0} (x^{00} theta^{11}) = -i theta^{11} ttb_0^{0}
        let psi = SuperField::monomial(n_gen, 1 << g_theta(1, 1), XPoly::coord(0));
        let gp = q.apply(&psi).eval_x(&x);
        let mask = (1u32 << g_theta(1, 1)) | (1u32 << g_tbar(nsusy, 0, 0));
        assert!((gp.coeff(mask).unwrap()[[0, 0]] - c(0.0, -1.0)).norm() < 1e-14);
        assert_eq!(gp.terms.len(), 1);
    }

    #[test]
    fn anticommutator_matches_apply_route() {
        // closed-form anticommutator vs X(Y psi) + Y(X psi) on random odd ops
        let nsusy = 2;
        let n_gen = n_generators(nsusy);
        let mut rng = Rng::new(23);
        let random_odd_field = |rng: &mut Rng| -> SuperField {
            let mut f = SuperField::zero(n_gen);
            for g in 0..n_gen {
                let xp = XPoly::scalar(rng.complex_unit())
                    .add(&XPoly::coord((rng.next_u64() % 4) as usize).scale(rng.complex_unit()));
                f = f.add(&SuperField::monomial(n_gen, 1 << g, xp));
            }
            f
        };
        let random_even_field = |rng: &mut Rng| -> SuperField {
            let mut f = SuperField::constant(n_gen, XPoly::scalar(rng.complex_unit()));
            f = f.add(&SuperField::monomial(
                n_gen,
                0b11,
                XPoly::coord(1).scale(rng.complex_unit()),
            ));
            f
        };
        let random_odd_op = |rng: &mut Rng| -> SuperVectorOp {
            let mut op = SuperVectorOp::zero(nsusy, 1, Parity::Odd);
            for dir in 0..4 {
                op.a[dir] = random_odd_field(rng);
            }
            for k in 0..2 * nsusy {
                op.b[k] = random_even_field(rng);
                op.c[k] = random_even_field(rng);
            }
            op.m = random_odd_field(rng);
            op
        };
        let family = spanning_family(nsusy);
        let xs = sample_points();
        for _ in 0..3 {
            let x_op = random_odd_op(&mut rng);
            let y_op = random_odd_op(&mut rng);
            let closed = anticommutator(&x_op, &y_op).unwrap();
            for psi in family.iter().step_by(17) {
                let direct = x_op.apply(&y_op.apply(psi)).add(&y_op.apply(&x_op.apply(psi)));
                let via_closed = closed.apply(psi);
                let diff = direct.sub(&via_closed);
                for x in &xs {
                    assert!(diff.norm_at(x) < 1e-10, "closure violated: {}", diff.norm_at(x));
                }
            }
        }
    }

    #[test]
    fn covariant_flat_relations_via_line_ops() {
        let nsusy = 3;
        let phi = SuperConnection::zero(nsusy, 1);
        let l = Spinor::new(cr(1.0), c(0.3, -0.2));
        let lt = CoSpinor::new(c(0.5, 0.1), cr(1.0));
        let xs = sample_points();
        let family = spanning_family(nsusy);
        let r = line_integrability_residual(&phi, &l, &lt, &xs, &family).unwrap();
        assert!(r < 1e-12, "flat covariant residual {r}");
    }

    #[test]
    fn random_odd_connection_fails_integrability() {
        let nsusy = 2;
        let n_gen = n_generators(nsusy);
        let mut phi = SuperConnection::zero(nsusy, 1);
        // omega = theta-linear odd field; generic, not integrable
        phi.omega[0] = SuperField::monomial(n_gen, 1 << g_tbar(nsusy, 0, 0), XPoly::scalar(cr(0.8)));
        phi.omega[1] = SuperField::monomial(n_gen, 1 << g_tbar(nsusy, 1, 1), XPoly::coord(0));
        let l = Spinor::new(cr(1.0), cr(0.4));
        let lt = CoSpinor::new(cr(1.0), cr(-0.3));
        let xs = sample_points();
        let family = spanning_family(nsusy);
        let r = line_integrability_residual(&phi, &l, &lt, &xs, &family).unwrap();
        assert!(r > 1e-2, "control connection not detected: {r}");
    }

    #[test]
    fn tau_components_are_even_and_nilpotent() {
        for nsusy in [1usize, 3] {
            let tau = tau_bispinor(nsusy);
            for t in &tau {
                assert_eq!(t.parity(), Some(Parity::Even));
                // entrywise power N+1 vanishes
                let mut p = t.clone();
                for _ in 0..nsusy {
                    p = p.mul(t);
                }
                assert!(p.is_zero(0.0), "tau^{} should vanish", nsusy + 1);
            }
        }
    }

    #[test]
    fn tau_n1_explicit_expansion() {
        let tau = tau_component(1, 0, 1);
        assert_eq!(tau.terms.len(), 1);
        let mask = (1u32 << g_theta(0, 0)) | (1u32 << g_tbar(1, 0, 1));
        assert_eq!(tau.coeff(mask).unwrap()[[0, 0]], cr(1.0));
    }
}
