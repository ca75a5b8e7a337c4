//! Complex 2-spinor algebra, null structures and twistor incidence.
//!
//! Conventions, fixed once for the whole crate and self-tested below:
//! epsilon_{01} = +1 = epsilon^{01}; raising lambda^a = eps^{ab} lambda_b;
//! lowering v_a = v^b eps_{ba}. These satisfy eps^{ab} eps_{bc} = -delta^a_c.
//! A bispinor v^{a adot} is null iff det v = 0, and then factors as an outer
//! product lambda (x) lambdatilde. Projective normalization pivots on the
//! largest-modulus component; the scale ambiguity of a factorization is
//! carried entirely by the cospinor.

use crate::error::{Error, Result};
use crate::mat::{cr, C};

/// Library default for approximate comparisons on unit-scale data.
pub const DEFAULT_TOL: f64 = 1e-10;

/// eps_{ab} with eps_{01} = +1 (same numeric table for eps^{ab}).
pub const EPS: [[f64; 2]; 2] = [[0.0, 1.0], [-1.0, 0.0]];

/// Undotted spinor lambda^alpha.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor(pub [C; 2]);

/// Dotted spinor lambdatilde^{alphadot}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoSpinor(pub [C; 2]);

impl Spinor {
    pub fn new(a: C, b: C) -> Self {
        Spinor([a, b])
    }
    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }
    /// lambda_alpha = lambda^beta eps_{beta alpha}
    pub fn lowered(&self) -> [C; 2] {
        [self.0[1] * cr(EPS[1][0]), self.0[0] * cr(EPS[0][1])]
    }
    pub fn scale(&self, s: C) -> Spinor {
        Spinor([self.0[0] * s, self.0[1] * s])
    }
    pub fn add(&self, o: &Spinor) -> Spinor {
        Spinor([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl CoSpinor {
    pub fn new(a: C, b: C) -> Self {
        CoSpinor([a, b])
    }
    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }
    pub fn lowered(&self) -> [C; 2] {
        [self.0[1] * cr(EPS[1][0]), self.0[0] * cr(EPS[0][1])]
    }
    pub fn scale(&self, s: C) -> CoSpinor {
        CoSpinor([self.0[0] * s, self.0[1] * s])
    }
    pub fn add(&self, o: &CoSpinor) -> CoSpinor {
        CoSpinor([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

/// skew pairing lambda^a eps_{ab} mu^b
pub fn skew(a: &Spinor, b: &Spinor) -> C {
    a.0[0] * b.0[1] - a.0[1] * b.0[0]
}

pub fn skew_co(a: &CoSpinor, b: &CoSpinor) -> C {
    a.0[0] * b.0[1] - a.0[1] * b.0[0]
}

/// Point or tangent vector x^{alpha alphadot} of complexified spacetime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bispinor {
    pub m: [[C; 2]; 2],
}

impl Bispinor {
    pub fn zero() -> Self {
        Bispinor { m: [[cr(0.0); 2]; 2] }
    }
    pub fn from_rows(r0: [C; 2], r1: [C; 2]) -> Self {
        Bispinor { m: [r0, r1] }
    }
    pub fn det(&self) -> C {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }
    pub fn norm(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
    pub fn add(&self, o: &Bispinor) -> Bispinor {
        let mut m = self.m;
        for a in 0..2 {
            for ad in 0..2 {
                m[a][ad] += o.m[a][ad];
            }
        }
        Bispinor { m }
    }
    pub fn sub(&self, o: &Bispinor) -> Bispinor {
        let mut m = self.m;
        for a in 0..2 {
            for ad in 0..2 {
                m[a][ad] -= o.m[a][ad];
            }
        }
        Bispinor { m }
    }
    pub fn scale(&self, s: C) -> Bispinor {
        let mut m = self.m;
        for row in m.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        Bispinor { m }
    }
    /// x_{alpha alphadot} = x^{beta betadot} eps_{beta alpha} eps_{betadot alphadot};
    /// with this convention the gradient of det x is the lowered x itself.
    pub fn lowered(&self) -> [[C; 2]; 2] {
        [
            [self.m[1][1], -self.m[1][0]],
            [-self.m[0][1], self.m[0][0]],
        ]
    }
    /// Full contraction v^{a ad} w_{a ad}; equals 2 det v when w = v.
    pub fn pair(&self, other: &Bispinor) -> C {
        let lo = other.lowered();
        let mut s = cr(0.0);
        for a in 0..2 {
            for ad in 0..2 {
                s += self.m[a][ad] * lo[a][ad];
            }
        }
        s
    }
}

/// Spinor-metric convention block: raising, lowering and the identity
/// eps^{ab} eps_{bc} = -delta^a_c live here so the convention is testable
/// in one place.
pub struct EpsilonConvention;

impl EpsilonConvention {
    /// lambda^a = eps^{ab} lambda_b
    pub fn raise(lowered: [C; 2]) -> [C; 2] {
        [lowered[1] * cr(EPS[0][1]), lowered[0] * cr(EPS[1][0])]
    }

    /// max |eps^{ab} eps_{bc} + delta^a_c| over all a, c
    pub fn self_consistency_residual() -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..2 {
            for cc in 0..2 {
                let mut s = 0.0;
                for b in 0..2 {
                    s += EPS[a][b] * EPS[b][cc];
                }
                let target = if a == cc { -1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Round trip lower-then-raise.
    pub fn roundtrip_residual(s: &Spinor) -> f64 {
        let r = Self::raise(s.lowered());
        ((r[0] - s.0[0]).norm_sqr() + (r[1] - s.0[1]).norm_sqr()).sqrt()
    }
}

/// v^{a ad} = lambda^a lambdatilde^{ad}; rank one, so det = 0 exactly.
pub fn outer(l: &Spinor, lt: &CoSpinor) -> Bispinor {
    let mut m = [[cr(0.0); 2]; 2];
    for a in 0..2 {
        for ad in 0..2 {
            m[a][ad] = l.0[a] * lt.0[ad];
        }
    }
    Bispinor { m }
}

/// Factor a null bispinor as outer(lambda, lambdatilde). The largest-modulus
/// component of lambda is pinned to 1; the overall scale rides on the
/// cospinor.
pub fn factor_null(v: &Bispinor, tol: f64) -> Result<(Spinor, CoSpinor)> {
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    let det_abs = v.det().norm();
    if det_abs > tol * n * n {
        return Err(Error::NotNull { det_abs, tol: tol * n * n });
    }
    let mut pa = 0;
    let mut pd = 0;
    let mut best = 0.0;
    for a in 0..2 {
        for ad in 0..2 {
            let m = v.m[a][ad].norm();
            if m > best {
                best = m;
                pa = a;
                pd = ad;
            }
        }
    }
    let pivot = v.m[pa][pd];
    let l = Spinor([v.m[0][pd] / pivot, v.m[1][pd] / pivot]);
    let lt = CoSpinor(v.m[pa]);
    Ok((l, lt))
}

/// Pivot-normalized representative of a projective spinor.
pub fn normalize_proj(s: [C; 2]) -> Result<[C; 2]> {
    let pivot = if s[0].norm() >= s[1].norm() { s[0] } else { s[1] };
    if pivot.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok([s[0] / pivot, s[1] / pivot])
}

/// Distance between projective classes after pivot normalization.
pub fn proj_distance(a: [C; 2], b: [C; 2]) -> Result<f64> {
    let na = normalize_proj(a)?;
    let nb = normalize_proj(b)?;
    Ok(((na[0] - nb[0]).norm_sqr() + (na[1] - nb[1]).norm_sqr()).sqrt())
}

/// Totally null 2-plane { base + mu (x) codir }.
#[derive(Clone, Copy, Debug)]
pub struct AlphaPlane {
    pub base: Bispinor,
    pub codir: CoSpinor,
}

impl AlphaPlane {
    pub fn new(base: Bispinor, codir: CoSpinor) -> Self {
        AlphaPlane { base, codir }
    }

    /// Chart point base + mu (x) codir.
    pub fn point(&self, mu: [C; 2]) -> Bispinor {
        self.base.add(&outer(&Spinor(mu), &self.codir))
    }

    /// Residual of the two scalar membership equations
    /// (p - base)^{a ad} codir_{ad} = 0, relative to scale.
    pub fn membership_residual(&self, p: &Bispinor) -> f64 {
        let d = p.sub(&self.base);
        let lo = self.codir.lowered();
        let e0 = d.m[0][0] * lo[0] + d.m[0][1] * lo[1];
        let e1 = d.m[1][0] * lo[0] + d.m[1][1] * lo[1];
        let scale = (1.0 + d.norm()) * self.codir.norm();
        (e0.norm_sqr() + e1.norm_sqr()).sqrt() / scale
    }

    /// Chart coordinates of a point assumed to lie on the plane.
    pub fn chart_coords(&self, p: &Bispinor) -> [C; 2] {
        // d = mu (x) codir; take the component along the largest codir entry.
        let d = p.sub(&self.base);
        let (j, piv) = if self.codir.0[0].norm() >= self.codir.0[1].norm() {
            (0, self.codir.0[0])
        } else {
            (1, self.codir.0[1])
        };
        [d.m[0][j] / piv, d.m[1][j] / piv]
    }
}

/// Null line { base + s dir_l (x) dir_r }.
#[derive(Clone, Copy, Debug)]
pub struct NullLine {
    pub base: Bispinor,
    pub dir_l: Spinor,
    pub dir_r: CoSpinor,
}

impl NullLine {
    pub fn new(base: Bispinor, dir_l: Spinor, dir_r: CoSpinor) -> Self {
        NullLine { base, dir_l, dir_r }
    }
    pub fn point(&self, s: C) -> Bispinor {
        self.base.add(&outer(&self.dir_l, &self.dir_r).scale(s))
    }
    pub fn tangent(&self) -> Bispinor {
        outer(&self.dir_l, &self.dir_r)
    }
}

/// Twistor (omega^alpha, pi) where pi stores the plane codirection with its
/// index up; incidence lowers it internally.
#[derive(Clone, Copy, Debug)]
pub struct Twistor {
    pub omega: [C; 2],
    pub pi: CoSpinor,
}

impl Twistor {
    pub fn components(&self) -> [C; 4] {
        [self.omega[0], self.omega[1], self.pi.0[0], self.pi.0[1]]
    }

    /// Projective distance on CP^3 after pivot normalization.
    pub fn proj_distance(&self, other: &Twistor) -> Result<f64> {
        let a = self.components();
        let b = other.components();
        let pick = |v: &[C; 4]| {
            let mut best = 0;
            for i in 1..4 {
                if v[i].norm() > v[best].norm() {
                    best = i;
                }
            }
            best
        };
        let ia = pick(&a);
        if a[ia].norm() == 0.0 || b[pick(&b)].norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        // normalize both on the same pivot slot chosen from a
        if b[ia].norm() == 0.0 {
            return Ok(f64::INFINITY);
        }
        let mut d2 = 0.0;
        for i in 0..4 {
            let x = a[i] / a[ia] - b[i] / b[ia];
            d2 += x.norm_sqr();
        }
        Ok(d2.sqrt())
    }
}

/// omega^a = x^{a ad} pi_{ad} with pi = codir; constant on the alpha-plane
/// through x with that codirection.
pub fn incidence(x: &Bispinor, codir: &CoSpinor) -> Result<Twistor> {
    if codir.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let lo = codir.lowered();
    let omega = [
        x.m[0][0] * lo[0] + x.m[0][1] * lo[1],
        x.m[1][0] * lo[0] + x.m[1][1] * lo[1],
    ];
    Ok(Twistor { omega, pi: *codir })
}

/// Finite intersection point of two alpha-planes with distinct codirections,
/// found by solving the 2x2 incidence system row by row.
pub fn plane_intersect(z: &AlphaPlane, w: &AlphaPlane, tol: f64) -> Result<Bispinor> {
    let nz = z.codir.norm();
    let nw = w.codir.norm();
    if nz == 0.0 || nw == 0.0 {
        return Err(Error::ZeroVector);
    }
    let det = skew_co(&z.codir, &w.codir);
    if det.norm() <= tol * nz * nw {
        return Err(Error::ParallelPlanes);
    }
    // mu^a codirZ - nu^a codirW = (baseW - baseZ) row a
    let rhs = w.base.sub(&z.base);
    let mut mu = [cr(0.0); 2];
    for a in 0..2 {
        // [zc0 -wc0; zc1 -wc1] [mu; nu] = [r0; r1]
        let r0 = rhs.m[a][0];
        let r1 = rhs.m[a][1];
        let d = z.codir.0[0] * (-w.codir.0[1]) - (-w.codir.0[0]) * z.codir.0[1];
        if d.norm() == 0.0 {
            return Err(Error::AtInfinity);
        }
        mu[a] = (r0 * (-w.codir.0[1]) - (-w.codir.0[0]) * r1) / d;
    }
    let p = z.point(mu);
    Ok(p)
}
