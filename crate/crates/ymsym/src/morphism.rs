//! Maps on the correspondence spaces: self-dual morphisms on C^4 x CP^1 and
//! causal morphisms on the six-dimensional bosonic space, with prolongation,
//! contact-condition certification and contraction machinery.
//!
//! An immersed surface whose tangent columns share a codirection everywhere
//! is necessarily an alpha-plane piece (equality of mixed partials forces
//! the codirection to be constant), so the certification suite combines flat
//! planes under curved charts with genuinely curved null *curves*; that
//! covers every structure a contact-preserving map must respect.

use crate::error::{Error, Result};
use crate::mat::{cr, C};
use crate::rng::Rng;
use crate::spinor::{
    factor_null, outer, proj_distance, AlphaPlane, Bispinor, CoSpinor, NullLine, Spinor,
};
use std::sync::Arc;

pub type C2 = [C; 2];

/// Linear map on bispinors, stored on the flattened index 2*alpha+alphadot.
#[derive(Clone, Copy, Debug)]
pub struct LinMap(pub [[C; 4]; 4]);

impl LinMap {
    pub fn apply(&self, v: &Bispinor) -> Bispinor {
        let flat = [v.m[0][0], v.m[0][1], v.m[1][0], v.m[1][1]];
        let mut out = [cr(0.0); 4];
        for (r, row) in self.0.iter().enumerate() {
            for (k, coef) in row.iter().enumerate() {
                out[r] += *coef * flat[k];
            }
        }
        Bispinor::from_rows([out[0], out[1]], [out[2], out[3]])
    }

    /// v -> L v Lt^T as a linear map.
    pub fn kron(l: &[[C; 2]; 2], lt: &[[C; 2]; 2]) -> LinMap {
        let mut m = [[cr(0.0); 4]; 4];
        for b in 0..2 {
            for bd in 0..2 {
                for a in 0..2 {
                    for ad in 0..2 {
                        m[2 * b + bd][2 * a + ad] = l[b][a] * lt[bd][ad];
                    }
                }
            }
        }
        LinMap(m)
    }

    pub fn identity() -> LinMap {
        let mut m = [[cr(0.0); 4]; 4];
        for k in 0..4 {
            m[k][k] = cr(1.0);
        }
        LinMap(m)
    }

    pub fn compose(&self, inner: &LinMap) -> LinMap {
        let mut m = [[cr(0.0); 4]; 4];
        for r in 0..4 {
            for k in 0..4 {
                for j in 0..4 {
                    m[r][k] += self.0[r][j] * inner.0[j][k];
                }
            }
        }
        LinMap(m)
    }
}

pub type SdEvalFn =
    Arc<dyn Fn(&Bispinor, &CoSpinor) -> Result<(Bispinor, CoSpinor)> + Send + Sync>;
pub type SdJacFn = Arc<dyn Fn(&Bispinor, &CoSpinor) -> Result<LinMap> + Send + Sync>;

/// Holomorphic map of the self-dual correspondence space. `jac`, when
/// present, is the derivative of the spacetime image in x at fixed fiber.
#[derive(Clone)]
pub struct SelfDualMorphism {
    pub eval: SdEvalFn,
    pub jac: Option<SdJacFn>,
}

impl SelfDualMorphism {
    pub fn apply(&self, x: &Bispinor, lt: &CoSpinor) -> Result<(Bispinor, CoSpinor)> {
        (self.eval)(x, lt)
    }

    pub fn point_image(&self, x: &Bispinor, lt: &CoSpinor) -> Result<Bispinor> {
        Ok(self.apply(x, lt)?.0)
    }

    pub fn fiber_image(&self, x: &Bispinor, lt: &CoSpinor) -> Result<CoSpinor> {
        Ok(self.apply(x, lt)?.1)
    }
}

pub fn identity_sd() -> SelfDualMorphism {
    let eval: SdEvalFn = Arc::new(|x, lt| Ok((*x, *lt)));
    let jac: SdJacFn = Arc::new(|_, _| Ok(LinMap::identity()));
    SelfDualMorphism { eval, jac: Some(jac) }
}

fn det2(m: &[[C; 2]; 2]) -> C {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn mat2_apply(m: &[[C; 2]; 2], v: [C; 2]) -> [C; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn affine_point(l: &[[C; 2]; 2], lt: &[[C; 2]; 2], b: &Bispinor, x: &Bispinor) -> Bispinor {
    // L x Lt^T + b
    let mut m = [[cr(0.0); 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            let mut acc = b.m[r][s];
            for a in 0..2 {
                for ad in 0..2 {
                    acc += l[r][a] * x.m[a][ad] * lt[s][ad];
                }
            }
            m[r][s] = acc;
        }
    }
    Bispinor { m }
}

/// Point transformation (x, lt) -> (L x Lt^T + b, Lt lt) lifted to the
/// correspondence space; constant analytic Jacobian L (x) Lt.
pub fn lifted_affine_sd(
    l: [[C; 2]; 2],
    lt: [[C; 2]; 2],
    b: Bispinor,
) -> Result<SelfDualMorphism> {
    if det2(&l).norm() < 1e-12 || det2(&lt).norm() < 1e-12 {
        return Err(Error::SingularMatrix);
    }
    let (l2, lt2) = (l, lt);
    let eval: SdEvalFn = Arc::new(move |x, fib| {
        Ok((affine_point(&l2, &lt2, &b, x), CoSpinor(mat2_apply(&lt2, fib.0))))
    });
    let jac: SdJacFn = Arc::new(move |_, _| Ok(LinMap::kron(&l, &lt)));
    Ok(SelfDualMorphism { eval, jac: Some(jac) })
}

/// Seeded random affine lift near the identity.
pub fn lifted_affine_sd_random(seed: u64, spread: f64) -> SelfDualMorphism {
    let mut rng = Rng::new(seed);
    let l = rng.gl2_near_identity(spread);
    let lt = rng.gl2_near_identity(spread);
    let b = rng.ball_point(&Bispinor::zero(), spread);
    lifted_affine_sd(l, lt, b).expect("near-identity matrices are invertible")
}

/// Negative control: componentwise squaring of the point, fiber untouched.
/// Image tangents fail nullity on generic surfaces.
pub fn squaring_sd() -> SelfDualMorphism {
    let eval: SdEvalFn = Arc::new(|x, lt| {
        let mut m = x.m;
        for row in m.iter_mut() {
            for z in row.iter_mut() {
                *z = *z * *z;
            }
        }
        Ok((Bispinor { m }, *lt))
    });
    let jac: SdJacFn = Arc::new(|x, _| {
        let mut m = [[cr(0.0); 4]; 4];
        for a in 0..2 {
            for ad in 0..2 {
                m[2 * a + ad][2 * a + ad] = cr(2.0) * x.m[a][ad];
            }
        }
        Ok(LinMap(m))
    });
    SelfDualMorphism { eval, jac: Some(jac) }
}

/// Negative control: fiber-dependent translation. Preserves contact but the
/// sampled pullback is not additive in the fiber, so component assembly
/// rejects it. The shift ratio is projective and finite away from
/// lt = (1, +-i).
pub fn fiber_shift_sd(shift: Bispinor) -> SelfDualMorphism {
    let eval: SdEvalFn = Arc::new(move |x, lt| {
        let den = lt.0[0] * lt.0[0] + lt.0[1] * lt.0[1];
        if den.norm() < 1e-12 * lt.norm() * lt.norm() {
            return Err(Error::SingularEvaluation { at: "fiber chart".into() });
        }
        let ratio = lt.0[0] * lt.0[1] / den;
        Ok((x.add(&shift.scale(ratio)), *lt))
    });
    let jac: SdJacFn = Arc::new(|_, _| Ok(LinMap::identity()));
    SelfDualMorphism { eval, jac: Some(jac) }
}

pub fn compose_sd(outer_f: &SelfDualMorphism, inner_f: &SelfDualMorphism) -> SelfDualMorphism {
    let fo = outer_f.clone();
    let fi = inner_f.clone();
    let eval: SdEvalFn = Arc::new(move |x, lt| {
        let (y, mt) = fi.apply(x, lt)?;
        fo.apply(&y, &mt)
    });
    // chain rule needs the outer jac at the image fiber; valid whenever the
    // inner fiber image is x-independent, which holds across the catalog
    let jac = match (&outer_f.jac, &inner_f.jac) {
        (Some(jo), Some(ji)) => {
            let jo = jo.clone();
            let ji = ji.clone();
            let fi = inner_f.clone();
            let j: SdJacFn = Arc::new(move |x, lt| {
                let (y, mt) = fi.apply(x, lt)?;
                Ok(jo(&y, &mt)?.compose(&ji(x, lt)?))
            });
            Some(j)
        }
        _ => None,
    };
    SelfDualMorphism { eval, jac }
}

// ---------------------------------------------------------------------------
// Surfaces, prolongation, contact
// ---------------------------------------------------------------------------

pub type SurfaceEvalFn = Arc<dyn Fn(C2) -> Result<Bispinor> + Send + Sync>;
pub type SurfacePushFn = Arc<dyn Fn(C2) -> Result<[Bispinor; 2]> + Send + Sync>;

/// Candidate totally null embedding chi: C^2 -> C^4 with its chart
/// pushforward (Jacobian columns).
#[derive(Clone)]
pub struct SurfaceMap {
    pub eval: SurfaceEvalFn,
    pub pushforward: SurfacePushFn,
}

impl SurfaceMap {
    /// Build from the evaluator alone; columns by Richardson central
    /// differences in the chart.
    pub fn from_eval(eval: SurfaceEvalFn) -> Self {
        let e = eval.clone();
        let pushforward: SurfacePushFn = Arc::new(move |t| {
            Ok([fd_chart(&e, t, 0, 1e-4)?, fd_chart(&e, t, 1, 1e-4)?])
        });
        SurfaceMap { eval, pushforward }
    }
}

/// Central difference with one Richardson level along a chart direction.
pub fn fd_chart(
    f: &SurfaceEvalFn,
    t: C2,
    dir: usize,
    h: f64,
) -> Result<Bispinor> {
    let shift = |tt: C2, d: f64| -> C2 {
        let mut s = tt;
        s[dir] += cr(d);
        s
    };
    let d_at = |hh: f64| -> Result<Bispinor> {
        let p = f(shift(t, hh))?;
        let m = f(shift(t, -hh))?;
        Ok(p.sub(&m).scale(cr(1.0 / (2.0 * hh))))
    };
    let d1 = d_at(h)?;
    let d2 = d_at(h / 2.0)?;
    Ok(d2.scale(cr(4.0 / 3.0)).sub(&d1.scale(cr(1.0 / 3.0))))
}

/// A surface together with its claimed tangent codirection.
#[derive(Clone)]
pub struct Prolongation {
    pub surface: SurfaceMap,
    pub codir: Arc<dyn Fn(C2) -> Result<CoSpinor> + Send + Sync>,
}

/// Extract the common cospinor factor of both Jacobian columns at t,
/// reporting the fit residual.
pub fn prolong(chi: &SurfaceMap, t: C2, tol: f64) -> Result<(CoSpinor, f64)> {
    let cols = (chi.pushforward)(t)?;
    let (_, lt1) = factor_null(&cols[0], tol)?;
    let (_, lt2) = factor_null(&cols[1], tol)?;
    let d = proj_distance(lt1.0, lt2.0)?;
    if d > tol.max(1e-8) * 10.0 {
        return Err(Error::NoCommonFactor { defect: d });
    }
    Ok((lt1, d))
}

/// Residual report for a contact-condition check.
#[derive(Clone, Debug, Default)]
pub struct ContactReport {
    pub max_residual: f64,
    pub mean_residual: f64,
    pub samples: usize,
    pub errors: Vec<String>,
}

impl ContactReport {
    fn absorb(&mut self, r: f64) {
        self.max_residual = self.max_residual.max(r);
        self.mean_residual += r;
        self.samples += 1;
    }

    fn finish(mut self) -> Self {
        if self.samples > 0 {
            self.mean_residual /= self.samples as f64;
        }
        self
    }
}

/// Check that f composed with the prolongation still satisfies the contact
/// condition: image columns null, sharing a factor, and that factor equal to
/// the image fiber. Residuals are relative; the report keeps the worst.
pub fn check_contact(
    f: &SelfDualMorphism,
    prol: &Prolongation,
    samples: &[C2],
    _tol: f64,
) -> ContactReport {
    let mut report = ContactReport::default();
    for &t in samples {
        let r = contact_residual_at(f, prol, t);
        match r {
            Ok(res) => report.absorb(res),
            Err(e) => report.errors.push(format!("t = {t:?}: {e}")),
        }
    }
    report.finish()
}

fn contact_residual_at(f: &SelfDualMorphism, prol: &Prolongation, t: C2) -> Result<f64> {
    let f2 = f.clone();
    let surf = prol.surface.clone();
    let codir = prol.codir.clone();
    let image: SurfaceEvalFn = Arc::new(move |tt| {
        let x = (surf.eval)(tt)?;
        let lt = codir(tt)?;
        f2.point_image(&x, &lt)
    });
    let c0 = fd_chart(&image, t, 0, 1e-4)?;
    let c1 = fd_chart(&image, t, 1, 1e-4)?;
    let x = (prol.surface.eval)(t)?;
    let lt = (prol.codir)(t)?;
    let mu = f.fiber_image(&x, &lt)?;

    let mut res = 0.0f64;
    let mut common: Option<CoSpinor> = None;
    for c in [&c0, &c1] {
        let n = c.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        res = res.max(c.det().norm() / (n * n));
        if let Ok((_, f1)) = factor_null(c, 1e-2) {
            match &common {
                None => common = Some(f1),
                Some(prev) => res = res.max(proj_distance(prev.0, f1.0)?),
            }
        }
    }
    if let Some(cf) = common {
        res = res.max(proj_distance(cf.0, mu.0)?);
    }
    Ok(res)
}

/// Contraction of f along a fixed alpha-plane, presented in the plane's own
/// chart: mu -> first component of f(base + mu (x) codir, codir).
pub fn contract_plane(f: &SelfDualMorphism, plane: &AlphaPlane) -> SurfaceMap {
    let f2 = f.clone();
    let pl = *plane;
    let eval: SurfaceEvalFn = Arc::new(move |mu| f2.point_image(&pl.point(mu), &pl.codir));
    match &f.jac {
        Some(j) => {
            let j = j.clone();
            let pl = *plane;
            let pushforward: SurfacePushFn = Arc::new(move |mu| {
                let x = pl.point(mu);
                let jm = j(&x, &pl.codir)?;
                let e0 = outer(&Spinor::new(cr(1.0), cr(0.0)), &pl.codir);
                let e1 = outer(&Spinor::new(cr(0.0), cr(1.0)), &pl.codir);
                Ok([jm.apply(&e0), jm.apply(&e1)])
            });
            SurfaceMap { eval, pushforward }
        }
        None => SurfaceMap::from_eval(eval),
    }
}

// ---------------------------------------------------------------------------
// Causal morphisms and null curves
// ---------------------------------------------------------------------------

pub type CausalEvalFn = Arc<
    dyn Fn(&Bispinor, &Spinor, &CoSpinor) -> Result<(Bispinor, Spinor, CoSpinor)> + Send + Sync,
>;
pub type CausalJacFn = Arc<dyn Fn(&Bispinor, &Spinor, &CoSpinor) -> Result<LinMap> + Send + Sync>;

/// Map on the bosonic correspondence space (x, lambda, lambdatilde).
#[derive(Clone)]
pub struct CausalMorphism {
    pub eval: CausalEvalFn,
    pub jac: Option<CausalJacFn>,
}

impl CausalMorphism {
    pub fn apply(
        &self,
        x: &Bispinor,
        l: &Spinor,
        lt: &CoSpinor,
    ) -> Result<(Bispinor, Spinor, CoSpinor)> {
        (self.eval)(x, l, lt)
    }
}

pub fn identity_causal() -> CausalMorphism {
    let eval: CausalEvalFn = Arc::new(|x, l, lt| Ok((*x, *l, *lt)));
    let jac: CausalJacFn = Arc::new(|_, _, _| Ok(LinMap::identity()));
    CausalMorphism { eval, jac: Some(jac) }
}

pub fn lifted_affine_causal(
    l: [[C; 2]; 2],
    lt: [[C; 2]; 2],
    b: Bispinor,
) -> Result<CausalMorphism> {
    if det2(&l).norm() < 1e-12 || det2(&lt).norm() < 1e-12 {
        return Err(Error::SingularMatrix);
    }
    let eval: CausalEvalFn = Arc::new(move |x, sl, slt| {
        Ok((
            affine_point(&l, &lt, &b, x),
            Spinor(mat2_apply(&l, sl.0)),
            CoSpinor(mat2_apply(&lt, slt.0)),
        ))
    });
    let jac: CausalJacFn = Arc::new(move |_, _, _| Ok(LinMap::kron(&l, &lt)));
    Ok(CausalMorphism { eval, jac: Some(jac) })
}

pub fn squaring_causal() -> CausalMorphism {
    let eval: CausalEvalFn = Arc::new(|x, l, lt| {
        let mut m = x.m;
        for row in m.iter_mut() {
            for z in row.iter_mut() {
                *z = *z * *z;
            }
        }
        Ok((Bispinor { m }, *l, *lt))
    });
    CausalMorphism { eval, jac: None }
}

pub type CurveEvalFn = Arc<dyn Fn(C) -> Result<Bispinor> + Send + Sync>;

/// Parameterized curve in C^4 (bosonic projection of a null curve).
#[derive(Clone)]
pub struct NullCurve {
    pub eval: CurveEvalFn,
    /// analytic velocity when available
    pub velocity: Option<Arc<dyn Fn(C) -> Result<Bispinor> + Send + Sync>>,
}

impl NullCurve {
    pub fn velocity_at(&self, s: C) -> Result<Bispinor> {
        if let Some(v) = &self.velocity {
            return v(s);
        }
        let e = self.eval.clone();
        let d_at = |h: f64| -> Result<Bispinor> {
            let p = e(s + cr(h))?;
            let m = e(s - cr(h))?;
            Ok(p.sub(&m).scale(cr(1.0 / (2.0 * h))))
        };
        let d1 = d_at(1e-4)?;
        let d2 = d_at(5e-5)?;
        Ok(d2.scale(cr(4.0 / 3.0)).sub(&d1.scale(cr(1.0 / 3.0))))
    }
}

/// A curve in the causal correspondence space: base curve plus claimed
/// tangent spinor pair.
#[derive(Clone)]
pub struct ProlongedCurve {
    pub curve: NullCurve,
    pub dir_l: Arc<dyn Fn(C) -> Result<Spinor> + Send + Sync>,
    pub dir_r: Arc<dyn Fn(C) -> Result<CoSpinor> + Send + Sync>,
}

/// Factor the curve tangent as an outer product.
pub fn prolong_null_curve(curve: &NullCurve, s: C, tol: f64) -> Result<(Spinor, CoSpinor)> {
    let v = curve.velocity_at(s)?;
    factor_null(&v, tol)
}

/// Contact check for a causal morphism along a prolonged curve: image
/// tangent must stay rank one with factors matching the image fibers.
pub fn check_contact_causal(
    f: &CausalMorphism,
    pc: &ProlongedCurve,
    samples: &[C],
    _tol: f64,
) -> ContactReport {
    let mut report = ContactReport::default();
    for &s in samples {
        match causal_residual_at(f, pc, s) {
            Ok(r) => report.absorb(r),
            Err(e) => report.errors.push(format!("s = {s}: {e}")),
        }
    }
    report.finish()
}

fn causal_residual_at(f: &CausalMorphism, pc: &ProlongedCurve, s: C) -> Result<f64> {
    let f2 = f.clone();
    let pc2 = pc.clone();
    let image = NullCurve {
        eval: Arc::new(move |ss| {
            let x = (pc2.curve.eval)(ss)?;
            let l = (pc2.dir_l)(ss)?;
            let lt = (pc2.dir_r)(ss)?;
            Ok(f2.apply(&x, &l, &lt)?.0)
        }),
        velocity: None,
    };
    let v = image.velocity_at(s)?;
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut res = v.det().norm() / (n * n);
    let x = (pc.curve.eval)(s)?;
    let l = (pc.dir_l)(s)?;
    let lt = (pc.dir_r)(s)?;
    let (_, ml, mlt) = f.apply(&x, &l, &lt)?;
    if let Ok((fl, flt)) = factor_null(&v, 1e-2) {
        res = res.max(proj_distance(fl.0, ml.0)?);
        res = res.max(proj_distance(flt.0, mlt.0)?);
    }
    Ok(res)
}

/// Spacetime curve induced by f on a fixed null line.
pub fn contract_line(f: &CausalMorphism, line: &NullLine) -> NullCurve {
    let f2 = f.clone();
    let ln = *line;
    NullCurve {
        eval: Arc::new(move |s| Ok(f2.apply(&ln.point(s), &ln.dir_l, &ln.dir_r)?.0)),
        velocity: None,
    }
}

// ---------------------------------------------------------------------------
// Certification suite
// ---------------------------------------------------------------------------

/// Fourth-order integration of an antiderivative along the ray 0 -> t.
fn rk4_ray<G>(g: &G, t: C, steps: usize) -> Bispinor
where
    G: Fn(C) -> Bispinor,
{
    // d/ds x(s t) = t g(s t), s in [0, 1]
    let mut x = Bispinor::zero();
    let h = 1.0 / steps as f64;
    for k in 0..steps {
        let s0 = cr(k as f64 * h);
        let f = |s: C| g(s * t).scale(t * cr(1.0));
        let k1 = f(s0);
        let k2 = f(s0 + cr(h / 2.0));
        let k3 = k2;
        let k4 = f(s0 + cr(h));
        let incr = k1
            .add(&k2.scale(cr(2.0)))
            .add(&k3.scale(cr(2.0)))
            .add(&k4)
            .scale(cr(h / 6.0));
        x = x.add(&incr);
    }
    x
}

/// Flat plane under a linear chart.
pub fn flat_prolongation(plane: AlphaPlane) -> Prolongation {
    let pl = plane;
    let eval: SurfaceEvalFn = Arc::new(move |t| Ok(pl.point(t)));
    let pushforward: SurfacePushFn = Arc::new(move |_| {
        Ok([
            outer(&Spinor::new(cr(1.0), cr(0.0)), &pl.codir),
            outer(&Spinor::new(cr(0.0), cr(1.0)), &pl.codir),
        ])
    });
    Prolongation {
        surface: SurfaceMap { eval, pushforward },
        codir: Arc::new(move |_| Ok(pl.codir)),
    }
}

/// Flat plane under a curved chart whose base curve is integrated with a
/// fourth-order scheme: chi(t) = c(t0) + mu(t) (x) codir with
/// c'(u) = n(u) (x) codir.
pub fn curved_chart_prolongation(plane: AlphaPlane, bend: f64) -> Prolongation {
    let pl = plane;
    let n_fn = move |u: C| Spinor::new(cr(1.0) + cr(bend) * u * u, cr(0.25) * u);
    let mu_fn = move |t: C2| Spinor::new(t[1] + cr(bend) * t[0] * t[1], t[1] * t[1] * cr(0.5) + t[0]);
    let eval: SurfaceEvalFn = Arc::new(move |t| {
        let g = |u: C| outer(&n_fn(u), &pl.codir);
        let base = pl.base.add(&rk4_ray(&g, t[0], 16));
        Ok(base.add(&outer(&mu_fn(t), &pl.codir)))
    });
    let pushforward: SurfacePushFn = Arc::new(move |t| {
        let d0 = n_fn(t[0])
            .add(&Spinor::new(cr(bend) * t[1], cr(1.0)));
        let d1 = Spinor::new(cr(1.0) + cr(bend) * t[0], t[1]);
        Ok([outer(&d0, &pl.codir), outer(&d1, &pl.codir)])
    });
    Prolongation {
        surface: SurfaceMap { eval, pushforward },
        codir: Arc::new(move |_| Ok(pl.codir)),
    }
}

/// Deterministic sample grid in the chart bidisc.
pub fn chart_samples(seed: u64, count: usize, radius: f64) -> Vec<C2> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|_| {
            [
                rng.complex_unit() * cr(radius),
                rng.complex_unit() * cr(radius),
            ]
        })
        .collect()
}

/// The standing suite: three flat-plane prolongations plus two curved-chart
/// members, 25 samples each.
pub fn certification_suite(seed: u64) -> Vec<(Prolongation, Vec<C2>)> {
    let mut rng = Rng::new(seed);
    let mut suite = Vec::new();
    let codirs = [
        CoSpinor::new(cr(1.0), cr(0.0)),
        CoSpinor::new(cr(0.3), cr(1.0)),
        CoSpinor::new(cr(1.0), cr(-0.7)),
    ];
    for (k, cd) in codirs.iter().enumerate() {
        let base = rng.ball_point(&Bispinor::zero(), 0.5);
        suite.push((
            flat_prolongation(AlphaPlane::new(base, *cd)),
            chart_samples(seed.wrapping_add(k as u64), 25, 0.5),
        ));
    }
    for (k, bend) in [0.35, -0.2].iter().enumerate() {
        let base = rng.ball_point(&Bispinor::zero(), 0.5);
        let cd = rng.cospinor();
        suite.push((
            curved_chart_prolongation(AlphaPlane::new(base, cd), *bend),
            chart_samples(seed.wrapping_add(100 + k as u64), 25, 0.5),
        ));
    }
    suite
}

/// Run the contact suite and aggregate.
pub fn certify_sd(f: &SelfDualMorphism, seed: u64) -> ContactReport {
    let mut total = ContactReport::default();
    let mut means = 0.0;
    let mut members = 0;
    for (prol, samples) in certification_suite(seed) {
        let r = check_contact(f, &prol, &samples, 1e-8);
        total.max_residual = total.max_residual.max(r.max_residual);
        total.samples += r.samples;
        total.errors.extend(r.errors);
        means += r.mean_residual;
        members += 1;
    }
    total.mean_residual = if members > 0 { means / members as f64 } else { 0.0 };
    total
}

/// Genuinely curved null curve: x'(s) = lambda(s) (x) lambdatilde(s) with
/// lambdatilde(s) = (1, s), integrated with the fourth-order scheme.
pub fn curved_null_curve(base: Bispinor) -> ProlongedCurve {
    let l_fn = move |s: C| Spinor::new(cr(1.0), cr(0.3) * s);
    let lt_fn = move |s: C| CoSpinor::new(cr(1.0), s);
    let curve = NullCurve {
        eval: Arc::new(move |s| {
            let g = |u: C| outer(&l_fn(u), &lt_fn(u));
            Ok(base.add(&rk4_ray(&g, s, 16)))
        }),
        velocity: Some(Arc::new(move |s| Ok(outer(&l_fn(s), &lt_fn(s))))),
    };
    ProlongedCurve {
        curve,
        dir_l: Arc::new(move |s| Ok(l_fn(s))),
        dir_r: Arc::new(move |s| Ok(lt_fn(s))),
    }
}

pub fn straight_prolonged_line(line: NullLine) -> ProlongedCurve {
    let ln = line;
    ProlongedCurve {
        curve: NullCurve {
            eval: Arc::new(move |s| Ok(ln.point(s))),
            velocity: Some(Arc::new(move |_| Ok(ln.tangent()))),
        },
        dir_l: Arc::new(move |_| Ok(ln.dir_l)),
        dir_r: Arc::new(move |_| Ok(ln.dir_r)),
    }
}

/// Line-suite samples for causal certification.
pub fn curve_samples(seed: u64, count: usize, radius: f64) -> Vec<C> {
    let mut rng = Rng::new(seed);
    (0..count).map(|_| rng.complex_unit() * cr(radius)).collect()
}

pub fn certify_causal(f: &CausalMorphism, seed: u64) -> ContactReport {
    let mut rng = Rng::new(seed);
    let mut total = ContactReport::default();
    let mut means = 0.0;
    let mut members = 0;
    let mut run = |pc: &ProlongedCurve, s_seed: u64| {
        let samples = curve_samples(s_seed, 25, 0.6);
        let r = check_contact_causal(f, pc, &samples, 1e-8);
        total.max_residual = total.max_residual.max(r.max_residual);
        total.samples += r.samples;
        total.errors.extend(r.errors.clone());
        means += r.mean_residual;
        members += 1;
    };
    for k in 0..3u64 {
        let line = NullLine::new(
            rng.ball_point(&Bispinor::zero(), 0.5),
            rng.spinor(),
            rng.cospinor(),
        );
        run(&straight_prolonged_line(line), seed.wrapping_add(k));
    }
    for k in 0..2u64 {
        let base = rng.ball_point(&Bispinor::zero(), 0.5);
        run(&curved_null_curve(base), seed.wrapping_add(200 + k));
    }
    total.mean_residual = if members > 0 { means / members as f64 } else { 0.0 };
    total
}
