//! GL(n,C) gauge potentials on complexified spacetime: curvature in its
//! self-dual / anti-self-dual spinor blocks, Wilson-line integration, and a
//! catalog of verified example solutions.
//!
//! Convention: the "self-dual part" is the dotted-symmetric block
//! Ftilde_{adot bdot}; the anti-self-dual equations hold iff Ftilde = 0,
//! which is exactly curvature vanishing on every alpha-plane.

use crate::error::{Error, Result};
use crate::mat::{c, commutator, cr, expm, eye, fro, zeros, CMat, C};
use crate::spinor::{outer, skew, Bispinor, CoSpinor, Spinor};
use std::sync::Arc;

pub type EvalFn = Arc<dyn Fn(&Bispinor) -> Result<[CMat; 4]> + Send + Sync>;
pub type DerivFn = Arc<dyn Fn(&Bispinor) -> Result<[[CMat; 4]; 4]> + Send + Sync>;
pub type SingularFn = Arc<dyn Fn(&Bispinor) -> bool + Send + Sync>;

/// Component index (alpha, alphadot) -> flat 2*alpha + alphadot.
pub fn ci(a: usize, ad: usize) -> usize {
    2 * a + ad
}

/// Gauge potential A_{alpha alphadot}(x). `deriv`, when present, returns
/// d_{beta betadot} A_{alpha alphadot} indexed `[direction][component]`.
#[derive(Clone)]
pub struct GaugeField {
    pub n: usize,
    pub eval: EvalFn,
    pub deriv: Option<DerivFn>,
    pub singular: Option<SingularFn>,
}

impl GaugeField {
    pub fn is_singular_at(&self, x: &Bispinor) -> bool {
        self.singular.as_ref().map(|s| s(x)).unwrap_or(false)
    }

    pub fn eval_at(&self, x: &Bispinor) -> Result<[CMat; 4]> {
        if self.is_singular_at(x) {
            return Err(Error::SingularEvaluation { at: format!("{:?}", x.m) });
        }
        (self.eval)(x)
    }

    /// d_{beta betadot} A: analytic when available, else Richardson-extrapolated
    /// central differences along the complex coordinate directions.
    pub fn deriv_at(&self, x: &Bispinor, fd: &FdOpts) -> Result<[[CMat; 4]; 4]> {
        if let Some(d) = &self.deriv {
            if self.is_singular_at(x) {
                return Err(Error::SingularEvaluation { at: format!("{:?}", x.m) });
            }
            return d(x);
        }
        let mut out: Vec<[CMat; 4]> = Vec::with_capacity(4);
        for dir in 0..4 {
            out.push(fd_direction(&|p| self.eval_at(p), x, dir, fd)?);
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
    }
}

/// Finite-difference step plan. One Richardson level over central
/// differences; the defaults match first-level derivative use.
#[derive(Clone, Copy, Debug)]
pub struct FdOpts {
    pub h: f64,
}

impl Default for FdOpts {
    fn default() -> Self {
        FdOpts { h: 1e-4 }
    }
}

fn shift(x: &Bispinor, dir: usize, t: f64) -> Bispinor {
    let mut m = x.m;
    m[dir / 2][dir % 2] += cr(t);
    Bispinor { m }
}

/// Central difference with one Richardson level along one coordinate.
/// Holomorphy is exploited by differencing along the real axis of the
/// complex coordinate directly.
pub fn fd_direction<F>(f: &F, x: &Bispinor, dir: usize, fd: &FdOpts) -> Result<[CMat; 4]>
where
    F: Fn(&Bispinor) -> Result<[CMat; 4]>,
{
    let d_at = |h: f64| -> Result<[CMat; 4]> {
        let p = f(&shift(x, dir, h))?;
        let m = f(&shift(x, dir, -h))?;
        let mut out = Vec::with_capacity(4);
        for k in 0..4 {
            out.push((&p[k] - &m[k]).mapv(|z| z / cr(2.0 * h)));
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
    };
    let d1 = d_at(fd.h)?;
    let d2 = d_at(fd.h / 2.0)?;
    let mut out = Vec::with_capacity(4);
    let mut defect = 0.0f64;
    let mut scale = 1.0f64;
    for k in 0..4 {
        let r = (d2[k].mapv(|z| z * cr(4.0)) - &d1[k]).mapv(|z| z / cr(3.0));
        defect += fro(&(&d2[k] - &d1[k])).powi(2);
        scale += fro(&r).powi(2);
        if !r.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::DerivativeDivergence { defect: f64::INFINITY });
        }
        out.push(r);
    }
    let defect = defect.sqrt();
    if defect > 0.5 * scale.sqrt() {
        return Err(Error::DerivativeDivergence { defect });
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
}

/// Curvature in spinor blocks, both symmetric in their index pair:
/// F_{a ad b bd} = eps_{ab} f_sd_{ad bd} + eps_{ad bd} f_asd_{ab}.
#[derive(Clone, Debug)]
pub struct CurvatureSpinors {
    pub f_asd: [[CMat; 2]; 2],
    pub f_sd: [[CMat; 2]; 2],
}

impl CurvatureSpinors {
    /// Full tensor F_{a ad b bd} reassembled from the blocks.
    pub fn full(&self, a: usize, ad: usize, b: usize, bd: usize) -> CMat {
        let eps = |i: usize, j: usize| -> f64 {
            crate::spinor::EPS[i][j]
        };
        let mut m = self.f_sd[ad][bd].mapv(|z| z * cr(eps(a, b)));
        m = m + self.f_asd[a][b].mapv(|z| z * cr(eps(ad, bd)));
        m
    }

    /// F(v, w) = v^{a ad} w^{b bd} F_{a ad b bd}
    pub fn contract(&self, v: &Bispinor, w: &Bispinor) -> CMat {
        let n = self.f_sd[0][0].nrows();
        let mut out = zeros(n);
        for a in 0..2 {
            for ad in 0..2 {
                for b in 0..2 {
                    for bd in 0..2 {
                        let coef = v.m[a][ad] * w.m[b][bd];
                        if coef.norm() == 0.0 {
                            continue;
                        }
                        out = out + self.full(a, ad, b, bd).mapv(|z| z * coef);
                    }
                }
            }
        }
        out
    }

    pub fn sd_norm(&self) -> f64 {
        block_norm(&self.f_sd)
    }

    pub fn asd_norm(&self) -> f64 {
        block_norm(&self.f_asd)
    }
}

fn block_norm(b: &[[CMat; 2]; 2]) -> f64 {
    b.iter()
        .flatten()
        .map(|m| fro(m).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Curvature two-form of A at x, decomposed and symmetrized.
///
/// The commutator sign is tied to the Wilson ordering (later factors on the
/// left): with that ordering the holonomy of a small (u, v) parallelogram is
/// I + F(u, v) + O(eps^3) precisely for this sign, so plane flatness, path
/// independence and the vanishing dotted block all refer to one tensor.
pub fn curvature(field: &GaugeField, x: &Bispinor, fd: &FdOpts) -> Result<CurvatureSpinors> {
    let a = field.eval_at(x)?;
    let da = field.deriv_at(x, fd)?;
    let n = field.n;
    // F[c1][c2] with c = 2a+ad
    let mut f = vec![vec![zeros(n); 4]; 4];
    for c1 in 0..4 {
        for c2 in 0..4 {
            f[c1][c2] = &da[c1][c2] - &da[c2][c1] - commutator(&a[c1], &a[c2]);
        }
    }
    let mut f_asd = [[zeros(n), zeros(n)], [zeros(n), zeros(n)]];
    let mut f_sd = [[zeros(n), zeros(n)], [zeros(n), zeros(n)]];
    for al in 0..2 {
        for be in 0..2 {
            // 1/2 eps^{ad bd} F_{a ad b bd} = 1/2 (F_{a 0 b 1} - F_{a 1 b 0})
            f_asd[al][be] = (&f[ci(al, 0)][ci(be, 1)] - &f[ci(al, 1)][ci(be, 0)]).mapv(|z| z * cr(0.5));
        }
    }
    for ad in 0..2 {
        for bd in 0..2 {
            f_sd[ad][bd] = (&f[ci(0, ad)][ci(1, bd)] - &f[ci(1, ad)][ci(0, bd)]).mapv(|z| z * cr(0.5));
        }
    }
    // exact antisymmetry of F makes the blocks symmetric; symmetrize to shed rounding
    let sym = |b: &[[CMat; 2]; 2]| -> [[CMat; 2]; 2] {
        let s01 = (&b[0][1] + &b[1][0]).mapv(|z| z * cr(0.5));
        [[b[0][0].clone(), s01.clone()], [s01, b[1][1].clone()]]
    };
    Ok(CurvatureSpinors { f_asd: sym(&f_asd), f_sd: sym(&f_sd) })
}

/// Frobenius norm of the self-dual block; zero iff the field is
/// anti-self-dual at x.
pub fn asd_residual(field: &GaugeField, x: &Bispinor, fd: &FdOpts) -> Result<f64> {
    Ok(curvature(field, x, fd)?.sd_norm())
}

/// || F(v1, v2) || for v_i = outer(lambda_i, lt), two tangents of one
/// alpha-plane. Equals |<l1, l2>| * || lt lt Ftilde || by the block
/// decomposition; both routes are available for cross-checking.
pub fn plane_commutator_residual(
    field: &GaugeField,
    x: &Bispinor,
    l1: &Spinor,
    l2: &Spinor,
    lt: &CoSpinor,
    fd: &FdOpts,
) -> Result<f64> {
    if skew(l1, l2).norm() <= 1e-12 * l1.norm() * l2.norm() {
        return Err(Error::DegenerateSpan);
    }
    let f = curvature(field, x, fd)?;
    let v1 = outer(l1, lt);
    let v2 = outer(l2, lt);
    Ok(fro(&f.contract(&v1, &v2)))
}

/// eps-contraction route for the same quantity.
pub fn plane_commutator_via_blocks(
    f: &CurvatureSpinors,
    l1: &Spinor,
    l2: &Spinor,
    lt: &CoSpinor,
) -> f64 {
    let n = f.f_sd[0][0].nrows();
    let mut m = zeros(n);
    for ad in 0..2 {
        for bd in 0..2 {
            m = m + f.f_sd[ad][bd].mapv(|z| z * (lt.0[ad] * lt.0[bd]));
        }
    }
    skew(l1, l2).norm() * fro(&m)
}

// ---------------------------------------------------------------------------
// Wilson lines
// ---------------------------------------------------------------------------

pub type PathFn = Arc<dyn Fn(f64) -> Result<(Bispinor, Bispinor)> + Send + Sync>;

/// Piecewise-smooth parameterized curve on `[0, 1]`: sampler returns point and
/// velocity; refinement always lands on piece boundaries.
#[derive(Clone)]
pub struct PathSpec {
    pub sampler: PathFn,
    pub pieces: usize,
}

impl PathSpec {
    pub fn point(&self, t: f64) -> Result<Bispinor> {
        Ok((self.sampler)(t)?.0)
    }

    pub fn velocity(&self, t: f64) -> Result<Bispinor> {
        Ok((self.sampler)(t)?.1)
    }

    /// Polyline through the given vertices.
    pub fn polyline(points: Vec<Bispinor>) -> Self {
        assert!(points.len() >= 2);
        let pieces = points.len() - 1;
        let sampler: PathFn = Arc::new(move |t: f64| {
            let t = t.clamp(0.0, 1.0);
            let scaled = t * pieces as f64;
            let k = (scaled.floor() as usize).min(pieces - 1);
            let frac = scaled - k as f64;
            let a = points[k];
            let b = points[k + 1];
            let vel = b.sub(&a).scale(cr(pieces as f64));
            let p = a.add(&b.sub(&a).scale(cr(frac)));
            Ok((p, vel))
        });
        PathSpec { sampler, pieces }
    }

    /// Straight segment.
    pub fn segment(a: Bispinor, b: Bispinor) -> Self {
        Self::polyline(vec![a, b])
    }

    /// Closed parallelogram loop base -> base+u -> base+u+v -> base+v -> base.
    pub fn parallelogram(base: Bispinor, u: Bispinor, v: Bispinor) -> Self {
        let p1 = base.add(&u);
        let p2 = p1.add(&v);
        let p3 = base.add(&v);
        Self::polyline(vec![base, p1, p2, p3, base])
    }

    /// Image of the path under a point map; velocity by central differences
    /// in the parameter.
    pub fn mapped(
        &self,
        map: Arc<dyn Fn(&Bispinor) -> Result<Bispinor> + Send + Sync>,
    ) -> Self {
        let inner = self.sampler.clone();
        let pieces = self.pieces;
        let sampler: PathFn = Arc::new(move |t: f64| {
            let (p, _) = inner(t)?;
            let y = map(&p)?;
            let h = 1e-6;
            let tp = (t + h).min(1.0);
            let tm = (t - h).max(0.0);
            let yp = map(&inner(tp)?.0)?;
            let ym = map(&inner(tm)?.0)?;
            let vel = yp.sub(&ym).scale(cr(1.0 / (tp - tm)));
            Ok((y, vel))
        });
        PathSpec { sampler, pieces }
    }

    pub fn reversed(&self) -> Self {
        let inner = self.sampler.clone();
        let sampler: PathFn = Arc::new(move |t: f64| {
            let (p, v) = inner(1.0 - t)?;
            Ok((p, v.scale(cr(-1.0))))
        });
        PathSpec { sampler, pieces: self.pieces }
    }

    /// gamma2 after gamma1 (gamma1 runs first).
    pub fn then(&self, next: &PathSpec) -> Self {
        let a = self.sampler.clone();
        let b = next.sampler.clone();
        let na = self.pieces as f64;
        let nb = next.pieces as f64;
        let split = na / (na + nb);
        let pieces = self.pieces + next.pieces;
        let sampler: PathFn = Arc::new(move |t: f64| {
            if t <= split {
                let (p, v) = a(t / split)?;
                Ok((p, v.scale(cr(1.0 / split))))
            } else {
                let (p, v) = b((t - split) / (1.0 - split))?;
                Ok((p, v.scale(cr(1.0 / (1.0 - split)))))
            }
        });
        PathSpec { sampler, pieces }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WilsonOpts {
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for WilsonOpts {
    fn default() -> Self {
        WilsonOpts { tol: 1e-9, max_steps: 1 << 14 }
    }
}

/// Product of midpoint exponentials with a fixed number of subsegments per
/// piece; the factor at the later parameter multiplies on the left.
pub fn wilson_line_fixed(field: &GaugeField, path: &PathSpec, subdiv: usize) -> Result<CMat> {
    let total = path.pieces * subdiv;
    let mut w = eye(field.n);
    for k in 0..total {
        let t0 = k as f64 / total as f64;
        let t1 = (k + 1) as f64 / total as f64;
        let xm = path.point(0.5 * (t0 + t1))?;
        let a = field.eval_at(&xm)?;
        let x0 = path.point(t0)?;
        let x1 = path.point(t1)?;
        let dx = x1.sub(&x0);
        let mut step = zeros(field.n);
        for al in 0..2 {
            for ad in 0..2 {
                step = step + a[ci(al, ad)].mapv(|z| z * dx.m[al][ad]);
            }
        }
        w = expm(&step).dot(&w);
    }
    Ok(w)
}

/// Step-doubling path-ordered exponential along the path.
pub fn wilson_line(field: &GaugeField, path: &PathSpec, opts: &WilsonOpts) -> Result<CMat> {
    let mut subdiv = 4usize;
    let mut prev = wilson_line_fixed(field, path, subdiv)?;
    loop {
        subdiv *= 2;
        let cur = wilson_line_fixed(field, path, subdiv)?;
        let defect = fro(&(&cur - &prev));
        if defect < opts.tol {
            return Ok(cur);
        }
        if subdiv * path.pieces > opts.max_steps {
            return Err(Error::NoConvergence { steps: subdiv * path.pieces, defect });
        }
        prev = cur;
    }
}

/// Scalar quadrature of integral A . dx for n = 1 fields (two-point Gauss
/// per subinterval; nodes stay interior, so piecewise velocity jumps at the
/// polyline corners never contaminate a panel). Independent closed-form
/// oracle for the path-ordered product.
pub fn abelian_line_integral(field: &GaugeField, path: &PathSpec, subdiv: usize) -> Result<C> {
    assert_eq!(field.n, 1, "abelian oracle needs n = 1");
    let total = path.pieces * subdiv;
    let integrand = |t: f64| -> Result<C> {
        let (p, v) = (path.sampler)(t)?;
        let a = field.eval_at(&p)?;
        let mut s = cr(0.0);
        for al in 0..2 {
            for ad in 0..2 {
                s += a[ci(al, ad)][[0, 0]] * v.m[al][ad];
            }
        }
        Ok(s)
    };
    let off = 0.5 / 3.0f64.sqrt();
    let mut acc = cr(0.0);
    for k in 0..total {
        let t0 = k as f64 / total as f64;
        let h = 1.0 / total as f64;
        let tm = t0 + 0.5 * h;
        acc += (integrand(tm - off * h)? + integrand(tm + off * h)?) * cr(0.5 * h);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Example catalog
// ---------------------------------------------------------------------------

pub fn zero_field(n: usize) -> GaugeField {
    let eval: EvalFn = Arc::new(move |_x| Ok([zeros(n), zeros(n), zeros(n), zeros(n)]));
    let deriv: DerivFn = Arc::new(move |_x| {
        let row = [zeros(n), zeros(n), zeros(n), zeros(n)];
        Ok([row.clone(), row.clone(), row.clone(), row])
    });
    GaugeField { n, eval, deriv: Some(deriv), singular: None }
}

fn check_symmetric(f: &[[CMat; 2]; 2]) -> Result<()> {
    let defect = fro(&(&f[0][1] - &f[1][0]));
    if defect > 1e-12 * (1.0 + block_norm(f)) {
        return Err(Error::NonSymmetric { defect });
    }
    Ok(())
}

/// Linear potential A_{b bd} = 1/2 F_{bg} x^g_{bd} with constant symmetric
/// F; curvature is exactly (f_asd, f_sd) = (F, 0). Entries must commute
/// pairwise for the quadratic term to drop.
pub fn make_constant_asd(f: [[CMat; 2]; 2]) -> Result<GaugeField> {
    check_symmetric(&f)?;
    let n = f[0][0].nrows();
    let fc = f.clone();
    let eval: EvalFn = Arc::new(move |x| {
        let mut out = [zeros(n), zeros(n), zeros(n), zeros(n)];
        for b in 0..2 {
            // x^g_{0} = -x^{g 1}, x^g_{1} = x^{g 0}
            for g in 0..2 {
                out[ci(b, 0)] = &out[ci(b, 0)] + &fc[b][g].mapv(|z| z * (-x.m[g][1]) * cr(0.5));
                out[ci(b, 1)] = &out[ci(b, 1)] + &fc[b][g].mapv(|z| z * x.m[g][0] * cr(0.5));
            }
        }
        Ok(out)
    });
    let fd = f.clone();
    let deriv: DerivFn = Arc::new(move |_x| {
        // d_{a ad} A_{b bd} = 1/2 F_{ba} eps_{ad bd}
        let mut out: Vec<[CMat; 4]> = Vec::with_capacity(4);
        for dir in 0..4 {
            let a = dir / 2;
            let ad = dir % 2;
            let mut row = [zeros(n), zeros(n), zeros(n), zeros(n)];
            for b in 0..2 {
                for bd in 0..2 {
                    let e = crate::spinor::EPS[ad][bd];
                    if e != 0.0 {
                        row[ci(b, bd)] = fd[b][a].mapv(|z| z * cr(0.5 * e));
                    }
                }
            }
            out.push(row);
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
    });
    Ok(GaugeField { n, eval, deriv: Some(deriv), singular: None })
}

/// Mirror catalog entry with curvature (f_asd, f_sd) = (0, Ftilde):
/// A_{b bd} = 1/2 Ftilde_{bd gd} x_b^{gd}.
pub fn make_constant_sd(ft: [[CMat; 2]; 2]) -> Result<GaugeField> {
    check_symmetric(&ft)?;
    let n = ft[0][0].nrows();
    let fc = ft.clone();
    let eval: EvalFn = Arc::new(move |x| {
        let mut out = [zeros(n), zeros(n), zeros(n), zeros(n)];
        for bd in 0..2 {
            // x_0^{gd} = -x^{1 gd}, x_1^{gd} = x^{0 gd}
            for gd in 0..2 {
                out[ci(0, bd)] = &out[ci(0, bd)] + &fc[bd][gd].mapv(|z| z * (-x.m[1][gd]) * cr(0.5));
                out[ci(1, bd)] = &out[ci(1, bd)] + &fc[bd][gd].mapv(|z| z * x.m[0][gd] * cr(0.5));
            }
        }
        Ok(out)
    });
    let fd = ft.clone();
    let deriv: DerivFn = Arc::new(move |_x| {
        // d_{a ad} A_{b bd} = 1/2 Ftilde_{bd ad} eps_{a b}
        let mut out: Vec<[CMat; 4]> = Vec::with_capacity(4);
        for dir in 0..4 {
            let a = dir / 2;
            let ad = dir % 2;
            let mut row = [zeros(n), zeros(n), zeros(n), zeros(n)];
            for b in 0..2 {
                for bd in 0..2 {
                    let e = crate::spinor::EPS[a][b];
                    if e != 0.0 {
                        row[ci(b, bd)] = fd[bd][ad].mapv(|z| z * cr(0.5 * e));
                    }
                }
            }
            out.push(row);
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
    });
    Ok(GaugeField { n, eval, deriv: Some(deriv), singular: None })
}

/// Abelian field with both constant curvature blocks; solves the source-free
/// equations trivially. Used by the superspace embedding catalog.
pub fn make_constant_maxwell(f: [[C; 2]; 2], ft: [[C; 2]; 2]) -> Result<GaugeField> {
    let lift = |b: [[C; 2]; 2]| -> [[CMat; 2]; 2] {
        let m = |z: C| {
            let mut mm = zeros(1);
            mm[[0, 0]] = z;
            mm
        };
        [[m(b[0][0]), m(b[0][1])], [m(b[1][0]), m(b[1][1])]]
    };
    let fa = make_constant_asd(lift(f))?;
    let fs = make_constant_sd(lift(ft))?;
    Ok(sum_field(&fa, &fs))
}

/// Pointwise sum of two equal-rank potentials.
pub fn sum_field(a: &GaugeField, b: &GaugeField) -> GaugeField {
    assert_eq!(a.n, b.n);
    let n = a.n;
    let (ae, be) = (a.eval.clone(), b.eval.clone());
    let eval: EvalFn = Arc::new(move |x| {
        let u = ae(x)?;
        let v = be(x)?;
        Ok([&u[0] + &v[0], &u[1] + &v[1], &u[2] + &v[2], &u[3] + &v[3]])
    });
    let deriv = match (&a.deriv, &b.deriv) {
        (Some(da), Some(db)) => {
            let (da, db) = (da.clone(), db.clone());
            let d: DerivFn = Arc::new(move |x| {
                let u = da(x)?;
                let v = db(x)?;
                let mut out: Vec<[CMat; 4]> = Vec::with_capacity(4);
                for dir in 0..4 {
                    out.push([
                        &u[dir][0] + &v[dir][0],
                        &u[dir][1] + &v[dir][1],
                        &u[dir][2] + &v[dir][2],
                        &u[dir][3] + &v[dir][3],
                    ]);
                }
                Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
            });
            Some(d)
        }
        _ => None,
    };
    let singular = match (&a.singular, &b.singular) {
        (None, None) => None,
        (sa, sb) => {
            let sa = sa.clone();
            let sb = sb.clone();
            let s: SingularFn = Arc::new(move |x| {
                sa.as_ref().map(|f| f(x)).unwrap_or(false) || sb.as_ref().map(|f| f(x)).unwrap_or(false)
            });
            Some(s)
        }
    };
    GaugeField { n, eval, deriv, singular }
}

fn elementary(a: usize, ad: usize) -> CMat {
    let mut m = zeros(2);
    m[[a, ad]] = cr(1.0);
    m
}

fn adj2(m: &CMat) -> CMat {
    let mut out = zeros(2);
    out[[0, 0]] = m[[1, 1]];
    out[[0, 1]] = -m[[0, 1]];
    out[[1, 0]] = -m[[1, 0]];
    out[[1, 1]] = m[[0, 0]];
    out
}

/// Holomorphic continuation of the regular-gauge one-instanton potential,
/// n = 2. The branch below is the one whose self-dual curvature block
/// vanishes under this crate's conventions; the construction is certified by
/// the curvature tests rather than assumed.
pub fn make_instanton(rho: C, center: Bispinor) -> GaugeField {
    let n = 2usize;
    let rho2 = rho * rho;
    let xmat = move |x: &Bispinor| -> CMat {
        let mut m = zeros(2);
        for a in 0..2 {
            for ad in 0..2 {
                m[[a, ad]] = x.m[a][ad] - center.m[a][ad];
            }
        }
        m
    };
    let quad = move |x: &Bispinor| -> C {
        let m = xmat(x);
        m[[0, 0]] * m[[1, 1]] - m[[0, 1]] * m[[1, 0]] + rho2
    };
    let singular: SingularFn = {
        let q = quad;
        Arc::new(move |x| {
            let d = q(x);
            d.norm() <= 1e-8 * (1.0 + (d - rho2).norm() + rho2.norm())
        })
    };
    let eval: EvalFn = {
        let q = quad;
        Arc::new(move |x| {
            let xm = xmat(x);
            let den = q(x);
            if den.norm() <= 1e-12 {
                return Err(Error::SingularEvaluation { at: format!("{:?}", x.m) });
            }
            let adx = adj2(&xm);
            let mut out: Vec<CMat> = Vec::with_capacity(4);
            for a in 0..2 {
                for ad in 0..2 {
                    let e = elementary(a, ad);
                    let num = e.dot(&adx) - xm.dot(&adj2(&e));
                    out.push(num.mapv(|z| z / (cr(2.0) * den)));
                }
            }
            Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
        })
    };
    let deriv: DerivFn = {
        let q = quad;
        Arc::new(move |x| {
            let xm = xmat(x);
            let den = q(x);
            if den.norm() <= 1e-12 {
                return Err(Error::SingularEvaluation { at: format!("{:?}", x.m) });
            }
            let adx = adj2(&xm);
            // grad of det along x^{b bd} is the lowered matrix
            let xl = Bispinor {
                m: [
                    [xm[[0, 0]], xm[[0, 1]]],
                    [xm[[1, 0]], xm[[1, 1]]],
                ],
            }
            .lowered();
            let mut out: Vec<[CMat; 4]> = Vec::with_capacity(4);
            for dir in 0..4 {
                let b = dir / 2;
                let bd = dir % 2;
                let eb = elementary(b, bd);
                let adeb = adj2(&eb);
                let mut row: Vec<CMat> = Vec::with_capacity(4);
                for a in 0..2 {
                    for ad in 0..2 {
                        let e = elementary(a, ad);
                        let num = e.dot(&adx) - xm.dot(&adj2(&e));
                        let dnum = e.dot(&adeb) - eb.dot(&adj2(&e));
                        let dden = xl[b][bd];
                        let m = dnum.mapv(|z| z / (cr(2.0) * den))
                            - num.mapv(|z| z * dden / (cr(2.0) * den * den));
                        row.push(m);
                    }
                }
                out.push([row[0].clone(), row[1].clone(), row[2].clone(), row[3].clone()]);
            }
            Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
        })
    };
    GaugeField { n, eval, deriv: Some(deriv), singular: Some(singular) }
}

/// Base field plus a deliberate constant self-dual term of the given
/// strength; negative control for every ASD-detection property.
pub fn make_perturbed(base: &GaugeField, strength: f64) -> GaugeField {
    let n = base.n;
    let mut ft = [[zeros(n), zeros(n)], [zeros(n), zeros(n)]];
    ft[0][0] = eye(n).mapv(|z| z * cr(strength));
    ft[1][1] = eye(n).mapv(|z| z * cr(strength * 0.5));
    ft[0][1] = eye(n).mapv(|z| z * c(0.0, strength * 0.25));
    ft[1][0] = ft[0][1].clone();
    let sd = make_constant_sd(ft).expect("symmetric by construction");
    sum_field(base, &sd)
}
