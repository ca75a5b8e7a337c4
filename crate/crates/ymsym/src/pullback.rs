//! The nonlocal pullback connection of a self-dual morphism, with its
//! linearity certification, Wilson-line patching data, and the headline
//! check that pulling an anti-self-dual potential back through a certified
//! morphism keeps it anti-self-dual.
//!
//! The pullback is evaluated directly: restrict to the alpha-plane through
//! (x, lt), push the tangent through the contraction map, and contract with
//! the potential at the image point. The Wilson/patching construction is
//! kept as an independent consistency route, not as a splitting.

use crate::error::{Error, Result};
use crate::field::{
    asd_residual, ci, wilson_line, FdOpts, GaugeField, PathSpec, SingularFn, WilsonOpts,
};
use crate::mat::{cr, eye, fro, zeros, CMat};
use crate::morphism::{contract_plane, SelfDualMorphism};
use crate::rng::Rng;
use crate::spinor::{outer, plane_intersect, AlphaPlane, Bispinor, CoSpinor, Spinor};
use rayon::prelude::*;
use std::sync::Arc;

#[derive(Clone, Copy, Debug)]
pub struct PullbackOpts {
    /// bilinearity gate with analytic Jacobians
    pub bilin_tol_analytic: f64,
    /// widened gate when the contraction Jacobian is finite-differenced
    pub bilin_tol_fd: f64,
    /// first-level chart differences
    pub fd: FdOpts,
    /// nested differences on the assembled field
    pub outer_fd: FdOpts,
}

impl Default for PullbackOpts {
    fn default() -> Self {
        PullbackOpts {
            bilin_tol_analytic: 1e-7,
            bilin_tol_fd: 1e-5,
            fd: FdOpts { h: 1e-4 },
            outer_fd: FdOpts { h: 1e-4 },
        }
    }
}

impl PullbackOpts {
    pub fn bilin_tol(&self, f: &SelfDualMorphism) -> f64 {
        if f.jac.is_some() {
            self.bilin_tol_analytic
        } else {
            self.bilin_tol_fd
        }
    }
}

/// v . f*A at x for v = outer(l, lt): push v through the contraction map of
/// the alpha-plane (x, lt) and contract with A at the image point.
pub fn pullback_component(
    f: &SelfDualMorphism,
    a: &GaugeField,
    x: &Bispinor,
    l: &Spinor,
    lt: &CoSpinor,
) -> Result<CMat> {
    let plane = AlphaPlane::new(*x, *lt);
    let chart = contract_plane(f, &plane);
    let origin = [cr(0.0), cr(0.0)];
    let cols = (chart.pushforward)(origin)?;
    let w = cols[0].scale(l.0[0]).add(&cols[1].scale(l.0[1]));
    let y = (chart.eval)(origin)?;
    let am = a.eval_at(&y)?;
    let mut out = zeros(a.n);
    for al in 0..2 {
        for ad in 0..2 {
            out = out + am[ci(al, ad)].mapv(|z| z * w.m[al][ad]);
        }
    }
    Ok(out)
}

/// All four components A*_{a ad}(x), read off basis samples, with the
/// additive defect of four extra mixed samples certifying that the sampled
/// map is genuinely bilinear. Returns the components and the defect.
pub fn pullback_connection_checked(
    f: &SelfDualMorphism,
    a: &GaugeField,
    x: &Bispinor,
) -> Result<([CMat; 4], f64)> {
    let e = |k: usize| {
        if k == 0 {
            Spinor::new(cr(1.0), cr(0.0))
        } else {
            Spinor::new(cr(0.0), cr(1.0))
        }
    };
    let ed = |k: usize| {
        if k == 0 {
            CoSpinor::new(cr(1.0), cr(0.0))
        } else {
            CoSpinor::new(cr(0.0), cr(1.0))
        }
    };
    let m = |l: &Spinor, lt: &CoSpinor| pullback_component(f, a, x, l, lt);

    let comp = [
        m(&e(0), &ed(0))?,
        m(&e(0), &ed(1))?,
        m(&e(1), &ed(0))?,
        m(&e(1), &ed(1))?,
    ];
    let both = Spinor::new(cr(1.0), cr(1.0));
    let bothd = CoSpinor::new(cr(1.0), cr(1.0));
    let mut defect = 0.0f64;
    for ad in 0..2 {
        let s = m(&both, &ed(ad))?;
        defect = defect.max(fro(&(&s - &(&comp[ci(0, ad)] + &comp[ci(1, ad)]))));
    }
    for al in 0..2 {
        let s = m(&e(al), &bothd)?;
        defect = defect.max(fro(&(&s - &(&comp[ci(al, 0)] + &comp[ci(al, 1)]))));
    }
    Ok((comp, defect))
}

/// Component assembly with the bilinearity gate enforced.
pub fn pullback_connection_at(
    f: &SelfDualMorphism,
    a: &GaugeField,
    x: &Bispinor,
    opts: &PullbackOpts,
) -> Result<[CMat; 4]> {
    let (comp, defect) = pullback_connection_checked(f, a, x)?;
    let tol = opts.bilin_tol(f);
    if defect > tol {
        return Err(Error::BilinearityViolation { defect, tol });
    }
    Ok(comp)
}

/// The assembled pullback presented through the ordinary gauge-field
/// interface; derivatives of the wrapped field go through nested finite
/// differences on the assembled evaluator.
pub fn pullback_field(f: &SelfDualMorphism, a: &GaugeField, check_bilinearity: bool) -> GaugeField {
    let f2 = f.clone();
    let a2 = a.clone();
    let opts = PullbackOpts::default();
    let eval = Arc::new(move |x: &Bispinor| -> Result<[CMat; 4]> {
        if check_bilinearity {
            pullback_connection_at(&f2, &a2, x, &opts)
        } else {
            Ok(pullback_connection_checked(&f2, &a2, x)?.0)
        }
    });
    let singular: Option<SingularFn> = match (&a.singular, &f.clone()) {
        (Some(s), f) => {
            let s = s.clone();
            let f = f.clone();
            let probe = CoSpinor::new(cr(1.0), cr(0.37));
            Some(Arc::new(move |x: &Bispinor| {
                if s(x) {
                    return true;
                }
                f.point_image(x, &probe).map(|y| s(&y)).unwrap_or(true)
            }))
        }
        _ => None,
    };
    GaugeField { n: a.n, eval, deriv: None, singular }
}

/// Wilson frames from x to the plane's intersections with the two reference
/// planes of the patching construction, and the patching matrix G.
#[derive(Clone, Debug)]
pub struct PatchingData {
    pub h: CMat,
    pub ht: CMat,
    pub g: CMat,
    pub p: Bispinor,
    pub q: Bispinor,
}

fn reference_planes() -> (AlphaPlane, AlphaPlane) {
    (
        AlphaPlane::new(Bispinor::zero(), CoSpinor::new(cr(1.0), cr(0.0))),
        AlphaPlane::new(Bispinor::zero(), CoSpinor::new(cr(0.0), cr(1.0))),
    )
}

/// Straight chart segment from x to the target, forward-mapped through the
/// contraction of f on the plane.
fn mapped_segment(
    f: &SelfDualMorphism,
    plane: &AlphaPlane,
    from: &Bispinor,
    to: &Bispinor,
) -> PathSpec {
    let chart = contract_plane(f, plane);
    let mu0 = plane.chart_coords(from);
    let mu1 = plane.chart_coords(to);
    let eval = chart.eval.clone();
    let sampler = Arc::new(move |t: f64| {
        let mu = [
            mu0[0] + (mu1[0] - mu0[0]) * cr(t),
            mu0[1] + (mu1[1] - mu0[1]) * cr(t),
        ];
        let p = eval(mu)?;
        let h = 1e-6;
        let tp = (t + h).min(1.0);
        let tm = (t - h).max(0.0);
        let pp = eval([
            mu0[0] + (mu1[0] - mu0[0]) * cr(tp),
            mu0[1] + (mu1[1] - mu0[1]) * cr(tp),
        ])?;
        let pm = eval([
            mu0[0] + (mu1[0] - mu0[0]) * cr(tm),
            mu0[1] + (mu1[1] - mu0[1]) * cr(tm),
        ])?;
        Ok((p, pp.sub(&pm).scale(cr(1.0 / (tp - tm)))))
    });
    PathSpec { sampler, pieces: 1 }
}

/// H = W*(p, x), Htilde = W*(q, x) and G = Htilde H^{-1} = W*(q, p).
/// The frames are integrated from x outward so a change of x multiplies
/// both on the right and cancels in G.
pub fn patching_data(
    f: &SelfDualMorphism,
    a: &GaugeField,
    plane: &AlphaPlane,
    x: &Bispinor,
    wopts: &WilsonOpts,
) -> Result<PatchingData> {
    if plane.membership_residual(x) > 1e-8 {
        return Err(Error::ShapeMismatch("evaluation point is not on the plane".into()));
    }
    let (pp, qp) = reference_planes();
    let p = plane_intersect(plane, &pp, 1e-12).map_err(|e| match e {
        Error::ParallelPlanes => Error::AtInfinity,
        other => other,
    })?;
    let q = plane_intersect(plane, &qp, 1e-12).map_err(|e| match e {
        Error::ParallelPlanes => Error::AtInfinity,
        other => other,
    })?;
    let h = wilson_line(a, &mapped_segment(f, plane, x, &p), wopts)?;
    let ht = wilson_line(a, &mapped_segment(f, plane, x, &q), wopts)?;
    let hinv = crate::mat::inv(&h)?;
    let g = ht.dot(&hinv);
    Ok(PatchingData { h, ht, g, p, q })
}

/// Difference of the two edge-order Wilson routes between two points of the
/// plane, each forward-mapped; vanishes when the connection is integrable on
/// the image surface.
pub fn path_independence_residual(
    f: &SelfDualMorphism,
    a: &GaugeField,
    plane: &AlphaPlane,
    x1: &Bispinor,
    x2: &Bispinor,
    wopts: &WilsonOpts,
) -> Result<f64> {
    let mu1 = plane.chart_coords(x1);
    let mu2 = plane.chart_coords(x2);
    let c1 = plane.point([mu2[0], mu1[1]]);
    let c2 = plane.point([mu1[0], mu2[1]]);
    let via = |mid: &Bispinor| -> Result<CMat> {
        let leg1 = mapped_segment(f, plane, x1, mid);
        let leg2 = mapped_segment(f, plane, mid, x2);
        let w1 = wilson_line(a, &leg1, wopts)?;
        let w2 = wilson_line(a, &leg2, wopts)?;
        Ok(w2.dot(&w1))
    };
    let wa = via(&c1)?;
    let wb = via(&c2)?;
    Ok(fro(&(&wa - &wb)))
}

/// Sampling region: complex ball with deterministic rejection sampling
/// against the singular predicate.
#[derive(Clone, Copy, Debug)]
pub struct Region {
    pub basepoint: Bispinor,
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Region {
    pub fn sample(&self, avoid: Option<&SingularFn>) -> Vec<Bispinor> {
        let mut rng = Rng::new(self.seed);
        let mut out = Vec::with_capacity(self.samples);
        let mut guard = 0;
        while out.len() < self.samples && guard < self.samples * 100 {
            guard += 1;
            let x = rng.ball_point(&self.basepoint, self.radius);
            if let Some(s) = avoid {
                if s(&x) {
                    continue;
                }
            }
            out.push(x);
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SymmetryTols {
    pub asd: f64,
    pub bilinearity: f64,
    pub holonomy: f64,
}

impl Default for SymmetryTols {
    fn default() -> Self {
        SymmetryTols { asd: 1e-5, bilinearity: 1e-7, holonomy: 1e-6 }
    }
}

/// Aggregated verification record for one (morphism, field) pair.
#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub max_asd: f64,
    pub mean_asd: f64,
    pub max_bilinearity: f64,
    pub max_holonomy: f64,
    pub samples_used: usize,
    pub errors: Vec<String>,
    pub pass: bool,
}

/// The headline check: build the pullback field and report, over the sample
/// region, the worst anti-self-duality residual (nested differences), the
/// worst bilinearity defect, and the worst alpha-plane parallelogram
/// holonomy. Isolated per-sample failures are reported and skipped.
pub fn verify_morphism_symmetry(
    f: &SelfDualMorphism,
    a: &GaugeField,
    region: &Region,
    tols: &SymmetryTols,
) -> SymmetryReport {
    let pf = pullback_field(f, a, false);
    let points = region.sample(pf.singular.as_ref());
    let opts = PullbackOpts::default();
    let wopts = WilsonOpts { tol: 1e-8, ..Default::default() };

    struct SampleOut {
        idx: usize,
        asd: Option<f64>,
        bilin: Option<f64>,
        hol: Option<f64>,
        errs: Vec<String>,
    }

    let mut outs: Vec<SampleOut> = points
        .par_iter()
        .enumerate()
        .map(|(idx, x)| {
            let mut rng = Rng::new(region.seed ^ (idx as u64).wrapping_mul(0x9E3779B97F4A7C15));
            let mut s = SampleOut { idx, asd: None, bilin: None, hol: None, errs: Vec::new() };
            match asd_residual(&pf, x, &opts.outer_fd) {
                Ok(r) => s.asd = Some(r),
                Err(e) => s.errs.push(format!("sample {idx}: asd: {e}")),
            }
            match pullback_connection_checked(f, a, x) {
                Ok((_, d)) => s.bilin = Some(d),
                Err(e) => s.errs.push(format!("sample {idx}: bilinearity: {e}")),
            }
            let lt = rng.cospinor();
            let l1 = rng.spinor();
            let l2 = rng.spinor();
            let scale = cr(0.15);
            let u = outer(&l1, &lt).scale(scale);
            let v = outer(&l2, &lt).scale(scale);
            let lp = PathSpec::parallelogram(*x, u, v);
            match wilson_line(&pf, &lp, &wopts) {
                Ok(w) => s.hol = Some(fro(&(&w - &eye(pf.n)))),
                Err(e) => s.errs.push(format!("sample {idx}: holonomy: {e}")),
            }
            s
        })
        .collect();
    outs.sort_by_key(|s| s.idx);

    let mut rep = SymmetryReport {
        max_asd: 0.0,
        mean_asd: 0.0,
        max_bilinearity: 0.0,
        max_holonomy: 0.0,
        samples_used: 0,
        errors: Vec::new(),
        pass: false,
    };
    let mut asd_count = 0usize;
    for s in outs {
        if let Some(r) = s.asd {
            rep.max_asd = rep.max_asd.max(r);
            rep.mean_asd += r;
            asd_count += 1;
        }
        if let Some(d) = s.bilin {
            rep.max_bilinearity = rep.max_bilinearity.max(d);
        }
        if let Some(h) = s.hol {
            rep.max_holonomy = rep.max_holonomy.max(h);
        }
        if s.asd.is_some() || s.bilin.is_some() {
            rep.samples_used += 1;
        }
        rep.errors.extend(s.errs);
    }
    if asd_count > 0 {
        rep.mean_asd /= asd_count as f64;
    }
    rep.pass = rep.errors.is_empty()
        && rep.samples_used > 0
        && rep.max_asd < tols.asd
        && rep.max_bilinearity < tols.bilinearity
        && rep.max_holonomy < tols.holonomy;
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{
        abelian_line_integral, make_constant_asd, make_constant_maxwell, make_instanton,
        make_perturbed, zero_field,
    };
    use crate::mat::{c, C};
    use crate::morphism::{
        fiber_shift_sd, identity_sd, lifted_affine_sd, lifted_affine_sd_random, compose_sd,
    };

    fn abelian_f(v00: C, v01: C, v11: C) -> [[CMat; 2]; 2] {
        let m = |z: C| {
            let mut mm = zeros(1);
            mm[[0, 0]] = z;
            mm
        };
        [[m(v00), m(v01)], [m(v01), m(v11)]]
    }

    fn far_instanton() -> GaugeField {
        make_instanton(cr(2.0), Bispinor::from_rows([cr(3.0), cr(0.0)], [cr(0.0), cr(3.0)]))
    }

    #[test]
    fn identity_pullback_reproduces_field() {
        let a = far_instanton();
        let f = identity_sd();
        let mut rng = Rng::new(2);
        for _ in 0..20 {
            let x = rng.ball_point(&Bispinor::zero(), 1.0);
            let got = pullback_connection_at(&f, &a, &x, &PullbackOpts::default()).unwrap();
            let want = a.eval_at(&x).unwrap();
            for k in 0..4 {
                assert!(fro(&(&got[k] - &want[k])) < 1e-12);
            }
        }
    }

    #[test]
    fn zero_field_pulls_back_to_zero() {
        let a = zero_field(2);
        let f = lifted_affine_sd_random(3, 0.4);
        let got =
            pullback_connection_at(&f, &a, &Bispinor::zero(), &PullbackOpts::default()).unwrap();
        for k in 0..4 {
            assert_eq!(fro(&got[k]), 0.0);
        }
    }

    #[test]
    fn dilation_pullback_closed_form() {
        // f = (a x, lt) pulls the constant field back to a * A(a x)
        let a_scale = c(1.3, -0.2);
        let f = lifted_affine_sd(
            [[a_scale, cr(0.0)], [cr(0.0), a_scale]],
            [[cr(1.0), cr(0.0)], [cr(0.0), cr(1.0)]],
            Bispinor::zero(),
        )
        .unwrap();
        let a = make_constant_asd(abelian_f(cr(1.0), c(0.2, 0.1), cr(-0.4))).unwrap();
        let mut rng = Rng::new(8);
        for _ in 0..10 {
            let x = rng.ball_point(&Bispinor::zero(), 1.0);
            let got = pullback_connection_at(&f, &a, &x, &PullbackOpts::default()).unwrap();
            let want = a.eval_at(&x.scale(a_scale)).unwrap();
            for k in 0..4 {
                assert!(fro(&(&got[k] - &want[k].mapv(|z| z * a_scale))) < 1e-12);
            }
        }
    }

    #[test]
    fn fiber_shift_violates_bilinearity() {
        let a = far_instanton();
        let f = fiber_shift_sd(Bispinor::from_rows([cr(0.4), cr(0.1)], [cr(0.0), cr(0.3)]));
        let x = Bispinor::from_rows([c(0.2, 0.1), cr(0.1)], [cr(-0.2), c(0.3, 0.2)]);
        let r = pullback_connection_at(&f, &a, &x, &PullbackOpts::default());
        assert!(matches!(r, Err(Error::BilinearityViolation { .. })), "{r:?}");
    }

    #[test]
    fn affine_pullback_of_instanton_stays_asd() {
        let a = far_instanton();
        let f = lifted_affine_sd_random(4, 0.3);
        let pf = pullback_field(&f, &a, false);
        let mut rng = Rng::new(6);
        for _ in 0..10 {
            let x = rng.ball_point(&Bispinor::zero(), 0.8);
            let r = asd_residual(&pf, &x, &FdOpts::default()).unwrap();
            assert!(r < 1e-7, "pullback asd residual {r}");
        }
    }

    #[test]
    fn pullback_with_fd_jacobian_matches_analytic() {
        let a = far_instanton();
        let f = lifted_affine_sd_random(14, 0.3);
        let f_nojac = SelfDualMorphism { eval: f.eval.clone(), jac: None };
        let x = Bispinor::from_rows([c(0.1, 0.3), cr(0.2)], [cr(-0.1), c(0.2, -0.2)]);
        let ga = pullback_connection_at(&f, &a, &x, &PullbackOpts::default()).unwrap();
        let gn = pullback_connection_at(&f_nojac, &a, &x, &PullbackOpts::default()).unwrap();
        for k in 0..4 {
            assert!(fro(&(&ga[k] - &gn[k])) < 1e-8);
        }
    }

    #[test]
    fn functoriality_on_affine_pairs() {
        let a = far_instanton();
        let f = lifted_affine_sd_random(31, 0.25);
        let g = lifted_affine_sd_random(32, 0.25);
        let gf = compose_sd(&g, &f);
        let lhs = pullback_field(&gf, &a, false);
        let ga = pullback_field(&g, &a, false);
        let rhs = pullback_field(&f, &ga, false);
        let mut rng = Rng::new(33);
        for _ in 0..5 {
            let x = rng.ball_point(&Bispinor::zero(), 0.6);
            let l = lhs.eval_at(&x).unwrap();
            let r = rhs.eval_at(&x).unwrap();
            for k in 0..4 {
                assert!(fro(&(&l[k] - &r[k])) < 1e-5);
            }
        }
    }

    #[test]
    fn patching_zero_field_gives_identity() {
        let a = zero_field(1);
        let f = identity_sd();
        let plane = AlphaPlane::new(
            Bispinor::from_rows([cr(0.1), cr(0.2)], [cr(0.0), cr(0.3)]),
            CoSpinor::new(cr(1.0), cr(0.5)),
        );
        let x = plane.point([cr(0.2), cr(-0.1)]);
        let d = patching_data(&f, &a, &plane, &x, &WilsonOpts::default()).unwrap();
        assert_eq!(fro(&(&d.g - &eye(1))), 0.0);
        assert_eq!(fro(&(&d.h - &eye(1))), 0.0);
    }

    #[test]
    fn patching_matrix_independent_of_evaluation_point() {
        let a = far_instanton();
        let f = lifted_affine_sd_random(41, 0.2);
        let plane = AlphaPlane::new(
            Bispinor::from_rows([cr(0.05), cr(0.1)], [cr(-0.1), cr(0.2)]),
            CoSpinor::new(cr(1.0), cr(0.4)),
        );
        let wopts = WilsonOpts { tol: 1e-10, ..Default::default() };
        let x1 = plane.point([cr(0.1), cr(0.2)]);
        let x2 = plane.point([c(-0.2, 0.1), cr(0.15)]);
        let d1 = patching_data(&f, &a, &plane, &x1, &wopts).unwrap();
        let d2 = patching_data(&f, &a, &plane, &x2, &wopts).unwrap();
        assert!(fro(&(&d1.g - &d2.g)) < 1e-6, "{}", fro(&(&d1.g - &d2.g)));
        // intersection points land on both planes
        assert!(plane.membership_residual(&d1.p) < 1e-10);
        assert!(plane.membership_residual(&d1.q) < 1e-10);
    }

    #[test]
    fn patching_matrix_equals_direct_line_between_intersections() {
        // G = Htilde H^{-1} composes into the single line from p to q
        let a = far_instanton();
        let f = lifted_affine_sd_random(45, 0.2);
        let plane = AlphaPlane::new(
            Bispinor::from_rows([cr(0.02), cr(0.08)], [cr(-0.05), cr(0.12)]),
            CoSpinor::new(cr(1.0), cr(0.6)),
        );
        let wopts = WilsonOpts { tol: 1e-10, ..Default::default() };
        let x = plane.point([cr(0.15), cr(-0.1)]);
        let d = patching_data(&f, &a, &plane, &x, &wopts).unwrap();
        let direct = wilson_line(&a, &mapped_segment(&f, &plane, &d.p, &d.q), &wopts).unwrap();
        assert!(fro(&(&d.g - &direct)) < 1e-7, "{}", fro(&(&d.g - &direct)));
    }

    #[test]
    fn patching_parallel_reference_plane_is_at_infinity() {
        let a = zero_field(1);
        let f = identity_sd();
        let plane = AlphaPlane::new(Bispinor::zero(), CoSpinor::new(cr(1.0), cr(0.0)));
        let r = patching_data(&f, &a, &plane, &plane.base, &WilsonOpts::default());
        assert!(matches!(r, Err(Error::AtInfinity)));
    }

    #[test]
    fn path_independence_for_asd_and_detection_for_control() {
        let a = far_instanton();
        let f = lifted_affine_sd_random(51, 0.2);
        let plane = AlphaPlane::new(
            Bispinor::from_rows([cr(0.0), cr(0.1)], [cr(0.05), cr(-0.1)]),
            CoSpinor::new(cr(1.0), cr(-0.3)),
        );
        let x1 = plane.point([cr(0.0), cr(0.0)]);
        let x2 = plane.point([cr(1.0), cr(1.0)]);
        let wopts = WilsonOpts::default();
        let r = path_independence_residual(&f, &a, &plane, &x1, &x2, &wopts).unwrap();
        assert!(r < 1e-6, "asd path dependence {r}");

        let bad = make_perturbed(&a, 0.5);
        let rb = path_independence_residual(&f, &bad, &plane, &x1, &x2, &wopts).unwrap();
        assert!(rb > 1e-3, "control not detected {rb}");
    }

    #[test]
    fn wilson_and_direct_routes_agree_abelian() {
        // d_v log H along the image equals v . f*A for n = 1
        let a = make_constant_maxwell(
            [[cr(0.4), c(0.1, 0.3)], [c(0.1, 0.3), cr(-0.6)]],
            [[cr(0.0), cr(0.0)], [cr(0.0), cr(0.0)]],
        )
        .unwrap();
        let f = lifted_affine_sd_random(61, 0.3);
        let plane = AlphaPlane::new(
            Bispinor::from_rows([cr(0.1), cr(0.0)], [cr(0.2), cr(0.1)]),
            CoSpinor::new(cr(1.0), cr(0.6)),
        );
        let x = plane.point([cr(0.3), cr(0.2)]);
        let l = Spinor::new(cr(0.7), cr(0.4));
        let direct = pullback_component(&f, &a, &x, &l, &plane.codir).unwrap()[[0, 0]];

        let h = 1e-4;
        let v = outer(&l, &plane.codir);
        let log_h = |pt: &Bispinor| -> C {
            let seg = mapped_segment(&f, &plane, &plane.base, pt);
            abelian_line_integral(&a, &seg, 64).unwrap()
        };
        let wp = log_h(&x.add(&v.scale(cr(h))));
        let wm = log_h(&x.sub(&v.scale(cr(h))));
        let wilson_route = (wp - wm) / cr(2.0 * h);
        assert!((direct - wilson_route).norm() < 1e-5, "{direct} vs {wilson_route}");
    }

    #[test]
    fn verify_symmetry_passes_for_catalog_and_fails_for_control() {
        let a = far_instanton();
        let f = lifted_affine_sd_random(71, 0.25);
        let region = Region { basepoint: Bispinor::zero(), radius: 0.8, samples: 12, seed: 5 };
        let rep = verify_morphism_symmetry(&f, &a, &region, &SymmetryTols::default());
        assert!(rep.pass, "{rep:?}");

        let bad = make_perturbed(&a, 0.3);
        let rep = verify_morphism_symmetry(&f, &bad, &region, &SymmetryTols::default());
        assert!(!rep.pass);
        assert!(rep.max_asd > 1e-3);
    }
}
