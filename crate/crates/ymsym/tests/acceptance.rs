//! Acceptance suite: one test per criterion, each printing a PASS line once
//! its assertions hold. Every tolerance is pinned here, in code.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use ndarray::Array2;
use num_complex::Complex64;
use std::time::Instant;
use ymsym::config::{FieldSpec, MorphismSpec, RunConfig, SuiteKind};
use ymsym::embedding::{
    constant_maxwell_potential, embed_ym, gauge_condition_residual, non_maxwell_potential,
    solve_embedding, SolveOpts,
};
use ymsym::error::Error;
use ymsym::field::{asd_residual, make_instanton, zero_field, FdOpts, GaugeField, WilsonOpts};
use ymsym::grassmann::GrassmannPoly;
use ymsym::mat::{c, cr, eye, fro, zeros, CMat, C};
use ymsym::morphism::{identity_sd, lifted_affine_sd, lifted_affine_sd_random, SelfDualMorphism};
use ymsym::pullback::{
    patching_data, path_independence_residual, pullback_connection_checked, pullback_field,
    Region,
};
use ymsym::rng::Rng;
use ymsym::spinor::{AlphaPlane, Bispinor, CoSpinor};
use ymsym::supermorphism::{
    certify_extended, extend_causal, form_preservation_residual, vv_compatibility_residual,
    MatXPoly, SuperPoint,
};
use ymsym::superspace::{
    anticommutator, line_integrability_residual, n_generators, spanning_family, susy_generator,
    GenKind, SuperVectorOp,
};
use ymsym::xpoly::SuperField;

fn constant_abelian_asd() -> GaugeField {
    let m = |z: C| {
        let mut mm = zeros(1);
        mm[[0, 0]] = z;
        mm
    };
    make_constant_asd_field([
        [m(cr(1.0)), m(c(0.2, 0.1))],
        [m(c(0.2, 0.1)), m(cr(-0.4))],
    ])
}

fn make_constant_asd_field(f: [[CMat; 2]; 2]) -> GaugeField {
    ymsym::field::make_constant_asd(f).expect("symmetric")
}

fn far_instanton() -> GaugeField {
    make_instanton(cr(2.0), Bispinor::from_rows([cr(3.0), cr(0.0)], [cr(0.0), cr(3.0)]))
}

fn catalog_morphisms() -> Vec<(&'static str, SelfDualMorphism)> {
    vec![
        ("identity", identity_sd()),
        (
            "affine_fixed",
            lifted_affine_sd(
                [[cr(1.1), c(0.2, 0.1)], [cr(-0.2), cr(0.9)]],
                [[cr(0.85), c(0.0, -0.15)], [c(0.1, 0.1), cr(1.15)]],
                Bispinor::from_rows([cr(0.3), cr(0.0)], [c(0.0, 0.4), cr(-0.1)]),
            )
            .unwrap(),
        ),
        ("affine_random", lifted_affine_sd_random(42, 0.3)),
    ]
}

fn region(samples: usize, seed: u64) -> Region {
    Region { basepoint: Bispinor::zero(), radius: 1.0, samples, seed }
}

#[test]
fn criterion_01_asd_preservation() {
    let start = Instant::now();
    let fields: Vec<(&str, GaugeField)> =
        vec![("constant_abelian", constant_abelian_asd()), ("instanton", far_instanton())];
    let mut worst = 0.0f64;
    for (mname, f) in catalog_morphisms() {
        for (fname, a) in &fields {
            let pf = pullback_field(&f, a, false);
            let pts = region(100, 0xC1).sample(pf.singular.as_ref());
            assert_eq!(pts.len(), 100);
            for x in &pts {
                let r = asd_residual(&pf, x, &FdOpts::default())
                    .unwrap_or_else(|e| panic!("{mname}/{fname}: {e}"));
                assert!(r < 1e-5, "{mname}/{fname}: pullback asd residual {r}");
                worst = worst.max(r);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "criterion 1 took {secs:.1}s");
    println!("ACCEPTANCE 01 asd-preservation: PASS (max {worst:.3e} < 1e-5, {secs:.1}s)");
}

#[test]
fn criterion_02_identity_law() {
    let start = Instant::now();
    let a = far_instanton();
    let f = identity_sd();
    let pts = region(100, 0xC2).sample(a.singular.as_ref());
    let mut worst = 0.0f64;
    for x in &pts {
        let (got, _) = pullback_connection_checked(&f, &a, x).unwrap();
        let want = a.eval_at(x).unwrap();
        for k in 0..4 {
            let r = fro(&(&got[k] - &want[k]));
            assert!(r < 1e-12, "identity law residual {r}");
            worst = worst.max(r);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 1.0, "criterion 2 took {secs:.2}s");
    println!("ACCEPTANCE 02 identity-law: PASS (max {worst:.3e} < 1e-12, {secs:.2}s)");
}

#[test]
fn criterion_03_bilinearity() {
    let a = far_instanton();
    let f = lifted_affine_sd_random(7, 0.3);
    assert!(f.jac.is_some(), "catalog morphism carries an analytic Jacobian");
    let pts = region(100, 0xC3).sample(a.singular.as_ref());
    let mut worst = 0.0f64;
    for x in &pts {
        let (_, defect) = pullback_connection_checked(&f, &a, x).unwrap();
        assert!(defect < 1e-7, "bilinearity defect {defect}");
        worst = worst.max(defect);
    }
    println!("ACCEPTANCE 03 bilinearity: PASS (max defect {worst:.3e} < 1e-7)");
}

#[test]
fn criterion_04_path_independence() {
    let a = far_instanton();
    let f = lifted_affine_sd_random(42, 0.3);
    let plane = AlphaPlane::new(
        Bispinor::from_rows([cr(0.05), cr(0.1)], [cr(-0.1), cr(0.15)]),
        CoSpinor::new(cr(1.0), cr(0.4)),
    );
    // unit-area parallelogram in the plane chart
    let x1 = plane.point([cr(0.0), cr(0.0)]);
    let x2 = plane.point([cr(1.0), cr(1.0)]);
    let wopts = WilsonOpts::default();
    let r = path_independence_residual(&f, &a, &plane, &x1, &x2, &wopts).unwrap();
    assert!(r < 1e-6, "asd path dependence {r}");

    let bad = ymsym::field::make_perturbed(&a, 0.5);
    let rb = path_independence_residual(&f, &bad, &plane, &x1, &x2, &wopts).unwrap();
    assert!(rb > 1e-3, "control path dependence {rb} not detected");
    println!("ACCEPTANCE 04 path-independence: PASS (asd {r:.3e} < 1e-6, control {rb:.3e} > 1e-3)");
}

#[test]
fn criterion_05_patching_invariance() {
    let a = far_instanton();
    let f = lifted_affine_sd_random(42, 0.25);
    let wopts = WilsonOpts { tol: 1e-10, ..Default::default() };
    let mut rng = Rng::new(0xC5);
    let mut worst = 0.0f64;
    for plane_idx in 0..2 {
        let plane = AlphaPlane::new(
            rng.ball_point(&Bispinor::zero(), 0.2),
            CoSpinor::new(cr(1.0), cr(0.5 + 0.3 * plane_idx as f64)),
        );
        for _ in 0..10 {
            let x1 = plane.point([rng.complex_unit() * cr(0.5), rng.complex_unit() * cr(0.5)]);
            let x2 = plane.point([rng.complex_unit() * cr(0.5), rng.complex_unit() * cr(0.5)]);
            let d1 = patching_data(&f, &a, &plane, &x1, &wopts).unwrap();
            let d2 = patching_data(&f, &a, &plane, &x2, &wopts).unwrap();
            let r = fro(&(&d1.g - &d2.g));
            assert!(r < 1e-6, "patching variation {r}");
            worst = worst.max(r);
        }
    }
    // zero field: the frames and the patching matrix are exactly identity
    let zero = zero_field(1);
    let plane = AlphaPlane::new(Bispinor::zero(), CoSpinor::new(cr(1.0), cr(0.7)));
    let d = patching_data(&identity_sd(), &zero, &plane, &plane.base, &WilsonOpts::default())
        .unwrap();
    assert_eq!(fro(&(&d.g - &eye(1))), 0.0);
    println!("ACCEPTANCE 05 patching-invariance: PASS (max {worst:.3e} < 1e-6, zero field exact)");
}

#[test]
fn criterion_06_flat_susy_algebra() {
    let mut worst = 0.0f64;
    for nsusy in [1usize, 3] {
        let family = spanning_family(nsusy);
        let xs = vec![
            Bispinor::from_rows([cr(0.4), c(0.1, -0.2)], [c(-0.3, 0.1), cr(0.6)]),
            Bispinor::from_rows([c(0.8, 0.3), cr(-0.5)], [cr(0.2), c(0.0, -0.4)]),
        ];
        for i in 0..nsusy {
            for al in 0..2 {
                for j in 0..nsusy {
                    for be in 0..2 {
                        let qa = susy_generator(GenKind::Q, i, al, nsusy).unwrap();
                        let qb = susy_generator(GenKind::Q, j, be, nsusy).unwrap();
                        worst = worst
                            .max(anticommutator(&qa, &qb).unwrap().family_norm(&family, &xs));
                        let ta = susy_generator(GenKind::Qt, i, al, nsusy).unwrap();
                        let tb = susy_generator(GenKind::Qt, j, be, nsusy).unwrap();
                        worst = worst
                            .max(anticommutator(&ta, &tb).unwrap().family_norm(&family, &xs));
                        let mut rel = anticommutator(&qa, &tb).unwrap();
                        if i == j {
                            let mut want = SuperVectorOp::zero(
                                nsusy,
                                1,
                                ymsym::grassmann::Parity::Even,
                            );
                            want.a[2 * al + be] =
                                SuperField::scalar(n_generators(nsusy), c(0.0, 2.0));
                            rel = rel.sub(&want);
                        }
                        worst = worst.max(rel.family_norm(&family, &xs));
                    }
                }
            }
        }
    }
    assert!(worst < 1e-12, "flat algebra residual {worst}");
    println!("ACCEPTANCE 06 flat-susy-algebra: PASS (max {worst:.3e} < 1e-12 at N = 1 and 3)");
}

// Dense Grassmann arithmetic over 4 generators: the independent oracle for
// the sparse engine. Signs come from an explicit merge count, written
// separately from the library's mask logic.
#[derive(Clone)]
struct Dense4 {
    coeff: Vec<Complex64>,
}

impl Dense4 {
    fn zero() -> Self {
        Dense4 { coeff: vec![Complex64::new(0.0, 0.0); 16] }
    }

    fn from_sparse(p: &GrassmannPoly) -> Self {
        assert!(p.n_gen <= 4);
        let mut d = Dense4::zero();
        for (mask, cm) in &p.terms {
            d.coeff[*mask as usize] = cm[[0, 0]];
        }
        d
    }

    fn mul(&self, other: &Dense4) -> Dense4 {
        let mut out = Dense4::zero();
        for s in 0..16usize {
            if self.coeff[s].norm_sqr() == 0.0 {
                continue;
            }
            for t in 0..16usize {
                if other.coeff[t].norm_sqr() == 0.0 || s & t != 0 {
                    continue;
                }
                // merge the two ascending generator lists, counting swaps
                let list_s: Vec<usize> = (0..4).filter(|g| s >> g & 1 == 1).collect();
                let list_t: Vec<usize> = (0..4).filter(|g| t >> g & 1 == 1).collect();
                let mut merged = list_s.clone();
                let mut swaps = 0usize;
                for g in list_t {
                    let pos = merged.iter().position(|h| *h > g).unwrap_or(merged.len());
                    swaps += merged.len() - pos;
                    merged.insert(pos, g);
                }
                let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
                out.coeff[s | t] += self.coeff[s] * other.coeff[t] * Complex64::new(sign, 0.0);
            }
        }
        out
    }

    fn matches(&self, p: &GrassmannPoly, tol: f64) -> bool {
        let q = Dense4::from_sparse(p);
        self.coeff
            .iter()
            .zip(q.coeff.iter())
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}

#[test]
fn criterion_07_grassmann_engine() {
    let start = Instant::now();
    let mut rng = Rng::new(0xC7);
    let rand_poly = |rng: &mut Rng, n_gen: usize, terms: usize| {
        let mut p = GrassmannPoly::zero(n_gen);
        for _ in 0..terms {
            let mask = (rng.next_u64() as u32) & ((1u32 << n_gen) - 1);
            let mut m = Array2::zeros((1, 1));
            m[[0, 0]] = rng.complex_unit();
            p.insert(mask, m);
        }
        p
    };

    // 1000 random sparse cases at N = 3 (12 generators)
    for case in 0..1000 {
        let a = rand_poly(&mut rng, 12, 4);
        let b = rand_poly(&mut rng, 12, 4);
        let cc = rand_poly(&mut rng, 12, 4);
        // associativity
        let lhs = a.mul(&b).mul(&cc);
        let rhs = a.mul(&b.mul(&cc));
        assert!(lhs.sub(&rhs).is_zero(1e-11), "associativity case {case}");
        // graded anticommutativity on odd parts
        let g1 = GrassmannPoly::generator(12, (case % 12) as usize);
        let g2 = GrassmannPoly::generator(12, ((case + 5) % 12) as usize);
        if case % 12 != (case + 5) % 12 {
            assert!(g1.mul(&g2).add(&g2.mul(&g1)).is_zero(0.0));
        }
        // graded Leibniz for the left derivative on a homogeneous left factor
        let g = (case % 12) as usize;
        for (mask, coeff) in &a.terms {
            let mono = GrassmannPoly::monomial(12, *mask, coeff.clone());
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = mono.mul(&b).left_derive(g);
            let rhs = mono
                .left_derive(g)
                .mul(&b)
                .add(&mono.mul(&b.left_derive(g)).scale(cr(sign)));
            assert!(lhs.sub(&rhs).is_zero(1e-12), "Leibniz case {case}");
        }
    }

    // dense brute-force equivalence at N = 1 (4 generators)
    for case in 0..300 {
        let a = rand_poly(&mut rng, 4, 3);
        let b = rand_poly(&mut rng, 4, 3);
        let sparse = a.mul(&b);
        let dense = Dense4::from_sparse(&a).mul(&Dense4::from_sparse(&b));
        assert!(dense.matches(&sparse, 1e-13), "dense mismatch case {case}");
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 30.0, "criterion 7 took {secs:.1}s");
    println!("ACCEPTANCE 07 grassmann-engine: PASS (1000 sparse + 300 dense cases, {secs:.1}s)");
}

#[test]
fn criterion_08_extended_morphism() {
    let mut rng = Rng::new(0xC8);
    let l = rng.gl2_near_identity(0.3);
    let lt = rng.gl2_near_identity(0.3);
    let b = rng.ball_point(&Bispinor::zero(), 0.3);
    let ext = extend_causal(l, lt, b, MatXPoly::constant(l), MatXPoly::constant(lt)).unwrap();
    let rep = certify_extended(&ext, 3, 0xC8);
    assert!(rep.errors.is_empty(), "{:?}", rep.errors);
    assert!(rep.max_vv < 1e-10, "vv residual {}", rep.max_vv);
    assert!(rep.max_mm < 1e-10, "M Mtilde residual {}", rep.max_mm);
    assert!(rep.max_contact < 1e-8, "super contact residual {}", rep.max_contact);

    // scale-mismatched frames must be detected
    let vt2 = [
        [lt[0][0] * cr(2.0), lt[0][1] * cr(2.0)],
        [lt[1][0] * cr(2.0), lt[1][1] * cr(2.0)],
    ];
    let bad = extend_causal(l, lt, b, MatXPoly::constant(l), MatXPoly::constant(vt2)).unwrap();
    let line = ymsym::spinor::NullLine::new(Bispinor::zero(), rng.spinor(), rng.cospinor());
    let r = vv_compatibility_residual(&bad, &line);
    assert!(r > 1e-3, "scale mismatch not detected: {r}");
    println!(
        "ACCEPTANCE 08 extended-morphism: PASS (vv {:.3e}, mm {:.3e}, contact {:.3e}, control {r:.3e})",
        rep.max_vv, rep.max_mm, rep.max_contact
    );
}

#[test]
fn criterion_09_reduction() {
    let f = [[cr(0.8), c(0.1, 0.2)], [c(0.1, 0.2), cr(-0.3)]];
    let ft = [[cr(0.1), cr(0.25)], [cr(0.25), cr(0.45)]];
    let a0 = constant_maxwell_potential(f, ft);
    let data = solve_embedding(&a0, 1, 3, &SolveOpts::default()).unwrap();
    let phi = embed_ym(&data);

    let xs = vec![
        Bispinor::from_rows([cr(0.2), cr(0.3)], [cr(-0.1), cr(0.4)]),
        Bispinor::from_rows([cr(-0.4), cr(0.1)], [cr(0.5), cr(-0.2)]),
    ];
    let family = spanning_family(3);
    let mut rng = Rng::new(0xC9);
    let mut integ = 0.0f64;
    for _ in 0..4 {
        let l = rng.spinor();
        let lt = rng.cospinor();
        integ = integ.max(line_integrability_residual(&phi, &l, &lt, &xs, &family).unwrap());
    }
    assert!(integ < 1e-8, "line integrability {integ}");
    let gauge = gauge_condition_residual(&data, &xs);
    assert!(gauge < 1e-10, "gauge condition {gauge}");

    // form preservation under an affine extension, 20 spinor samples
    let lmat = rng.gl2_near_identity(0.3);
    let ltmat = rng.gl2_near_identity(0.3);
    let bb = rng.ball_point(&Bispinor::zero(), 0.3);
    let ext =
        extend_causal(lmat, ltmat, bb, MatXPoly::constant(lmat), MatXPoly::constant(ltmat))
            .unwrap();
    let z1 = SuperPoint::new(
        rng.ball_point(&Bispinor::zero(), 0.4),
        (0..3).map(|_| [rng.complex_unit(), rng.complex_unit()]).collect(),
        (0..3).map(|_| [rng.complex_unit(), rng.complex_unit()]).collect(),
    );
    let z2 = z1.slot_rescaled(0, cr(2.0));
    let mut form = 0.0f64;
    for _ in 0..20 {
        let l = rng.spinor();
        let lt = rng.cospinor();
        form = form
            .max(form_preservation_residual(&ext, &phi, &z1, &z2, &l, &lt).unwrap());
    }
    assert!(form < 1e-8, "form preservation {form}");

    // non-Maxwell control cannot be embedded
    let bad = solve_embedding(&non_maxwell_potential(), 1, 3, &SolveOpts::default());
    assert!(matches!(bad, Err(Error::NoSolution { .. })), "{bad:?}");
    println!(
        "ACCEPTANCE 09 reduction: PASS (integrability {integ:.3e} < 1e-8, gauge {gauge:.3e} < 1e-10, form {form:.3e} < 1e-8, control NoSolution)"
    );
}

#[test]
fn criterion_10_negative_control_coverage() {
    // each detection member flips its suite to an overall failure
    let base = RunConfig {
        region: ymsym::config::RegionSpec { basepoint: [[0.0, 0.0]; 4], radius: 1.0, samples: 8 },
        ..RunConfig::default()
    };
    let cases: Vec<(&str, RunConfig)> = vec![
        (
            "pullback/perturbed-field",
            RunConfig {
                suite: SuiteKind::Pullback,
                field: FieldSpec::Perturbed { strength: 0.5 },
                ..base.clone()
            },
        ),
        (
            "asdym/perturbed-field",
            RunConfig {
                suite: SuiteKind::Asdym,
                field: FieldSpec::Perturbed { strength: 0.5 },
                ..base.clone()
            },
        ),
        (
            "contact/squaring-morphism",
            RunConfig {
                suite: SuiteKind::Contact,
                morphism: MorphismSpec::Squaring,
                ..base.clone()
            },
        ),
        (
            "super/scale-mismatch",
            RunConfig {
                suite: SuiteKind::Super,
                morphism: MorphismSpec::ScaleMismatch { seed: 42, factor: 2.0 },
                ..base.clone()
            },
        ),
        (
            "reduction/non-maxwell",
            RunConfig {
                suite: SuiteKind::Reduction,
                field: FieldSpec::NonMaxwell,
                ..base.clone()
            },
        ),
        (
            "reduction/odd-frame",
            RunConfig {
                suite: SuiteKind::Reduction,
                field: FieldSpec::ConstantMaxwell {
                    f00: [0.8, 0.0],
                    f01: [0.1, 0.0],
                    f11: [-0.4, 0.0],
                    ft00: [0.2, 0.0],
                    ft01: [0.3, 0.0],
                    ft11: [0.5, 0.0],
                },
                morphism: MorphismSpec::OddFrame { seed: 42, eps: 0.8 },
                ..base.clone()
            },
        ),
    ];
    for (name, cfg) in cases {
        let rep = ymsym::suite::run(&cfg).unwrap();
        assert!(!rep.overall_pass, "control {name} did not flip the suite");
        // the positive twin passes
    }
    // and the positive configurations stay green
    let pos = RunConfig { suite: SuiteKind::All, ..base };
    let rep = ymsym::suite::run(&pos).unwrap();
    assert!(rep.overall_pass, "positive configuration failed");
    println!("ACCEPTANCE 10 negative-controls: PASS (6 controls flip, positive run green)");
}
