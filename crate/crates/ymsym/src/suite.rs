//! Verification suites behind the batch entry point: each suite turns a
//! configuration into check records with pass/fail residual statistics.
//! Detection members are first-class: a control catalog entry must flip its
//! suite to fail.

use crate::config::{MorphismSpec, RunConfig, SuiteKind};
use crate::embedding::{embed_ym, gauge_condition_residual, solve_embedding, SolveOpts};
use crate::error::Result;
use crate::field::{
    asd_residual, plane_commutator_residual, wilson_line, FdOpts, GaugeField, PathSpec, WilsonOpts,
};
use crate::mat::{cr, eye, fro};
use crate::morphism::{certify_causal, certify_sd, lifted_affine_causal};
use crate::pullback::{
    patching_data, path_independence_residual, pullback_connection_checked,
    verify_morphism_symmetry, SymmetryTols,
};
use crate::report::{CheckRecord, Report};
use crate::rng::Rng;
use crate::spinor::{outer, skew, AlphaPlane, Bispinor};
use crate::grassmann::Parity;
use crate::superspace::{
    anticommutator, line_integrability_residual, n_generators, spanning_family, susy_generator,
    GenKind, SuperVectorOp,
};
use crate::supermorphism::{
    certify_extended, form_preservation_residual, vv_compatibility_residual, SuperNullLine,
    SuperPoint,
};
use crate::xpoly::SuperField;
use std::time::Instant;

/// Run the configured suite(s) and assemble the report.
pub fn run(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let mut records = Vec::new();
    let kinds: Vec<SuiteKind> = match config.suite {
        SuiteKind::All => vec![
            SuiteKind::Asdym,
            SuiteKind::Pullback,
            SuiteKind::Contact,
            SuiteKind::Super,
            SuiteKind::Reduction,
        ],
        k => vec![k],
    };
    for kind in kinds {
        match kind {
            SuiteKind::Asdym => asdym_suite(config, &mut records)?,
            SuiteKind::Pullback => pullback_suite(config, &mut records)?,
            SuiteKind::Contact => contact_suite(config, &mut records)?,
            SuiteKind::Super => super_suite(config, &mut records)?,
            SuiteKind::Reduction => reduction_suite(config, &mut records)?,
            SuiteKind::All => unreachable!(),
        }
    }
    let wall_ms = start.elapsed().as_millis() as u64;
    Ok(Report::new(config.clone(), records, wall_ms))
}

fn sample_points(config: &RunConfig, field: &GaugeField, salt: u64) -> Vec<Bispinor> {
    let region = config.region.to_region(config.seed ^ salt);
    region.sample(field.singular.as_ref())
}

/// Field-level certification: the anti-self-duality residual, the
/// alpha-plane commutator, and a Wilson parallelogram loop.
fn asdym_suite(config: &RunConfig, records: &mut Vec<CheckRecord>) -> Result<()> {
    let field = config.field.build()?;
    let fd = FdOpts::default();
    let points = sample_points(config, &field, 0x0a5d);

    let mut rec = CheckRecord::new("asd_residual", "field-asd", config.tol("asd_field"));
    let mut max = 0.0f64;
    let mut mean = 0.0f64;
    let mut used = 0usize;
    for x in &points {
        match asd_residual(&field, x, &fd) {
            Ok(r) => {
                max = max.max(r);
                mean += r;
                used += 1;
            }
            Err(e) => rec.errors.push(format!("{e}")),
        }
    }
    if used > 0 {
        mean /= used as f64;
    }
    records.push(rec.with_stats(max, mean, used));

    let mut rec =
        CheckRecord::new("plane_flatness", "alpha-plane-commutator", config.tol("plane_flatness"));
    let mut rng = Rng::new(config.seed ^ 0x91);
    let mut max = 0.0f64;
    let mut mean = 0.0f64;
    let mut used = 0usize;
    for x in points.iter().take(25) {
        let l1 = rng.spinor();
        let l2 = rng.spinor();
        if skew(&l1, &l2).norm() < 0.1 {
            continue;
        }
        let lt = rng.cospinor();
        match plane_commutator_residual(&field, x, &l1, &l2, &lt, &fd) {
            Ok(r) => {
                max = max.max(r);
                mean += r;
                used += 1;
            }
            Err(e) => rec.errors.push(format!("{e}")),
        }
    }
    if used > 0 {
        mean /= used as f64;
    }
    records.push(rec.with_stats(max, mean, used));

    let mut rec = CheckRecord::new("wilson_loop", "alpha-plane-holonomy", config.tol("wilson_loop"));
    let mut max = 0.0f64;
    let mut used = 0usize;
    let wopts = WilsonOpts::default();
    for x in points.iter().take(5) {
        let lt = rng.cospinor();
        let u = outer(&rng.spinor(), &lt).scale(cr(0.4));
        let v = outer(&rng.spinor(), &lt).scale(cr(0.4));
        let lp = PathSpec::parallelogram(*x, u, v);
        match wilson_line(&field, &lp, &wopts) {
            Ok(w) => {
                max = max.max(fro(&(&w - &eye(field.n))));
                used += 1;
            }
            Err(e) => rec.errors.push(format!("{e}")),
        }
    }
    records.push(rec.with_stats(max, max, used));
    Ok(())
}

/// The headline suite: identity law, bilinearity, preservation of the
/// anti-self-dual equations by the pullback, path independence and patching
/// invariance.
fn pullback_suite(config: &RunConfig, records: &mut Vec<CheckRecord>) -> Result<()> {
    let field = config.field.build()?;
    let morphism = config.morphism.build_sd()?;
    let points = sample_points(config, &field, 0x9011);

    // identity law on this field, independent of the configured morphism
    let identity = crate::morphism::identity_sd();
    let mut rec = CheckRecord::new("identity_law", "pullback-identity", config.tol("identity_law"));
    let mut max = 0.0f64;
    let mut mean = 0.0f64;
    let mut used = 0usize;
    for x in &points {
        let got = match pullback_connection_checked(&identity, &field, x) {
            Ok((g, _)) => g,
            Err(e) => {
                rec.errors.push(format!("{e}"));
                continue;
            }
        };
        match field.eval_at(x) {
            Ok(want) => {
                let mut r = 0.0f64;
                for k in 0..4 {
                    r = r.max(fro(&(&got[k] - &want[k])));
                }
                max = max.max(r);
                mean += r;
                used += 1;
            }
            Err(e) => rec.errors.push(format!("{e}")),
        }
    }
    if used > 0 {
        mean /= used as f64;
    }
    records.push(rec.with_stats(max, mean, used));

    // bilinearity + asd preservation + holonomy of the assembled pullback
    let region = config.region.to_region(config.seed ^ 0x51);
    let tols = SymmetryTols {
        asd: config.tol("pullback_asd"),
        bilinearity: config.tol("bilinearity"),
        holonomy: config.tol("wilson_loop"),
    };
    let sym = verify_morphism_symmetry(&morphism, &field, &region, &tols);
    let mut rec =
        CheckRecord::new("pullback_asd", "pullback-preserves-asd", config.tol("pullback_asd"));
    rec.errors.extend(sym.errors.iter().cloned());
    records.push(rec.with_stats(sym.max_asd, sym.mean_asd, sym.samples_used));
    records.push(
        CheckRecord::new("bilinearity", "pullback-linearity", config.tol("bilinearity"))
            .with_stats(sym.max_bilinearity, sym.max_bilinearity, sym.samples_used),
    );
    records.push(
        CheckRecord::new("pullback_holonomy", "pullback-plane-holonomy", config.tol("wilson_loop"))
            .with_stats(sym.max_holonomy, sym.max_holonomy, sym.samples_used),
    );

    // path independence and patching invariance on a plane family
    let mut rng = Rng::new(config.seed ^ 0x77);
    let wopts = WilsonOpts::default();
    let mut rec = CheckRecord::new(
        "path_independence",
        "wilson-path-independence",
        config.tol("path_independence"),
    );
    let mut max = 0.0f64;
    let mut used = 0usize;
    for _ in 0..3 {
        let plane = AlphaPlane::new(rng.ball_point(&config.region.basepoint_bispinor(), 0.3), rng.cospinor());
        let x1 = plane.point([rng.complex_unit(), rng.complex_unit()]);
        let x2 = plane.point([
            rng.complex_unit() + cr(1.0),
            rng.complex_unit() + cr(1.0),
        ]);
        match path_independence_residual(&morphism, &field, &plane, &x1, &x2, &wopts) {
            Ok(r) => {
                max = max.max(r);
                used += 1;
            }
            Err(e) => rec.errors.push(format!("{e}")),
        }
    }
    records.push(rec.with_stats(max, max, used));

    let mut rec =
        CheckRecord::new("patching_invariance", "patching-matrix", config.tol("patching"));
    let mut max = 0.0f64;
    let mut used = 0usize;
    for _ in 0..2 {
        // keep the plane clear of both reference codirections
        let plane = AlphaPlane::new(
            rng.ball_point(&Bispinor::zero(), 0.2),
            crate::spinor::CoSpinor::new(cr(1.0), cr(0.5) + rng.complex_unit() * cr(0.3)),
        );
        let mut pairs = Vec::new();
        for _ in 0..10 {
            pairs.push((
                plane.point([rng.complex_unit() * cr(0.5), rng.complex_unit() * cr(0.5)]),
                plane.point([rng.complex_unit() * cr(0.5), rng.complex_unit() * cr(0.5)]),
            ));
        }
        for (x1, x2) in pairs {
            let d1 = patching_data(&morphism, &field, &plane, &x1, &wopts);
            let d2 = patching_data(&morphism, &field, &plane, &x2, &wopts);
            match (d1, d2) {
                (Ok(a), Ok(b)) => {
                    max = max.max(fro(&(&a.g - &b.g)));
                    used += 1;
                }
                (Err(e), _) | (_, Err(e)) => rec.errors.push(format!("{e}")),
            }
        }
    }
    records.push(rec.with_stats(max, max, used));
    Ok(())
}

/// Contact certification of the configured morphism, self-dual and causal.
fn contact_suite(config: &RunConfig, records: &mut Vec<CheckRecord>) -> Result<()> {
    let morphism = config.morphism.build_sd()?;
    let rep = certify_sd(&morphism, config.seed);
    let mut rec = CheckRecord::new("contact_sd", "contact-condition", config.tol("contact"));
    rec.errors.extend(rep.errors.iter().cloned());
    records.push(rec.with_stats(rep.max_residual, rep.mean_residual, rep.samples));

    // causal twin where the catalog provides one
    if let Ok((l, lt, b)) = config.morphism.affine_parts() {
        let causal = lifted_affine_causal(l, lt, b)?;
        let rep = certify_causal(&causal, config.seed);
        let mut rec =
            CheckRecord::new("contact_causal", "null-curve-contact", config.tol("contact"));
        rec.errors.extend(rep.errors.iter().cloned());
        records.push(rec.with_stats(rep.max_residual, rep.mean_residual, rep.samples));
    } else if matches!(config.morphism, MorphismSpec::Squaring) {
        let causal = crate::morphism::squaring_causal();
        let rep = certify_causal(&causal, config.seed);
        let mut rec =
            CheckRecord::new("contact_causal", "null-curve-contact", config.tol("contact"));
        rec.errors.extend(rep.errors.iter().cloned());
        records.push(rec.with_stats(rep.max_residual, rep.mean_residual, rep.samples));
    }
    Ok(())
}

/// Flat algebra exactness, a Grassmann-engine law, and extended-morphism
/// certification.
fn super_suite(config: &RunConfig, records: &mut Vec<CheckRecord>) -> Result<()> {
    let nsusy = config.n_susy;
    // flat algebra over every index combination
    let family = spanning_family(nsusy);
    let xs = vec![
        Bispinor::from_rows([cr(0.3), cr(-0.2)], [cr(0.1), cr(0.4)]),
        Bispinor::from_rows([cr(-0.5), cr(0.2)], [cr(0.6), cr(-0.1)]),
    ];
    let mut max = 0.0f64;
    for i in 0..nsusy {
        for al in 0..2 {
            for j in 0..nsusy {
                for be in 0..2 {
                    let qa = susy_generator(GenKind::Q, i, al, nsusy)?;
                    let qb = susy_generator(GenKind::Q, j, be, nsusy)?;
                    max = max.max(anticommutator(&qa, &qb)?.family_norm(&family, &xs));
                    let ta = susy_generator(GenKind::Qt, i, al, nsusy)?;
                    let tb = susy_generator(GenKind::Qt, j, be, nsusy)?;
                    max = max.max(anticommutator(&ta, &tb)?.family_norm(&family, &xs));
                    let mut rel = anticommutator(&qa, &tb)?;
                    if i == j {
                        let mut want = SuperVectorOp::zero(nsusy, 1, Parity::Even);
                        want.a[2 * al + be] =
                            SuperField::scalar(n_generators(nsusy), crate::mat::c(0.0, 2.0));
                        rel = rel.sub(&want);
                    }
                    max = max.max(rel.family_norm(&family, &xs));
                }
            }
        }
    }
    records.push(
        CheckRecord::new("flat_susy_algebra", "susy-relations", config.tol("flat_susy"))
            .with_stats(max, max, 4 * nsusy * nsusy * 3),
    );

    // associativity spot check on the sparse engine
    let mut rng = Rng::new(config.seed ^ 0xa11);
    let n_gen = n_generators(nsusy);
    let mut max = 0.0f64;
    for _ in 0..50 {
        let rand_poly = |rng: &mut Rng| {
            let mut p = crate::grassmann::GrassmannPoly::zero(n_gen);
            for _ in 0..5 {
                let mask = (rng.next_u64() as u32) & ((1 << n_gen) - 1);
                let mut m = ndarray::Array2::zeros((1, 1));
                m[[0, 0]] = rng.complex_unit();
                p.insert(mask, m);
            }
            p
        };
        let a = rand_poly(&mut rng);
        let b = rand_poly(&mut rng);
        let c = rand_poly(&mut rng);
        max = max.max(a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c))).norm());
    }
    records.push(
        CheckRecord::new("grassmann_associativity", "grassmann-engine", config.tol("grassmann"))
            .with_stats(max, max, 50),
    );

    // extended morphism certification
    match config.morphism.build_extended() {
        Ok(ext) => {
            let rep = certify_extended(&ext, nsusy, config.seed);
            let mut rec = CheckRecord::new(
                "vv_compatibility",
                "frame-compatibility",
                config.tol("vv_compatibility"),
            );
            rec.errors.extend(rep.errors.iter().cloned());
            records.push(rec.with_stats(rep.max_vv, rep.max_vv, 5));
            records.push(
                CheckRecord::new("mm_product", "susy-preservation", config.tol("mm_product"))
                    .with_stats(rep.max_mm, rep.max_mm, 15),
            );
            records.push(
                CheckRecord::new("super_contact", "super-null-contact", config.tol("super_contact"))
                    .with_stats(rep.max_contact, rep.max_contact, 15),
            );
        }
        Err(e) => {
            records.push(
                CheckRecord::new(
                    "vv_compatibility",
                    "frame-compatibility",
                    config.tol("vv_compatibility"),
                )
                .failed(format!("{e}")),
            );
        }
    }
    Ok(())
}

/// Embedding of the configured abelian field and preservation of its form
/// under the extended morphism.
fn reduction_suite(config: &RunConfig, records: &mut Vec<CheckRecord>) -> Result<()> {
    // the reduction encodes the field equations at N = 3 regardless of the
    // configured oracle count
    let nsusy = 3;
    // the embedding needs an abelian polynomial potential; fields without
    // one fall back to the standard constant-curvature catalog entry
    let comps = config.field.poly_components().unwrap_or_else(|_| {
        crate::embedding::constant_maxwell_potential(
            [[cr(0.8), cr(0.1)], [cr(0.1), cr(-0.4)]],
            [[cr(0.2), cr(0.3)], [cr(0.3), cr(0.5)]],
        )
    });
    let data = match solve_embedding(&comps, 1, nsusy, &SolveOpts::default()) {
        Ok(d) => d,
        Err(e) => {
            records.push(
                CheckRecord::new(
                    "line_integrability",
                    "embedded-integrability",
                    config.tol("line_integrability"),
                )
                .failed(format!("{e}")),
            );
            return Ok(());
        }
    };
    let phi = embed_ym(&data);
    let family = spanning_family(nsusy);
    let xs = vec![
        Bispinor::from_rows([cr(0.2), cr(0.3)], [cr(-0.1), cr(0.4)]),
        Bispinor::from_rows([cr(-0.4), cr(0.1)], [cr(0.5), cr(-0.2)]),
    ];
    let mut rng = Rng::new(config.seed ^ 0xed);
    let mut max = 0.0f64;
    for _ in 0..4 {
        let l = rng.spinor();
        let lt = rng.cospinor();
        max = max.max(line_integrability_residual(&phi, &l, &lt, &xs, &family)?);
    }
    records.push(
        CheckRecord::new(
            "line_integrability",
            "embedded-integrability",
            config.tol("line_integrability"),
        )
        .with_stats(max, max, 4),
    );

    let g = gauge_condition_residual(&data, &xs);
    records.push(
        CheckRecord::new("gauge_condition", "embedded-gauge", config.tol("gauge_condition"))
            .with_stats(g, g, xs.len()),
    );

    match config.morphism.build_extended() {
        Ok(ext) => {
            let z1 = SuperPoint::new(
                rng.ball_point(&Bispinor::zero(), 0.4),
                (0..nsusy).map(|_| [rng.complex_unit(), rng.complex_unit()]).collect(),
                (0..nsusy).map(|_| [rng.complex_unit(), rng.complex_unit()]).collect(),
            );
            let z2 = if nsusy >= 2 { z1.slot_rescaled(0, cr(2.0)) } else { z1.odd_negated() };
            let mut rec = CheckRecord::new(
                "form_preservation",
                "embedded-form",
                config.tol("form_preservation"),
            );
            let mut max = 0.0f64;
            let mut used = 0usize;
            for _ in 0..20 {
                let l = rng.spinor();
                let lt = rng.cospinor();
                match form_preservation_residual(&ext, &phi, &z1, &z2, &l, &lt) {
                    Ok(r) => {
                        max = max.max(r);
                        used += 1;
                    }
                    Err(e) => rec.errors.push(format!("{e}")),
                }
            }
            records.push(rec.with_stats(max, max, used));

            // frame compatibility along a bosonic line of the region
            let line = crate::spinor::NullLine::new(
                rng.ball_point(&Bispinor::zero(), 0.4),
                rng.spinor(),
                rng.cospinor(),
            );
            let vv = vv_compatibility_residual(&ext, &line);
            records.push(
                CheckRecord::new(
                    "reduction_vv",
                    "frame-compatibility",
                    config.tol("vv_compatibility"),
                )
                .with_stats(vv, vv, 1),
            );

            // pullback of the embedded connection stays line integrable
            let mut max = 0.0f64;
            let mut rec = CheckRecord::new(
                "pullback_line_integrability",
                "pullback-integrability",
                config.tol("line_integrability").max(1e-7),
            );
            let mut used = 0usize;
            for _ in 0..2 {
                let z = SuperPoint::new(
                    rng.ball_point(&Bispinor::zero(), 0.3),
                    (0..nsusy).map(|_| [rng.complex_unit(), rng.complex_unit()]).collect(),
                    (0..nsusy).map(|_| [rng.complex_unit(), rng.complex_unit()]).collect(),
                );
                let l = rng.spinor();
                let lt = rng.cospinor();
                let line = SuperNullLine::new(z, l, lt);
                match crate::supermorphism::super_prolong(
                    &ext.apply_to_curve(&line.curve()),
                    cr(0.0),
                    1e-6,
                ) {
                    Ok(pr) => {
                        max = max.max(pr.mm.product_defect()).max(pr.defect);
                        used += 1;
                    }
                    Err(e) => rec.errors.push(format!("{e}")),
                }
            }
            records.push(rec.with_stats(max, max, used));
        }
        Err(e) => {
            records.push(
                CheckRecord::new(
                    "form_preservation",
                    "embedded-form",
                    config.tol("form_preservation"),
                )
                .failed(format!("{e}")),
            );
        }
    }
    Ok(())
}
