//! Run configuration: suite selection, catalog specs, sampling region,
//! tolerances and seed. Serialized as JSON with a stable field order so
//! reports echo byte-identically.

use crate::error::{Error, Result};
use crate::field::{
    make_constant_asd, make_constant_maxwell, make_instanton, make_perturbed, zero_field,
    GaugeField,
};
use crate::mat::{c, cr, zeros, CMat, C};
use crate::morphism::{
    fiber_shift_sd, identity_sd, lifted_affine_sd, lifted_affine_sd_random, squaring_sd,
    SelfDualMorphism,
};
use crate::rng::Rng;
use crate::spinor::Bispinor;
use crate::supermorphism::{extend_causal, identity_extended, ExtendedCausalMorphism, MatXPoly};
use crate::xpoly::XPoly;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Cx = [f64; 2];

fn cx(v: Cx) -> C {
    c(v[0], v[1])
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Asdym,
    Pullback,
    Contact,
    Super,
    Reduction,
    All,
}

impl std::str::FromStr for SuiteKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asdym" => Ok(SuiteKind::Asdym),
            "pullback" => Ok(SuiteKind::Pullback),
            "contact" => Ok(SuiteKind::Contact),
            "super" => Ok(SuiteKind::Super),
            "reduction" => Ok(SuiteKind::Reduction),
            "all" => Ok(SuiteKind::All),
            other => Err(Error::ConfigError(format!("unknown suite '{other}'"))),
        }
    }
}

/// Gauge-field catalog entry.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FieldSpec {
    Zero { n: usize },
    ConstantAsd { f00: Cx, f01: Cx, f11: Cx },
    ConstantMaxwell { f00: Cx, f01: Cx, f11: Cx, ft00: Cx, ft01: Cx, ft11: Cx },
    Instanton { rho: Cx, center: f64 },
    /// instanton plus a constant self-dual term: the detection control
    Perturbed { strength: f64 },
    /// quadratic abelian potential violating the source-free equations
    NonMaxwell,
}

impl FieldSpec {
    pub fn build(&self) -> Result<GaugeField> {
        let lift1 = |z: C| -> CMat {
            let mut m = zeros(1);
            m[[0, 0]] = z;
            m
        };
        match self {
            FieldSpec::Zero { n } => {
                if *n == 0 {
                    return Err(Error::ConfigError("field rank must be positive".into()));
                }
                Ok(zero_field(*n))
            }
            FieldSpec::ConstantAsd { f00, f01, f11 } => make_constant_asd([
                [lift1(cx(*f00)), lift1(cx(*f01))],
                [lift1(cx(*f01)), lift1(cx(*f11))],
            ]),
            FieldSpec::ConstantMaxwell { f00, f01, f11, ft00, ft01, ft11 } => {
                make_constant_maxwell(
                    [[cx(*f00), cx(*f01)], [cx(*f01), cx(*f11)]],
                    [[cx(*ft00), cx(*ft01)], [cx(*ft01), cx(*ft11)]],
                )
            }
            FieldSpec::Instanton { rho, center } => {
                Ok(make_instanton(cx(*rho), center_bispinor(*center)))
            }
            FieldSpec::Perturbed { strength } => {
                let base = make_instanton(cr(2.0), center_bispinor(3.0));
                Ok(make_perturbed(&base, *strength))
            }
            FieldSpec::NonMaxwell => {
                let comps = crate::embedding::non_maxwell_potential();
                Ok(poly_field(&comps))
            }
        }
    }

    /// Polynomial components when the entry is abelian-polynomial; the
    /// reduction suite solves on these.
    pub fn poly_components(&self) -> Result<[XPoly; 4]> {
        match self {
            FieldSpec::Zero { .. } => {
                Ok([XPoly::zero(), XPoly::zero(), XPoly::zero(), XPoly::zero()])
            }
            FieldSpec::ConstantAsd { f00, f01, f11 } => {
                Ok(crate::embedding::constant_maxwell_potential(
                    [[cx(*f00), cx(*f01)], [cx(*f01), cx(*f11)]],
                    [[cr(0.0), cr(0.0)], [cr(0.0), cr(0.0)]],
                ))
            }
            FieldSpec::ConstantMaxwell { f00, f01, f11, ft00, ft01, ft11 } => {
                Ok(crate::embedding::constant_maxwell_potential(
                    [[cx(*f00), cx(*f01)], [cx(*f01), cx(*f11)]],
                    [[cx(*ft00), cx(*ft01)], [cx(*ft01), cx(*ft11)]],
                ))
            }
            FieldSpec::NonMaxwell => Ok(crate::embedding::non_maxwell_potential()),
            other => Err(Error::ConfigError(format!(
                "field {other:?} has no abelian polynomial form"
            ))),
        }
    }
}

fn center_bispinor(scale: f64) -> Bispinor {
    Bispinor::from_rows([cr(scale), cr(0.0)], [cr(0.0), cr(scale)])
}

/// Gauge-field view of a polynomial abelian potential.
pub fn poly_field(comps: &[XPoly; 4]) -> GaugeField {
    let comps = comps.clone();
    let eval: crate::field::EvalFn = std::sync::Arc::new(move |x| {
        Ok([comps[0].eval(x), comps[1].eval(x), comps[2].eval(x), comps[3].eval(x)])
    });
    GaugeField { n: 1, eval, deriv: None, singular: None }
}

/// Morphism catalog entry.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum MorphismSpec {
    Identity,
    /// random invertible lift near the identity; also seeds the causal and
    /// extended variants
    AffineRandom { seed: u64, spread: f64 },
    /// dilation by a fixed factor
    Dilation { factor: Cx },
    /// contact-breaking control
    Squaring,
    /// linearity-breaking control
    FiberShift,
    /// extended frame with mismatched scale: vv-compatibility control
    ScaleMismatch { seed: u64, factor: f64 },
    /// extended frame depending on the odd coordinates: form control
    OddFrame { seed: u64, eps: f64 },
}

impl MorphismSpec {
    pub fn build_sd(&self) -> Result<SelfDualMorphism> {
        match self {
            MorphismSpec::Identity => Ok(identity_sd()),
            MorphismSpec::AffineRandom { seed, spread } => {
                Ok(lifted_affine_sd_random(*seed, *spread))
            }
            MorphismSpec::Dilation { factor } => lifted_affine_sd(
                [[cx(*factor), cr(0.0)], [cr(0.0), cx(*factor)]],
                [[cr(1.0), cr(0.0)], [cr(0.0), cr(1.0)]],
                Bispinor::zero(),
            ),
            MorphismSpec::Squaring => Ok(squaring_sd()),
            MorphismSpec::FiberShift => Ok(fiber_shift_sd(Bispinor::from_rows(
                [cr(0.4), cr(0.1)],
                [cr(0.0), cr(0.3)],
            ))),
            other => Err(Error::ConfigError(format!(
                "morphism {other:?} is not a self-dual catalog entry"
            ))),
        }
    }

    pub fn affine_parts(&self) -> Result<([[C; 2]; 2], [[C; 2]; 2], Bispinor)> {
        match self {
            MorphismSpec::Identity => Ok((
                [[cr(1.0), cr(0.0)], [cr(0.0), cr(1.0)]],
                [[cr(1.0), cr(0.0)], [cr(0.0), cr(1.0)]],
                Bispinor::zero(),
            )),
            MorphismSpec::AffineRandom { seed, .. }
            | MorphismSpec::ScaleMismatch { seed, .. }
            | MorphismSpec::OddFrame { seed, .. } => {
                let spread = match self {
                    MorphismSpec::AffineRandom { spread, .. } => *spread,
                    _ => 0.3,
                };
                let mut rng = Rng::new(*seed);
                let l = rng.gl2_near_identity(spread);
                let lt = rng.gl2_near_identity(spread);
                let b = rng.ball_point(&Bispinor::zero(), spread);
                Ok((l, lt, b))
            }
            MorphismSpec::Dilation { factor } => Ok((
                [[cx(*factor), cr(0.0)], [cr(0.0), cx(*factor)]],
                [[cr(1.0), cr(0.0)], [cr(0.0), cr(1.0)]],
                Bispinor::zero(),
            )),
            other => Err(Error::ConfigError(format!("morphism {other:?} has no affine lift"))),
        }
    }

    pub fn build_extended(&self) -> Result<ExtendedCausalMorphism> {
        match self {
            MorphismSpec::Identity => Ok(identity_extended()),
            MorphismSpec::AffineRandom { .. } | MorphismSpec::Dilation { .. } => {
                let (l, lt, b) = self.affine_parts()?;
                extend_causal(l, lt, b, MatXPoly::constant(l), MatXPoly::constant(lt))
            }
            MorphismSpec::ScaleMismatch { factor, .. } => {
                let (l, lt, b) = self.affine_parts()?;
                let s = cr(*factor);
                let vt = [[lt[0][0] * s, lt[0][1] * s], [lt[1][0] * s, lt[1][1] * s]];
                extend_causal(l, lt, b, MatXPoly::constant(l), MatXPoly::constant(vt))
            }
            MorphismSpec::OddFrame { eps, .. } => {
                let (l, lt, b) = self.affine_parts()?;
                let mut ext =
                    extend_causal(l, lt, b, MatXPoly::constant(l), MatXPoly::constant(lt))?;
                ext.odd_frame_eps = cr(*eps);
                Ok(ext)
            }
            other => Err(Error::ConfigError(format!(
                "morphism {other:?} is not an extended catalog entry"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug)]
pub struct RegionSpec {
    pub basepoint: [Cx; 4],
    pub radius: f64,
    pub samples: usize,
}

impl Default for RegionSpec {
    fn default() -> Self {
        RegionSpec { basepoint: [[0.0, 0.0]; 4], radius: 1.0, samples: 100 }
    }
}

impl RegionSpec {
    pub fn basepoint_bispinor(&self) -> Bispinor {
        Bispinor::from_rows(
            [cx(self.basepoint[0]), cx(self.basepoint[1])],
            [cx(self.basepoint[2]), cx(self.basepoint[3])],
        )
    }

    pub fn to_region(&self, seed: u64) -> crate::pullback::Region {
        crate::pullback::Region {
            basepoint: self.basepoint_bispinor(),
            radius: self.radius,
            samples: self.samples,
            seed,
        }
    }
}

pub fn default_tolerances() -> BTreeMap<String, f64> {
    let mut t = BTreeMap::new();
    for (k, v) in [
        ("asd_field", 1e-8),
        ("bilinearity", 1e-7),
        ("contact", 1e-8),
        ("flat_susy", 1e-12),
        ("form_preservation", 1e-8),
        ("gauge_condition", 1e-10),
        ("grassmann", 1e-11),
        ("identity_law", 1e-12),
        ("line_integrability", 1e-8),
        ("mm_product", 1e-10),
        ("patching", 1e-6),
        ("path_independence", 1e-6),
        ("plane_flatness", 1e-8),
        ("pullback_asd", 1e-5),
        ("super_contact", 1e-8),
        ("vv_compatibility", 1e-10),
        ("wilson_loop", 1e-6),
    ] {
        t.insert(k.to_string(), v);
    }
    t
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RunConfig {
    pub suite: SuiteKind,
    pub field: FieldSpec,
    pub morphism: MorphismSpec,
    pub region: RegionSpec,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub n_susy: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suite: SuiteKind::All,
            field: FieldSpec::Instanton { rho: [2.0, 0.0], center: 3.0 },
            morphism: MorphismSpec::AffineRandom { seed: 42, spread: 0.3 },
            region: RegionSpec::default(),
            tolerances: default_tolerances(),
            seed: 42,
            n_susy: 3,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.region.samples == 0 {
            return Err(Error::ConfigError("sample count must be at least 1".into()));
        }
        if self.region.radius <= 0.0 {
            return Err(Error::ConfigError("region radius must be positive".into()));
        }
        if !(1..=3).contains(&self.n_susy) {
            return Err(Error::ConfigError("n_susy must be 1, 2 or 3".into()));
        }
        for (k, v) in &self.tolerances {
            if *v <= 0.0 {
                return Err(Error::ConfigError(format!("tolerance '{k}' must be positive")));
            }
        }
        Ok(())
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .or_else(|| default_tolerances().get(name).copied())
            .unwrap_or(1e-8)
    }

    pub fn from_json(s: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            serde_json::from_str(s).map_err(|e| Error::ConfigError(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
