//! Numerical and symbolic verification toolkit for nonlocal pullback
//! symmetries of complexified Yang-Mills data.
//!
//! The crate certifies, at desk scale, that the catalog's structure-
//! preserving maps act as symmetries: self-dual maps on the twistor
//! correspondence space preserve the anti-self-dual equations under the
//! nonlocal pullback connection, and extended causal maps on superspace
//! preserve super-null-line integrability, the embedded Yang-Mills form and
//! its gauge condition.
//!
//! ```
//! use ymsym::field::{asd_residual, make_instanton, FdOpts};
//! use ymsym::mat::cr;
//! use ymsym::morphism::lifted_affine_sd_random;
//! use ymsym::pullback::{pullback_field, verify_morphism_symmetry, Region, SymmetryTols};
//! use ymsym::spinor::Bispinor;
//!
//! let field = make_instanton(cr(2.0), Bispinor::from_rows(
//!     [cr(3.0), cr(0.0)],
//!     [cr(0.0), cr(3.0)],
//! ));
//! let map = lifted_affine_sd_random(42, 0.3);
//!
//! // the pulled-back potential is again anti-self-dual
//! let pulled = pullback_field(&map, &field, false);
//! let r = asd_residual(&pulled, &Bispinor::zero(), &FdOpts::default()).unwrap();
//! assert!(r < 1e-5);
//!
//! // or run the aggregate verifier over a sampled region
//! let region = Region { basepoint: Bispinor::zero(), radius: 0.8, samples: 4, seed: 7 };
//! let report = verify_morphism_symmetry(&map, &field, &region, &SymmetryTols::default());
//! assert!(report.pass);
//! ```

pub mod error;
pub mod mat;
pub mod rng;
pub mod spinor;

pub mod field;
pub mod morphism;
pub mod pullback;
pub mod grassmann;
pub mod xpoly;
pub mod superspace;
pub mod embedding;
pub mod supermorphism;

pub mod config;
pub mod report;
pub mod suite;

pub use error::{Error, Result};

pub use field::GaugeField;
pub use morphism::{CausalMorphism, SelfDualMorphism};
pub use spinor::{AlphaPlane, Bispinor, CoSpinor, NullLine, Spinor, Twistor};
pub use supermorphism::{ExtendedCausalMorphism, SuperCausalMorphism, SuperNullLine, SuperPoint};
pub use superspace::SuperConnection;
