//! Numerical differential geometry of metallic product space forms.
//!
//! A metallic structure on a Riemannian manifold is a (1,1)-tensor φ obeying
//! the quadratic relation φ² = p·φ + q·I for positive integers p, q, together
//! with the compatibility g(φX, φY) = p·g(X, φY) + q·g(X, Y).  On a product
//! M₁(c₁) × M₂(c₂) of real space forms such a structure is induced by the
//! canonical almost product structure F (F = +id on TM₁, −id on TM₂), and the
//! ambient curvature tensor has a closed form in terms of either F or φ.
//!
//! This crate builds those ambient spaces numerically, differentiates
//! user-supplied immersions through second order, assembles the induced
//! metric, second fundamental form and normal connection, and evaluates the
//! curvature invariants (scalar and normal scalar curvature, Casorati
//! curvatures, Chen δ-invariants, partial Ricci infima) that enter a family
//! of five optimal inequalities.  Each inequality is verified pointwise with
//! a signed slack; negative slack beyond tolerance is reported as a
//! falsification event rather than silently absorbed.
//!
//! Module map:
//! - [`metallic`]: φ/F linear algebra and structure checks;
//! - [`ambient`]: realized product space forms and their curvature operators;
//! - [`immersion`]: expression DSL, second-order jets, frames, slant analysis;
//! - [`invariants`]: curvature invariants and frame-space optimizers;
//! - [`inequalities`]: inequality verifiers, equality-case detectors, and
//!   specializations to the named submanifold classes;
//! - [`catalog`]: built-in example immersions and randomized families.

pub mod ambient;
pub mod catalog;
pub mod error;
pub mod immersion;
pub mod inequalities;
pub mod invariants;
pub mod metallic;

pub use ambient::{AmbientPoint, AmbientTangent, FactorRealization, FactorSpec, ProductSpaceForm, SpaceSpec};
pub use error::{GeoError, Result};
pub use immersion::{
    ImmersionSpec, NormalCurvature, PhiDecomposition, SlantData, SubmanifoldPointData,
};
pub use inequalities::{
    derivation_residuals, specialize, verify_casorati, verify_chen_delta, verify_mean_scalar,
    verify_shape_ricci, verify_wintgen, DerivationCheck, EqualityPattern, InequalityResult,
    PointBundle, RhsContext, ShapeRicciConstants, SpecializationCheck, SubmanifoldType,
    TheoremAux, TheoremId, TraceData, TraceSquaredReading, VerifyOptions,
};
pub use invariants::{
    chen_lemma_check, ddvv_component_check, CasoratiData, Certificate, ChenDeltaData,
    ChenLemmaCheck, CurvatureInvariants, CurvatureTensor, DdvvCheck, OmegaData, OptimizerConfig,
};
pub use metallic::{Branch, CurvSign, Endomorphism, InnerProduct, MetallicParams};
