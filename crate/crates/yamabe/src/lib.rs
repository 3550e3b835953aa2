//! Numerical workbench for gradient Yamabe solitons.
//!
//! The crate evaluates curvature of coordinate-chart metrics through
//! truncated-Taylor (jet) arithmetic, provides the closed-form curvature of
//! warped products `dr² + F′(r)²ḡ` over constant-curvature fibers, checks
//! the soliton equation `(R − ρ)g = ∇∇F` and its derived identities as
//! numerical residual suites, and integrates the radial profile ODE with
//! trajectory classification. A batch CLI drives jobs from TOML configs.

pub mod cli;
pub mod config;
pub mod expr;
pub mod geometry;
pub mod ode;
pub mod report;
pub mod sample;
pub mod soliton;
pub mod tol;
pub mod warped;

pub use expr::{eval_jet, eval_scalar, parse, Bindings, Expr, ExprError, Func, Jet, JetSpace};
pub use geometry::{CurvaturePack, GeometryError, MetricField, TensorValue, Variance};
pub use ode::{ClassLabel, Classification, IntegrationStatus, OdeState, ProfileTrajectory};
pub use soliton::{IdentityReport, SolitonKind, SolitonSpec};
pub use tol::Tolerances;
pub use warped::{ProductKind, WarpedCurvature, WarpedProfilePoint};
