//! Complex images of rational gravitational lenses.
//!
//! The lens map `eta(z) = z - alpha(z, conj z)` is complexified by treating
//! `z1 = z` and `z2 = conj z` as independent variables. Images are the fixed
//! points of `f(z1, z2) = (zeta + alpha1, conj zeta + alpha2)`; the real ones
//! (`z2 = conj z1`) are the physical images and the rest are spurious. The sum
//! of `1 / det(I - J_f)` over all fixed points is 1 for every source off the
//! caustics, which [`lefschetz`] computes and the rest of the crate checks.

pub mod algebra;
pub mod caustics;
pub mod config;
pub mod lefschetz;
pub mod lens;
pub mod oracle;
pub mod solver;

pub use algebra::{BiPoly, Complex, RationalFn, UniPoly};
pub use caustics::{
    critical_curves, map_to_caustics, multiplicity_scan, CausticsError, MultiplicityGrid, Polyline,
    Window,
};
pub use config::{load_model, parse_model, ConfigError};
pub use lefschetz::{
    jacobian_identity_residual, lefschetz_sum, moment_sum, real_invariant, InvariantError,
    InvariantReport,
};
pub use lens::{DeflectionModel, ModelError, SourcePos, ValidationReport};
pub use oracle::{multistart_newton_real, OracleResult};
pub use solver::{solve_fixed_points, FixedPoint, FixedPointSet, SolveError, SolveOptions};
