//! Polynomial and rational-function arithmetic over the complex numbers.
//!
//! Everything in this module is dense and double precision. Degrees stay
//! small (the fixed-point systems of the built-in lens models have total
//! degree below ten), so the algorithms favour structural exactness over
//! asymptotic speed.

mod bipoly;
mod newton;
mod rational;
mod resultant;
mod roots;
mod unipoly;

pub use bipoly::{BiPoly, Var};
pub use newton::{newton_polish_2d, system_residual, NewtonResult};
pub use rational::{RationalFn, RationalValue};
pub use resultant::resultant_z2;
pub use roots::{roots, roots_with_limit, DEFAULT_MAX_ROOT_ITER};
pub use unipoly::UniPoly;

use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type Complex = num_complex::Complex64;

/// Coefficients below this fraction of the largest coefficient magnitude are
/// treated as zero when trimming trailing terms.
pub const ZERO_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgebraError {
    #[error("polynomial has degree 0 in z2; eliminate the other variable or solve directly")]
    DegenerateElimination,
    #[error("root finding needs a polynomial of degree >= 1")]
    ConstantPolynomial,
    #[error("root iteration did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        best: Vec<Complex>,
    },
    #[error("2x2 Jacobian is singular (|det| = {det:e})")]
    SingularJacobian { det: f64 },
}

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}
