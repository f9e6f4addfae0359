//! Signed magnifications and the magnification invariant.
//!
//! At a transversal fixed point `q` of the complexified lens map the local
//! contribution to the holomorphic Lefschetz number is `1 / det(I - J_f)(q)`.
//! At a real image this is the ordinary signed magnification `1 / det J_eta`.
//! Summed over every complex fixed point the contributions give exactly 1 for
//! any rational lensing map whose deflection decays at infinity. The real
//! images alone sum to 1 only where no spurious fixed points exist.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::Complex;
use crate::lens::{DeflectionModel, ModelError, SourcePos};
use crate::solver::{solve_fixed_points, FixedPoint, FixedPointSet, SolveError, SolveOptions};

/// Moments `sum mu z1^k` are reported for `k = 0..=DEFAULT_MAX_MOMENT`.
pub const DEFAULT_MAX_MOMENT: u32 = 3;

/// Bound on `|Im mu|` at a real image, relative to `1 + |mu|`.
pub const REAL_MU_IMAG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InvariantError {
    #[error("fixed point ({re}, {im}) is degenerate (source on a caustic)")]
    DegeneratePoint { re: f64, im: f64 },
    #[error("fixed point is spurious (z2 != conj z1); no real Jacobian exists")]
    NotRealImage,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub point: FixedPoint,
    /// `None` for degenerate points.
    pub mu: Option<Complex>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub model_name: String,
    pub source: SourcePos,
    pub points: Vec<ImageRecord>,
    /// Sum of `mu` over all non-degenerate fixed points.
    pub complex_sum: Complex,
    /// Sum of `Re mu` over the real non-degenerate images.
    pub real_sum: f64,
    /// `(k, sum mu z1^k)`.
    pub moments: Vec<(u32, Complex)>,
    /// False when any fixed point is degenerate or has moved to infinity.
    pub valid: bool,
}

impl InvariantReport {
    pub fn n_fixed(&self) -> usize {
        self.points.len()
    }

    pub fn n_real(&self) -> usize {
        self.points.iter().filter(|r| r.point.is_real).count()
    }

    pub fn all_real(&self) -> bool {
        self.points.iter().all(|r| r.point.is_real)
    }

    /// `|complex_sum - 1|`.
    pub fn invariant_error(&self) -> f64 {
        (self.complex_sum - Complex::new(1.0, 0.0)).norm()
    }

    pub fn min_abs_det(&self) -> f64 {
        self.points
            .iter()
            .map(|r| r.point.transversal_det.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `1 / det(I - J_f)` at a fixed point.
pub fn magnification(fp: &FixedPoint, opts: &SolveOptions) -> Result<Complex, InvariantError> {
    if fp.degenerate || fp.transversal_det.norm() < opts.caustic_det_floor {
        return Err(InvariantError::DegeneratePoint {
            re: fp.z1.re,
            im: fp.z1.im,
        });
    }
    Ok(fp.transversal_det.inv())
}

/// Build the report for an already solved fixed-point set.
pub fn report_from_set(
    model: &DeflectionModel,
    source: SourcePos,
    set: &FixedPointSet,
    opts: &SolveOptions,
    max_moment: u32,
) -> InvariantReport {
    let mut points = Vec::with_capacity(set.points.len());
    let mut valid = set.degree_deficit == 0;
    for fp in &set.points {
        let mu = magnification(fp, opts).ok();
        valid &= mu.is_some();
        points.push(ImageRecord { point: *fp, mu });
    }
    let contributions = || points.iter().filter_map(|r| r.mu.map(|mu| (r.point, mu)));
    let complex_sum = contributions().map(|(_, mu)| mu).sum();
    let real_sum = contributions()
        .filter(|(p, _)| p.is_real)
        .map(|(_, mu)| mu.re)
        .sum();
    let moments = (0..=max_moment)
        .map(|k| {
            let m = contributions().map(|(p, mu)| mu * p.z1.powu(k)).sum();
            (k, m)
        })
        .collect();
    InvariantReport {
        model_name: model.name.clone(),
        source,
        points,
        complex_sum,
        real_sum,
        moments,
        valid,
    }
}

/// Solve and sum the magnifications of every complex fixed point.
pub fn lefschetz_sum(
    model: &DeflectionModel,
    zeta: SourcePos,
    opts: &SolveOptions,
) -> Result<InvariantReport, InvariantError> {
    let set = solve_fixed_points(model, zeta, opts)?;
    Ok(report_from_set(model, zeta, &set, opts, DEFAULT_MAX_MOMENT))
}

/// Sum of the signed magnifications of the real images only.
pub fn real_invariant(
    model: &DeflectionModel,
    zeta: SourcePos,
    opts: &SolveOptions,
) -> Result<f64, InvariantError> {
    Ok(lefschetz_sum(model, zeta, opts)?.real_sum)
}

/// `sum_q mu(q) z1(q)^k` over all complex fixed points.
pub fn moment_sum(
    model: &DeflectionModel,
    zeta: SourcePos,
    k: u32,
    opts: &SolveOptions,
) -> Result<Complex, InvariantError> {
    let set = solve_fixed_points(model, zeta, opts)?;
    let report = report_from_set(model, zeta, &set, opts, k);
    Ok(report.moments[k as usize].1)
}

/// `|det(I - J_f)(q) - det J_eta(z1)|` at a real image, the second
/// determinant taken from the real Jacobian of the lens map.
pub fn jacobian_identity_residual(
    model: &DeflectionModel,
    fp: &FixedPoint,
) -> Result<f64, InvariantError> {
    if !fp.is_real {
        return Err(InvariantError::NotRealImage);
    }
    let real = model.real_jacobian(fp.z1)?.det;
    Ok((fp.transversal_det - Complex::new(real, 0.0)).norm())
}

/// Reports for `n` seeded random sources uniform in the square
/// `[-half_width, half_width]^2`, redrawing any source whose solve fails or
/// has a fixed point with `|det(I - J_f)| < det_floor`.
pub fn generic_source_reports(
    model: &DeflectionModel,
    n: usize,
    seed: u64,
    half_width: f64,
    det_floor: f64,
    opts: &SolveOptions,
) -> Vec<InvariantReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let zeta = SourcePos::new(
            rng.gen_range(-half_width..half_width),
            rng.gen_range(-half_width..half_width),
        );
        let Ok(report) = lefschetz_sum(model, zeta, opts) else {
            continue;
        };
        if report.valid && report.min_abs_det() >= det_floor {
            out.push(report);
        }
    }
    out
}
