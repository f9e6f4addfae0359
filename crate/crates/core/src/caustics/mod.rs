//! Critical curves, caustics and source-plane image counts.

mod contour;

pub use contour::zero_contours;

use log::warn;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::Complex;
use crate::lens::{DeflectionModel, SourcePos};
use crate::solver::{solve_fixed_points, SolveOptions};

/// Grid nodes closer than this to a pole of the deflection are masked.
pub const NODE_POLE_TOL: f64 = 1e-6;

/// Count recorded for nodes where the solver failed or the source is not
/// generic (on a caustic, or losing fixed points to infinity).
pub const MASKED: i32 = -1;

pub type Polyline = Vec<Complex>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CausticsError {
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("every grid node is masked")]
    EmptyWindow,
}

/// Rectangular grid of `nx * ny` nodes spanning
/// `center +- (half_width, half_height)`, edges included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: Complex,
    pub half_width: f64,
    pub half_height: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Window {
    pub fn new(
        center: Complex,
        half_width: f64,
        half_height: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self, CausticsError> {
        if !(half_width > 0.0 && half_height > 0.0)
            || !half_width.is_finite()
            || !half_height.is_finite()
        {
            return Err(CausticsError::InvalidWindow(format!(
                "extents must be positive (got {half_width}, {half_height})"
            )));
        }
        if !center.is_finite() {
            return Err(CausticsError::InvalidWindow("center must be finite".into()));
        }
        if nx < 8 || ny < 8 {
            return Err(CausticsError::InvalidWindow(format!(
                "need at least 8 nodes per axis (got {nx} x {ny})"
            )));
        }
        Ok(Window {
            center,
            half_width,
            half_height,
            nx,
            ny,
        })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.half_height / (self.ny - 1) as f64
    }

    pub fn node(&self, i: usize, j: usize) -> Complex {
        self.at(i as f64, j as f64)
    }

    /// Plane point at fractional grid coordinates.
    pub fn at(&self, fi: f64, fj: f64) -> Complex {
        Complex::new(
            self.center.re - self.half_width + fi * self.dx(),
            self.center.im - self.half_height + fj * self.dy(),
        )
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes in row-major order (`j * nx + i`).
    pub fn nodes(&self) -> impl Iterator<Item = Complex> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| self.node(i, j)))
    }

    pub fn cell_size(&self) -> f64 {
        self.dx().max(self.dy())
    }
}

fn det_or_nan(model: &DeflectionModel, z: Complex) -> f64 {
    let near_pole = model.alpha1().pole_distance(z, z.conj()) < NODE_POLE_TOL
        || model.alpha2().pole_distance(z, z.conj()) < NODE_POLE_TOL;
    if near_pole {
        return f64::NAN;
    }
    match model.complex_jacobian(z, z.conj()) {
        Ok(j) if j.det().is_finite() => j.det().re,
        _ => f64::NAN,
    }
}

/// Zero contours of `det J_eta` over a lens-plane window.
pub fn critical_curves(
    model: &DeflectionModel,
    window: &Window,
) -> Result<Vec<Polyline>, CausticsError> {
    let values: Vec<f64> = window
        .nodes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|z| det_or_nan(model, z))
        .collect();
    if values.iter().all(|v| v.is_nan()) {
        return Err(CausticsError::EmptyWindow);
    }
    let lines = zero_contours(&values, window.nx, window.ny, |i, j| {
        det_or_nan(model, window.at(i as f64 + 0.5, j as f64 + 0.5))
    });
    Ok(lines
        .into_iter()
        .map(|l| l.into_iter().map(|(fi, fj)| window.at(fi, fj)).collect())
        .collect())
}

/// Image of lens-plane polylines under the lens map. Vertices at poles are
/// dropped with a warning; polylines left with no vertices are removed.
pub fn map_to_caustics(model: &DeflectionModel, critical: &[Polyline]) -> Vec<Polyline> {
    critical
        .iter()
        .filter_map(|line| {
            let mapped: Polyline = line
                .iter()
                .filter_map(|&z| match model.lens_map_real(z) {
                    Ok(y) => Some(y),
                    Err(e) => {
                        warn!("dropping caustic vertex: {e}");
                        None
                    }
                })
                .collect();
            (!mapped.is_empty()).then_some(mapped)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityGrid {
    /// Source-plane window.
    pub window: Window,
    /// Real-image counts, row-major `counts[j * nx + i]`; [`MASKED`] where
    /// the solve failed or landed on a caustic.
    pub counts: Vec<i32>,
    pub max_count: i32,
    /// Source plane.
    pub caustic_polylines: Vec<Polyline>,
    /// Lens plane.
    pub critical_polylines: Vec<Polyline>,
    pub lens_window: Window,
}

impl MultiplicityGrid {
    pub fn count(&self, i: usize, j: usize) -> i32 {
        self.counts[j * self.window.nx + i]
    }
}

/// Default lens-plane window for a source window: same centre, extents
/// widened by half (and to at least 2.5), 256 nodes per axis.
pub fn default_lens_window(source: &Window) -> Window {
    Window {
        center: source.center,
        half_width: (1.5 * source.half_width).max(2.5),
        half_height: (1.5 * source.half_height).max(2.5),
        nx: 256,
        ny: 256,
    }
}

/// Count real images at every node of a source-plane window, and trace the
/// critical curves (over [`default_lens_window`]) and their caustics.
pub fn multiplicity_scan(
    model: &DeflectionModel,
    source_window: &Window,
    opts: &SolveOptions,
) -> Result<MultiplicityGrid, CausticsError> {
    multiplicity_scan_with_lens_window(
        model,
        source_window,
        &default_lens_window(source_window),
        opts,
    )
}

pub fn multiplicity_scan_with_lens_window(
    model: &DeflectionModel,
    source_window: &Window,
    lens_window: &Window,
    opts: &SolveOptions,
) -> Result<MultiplicityGrid, CausticsError> {
    let counts = source_counts(model, source_window, opts);
    let max_count = counts.iter().copied().max().unwrap_or(MASKED);
    let critical_polylines = match critical_curves(model, lens_window) {
        Ok(c) => c,
        Err(CausticsError::EmptyWindow) => Vec::new(),
        Err(e) => return Err(e),
    };
    let caustic_polylines = map_to_caustics(model, &critical_polylines);
    Ok(MultiplicityGrid {
        window: *source_window,
        counts,
        max_count,
        caustic_polylines,
        critical_polylines,
        lens_window: *lens_window,
    })
}

/// Real-image count per node; nodes are independent and the result does not
/// depend on how they are scheduled.
pub fn source_counts(model: &DeflectionModel, window: &Window, opts: &SolveOptions) -> Vec<i32> {
    let nodes: Vec<Complex> = window.nodes().collect();
    nodes
        .into_par_iter()
        .map(
            |zeta| match solve_fixed_points(model, SourcePos { zeta }, opts) {
                Ok(set) if set.is_generic() => set.n_real() as i32,
                _ => MASKED,
            },
        )
        .collect()
}
