//! Independent cross-checks for the resultant pipeline.
//!
//! [`multistart_newton_real`] solves the real lens equation directly in the
//! plane, with a finite-difference Jacobian, so it shares no code with the
//! elimination path beyond evaluating the lens map. The closed forms cover
//! the filament and the single point mass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::Complex;
use crate::caustics::Window;
use crate::lens::{DeflectionModel, SourcePos};

/// Seed of the jittered start grid.
pub const ORACLE_SEED: u64 = 0x5EED_1E25;

/// Converged images must satisfy `|eta(z) - zeta|` below this.
pub const ORACLE_EQ_TOL: f64 = 1e-10;

const ORACLE_DEDUP_TOL: f64 = 1e-8;
const MAX_NEWTON_STEPS: usize = 100;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OracleError {
    #[error("source at the lens centre: the images form an Einstein ring")]
    CenteredSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Image positions, sorted by `(re, im)`.
    pub images: Vec<Complex>,
    /// Signed magnifications, aligned with `images`.
    pub mus: Vec<f64>,
    pub source: SourcePos,
    pub method: &'static str,
}

/// Default search window: `[-5, 5]^2`.
pub fn default_search_window() -> Window {
    Window {
        center: Complex::new(0.0, 0.0),
        half_width: 5.0,
        half_height: 5.0,
        nx: 64,
        ny: 64,
    }
}

fn residual(model: &DeflectionModel, z: Complex, zeta: Complex) -> Option<Complex> {
    model
        .lens_map_real(z)
        .ok()
        .map(|y| y - zeta)
        .filter(|r| r.is_finite())
}

/// Real Newton iteration on `eta(x) - y` from one start.
fn newton_real(
    model: &DeflectionModel,
    start: Complex,
    zeta: Complex,
    max_step: f64,
) -> Option<Complex> {
    let mut z = start;
    let mut f = residual(model, z, zeta)?;
    for _ in 0..MAX_NEWTON_STEPS {
        if f.norm() <= 1e-14 * (1.0 + zeta.norm()) {
            break;
        }
        // Central differences for the 2x2 real Jacobian.
        let h = 1e-7 * (1.0 + z.norm());
        let fx = (residual(model, z + h, zeta)? - residual(model, z - h, zeta)?) / (2.0 * h);
        let hi = Complex::new(0.0, h);
        let fy = (residual(model, z + hi, zeta)? - residual(model, z - hi, zeta)?) / (2.0 * h);
        let det = fx.re * fy.im - fy.re * fx.im;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (fy.im * f.re - fy.re * f.im) / det;
        let dy = (fx.re * f.im - fx.im * f.re) / det;
        let mut step = Complex::new(dx, dy);
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        let next = z - step;
        let fnext = residual(model, next, zeta)?;
        if next == z {
            break;
        }
        z = next;
        f = fnext;
    }
    (f.norm() < ORACLE_EQ_TOL).then_some(z)
}

fn sort_dedup(mut points: Vec<Complex>) -> Vec<Complex> {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<Complex> = Vec::new();
    for p in points {
        if out
            .iter()
            .all(|q| (p - q).norm() > ORACLE_DEDUP_TOL * (1.0 + p.norm()))
        {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// Images found by real Newton iteration from a seeded jittered grid of at
/// least `n_starts` starting points over `search_window`.
///
/// Failed starts are discarded, so this is a lower bound on the image set.
pub fn multistart_newton_real(
    model: &DeflectionModel,
    zeta: SourcePos,
    search_window: &Window,
    n_starts: usize,
) -> OracleResult {
    let n_starts = n_starts.max(64);
    let side = (n_starts as f64).sqrt().ceil() as usize;
    let (w, h) = (
        2.0 * search_window.half_width,
        2.0 * search_window.half_height,
    );
    let corner =
        search_window.center - Complex::new(search_window.half_width, search_window.half_height);
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let starts: Vec<Complex> = (0..side * side)
        .map(|k| {
            let (i, j) = (k % side, k / side);
            let (u, v): (f64, f64) = (rng.gen(), rng.gen());
            corner
                + Complex::new(
                    (i as f64 + u) / side as f64 * w,
                    (j as f64 + v) / side as f64 * h,
                )
        })
        .collect();
    let max_step = 0.25 * w.max(h);
    let found: Vec<Complex> = starts
        .into_par_iter()
        .filter_map(|s| newton_real(model, s, zeta.zeta, max_step))
        .collect();
    let images = sort_dedup(found);
    let mus = images
        .iter()
        .map(|&z| model.det_real_jacobian(z).map_or(f64::NAN, |d| 1.0 / d))
        .collect();
    OracleResult {
        images,
        mus,
        source: zeta,
        method: "multistart_newton_real",
    }
}

/// Filament images `x1 = (y1 +- sqrt(y1^2 - 8 sigma0)) / 2`, `x2 = y2`, with
/// `mu = x1^2 / (x1^2 - 2 sigma0)`. No images when `y1^2 < 8 sigma0`; on the
/// caustic itself the two images coincide and `mu` is infinite.
pub fn filament_closed_form(sigma0: f64, zeta: SourcePos) -> OracleResult {
    let (y1, y2) = (zeta.zeta.re, zeta.zeta.im);
    let disc = y1 * y1 - 8.0 * sigma0;
    let mut images = Vec::new();
    let mut mus = Vec::new();
    if disc >= 0.0 {
        let s = disc.sqrt();
        // Avoid cancellation in the smaller-magnitude root.
        let big = 0.5 * (y1 + y1.signum() * s);
        let small = 2.0 * sigma0 / big;
        let mut xs = [small, big];
        xs.sort_by(f64::total_cmp);
        for x in xs {
            images.push(Complex::new(x, y2));
            mus.push(x * x / (x * x - 2.0 * sigma0));
        }
    }
    OracleResult {
        images,
        mus,
        source: zeta,
        method: "filament_closed_form",
    }
}

/// Point-lens images `z = zeta (1 +- sqrt(1 + 4 m / |zeta|^2)) / 2` with
/// `mu = 1 / (1 - m^2 / |z|^4)`.
pub fn point_mass_closed_form(m: f64, zeta: SourcePos) -> Result<OracleResult, OracleError> {
    let r2 = zeta.zeta.norm_sqr();
    if r2 == 0.0 {
        return Err(OracleError::CenteredSource);
    }
    let s = (1.0 + 4.0 * m / r2).sqrt();
    let mut pairs: Vec<(Complex, f64)> = [1.0 + s, 1.0 - s]
        .iter()
        .map(|k| {
            let z = zeta.zeta * (0.5 * k);
            let z4 = z.norm_sqr() * z.norm_sqr();
            (z, 1.0 / (1.0 - m * m / z4))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(OracleResult {
        images: pairs.iter().map(|p| p.0).collect(),
        mus: pairs.iter().map(|p| p.1).collect(),
        source: zeta,
        method: "point_mass_closed_form",
    })
}

/// Central-difference gradient of the Fermat potential, step `h`.
pub fn fermat_gradient(
    model: &DeflectionModel,
    x: Complex,
    y: SourcePos,
    h: f64,
) -> Result<Complex, crate::lens::ModelError> {
    let phi = |z: Complex| model.fermat_potential(z, y);
    let gx = (phi(x + h)? - phi(x - h)?) / (2.0 * h);
    let hi = Complex::new(0.0, h);
    let gy = (phi(x + hi)? - phi(x - hi)?) / (2.0 * h);
    Ok(Complex::new(gx, gy))
}

/// Central-difference Laplacian of the deflection potential, step `h`.
pub fn potential_laplacian(
    model: &DeflectionModel,
    x: Complex,
    h: f64,
) -> Result<f64, crate::lens::ModelError> {
    let psi = |z: Complex| model.deflection_potential(z);
    let hi = Complex::new(0.0, h);
    let centre = psi(x)?;
    Ok((psi(x + h)? + psi(x - h)? + psi(x + hi)? + psi(x - hi)? - 4.0 * centre) / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn filament_closed_form_examples() {
        let r = filament_closed_form(0.125, SourcePos::new(2.0, 0.0));
        assert!((r.images[0].re - 0.1339745962).abs() < 1e-10);
        assert!((r.images[1].re - 1.8660254038).abs() < 1e-10);
        assert!((r.mus[0] + 0.0773502692).abs() < 1e-10);
        assert!((r.mus[1] - 1.0773502692).abs() < 1e-10);
        assert!((r.mus[0] + r.mus[1] - 1.0).abs() < 1e-14);

        assert!(filament_closed_form(0.125, SourcePos::new(0.5, 0.0))
            .images
            .is_empty());

        let r = filament_closed_form(0.125, SourcePos::new(1.0, 0.7));
        assert_eq!(r.images, vec![c(0.5, 0.7), c(0.5, 0.7)]);
        assert!(r.mus.iter().all(|m| m.is_infinite()));
        let r = filament_closed_form(0.125, SourcePos::new(1.5, 0.7));
        assert_eq!(r.images.len(), 2);
        assert!(r.images.iter().all(|z| z.im == 0.7));
    }

    #[test]
    fn point_mass_closed_form_examples() {
        let r = point_mass_closed_form(1.0, SourcePos::new(0.5, 0.0)).unwrap();
        assert!((r.images[0] - c(-0.7807764064, 0.0)).norm() < 1e-10);
        assert!((r.images[1] - c(1.2807764064, 0.0)).norm() < 1e-10);
        assert!((r.mus[0] + r.mus[1] - 1.0).abs() < 1e-12);

        let far = point_mass_closed_form(1.0, SourcePos::new(1e3, 0.0)).unwrap();
        assert!((far.mus[1] - 1.0).abs() < 1e-10);
        assert!(far.mus[0].abs() < 1e-10);

        let rot = point_mass_closed_form(1.0, SourcePos::new(0.0, 0.5)).unwrap();
        let mut rotated: Vec<Complex> = r.images.iter().map(|z| z * c(0.0, 1.0)).collect();
        rotated.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        for (a, b) in rot.images.iter().zip(&rotated) {
            assert!((a - b).norm() < 1e-12);
        }

        assert_eq!(
            point_mass_closed_form(1.0, SourcePos::new(0.0, 0.0)),
            Err(OracleError::CenteredSource)
        );
    }

    #[test]
    fn multistart_finds_point_mass_and_filament_images() {
        let w = default_search_window();
        let pm = DeflectionModel::point_mass_ensemble(&[1.0], &[c(0.0, 0.0)]).unwrap();
        let r = multistart_newton_real(&pm, SourcePos::new(0.5, 0.0), &w, 256);
        assert_eq!(r.images.len(), 2);
        assert!((r.images[0] - c(-0.7807764064, 0.0)).norm() < 1e-9);
        assert!((r.images[1] - c(1.2807764064, 0.0)).norm() < 1e-9);

        let fil = DeflectionModel::filament(0.125).unwrap();
        let r = multistart_newton_real(&fil, SourcePos::new(2.0, 0.0), &w, 256);
        assert_eq!(r.images.len(), 2);
        assert!((r.images[0].re - 0.1339745962).abs() < 1e-9);
        assert!((r.images[1].re - 1.8660254038).abs() < 1e-9);
        for z in &r.images {
            assert!((fil.lens_map_real(*z).unwrap() - c(2.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn multistart_binary_inside_caustic() {
        let m = DeflectionModel::point_mass_ensemble(&[0.5, 0.5], &[c(-0.5, 0.0), c(0.5, 0.0)])
            .unwrap();
        let w = default_search_window();
        let r = multistart_newton_real(&m, SourcePos::new(0.05, 0.0), &w, 4096);
        assert_eq!(r.images.len(), 5);
        let doubled = multistart_newton_real(&m, SourcePos::new(0.05, 0.0), &w, 8192);
        assert_eq!(doubled.images.len(), 5);
        for (a, b) in r.images.iter().zip(&doubled.images) {
            assert!((a - b).norm() < 1e-9);
        }
    }
}
