//! All complex fixed points of a rational lensing map.
//!
//! The fixed-point equations are cleared of denominators,
//!
//! ```text
//! P1 = (z1 - zeta) V1 - U1,    P2 = (z2 - conj(zeta)) V2 - U2,
//! ```
//!
//! `z2` is eliminated with a resultant, the univariate eliminant is solved,
//! each root is back-substituted, and the surviving candidates are polished
//! with Newton's method on `(P1, P2)`. The degree condition on the deflection
//! rules out fixed points at infinity, so this affine elimination finds all
//! of them.

use std::cmp::Ordering;

use log::debug;
use thiserror::Error;

use crate::algebra::{
    newton_polish_2d, resultant_z2, roots, system_residual, AlgebraError, BiPoly, Complex, UniPoly,
    Var,
};
use crate::lens::{DeflectionModel, SourcePos};

/// Back-substituted pairs with a normalized residual above this are not
/// worth polishing.
const CANDIDATE_TOL: f64 = 1e-3;

/// Tolerance handed to the univariate root finder.
const ROOT_TOL: f64 = 1e-10;

/// Candidates closer than this (Newton distance estimate) to a zero of a
/// deflection denominator are poles, not fixed points.
pub const POLE_TOL: f64 = 1e-9;

/// A Newton-stalled degenerate candidate is kept (flagged) if its residual
/// is below this.
const DEGENERATE_KEEP_TOL: f64 = 1e-6;

/// Two distinct points closer than this (dedup metric) are a coalescing
/// pair on a fold: the double root of an on-caustic source only resolves to
/// about the square root of machine precision, which the determinant floor
/// alone cannot see.
pub const COALESCE_TOL: f64 = 1e-6;

/// Eliminant leading coefficients this small relative to the largest
/// coefficient are reported as a possible escape to infinity.
const LEAD_RATIO_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub residual_tol: f64,
    pub realness_tol: f64,
    pub dedup_tol: f64,
    pub caustic_det_floor: f64,
    pub max_newton_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            residual_tol: 1e-10,
            realness_tol: 1e-8,
            dedup_tol: 1e-8,
            caustic_det_floor: 1e-9,
            max_newton_iter: 50,
        }
    }
}

impl SolveOptions {
    pub fn is_valid(&self) -> bool {
        [
            self.residual_tol,
            self.realness_tol,
            self.dedup_tol,
            self.caustic_det_floor,
        ]
        .iter()
        .all(|&t| t > 0.0 && t.is_finite())
            && self.max_newton_iter > 0
    }
}

/// One complex image `(z1, z2)`; physical images have `z2 = conj(z1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub z1: Complex,
    pub z2: Complex,
    pub residual: f64,
    pub is_real: bool,
    /// `det(I - J_f)` at the point.
    pub transversal_det: Complex,
    pub converged: bool,
    /// Number of eliminant roots that polished onto this point.
    pub multiplicity: usize,
    /// On a caustic (tiny determinant or coalescing with a neighbour), merged
    /// from several roots, or not converged.
    pub degenerate: bool,
}

impl FixedPoint {
    /// Image of the point under `(z1, z2) -> (conj z2, conj z1)`.
    pub fn conjugate_partner(&self) -> (Complex, Complex) {
        (self.z2.conj(), self.z1.conj())
    }
}

/// Which variable was kept in the univariate eliminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elimination {
    /// Resultant with respect to `z2`, solved in `z1`.
    ResultantZ2,
    /// Resultant with respect to `z1` after the automatic variable swap.
    ResultantZ1,
    /// One equation involved a single variable and was solved directly.
    Direct,
    /// The eliminant was a nonzero constant: no fixed points.
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSet {
    pub points: Vec<FixedPoint>,
    pub elimination: Elimination,
    pub eliminant_degree: usize,
    /// `|leading| / max |coeff|` of the eliminant.
    pub lead_ratio: f64,
    /// Set when the eliminant's leading coefficient nearly vanishes.
    pub lead_small: bool,
    /// How far the eliminant degree falls short of its value at a generic
    /// source. Nonzero means fixed points have moved to infinity, as when
    /// the source sits exactly on a point mass. The deficit can undercount
    /// them: a point escaping in `z2` alone leaves the eliminant degree
    /// unchanged.
    pub degree_deficit: usize,
}

impl FixedPointSet {
    pub fn real_points(&self) -> impl Iterator<Item = &FixedPoint> {
        self.points.iter().filter(|p| p.is_real)
    }

    pub fn n_real(&self) -> usize {
        self.real_points().count()
    }

    /// True when some point sits on a caustic (or is otherwise flagged).
    pub fn on_caustic(&self) -> bool {
        self.points.iter().any(|p| p.degenerate)
    }

    /// No degenerate points and none lost to infinity.
    pub fn is_generic(&self) -> bool {
        !self.on_caustic() && self.degree_deficit == 0
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("elimination degenerate: the resultant vanishes identically in both variable orders")]
    EliminationDegenerate,
    #[error("invalid solve options")]
    InvalidOptions,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Denominator-free fixed-point equations `(P1, P2)`.
pub fn fixed_point_system(model: &DeflectionModel, zeta: SourcePos) -> (BiPoly, BiPoly) {
    let (a1, a2) = (model.alpha1(), model.alpha2());
    let shift1 = &BiPoly::z1() - &BiPoly::constant(zeta.zeta);
    let shift2 = &BiPoly::z2() - &BiPoly::constant(zeta.zeta.conj());
    let p1 = &(&shift1 * a1.den()) - a1.num();
    let p2 = &(&shift2 * a2.den()) - a2.num();
    (p1, p2)
}

struct Eliminant {
    poly: UniPoly,
    /// Eliminant is in `z2` (the system was transposed).
    swapped: bool,
    kind: Elimination,
}

fn eliminate(p1: &BiPoly, p2: &BiPoly) -> Result<Eliminant, SolveError> {
    // An equation free of one variable is its own eliminant.
    for (p, swapped) in [(p1, false), (p2, false), (p1, true), (p2, true)] {
        let free = if swapped { Var::Z1 } else { Var::Z2 };
        if p.degree_in(free) == Some(0) {
            let poly = if swapped {
                p.at_z1(Complex::new(0.0, 0.0))
            } else {
                p.at_z2(Complex::new(0.0, 0.0))
            };
            return Ok(Eliminant {
                poly,
                swapped,
                kind: Elimination::Direct,
            });
        }
    }
    let r = resultant_z2(p1, p2)?;
    if !r.is_zero() {
        return Ok(Eliminant {
            poly: r,
            swapped: false,
            kind: Elimination::ResultantZ2,
        });
    }
    debug!("resultant in z2 vanishes identically; retrying with variables swapped");
    let r = resultant_z2(&p1.transpose(), &p2.transpose())?;
    if !r.is_zero() {
        return Ok(Eliminant {
            poly: r,
            swapped: true,
            kind: Elimination::ResultantZ1,
        });
    }
    Err(SolveError::EliminationDegenerate)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    z1: Complex,
    z2: Complex,
    residual: f64,
    converged: bool,
    /// Index of the eliminant root this candidate came from.
    origin: usize,
}

fn pole_distance(model: &DeflectionModel, z1: Complex, z2: Complex) -> f64 {
    model
        .alpha1()
        .pole_distance(z1, z2)
        .min(model.alpha2().pole_distance(z1, z2))
}

fn dedup_distance(a: &Candidate, b: &Candidate) -> f64 {
    let d1 = (a.z1 - b.z1).norm() / a.z1.norm().max(b.z1.norm()).max(1.0);
    let d2 = (a.z2 - b.z2).norm() / a.z2.norm().max(b.z2.norm()).max(1.0);
    d1.max(d2)
}

fn order(a: &Complex, b: &Complex) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Solve for every fixed point of the model's lensing map at `zeta`.
///
/// Points on a caustic come back flagged `degenerate` rather than as an
/// error. The output is sorted by `(re z1, im z1)`.
pub fn solve_fixed_points(
    model: &DeflectionModel,
    zeta: SourcePos,
    opts: &SolveOptions,
) -> Result<FixedPointSet, SolveError> {
    if !opts.is_valid() {
        return Err(SolveError::InvalidOptions);
    }
    let (p1, p2) = fixed_point_system(model, zeta);
    let elim = eliminate(&p1, &p2)?;
    let degree = elim.poly.degree().unwrap_or(0);
    let max_coeff = elim.poly.max_abs_coeff();
    let lead_ratio = if max_coeff > 0.0 {
        elim.poly.leading().norm() / max_coeff
    } else {
        0.0
    };

    let degree_deficit = generic_degree(model, &elim).saturating_sub(degree);

    if degree == 0 {
        return Ok(FixedPointSet {
            points: Vec::new(),
            elimination: Elimination::Empty,
            eliminant_degree: 0,
            lead_ratio,
            lead_small: false,
            degree_deficit,
        });
    }

    let primary = match roots(&elim.poly, ROOT_TOL) {
        Ok(r) => r,
        Err(AlgebraError::NoConvergence { best, .. }) => {
            debug!("eliminant roots did not fully converge; screening best iterates");
            best
        }
        Err(e) => return Err(e.into()),
    };

    // Work in the (possibly transposed) frame where the eliminant variable
    // comes first, and swap back when recording candidates.
    let (q1, q2) = if elim.swapped {
        (p1.transpose(), p2.transpose())
    } else {
        (p1.clone(), p2.clone())
    };
    let mut raw = Vec::new();
    for (origin, &r) in primary.iter().enumerate() {
        let mut best: Vec<(Complex, f64)> = Vec::new();
        for u in [q1.at_z1(r), q2.at_z1(r)] {
            if u.degree().unwrap_or(0) == 0 {
                continue;
            }
            let secondary = match roots(&u, ROOT_TOL) {
                Ok(s) => s,
                Err(AlgebraError::NoConvergence { best, .. }) => best,
                Err(_) => continue,
            };
            for s in secondary {
                let res = system_residual(&q1, &q2, r, s);
                if res <= CANDIDATE_TOL {
                    best.push((s, res));
                }
            }
        }
        // Each eliminant root contributes each distinct partner once, even
        // when both back-substituted equations produced it.
        best.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut kept: Vec<Complex> = Vec::new();
        for (s, _) in best {
            if kept
                .iter()
                .all(|k| (k - s).norm() > 1e-6 * (1.0 + s.norm()))
            {
                kept.push(s);
                let (z1, z2) = if elim.swapped { (s, r) } else { (r, s) };
                raw.push((z1, z2, origin));
            }
        }
    }

    let mut cands = Vec::new();
    for (z1, z2, origin) in raw {
        if pole_distance(model, z1, z2) < POLE_TOL {
            debug!("discarding pole candidate ({z1}, {z2})");
            continue;
        }
        let tight = opts.residual_tol * 1e-6;
        let cand = match newton_polish_2d(&p1, &p2, (z1, z2), tight, opts.max_newton_iter) {
            Ok(n) => Candidate {
                z1: n.z1,
                z2: n.z2,
                residual: n.residual,
                converged: n.residual <= opts.residual_tol,
                origin,
            },
            Err(AlgebraError::SingularJacobian { .. }) => {
                let residual = system_residual(&p1, &p2, z1, z2);
                Candidate {
                    z1,
                    z2,
                    residual,
                    converged: false,
                    origin,
                }
            }
            Err(e) => return Err(e.into()),
        };
        if !cand.converged && cand.residual > DEGENERATE_KEEP_TOL {
            debug!(
                "dropping unconverged candidate ({z1}, {z2}), residual {:e}",
                cand.residual
            );
            continue;
        }
        if pole_distance(model, cand.z1, cand.z2) < POLE_TOL {
            continue;
        }
        cands.push(cand);
    }

    cands.sort_by(|a, b| order(&a.z1, &b.z1).then(order(&a.z2, &b.z2)));
    // Multiplicity counts distinct eliminant roots: a spurious partner of
    // one root that polishes onto the same point is only a duplicate.
    let mut merged: Vec<(Candidate, Vec<usize>)> = Vec::new();
    for c in cands {
        match merged
            .iter_mut()
            .find(|(m, _)| dedup_distance(m, &c) <= opts.dedup_tol)
        {
            Some((m, origins)) => {
                if !origins.contains(&c.origin) {
                    origins.push(c.origin);
                }
                if c.residual < m.residual {
                    *m = c;
                }
            }
            None => merged.push((c, vec![c.origin])),
        }
    }

    let coalescing: Vec<bool> = (0..merged.len())
        .map(|i| {
            (0..merged.len())
                .any(|j| j != i && dedup_distance(&merged[i].0, &merged[j].0) <= COALESCE_TOL)
        })
        .collect();

    let mut points = Vec::with_capacity(merged.len());
    for ((c, origins), coalescing) in merged.into_iter().zip(coalescing) {
        let multiplicity = origins.len();
        let transversal_det = model
            .complex_jacobian(c.z1, c.z2)
            .map(|j| j.det())
            .unwrap_or(Complex::new(0.0, 0.0));
        let is_real = (c.z2 - c.z1.conj()).norm() <= opts.realness_tol * (1.0 + c.z1.norm());
        let degenerate = transversal_det.norm() < opts.caustic_det_floor
            || multiplicity > 1
            || coalescing
            || !c.converged;
        points.push(FixedPoint {
            z1: c.z1,
            z2: c.z2,
            residual: c.residual,
            is_real,
            transversal_det,
            converged: c.converged,
            multiplicity,
            degenerate,
        });
    }
    points.sort_by(|a, b| order(&a.z1, &b.z1).then(order(&a.z2, &b.z2)));

    Ok(FixedPointSet {
        points,
        elimination: elim.kind,
        eliminant_degree: degree,
        lead_ratio,
        lead_small: lead_ratio < LEAD_RATIO_FLOOR,
        degree_deficit,
    })
}

/// Sources at which the generic eliminant degree is measured.
const REFERENCE_SOURCES: [(f64, f64); 2] =
    [(0.5772156649, 0.2909944487), (-0.4142135623, 0.7310585786)];

/// Eliminant degree for this model at a generic source, using the same
/// elimination route as `elim`. Falls back to the actual degree when the
/// reference systems take a different route.
fn generic_degree(model: &DeflectionModel, elim: &Eliminant) -> usize {
    let actual = elim.poly.degree().unwrap_or(0);
    let mut best = actual;
    for (re, im) in REFERENCE_SOURCES {
        let (q1, q2) = fixed_point_system(model, SourcePos::new(re, im));
        if let Ok(r) = eliminate(&q1, &q2) {
            if r.kind == elim.kind && r.swapped == elim.swapped {
                best = best.max(r.poly.degree().unwrap_or(0));
            }
        }
    }
    best
}

/// Number of physical (real) images.
pub fn count_real_images(
    model: &DeflectionModel,
    zeta: SourcePos,
    opts: &SolveOptions,
) -> Result<usize, SolveError> {
    Ok(solve_fixed_points(model, zeta, opts)?.n_real())
}
