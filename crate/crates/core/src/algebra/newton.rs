use super::{AlgebraError, BiPoly, Complex, Var};

/// Relative floor on the 2x2 Jacobian determinant, measured against the
/// magnitude of the two products that form it.
const SINGULAR_FLOOR: f64 = 1e-14;

/// Step halvings tried before a non-improving Newton step is abandoned.
const MAX_HALVINGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonResult {
    pub z1: Complex,
    pub z2: Complex,
    /// `max(|p| / scale_p, |q| / scale_q)`, each value normalized by
    /// `sum |c_ij| |z1|^i |z2|^j` of its polynomial.
    pub residual: f64,
    pub iterations: usize,
}

pub fn system_residual(p: &BiPoly, q: &BiPoly, z1: Complex, z2: Complex) -> f64 {
    let rel = |f: &BiPoly| {
        let s = f.abs_scale(z1, z2);
        if s == 0.0 {
            0.0
        } else {
            f.eval(z1, z2).norm() / s
        }
    };
    rel(p).max(rel(q))
}

/// Newton iteration on the holomorphic system `p = q = 0`.
///
/// Steps that would raise the residual are halved (up to eight times); if no
/// reduction is found the current point is returned. The residual is therefore
/// non-increasing over accepted steps.
pub fn newton_polish_2d(
    p: &BiPoly,
    q: &BiPoly,
    guess: (Complex, Complex),
    tol: f64,
    max_iter: usize,
) -> Result<NewtonResult, AlgebraError> {
    let (p1, p2) = (p.partial(Var::Z1), p.partial(Var::Z2));
    let (q1, q2) = (q.partial(Var::Z1), q.partial(Var::Z2));
    let (mut z1, mut z2) = guess;
    let mut res = system_residual(p, q, z1, z2);
    let mut iterations = 0;

    while iterations < max_iter && res > tol {
        let (a, b) = (p1.eval(z1, z2), p2.eval(z1, z2));
        let (c, d) = (q1.eval(z1, z2), q2.eval(z1, z2));
        let det = a * d - b * c;
        let size = (a * d).norm() + (b * c).norm();
        if det.norm() <= SINGULAR_FLOOR * size || !det.is_finite() || size == 0.0 {
            return Err(AlgebraError::SingularJacobian { det: det.norm() });
        }
        let (fp, fq) = (p.eval(z1, z2), q.eval(z1, z2));
        let dz1 = (d * fp - b * fq) / det;
        let dz2 = (a * fq - c * fp) / det;
        iterations += 1;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let (n1, n2) = (z1 - dz1 * t, z2 - dz2 * t);
            let r = system_residual(p, q, n1, n2);
            if r.is_finite() && r <= res {
                accepted = Some((n1, n2, r));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((n1, n2, r)) => {
                let stalled = n1 == z1 && n2 == z2;
                z1 = n1;
                z2 = n2;
                res = r;
                if stalled {
                    break;
                }
            }
            None => break,
        }
    }
    Ok(NewtonResult {
        z1,
        z2,
        residual: res,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::c;

    fn one() -> Complex {
        c(1.0, 0.0)
    }

    #[test]
    fn linear_system_in_one_step() {
        let p = BiPoly::from_terms(&[(1, 0, one()), (0, 0, -one())]);
        let q = BiPoly::from_terms(&[(0, 1, one()), (0, 0, c(-2.0, 0.0))]);
        let r = newton_polish_2d(&p, &q, (c(0.0, 0.0), c(0.0, 0.0)), 1e-14, 10).unwrap();
        assert_eq!((r.z1, r.z2), (c(1.0, 0.0), c(2.0, 0.0)));
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn square_root_of_two() {
        let p = BiPoly::from_terms(&[(2, 0, one()), (0, 0, c(-2.0, 0.0))]);
        let q = BiPoly::from_terms(&[(0, 1, one()), (1, 0, -one())]);
        let r = newton_polish_2d(&p, &q, (c(1.5, 0.0), c(1.5, 0.0)), 1e-15, 50).unwrap();
        let s = 2f64.sqrt();
        assert!((r.z1 - c(s, 0.0)).norm() < 1e-14);
        assert!((r.z2 - c(s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn filament_system() {
        // (z1 - 2)(z1 + z2) + 0.5 and (z2 - 2)(z1 + z2) + 0.5 for sigma0 = 1/8
        let s = BiPoly::from_terms(&[(1, 0, one()), (0, 1, one())]);
        let half = BiPoly::constant(c(0.5, 0.0));
        let p = &(&(&BiPoly::z1() - &BiPoly::constant(c(2.0, 0.0))) * &s) + &half;
        let q = &(&(&BiPoly::z2() - &BiPoly::constant(c(2.0, 0.0))) * &s) + &half;
        let r = newton_polish_2d(&p, &q, (c(1.9, 0.0), c(1.9, 0.0)), 1e-15, 50).unwrap();
        let x = 1.0 + 0.75f64.sqrt();
        assert!((r.z1 - c(x, 0.0)).norm() < 1e-12);
        assert!((r.z2 - c(x, 0.0)).norm() < 1e-12);
        assert!((x - 1.8660254038).abs() < 1e-10);
    }

    #[test]
    fn singular_jacobian_is_reported() {
        // p = q = z1 + z2 - 1 has a rank-one Jacobian everywhere.
        let p = BiPoly::from_terms(&[(1, 0, one()), (0, 1, one()), (0, 0, -one())]);
        let err = newton_polish_2d(&p, &p.clone(), (c(3.0, 0.0), c(0.0, 0.0)), 1e-14, 10);
        assert!(matches!(err, Err(AlgebraError::SingularJacobian { .. })));
    }
}
