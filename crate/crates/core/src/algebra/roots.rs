use super::{AlgebraError, Complex, UniPoly};

pub const DEFAULT_MAX_ROOT_ITER: usize = 200;

/// Per-root correction below this fraction of the root bound counts as
/// converged.
const STEP_TOL: f64 = 1e-13;

/// Residual at or below this multiple of machine epsilon times the
/// evaluation scale cannot be improved further in double precision.
const RESIDUAL_FLOOR: f64 = 8.0 * f64::EPSILON;

/// All complex roots of `p`, repeated according to multiplicity.
///
/// Simultaneous Aberth-Ehrlich iteration started from a perturbed circle whose
/// radius is the Cauchy bound `1 + max |c_i / c_n|`. On success every root
/// satisfies `|p(r)| <= tol * sum |c_i| |r|^i`.
pub fn roots(p: &UniPoly, tol: f64) -> Result<Vec<Complex>, AlgebraError> {
    roots_with_limit(p, tol, DEFAULT_MAX_ROOT_ITER)
}

pub fn roots_with_limit(
    p: &UniPoly,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex>, AlgebraError> {
    let n = match p.degree() {
        None | Some(0) => return Err(AlgebraError::ConstantPolynomial),
        Some(n) => n,
    };
    let coeffs = p.coeffs();
    if n == 1 {
        return Ok(vec![-coeffs[0] / coeffs[1]]);
    }
    let lead = p.leading();
    let bound = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let dp = p.derivative();

    // Offsets the start circle from the real axis so conjugate-symmetric
    // polynomials do not keep symmetric iterates stuck on it.
    let phase = 0.4 / n as f64 + 0.25;
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + phase;
            Complex::from_polar(bound, theta)
        })
        .collect();
    let mut done = vec![false; n];

    for _ in 0..max_iter {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let pk = p.eval(z[k]);
            if pk.norm() <= RESIDUAL_FLOOR * p.abs_scale(z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = pk / dp.eval(z[k]);
            let repulsion: Complex = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let mut step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                // Derivative vanished or iterates collided; nudge instead.
                step = Complex::new(1e-7 * bound, 1e-7 * bound);
            }
            z[k] -= step;
            if step.norm() < STEP_TOL * bound {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }

    let accepted = z.iter().all(|&r| p.eval(r).norm() <= tol * p.abs_scale(r));
    if accepted {
        Ok(z)
    } else {
        Err(AlgebraError::NoConvergence {
            iterations: max_iter,
            best: z,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::c;

    fn sorted(mut v: Vec<Complex>) -> Vec<Complex> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn unit_imaginary_pair() {
        let r = sorted(roots(&UniPoly::from_real(&[1.0, 0.0, 1.0]), 1e-12).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn double_root() {
        let r = roots(&UniPoly::from_real(&[1.0, -2.0, 1.0]), 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        for x in r {
            assert!((x - c(1.0, 0.0)).norm() < 1e-6, "{x}");
        }
    }

    #[test]
    fn eliminated_point_mass_quadratic() {
        // conj(zeta) z^2 - |zeta|^2 z - zeta m with zeta = 0.5, m = 1
        let r = sorted(roots(&UniPoly::from_real(&[-0.5, -0.25, 0.5]), 1e-12).unwrap());
        let s = 4.25f64.sqrt();
        assert!((r[0] - c((0.5 - s) / 2.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c((0.5 + s) / 2.0, 0.0)).norm() < 1e-12);
        assert!((r[1].re - 1.2807764064).abs() < 1e-10);
        assert!((r[0].re + 0.7807764064).abs() < 1e-10);
    }

    #[test]
    fn constant_is_rejected() {
        assert_eq!(
            roots(&UniPoly::constant(c(2.0, 0.0)), 1e-12),
            Err(AlgebraError::ConstantPolynomial)
        );
        assert_eq!(
            roots(&UniPoly::zero(), 1e-12),
            Err(AlgebraError::ConstantPolynomial)
        );
    }

    #[test]
    fn iteration_cap_reports_best_iterates() {
        let p = UniPoly::from_real(&[-6.0, 11.0, -6.0, 1.0]);
        match roots_with_limit(&p, 1e-14, 1) {
            Err(AlgebraError::NoConvergence { best, .. }) => assert_eq!(best.len(), 3),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn roots_of_unity_degree_eight() {
        let mut c8 = vec![0.0; 9];
        c8[0] = -1.0;
        c8[8] = 1.0;
        let r = roots(&UniPoly::from_real(&c8), 1e-12).unwrap();
        for x in &r {
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }
}
