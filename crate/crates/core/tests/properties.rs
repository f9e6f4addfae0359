use lensfix_core::algebra::{
    newton_polish_2d, resultant_z2, roots, system_residual, BiPoly, Complex, UniPoly, Var,
};
use lensfix_core::lefschetz::lefschetz_sum;
use lensfix_core::lens::PotentialForm;
use lensfix_core::solver::fixed_point_system;
use lensfix_core::{solve_fixed_points, DeflectionModel, SolveOptions, SourcePos};
use proptest::prelude::*;

fn complex(range: f64) -> impl Strategy<Value = Complex> {
    (-range..range, -range..range).prop_map(|(re, im)| Complex::new(re, im))
}

fn bipoly(max_deg: usize) -> impl Strategy<Value = BiPoly> {
    prop::collection::vec(
        prop::collection::vec(complex(2.0), 1..=max_deg + 1),
        1..=max_deg + 1,
    )
    .prop_map(BiPoly::new)
}

fn close(a: Complex, b: Complex, scale: f64) -> bool {
    (a - b).norm() <= 1e-10 * (1.0 + scale)
}

/// Binary or triple point lens with well separated masses.
fn ensemble() -> impl Strategy<Value = DeflectionModel> {
    (
        prop::collection::vec(0.2..1.0f64, 2..=3),
        prop::collection::vec(complex(1.0), 3),
    )
        .prop_filter_map("masses too close together", |(masses, pos)| {
            let pos = &pos[..masses.len()];
            for i in 0..pos.len() {
                for j in 0..i {
                    if (pos[i] - pos[j]).norm() < 0.3 {
                        return None;
                    }
                }
            }
            DeflectionModel::point_mass_ensemble(&masses, pos).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_is_a_ring_homomorphism(p in bipoly(3), q in bipoly(3), z1 in complex(1.5), z2 in complex(1.5)) {
        let (a, b) = (p.eval(z1, z2), q.eval(z1, z2));
        let scale = p.abs_scale(z1, z2) + q.abs_scale(z1, z2);
        prop_assert!(close((&p + &q).eval(z1, z2), a + b, scale));
        prop_assert!(close((&p - &q).eval(z1, z2), a - b, scale));
        prop_assert!(close((&p * &q).eval(z1, z2), a * b, scale * scale));
    }

    #[test]
    fn partials_match_difference_quotients(p in bipoly(4), z1 in complex(1.0), z2 in complex(1.0)) {
        let h = 1e-6;
        let d1 = (p.eval(z1 + h, z2) - p.eval(z1 - h, z2)) / (2.0 * h);
        let d2 = (p.eval(z1, z2 + h) - p.eval(z1, z2 - h)) / (2.0 * h);
        let scale = p.abs_scale(z1, z2);
        prop_assert!((p.partial(Var::Z1).eval(z1, z2) - d1).norm() <= 1e-6 * (1.0 + scale));
        prop_assert!((p.partial(Var::Z2).eval(z1, z2) - d2).norm() <= 1e-6 * (1.0 + scale));
    }

    #[test]
    fn conj_transpose_is_an_involution(p in bipoly(3), z1 in complex(1.0), z2 in complex(1.0)) {
        let q = p.conj_transpose();
        prop_assert_eq!(q.conj_transpose(), p.clone());
        // q(z1, z2) = conj p(conj z2, conj z1)
        let scale = p.abs_scale(z1, z2);
        prop_assert!(close(q.eval(z1, z2), p.eval(z2.conj(), z1.conj()).conj(), scale));
    }

    #[test]
    fn roots_rebuild_the_polynomial(rs in prop::collection::vec(complex(2.0), 1..=7)) {
        let mut p = UniPoly::one();
        for &r in &rs {
            p = &p * &UniPoly::new(vec![-r, Complex::new(1.0, 0.0)]);
        }
        let found = roots(&p, 1e-12).unwrap();
        prop_assert_eq!(found.len(), rs.len());
        let mut q = UniPoly::one();
        for &r in &found {
            q = &q * &UniPoly::new(vec![-r, Complex::new(1.0, 0.0)]);
        }
        let scale = p.max_abs_coeff();
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-7 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn resultant_vanishes_at_common_roots(a in complex(1.0), b in complex(1.0), p in bipoly(2), q in bipoly(2)) {
        // Both polynomials vanish at (a, b) by construction.
        let lift = |r: &BiPoly| {
            let shift1 = &BiPoly::z1() - &BiPoly::constant(a);
            let shift2 = &BiPoly::z2() - &BiPoly::constant(b);
            &(&shift1 * r) + &shift2
        };
        let (p, q) = (lift(&p), &(&BiPoly::z2() - &BiPoly::constant(b)) * &(&BiPoly::z1() + &q));
        let r = resultant_z2(&p, &q).unwrap();
        prop_assert!(r.eval(a).norm() <= 1e-8 * (1.0 + r.abs_scale(a)));
    }

    #[test]
    fn newton_polish_never_increases_the_residual(zeta in complex(2.0), eps in complex(1e-3)) {
        let model = DeflectionModel::filament(0.125).unwrap();
        let src = SourcePos { zeta };
        let set = solve_fixed_points(&model, src, &SolveOptions::default()).unwrap();
        let (p1, p2) = fixed_point_system(&model, src);
        for fp in set.points.iter().filter(|p| !p.degenerate) {
            let start = (fp.z1 + eps, fp.z2 - eps);
            let before = system_residual(&p1, &p2, start.0, start.1);
            let polished = newton_polish_2d(&p1, &p2, start, 1e-14, 50).unwrap();
            prop_assert!(polished.residual <= before);
        }
    }

    #[test]
    fn fixed_points_are_closed_under_conjugation(model in ensemble(), zeta in complex(1.5)) {
        let opts = SolveOptions::default();
        let set = solve_fixed_points(&model, SourcePos { zeta }, &opts).unwrap();
        for fp in &set.points {
            let (w1, w2) = fp.conjugate_partner();
            let found = set.points.iter().any(|q| {
                (q.z1 - w1).norm() < 1e-7 * (1.0 + w1.norm())
                    && (q.z2 - w2).norm() < 1e-7 * (1.0 + w2.norm())
            });
            prop_assert!(found, "partner of ({}, {}) missing", fp.z1, fp.z2);
        }
    }

    #[test]
    fn sum_rule_for_random_ensembles(model in ensemble(), zeta in complex(1.5)) {
        let rep = lefschetz_sum(&model, SourcePos { zeta }, &SolveOptions::default()).unwrap();
        prop_assume!(rep.valid && rep.min_abs_det() > 1e-6);
        prop_assert!((rep.complex_sum - 1.0).norm() < 1e-8, "sum {}", rep.complex_sum);
        let PotentialForm::PointEnsemble { masses, .. } = model.potential() else {
            unreachable!("strategy builds point ensembles");
        };
        let n = masses.len();
        // An N-point lens has N^2 + 1 complex fixed points.
        prop_assert_eq!(rep.n_fixed(), n * n + 1);
    }

    #[test]
    fn solving_is_deterministic(model in ensemble(), zeta in complex(1.5)) {
        let opts = SolveOptions::default();
        let a = solve_fixed_points(&model, SourcePos { zeta }, &opts);
        let b = solve_fixed_points(&model, SourcePos { zeta }, &opts);
        prop_assert_eq!(a, b);
    }
}
