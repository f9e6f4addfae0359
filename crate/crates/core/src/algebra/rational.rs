use super::{BiPoly, Complex, Var};

/// Rational function `num / den` of two variables, with the four first
/// partial derivatives of numerator and denominator precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    num: BiPoly,
    den: BiPoly,
    num_d1: BiPoly,
    num_d2: BiPoly,
    den_d1: BiPoly,
    den_d2: BiPoly,
}

/// Value and first partials of a [`RationalFn`] at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalValue {
    pub value: Complex,
    pub d_z1: Complex,
    pub d_z2: Complex,
}

impl RationalFn {
    /// `None` when the denominator is the zero polynomial.
    pub fn new(num: BiPoly, den: BiPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(RationalFn {
            num_d1: num.partial(Var::Z1),
            num_d2: num.partial(Var::Z2),
            den_d1: den.partial(Var::Z1),
            den_d2: den.partial(Var::Z2),
            num,
            den,
        })
    }

    pub fn num(&self) -> &BiPoly {
        &self.num
    }

    pub fn den(&self) -> &BiPoly {
        &self.den
    }

    /// Degree condition for a finite lens: `deg num < deg den` (total degree).
    /// A zero numerator always satisfies it.
    pub fn is_proper(&self) -> bool {
        match (self.num.total_degree(), self.den.total_degree()) {
            (None, _) => true,
            (Some(n), Some(d)) => n < d,
            (Some(_), None) => false,
        }
    }

    pub fn conj_transpose(&self) -> Self {
        RationalFn::new(self.num.conj_transpose(), self.den.conj_transpose())
            .expect("conjugation preserves a nonzero denominator")
    }

    /// Value of the denominator and its magnitude relative to the largest
    /// denominator coefficient.
    pub fn den_at(&self, z1: Complex, z2: Complex) -> Complex {
        self.den.eval(z1, z2)
    }

    /// Plain value; `None` at an exact pole.
    pub fn eval(&self, z1: Complex, z2: Complex) -> Option<Complex> {
        let d = self.den.eval(z1, z2);
        if d.norm() == 0.0 {
            return None;
        }
        Some(self.num.eval(z1, z2) / d)
    }

    /// Value and partials via the quotient rule. `None` at an exact pole.
    pub fn eval_with_partials(&self, z1: Complex, z2: Complex) -> Option<RationalValue> {
        let u = self.num.eval(z1, z2);
        let v = self.den.eval(z1, z2);
        if v.norm() == 0.0 {
            return None;
        }
        let v2 = v * v;
        let d1 = (self.num_d1.eval(z1, z2) * v - u * self.den_d1.eval(z1, z2)) / v2;
        let d2 = (self.num_d2.eval(z1, z2) * v - u * self.den_d2.eval(z1, z2)) / v2;
        Some(RationalValue {
            value: u / v,
            d_z1: d1,
            d_z2: d2,
        })
    }

    /// Newton-style distance estimate to the nearest zero of the
    /// denominator: `|V| / (|dV/dz1| + |dV/dz2|)`.
    pub fn pole_distance(&self, z1: Complex, z2: Complex) -> f64 {
        let v = self.den.eval(z1, z2).norm();
        let g = self.den_d1.eval(z1, z2).norm() + self.den_d2.eval(z1, z2).norm();
        if g == 0.0 {
            if v == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            v / g
        }
    }
}
