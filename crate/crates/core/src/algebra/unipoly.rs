use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Complex, ZERO_THRESHOLD};

/// Dense univariate polynomial with complex coefficients in ascending order.
///
/// The stored form is always normalized: trailing coefficients whose
/// magnitude is below [`ZERO_THRESHOLD`] times the largest magnitude are
/// dropped, and the zero polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Default)]
pub struct UniPoly {
    coeffs: Vec<Complex>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<Complex>) -> Self {
        let scale = max_abs(&coeffs);
        Self::trimmed(coeffs, scale)
    }

    /// Normalize against an external magnitude scale instead of the
    /// polynomial's own largest coefficient. Used after cancellations, where
    /// the surviving coefficients are tiny compared to the operands.
    pub fn trimmed(mut coeffs: Vec<Complex>, scale: f64) -> Self {
        let floor = ZERO_THRESHOLD * scale;
        while let Some(last) = coeffs.last() {
            if last.norm() <= floor {
                coeffs.pop();
            } else {
                break;
            }
        }
        if coeffs.iter().all(|c| c.norm() == 0.0) {
            coeffs.clear();
        }
        UniPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&r| Complex::new(r, 0.0)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(1.0, 0.0))
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        max_abs(&self.coeffs)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_i| |z|^i`, the natural scale for backward-error residuals.
    pub fn abs_scale(&self, z: Complex) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let d = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Self::new(d)
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `a * b - c * d`, trimmed relative to the magnitude of the two
    /// products rather than of the (possibly much smaller) difference.
    pub(crate) fn cross_diff(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let left = a.mul_raw(b);
        let right = c.mul_raw(d);
        let scale = max_abs(&left).max(max_abs(&right));
        let n = left.len().max(right.len());
        let mut out = vec![Complex::new(0.0, 0.0); n];
        for (i, v) in left.into_iter().enumerate() {
            out[i] += v;
        }
        for (i, v) in right.into_iter().enumerate() {
            out[i] -= v;
        }
        Self::trimmed(out, scale)
    }

    fn mul_raw(&self, other: &Self) -> Vec<Complex> {
        if self.is_zero() || other.is_zero() {
            return Vec::new();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    }

    /// Quotient of a division known to be exact; the remainder is discarded.
    ///
    /// Long division from the top loses accuracy in the low coefficients
    /// when the divisor's leading coefficient is small, and series division
    /// from the bottom has the mirror problem. Both are computed, and the
    /// quotient takes its low coefficients from one and its high ones from
    /// the other, at whichever split leaves the smallest remainder.
    pub fn div_exact(&self, divisor: &Self) -> Self {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let (Some(n), Some(d)) = (self.degree(), divisor.degree()) else {
            return Self::zero();
        };
        if n < d {
            return Self::zero();
        }
        let len = n - d + 1;
        let dc = &divisor.coeffs;
        let zero = Complex::new(0.0, 0.0);

        let mut rem = self.coeffs.clone();
        let mut top = vec![zero; len];
        for k in (0..len).rev() {
            let q = rem[k + d] / dc[d];
            top[k] = q;
            for (j, &c) in dc.iter().enumerate() {
                rem[k + j] -= q * c;
            }
        }

        // Series division needs a nonzero constant term; factor out the
        // divisor's lowest power of z first.
        let shift = dc.iter().position(|c| c.norm() > 0.0).unwrap_or(0);
        if shift > d || shift >= self.coeffs.len() {
            return Self::new(top);
        }
        let low = &dc[shift..];
        let mut rem: Vec<Complex> = self.coeffs[shift..].to_vec();
        let mut bottom = vec![zero; len];
        for k in 0..len {
            let q = rem[k] / low[0];
            bottom[k] = q;
            for (j, &c) in low.iter().enumerate() {
                if k + j < rem.len() {
                    rem[k + j] -= q * c;
                }
            }
        }

        let residual = |q: &[Complex]| -> f64 {
            let mut prod = vec![zero; len + d];
            for (i, &a) in q.iter().enumerate() {
                for (j, &b) in dc.iter().enumerate() {
                    prod[i + j] += a * b;
                }
            }
            prod.iter()
                .enumerate()
                .map(|(i, &v)| (v - self.coeffs.get(i).copied().unwrap_or(zero)).norm())
                .fold(0.0, f64::max)
        };
        let mut best = (f64::INFINITY, top.clone());
        for split in 0..=len {
            let q: Vec<Complex> = bottom[..split]
                .iter()
                .chain(&top[split..])
                .copied()
                .collect();
            let r = residual(&q);
            if r < best.0 {
                best = (r, q);
            }
        }
        Self::new(best.1)
    }

    /// Drop every coefficient above `max_degree`.
    pub fn truncate_degree(&self, max_degree: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.truncate(max_degree + 1);
        Self::new(c)
    }
}

fn max_abs(c: &[Complex]) -> f64 {
    c.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(i, c)| format!("({c})z^{i}"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let out = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or_default()
                    + rhs.coeffs.get(i).copied().unwrap_or_default()
            })
            .collect();
        UniPoly::new(out)
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        UniPoly::new(self.mul_raw(rhs))
    }
}
