use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Complex, UniPoly, ZERO_THRESHOLD};

/// One of the two independent variables `z1 = z`, `z2 = conj(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z1,
    Z2,
}

/// Dense bivariate polynomial `sum c[i][j] z1^i z2^j`.
///
/// Rows are indexed by the power of `z1`, columns by the power of `z2`. The
/// matrix is rectangular and trailing rows/columns that are zero (below
/// [`ZERO_THRESHOLD`] relative to the largest coefficient) are trimmed. The
/// zero polynomial has no rows.
#[derive(Clone, PartialEq, Default)]
pub struct BiPoly {
    coeffs: Vec<Vec<Complex>>,
}

impl BiPoly {
    /// Build from a (possibly ragged) coefficient matrix.
    pub fn new(rows: Vec<Vec<Complex>>) -> Self {
        let width = rows.iter().map(Vec::len).max().unwrap_or(0);
        let coeffs = rows
            .into_iter()
            .map(|mut r| {
                r.resize(width, Complex::new(0.0, 0.0));
                r
            })
            .collect();
        let mut p = BiPoly { coeffs };
        p.trim();
        p
    }

    /// Build from `(i, j, coefficient)` triples; repeated indices accumulate.
    pub fn from_terms(terms: &[(usize, usize, Complex)]) -> Self {
        let d1 = terms.iter().map(|t| t.0).max();
        let d2 = terms.iter().map(|t| t.1).max();
        let (Some(d1), Some(d2)) = (d1, d2) else {
            return Self::zero();
        };
        let mut rows = vec![vec![Complex::new(0.0, 0.0); d2 + 1]; d1 + 1];
        for &(i, j, c) in terms {
            rows[i][j] += c;
        }
        Self::new(rows)
    }

    pub fn zero() -> Self {
        BiPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![vec![c]])
    }

    pub fn z1() -> Self {
        Self::from_terms(&[(1, 0, Complex::new(1.0, 0.0))])
    }

    pub fn z2() -> Self {
        Self::from_terms(&[(0, 1, Complex::new(1.0, 0.0))])
    }

    /// Embed a univariate polynomial in the given variable.
    pub fn from_uni(p: &UniPoly, var: Var) -> Self {
        let terms: Vec<_> = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, &c)| match var {
                Var::Z1 => (k, 0, c),
                Var::Z2 => (0, k, c),
            })
            .collect();
        Self::from_terms(&terms)
    }

    fn trim(&mut self) {
        let scale = self.max_abs_coeff();
        let floor = ZERO_THRESHOLD * scale;
        if scale == 0.0 {
            self.coeffs.clear();
            return;
        }
        while self
            .coeffs
            .last()
            .is_some_and(|r| r.iter().all(|c| c.norm() <= floor))
        {
            self.coeffs.pop();
        }
        let width = self.coeffs.first().map_or(0, Vec::len);
        let mut keep = width;
        while keep > 0 && self.coeffs.iter().all(|r| r[keep - 1].norm() <= floor) {
            keep -= 1;
        }
        for r in &mut self.coeffs {
            r.truncate(keep);
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex {
        self.coeffs
            .get(i)
            .and_then(|r| r.get(j))
            .copied()
            .unwrap_or_default()
    }

    pub fn rows(&self) -> &[Vec<Complex>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Iterate over the nonzero terms as `(i, j, c)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex)> + '_ {
        let floor = ZERO_THRESHOLD * self.max_abs_coeff();
        self.coeffs.iter().enumerate().flat_map(move |(i, r)| {
            r.iter()
                .enumerate()
                .filter(move |(_, c)| c.norm() > floor)
                .map(move |(j, &c)| (i, j, c))
        })
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: Var) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        Some(match var {
            Var::Z1 => self.coeffs.len() - 1,
            Var::Z2 => self.coeffs[0].len() - 1,
        })
    }

    /// Total degree `max(i + j)` over nonzero terms; `None` for zero.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms().map(|(i, j, _)| i + j).max()
    }

    /// Horner evaluation, nested in `z2` inside and `z1` outside.
    pub fn eval(&self, z1: Complex, z2: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, row| {
                let inner = row
                    .iter()
                    .rev()
                    .fold(Complex::new(0.0, 0.0), |a, &c| a * z2 + c);
                acc * z1 + inner
            })
    }

    /// `sum |c_ij| |z1|^i |z2|^j`.
    pub fn abs_scale(&self, z1: Complex, z2: Complex) -> f64 {
        let (r1, r2) = (z1.norm(), z2.norm());
        self.coeffs.iter().rev().fold(0.0, |acc, row| {
            let inner = row.iter().rev().fold(0.0, |a, c| a * r2 + c.norm());
            acc * r1 + inner
        })
    }

    pub fn partial(&self, var: Var) -> Self {
        let mut rows = Vec::new();
        match var {
            Var::Z1 => {
                for (i, r) in self.coeffs.iter().enumerate().skip(1) {
                    rows.push(r.iter().map(|&c| c * i as f64).collect());
                }
            }
            Var::Z2 => {
                for r in &self.coeffs {
                    rows.push(
                        r.iter()
                            .enumerate()
                            .skip(1)
                            .map(|(j, &c)| c * j as f64)
                            .collect(),
                    );
                }
            }
        }
        Self::new(rows)
    }

    /// Swap the roles of `z1` and `z2`.
    pub fn transpose(&self) -> Self {
        let terms: Vec<_> = self.terms().map(|(i, j, c)| (j, i, c)).collect();
        Self::from_terms(&terms)
    }

    /// `conj(p(conj z2, conj z1))`: conjugate the coefficients and transpose
    /// the indices. Applied to the first deflection component this yields the
    /// second one.
    pub fn conj_transpose(&self) -> Self {
        let terms: Vec<_> = self.terms().map(|(i, j, c)| (j, i, c.conj())).collect();
        Self::from_terms(&terms)
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|&c| c * s).collect())
                .collect(),
        )
    }

    /// Coefficients of `z2^j` as polynomials in `z1`, ascending in `j`.
    pub fn coeffs_in_z2(&self) -> Vec<UniPoly> {
        let width = self.coeffs.first().map_or(0, Vec::len);
        (0..width)
            .map(|j| UniPoly::new(self.coeffs.iter().map(|r| r[j]).collect()))
            .collect()
    }

    /// Substitute a value for `z1`, leaving a polynomial in `z2`.
    pub fn at_z1(&self, z1: Complex) -> UniPoly {
        let width = self.coeffs.first().map_or(0, Vec::len);
        let mut out = vec![Complex::new(0.0, 0.0); width];
        for row in self.coeffs.iter().rev() {
            for (o, &c) in out.iter_mut().zip(row) {
                *o = *o * z1 + c;
            }
        }
        UniPoly::new(out)
    }

    /// Substitute a value for `z2`, leaving a polynomial in `z1`.
    pub fn at_z2(&self, z2: Complex) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .map(|r| {
                    r.iter()
                        .rev()
                        .fold(Complex::new(0.0, 0.0), |a, &c| a * z2 + c)
                })
                .collect(),
        )
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let n1 = self.coeffs.len().max(other.coeffs.len());
        let w = self
            .coeffs
            .first()
            .map_or(0, Vec::len)
            .max(other.coeffs.first().map_or(0, Vec::len));
        let rows = (0..n1)
            .map(|i| {
                (0..w)
                    .map(|j| self.coeff(i, j) + other.coeff(i, j) * sign)
                    .collect()
            })
            .collect();
        Self::new(rows)
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .terms()
            .map(|(i, j, c)| format!("({c})z1^{i}z2^{j}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::zero();
        }
        let (a1, a2) = (self.coeffs.len(), self.coeffs[0].len());
        let (b1, b2) = (rhs.coeffs.len(), rhs.coeffs[0].len());
        let mut rows = vec![vec![Complex::new(0.0, 0.0); a2 + b2 - 1]; a1 + b1 - 1];
        for (i, ra) in self.coeffs.iter().enumerate() {
            for (j, &ca) in ra.iter().enumerate() {
                if ca == Complex::new(0.0, 0.0) {
                    continue;
                }
                for (k, rb) in rhs.coeffs.iter().enumerate() {
                    for (l, &cb) in rb.iter().enumerate() {
                        rows[i + k][j + l] += ca * cb;
                    }
                }
            }
        }
        BiPoly::new(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::c;

    fn one() -> Complex {
        c(1.0, 0.0)
    }

    #[test]
    fn eval_examples() {
        let p = BiPoly::from_terms(&[(1, 1, one()), (0, 0, one())]);
        assert_eq!(p.eval(c(2.0, 0.0), c(3.0, 0.0)), c(7.0, 0.0));
        assert_eq!(BiPoly::zero().eval(c(1.5, -2.0), c(0.3, 9.0)), c(0.0, 0.0));
        let q = BiPoly::from_terms(&[(2, 0, one()), (0, 1, -one())]);
        assert_eq!(q.eval(c(0.0, 1.0), c(-1.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn partial_examples() {
        let p = BiPoly::from_terms(&[(2, 1, one())]);
        assert_eq!(
            p.partial(Var::Z1),
            BiPoly::from_terms(&[(1, 1, c(2.0, 0.0))])
        );
        let k = BiPoly::constant(c(3.0, -1.0));
        assert!(k.partial(Var::Z1).is_zero());
        assert!(k.partial(Var::Z2).is_zero());
        let q = BiPoly::from_terms(&[(1, 1, one()), (0, 3, one())]);
        assert_eq!(
            q.partial(Var::Z2),
            BiPoly::from_terms(&[(1, 0, one()), (0, 2, c(3.0, 0.0))])
        );
    }

    #[test]
    fn partial_drops_degree_by_one() {
        let p = BiPoly::from_terms(&[(3, 1, one()), (1, 2, c(0.5, 2.0))]);
        assert_eq!(p.partial(Var::Z1).degree_in(Var::Z1), Some(2));
        assert_eq!(p.partial(Var::Z2).degree_in(Var::Z2), Some(1));
    }

    #[test]
    fn trimming_and_degrees() {
        let p = BiPoly::new(vec![
            vec![one(), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0); 3],
        ]);
        assert_eq!(p.degree_in(Var::Z1), Some(1));
        assert_eq!(p.degree_in(Var::Z2), Some(1));
        assert_eq!(p.total_degree(), Some(2));
        assert_eq!(BiPoly::zero().total_degree(), None);
    }

    #[test]
    fn partial_substitution_matches_full_eval() {
        let p = BiPoly::from_terms(&[(2, 1, c(1.0, 2.0)), (0, 2, one()), (1, 0, c(-3.0, 0.5))]);
        let (a, b) = (c(0.3, -1.1), c(1.7, 0.2));
        let full = p.eval(a, b);
        assert!((p.at_z1(a).eval(b) - full).norm() < 1e-14);
        assert!((p.at_z2(b).eval(a) - full).norm() < 1e-14);
    }

    #[test]
    fn conj_transpose_is_conjugate_swap() {
        let p = BiPoly::from_terms(&[(2, 1, c(1.0, 2.0)), (0, 1, c(0.0, -1.0))]);
        let q = p.conj_transpose();
        let (a, b) = (c(0.4, 0.9), c(-1.2, 0.3));
        assert!((q.eval(a, b) - p.eval(b.conj(), a.conj()).conj()).norm() < 1e-14);
    }
}
