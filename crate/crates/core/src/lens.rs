//! Lens models as rational complexified deflections.
//!
//! A model stores the deflection `alpha(z, conj z)` twice, as two rational
//! functions of independent variables: `alpha1(z1, z2)` continues `alpha` and
//! `alpha2(z1, z2)` continues `conj(alpha)`. The real lens map is
//! `zeta = z - alpha1(z, conj z)` and the images of a source are the fixed
//! points of `(z1, z2) -> (zeta + alpha1, conj(zeta) + alpha2)`.
//!
//! Built-in constructors derive `alpha2` from `alpha1` by conjugating
//! coefficients and swapping variables, so the two halves cannot drift apart.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::algebra::{BiPoly, Complex, RationalFn};

/// Relative tolerance for the sampled conjugate-symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Radius at which the decay invariant is sampled.
pub const DECAY_RADIUS: f64 = 1e6;
/// Largest deflection magnitude tolerated at [`DECAY_RADIUS`].
pub const DECAY_TOL: f64 = 1e-5;
/// Bound on `|Im det|` relative to `1 + |det|` for the real Jacobian.
pub const DET_IMAG_TOL: f64 = 1e-10;
/// A denominator this small relative to its largest coefficient is a pole.
pub const POLE_EVAL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("lens positions {0} and {1} coincide")]
    DuplicatePosition(usize, usize),
    #[error("mass {index} is not positive ({value})")]
    NonpositiveMass { index: usize, value: f64 },
    #[error("parameter {name} must be positive (got {value})")]
    NonpositiveParameter { name: &'static str, value: f64 },
    #[error("point ensemble needs at least one mass and as many positions as masses")]
    EmptyEnsemble,
    #[error("deflection denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("deflection has a pole at ({re}, {im})")]
    PoleEvaluation { re: f64, im: f64 },
    #[error("Jacobian determinant has imaginary part {imag:e} at a real point")]
    SymmetryViolation { imag: f64 },
    #[error("model has no closed-form deflection potential")]
    NoPotentialForm,
    #[error("deflection potential is singular at ({re}, {im})")]
    PotentialSingularity { re: f64, im: f64 },
}

/// Closed form of the deflection potential, recorded by the built-in
/// constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialForm {
    /// `Psi = sum m_i ln|x - c_i|`.
    PointEnsemble {
        masses: Vec<f64>,
        positions: Vec<Complex>,
    },
    /// `Psi = (theta_e^2 / 2) ln(a^2 + |x|^2)`.
    Plummer {
        theta_e: f64,
        a: f64,
    },
    /// `Psi = -2 sigma0 ln|x1|`, a filament along the `x2` axis.
    Filament {
        sigma0: f64,
    },
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcePos {
    pub zeta: Complex,
}

impl SourcePos {
    pub fn new(re: f64, im: f64) -> Self {
        SourcePos {
            zeta: Complex::new(re, im),
        }
    }
}

impl From<Complex> for SourcePos {
    fn from(zeta: Complex) -> Self {
        SourcePos { zeta }
    }
}

/// `I - J_f` for the holomorphic map `f = (zeta + alpha1, conj(zeta) + alpha2)`,
/// i.e. `[[1 - d1 a1, -d2 a1], [-d1 a2, 1 - d2 a2]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexJacobian {
    pub m: [[Complex; 2]; 2],
}

impl ComplexJacobian {
    pub fn det(&self) -> Complex {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }
}

/// Real 2x2 Jacobian of the lens map `eta(x1, x2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealJacobian {
    /// `entries[r][c] = d eta_r / d x_c`.
    pub entries: [[f64; 2]; 2],
    pub det: f64,
}

impl RealJacobian {
    fn from_entries(entries: [[f64; 2]; 2]) -> Self {
        let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
        RealJacobian { entries, det }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub degree_ok: bool,
    pub symmetry_ok: bool,
    pub decay_ok: bool,
    /// Largest relative `|alpha2 - conj(alpha1)|` over the symmetry samples.
    pub max_symmetry_error: f64,
    /// Largest `|alpha_mu|` over the decay samples.
    pub max_decay: f64,
    pub diagnostics: Vec<String>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.degree_ok && self.symmetry_ok && self.decay_ok
    }

    /// Names of the failing invariants, in a fixed order.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.degree_ok {
            out.push("degree_condition");
        }
        if !self.symmetry_ok {
            out.push("conjugate_symmetry");
        }
        if !self.decay_ok {
            out.push("decay");
        }
        out
    }
}

/// A rational lensing map.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflectionModel {
    pub name: String,
    alpha1: RationalFn,
    alpha2: RationalFn,
    potential: PotentialForm,
}

fn real(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonpositiveParameter { name, value })
    }
}

impl DeflectionModel {
    fn symmetric(name: String, alpha1: RationalFn, potential: PotentialForm) -> Self {
        let alpha2 = alpha1.conj_transpose();
        DeflectionModel {
            name,
            alpha1,
            alpha2,
            potential,
        }
    }

    /// Point masses `m_i` at `c_i`:
    /// `alpha1 = sum m_i / (z2 - conj c_i)` over a common denominator.
    pub fn point_mass_ensemble(masses: &[f64], positions: &[Complex]) -> Result<Self, ModelError> {
        if masses.is_empty() || masses.len() != positions.len() {
            return Err(ModelError::EmptyEnsemble);
        }
        for (index, &value) in masses.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ModelError::NonpositiveMass { index, value });
            }
        }
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                if positions[i] == positions[j] {
                    return Err(ModelError::DuplicatePosition(i, j));
                }
            }
        }
        let factor = |c: &Complex| &BiPoly::z2() - &BiPoly::constant(c.conj());
        let den = positions
            .iter()
            .fold(BiPoly::constant(real(1.0)), |acc, c| &acc * &factor(c));
        let mut num = BiPoly::zero();
        for (i, &m) in masses.iter().enumerate() {
            let others = positions
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(BiPoly::constant(real(m)), |acc, (_, c)| &acc * &factor(c));
            num = &num + &others;
        }
        let alpha1 = RationalFn::new(num, den).ok_or(ModelError::ZeroDenominator)?;
        let name = if masses.len() == 1 {
            "point_mass".to_string()
        } else {
            format!("point_ensemble_{}", masses.len())
        };
        Ok(Self::symmetric(
            name,
            alpha1,
            PotentialForm::PointEnsemble {
                masses: masses.to_vec(),
                positions: positions.to_vec(),
            },
        ))
    }

    /// Circular Plummer sphere: `alpha1 = theta_e^2 z1 / (z1 z2 + a^2)`.
    pub fn plummer(theta_e: f64, a: f64) -> Result<Self, ModelError> {
        check_positive("theta_e", theta_e)?;
        check_positive("a", a)?;
        let num = BiPoly::from_terms(&[(1, 0, real(theta_e * theta_e))]);
        let den = BiPoly::from_terms(&[(1, 1, real(1.0)), (0, 0, real(a * a))]);
        let alpha1 = RationalFn::new(num, den).ok_or(ModelError::ZeroDenominator)?;
        Ok(Self::symmetric(
            "plummer".to_string(),
            alpha1,
            PotentialForm::Plummer { theta_e, a },
        ))
    }

    /// Filament of galaxies along the `x2` axis with surface density
    /// `sigma0 / x1^2`: `alpha1 = alpha2 = -4 sigma0 / (z1 + z2)`.
    pub fn filament(sigma0: f64) -> Result<Self, ModelError> {
        check_positive("sigma0", sigma0)?;
        let num = BiPoly::constant(real(-4.0 * sigma0));
        let den = BiPoly::from_terms(&[(1, 0, real(1.0)), (0, 1, real(1.0))]);
        let alpha1 = RationalFn::new(num, den).ok_or(ModelError::ZeroDenominator)?;
        Ok(Self::symmetric(
            "filament".to_string(),
            alpha1,
            PotentialForm::Filament { sigma0 },
        ))
    }

    /// Arbitrary pair of rational deflections. Nothing beyond nonzero
    /// denominators is enforced; use [`DeflectionModel::validate`] to inspect
    /// the lens-map invariants.
    pub fn raw(
        name: impl Into<String>,
        alpha1: (BiPoly, BiPoly),
        alpha2: (BiPoly, BiPoly),
    ) -> Result<Self, ModelError> {
        let alpha1 = RationalFn::new(alpha1.0, alpha1.1).ok_or(ModelError::ZeroDenominator)?;
        let alpha2 = RationalFn::new(alpha2.0, alpha2.1).ok_or(ModelError::ZeroDenominator)?;
        Ok(DeflectionModel {
            name: name.into(),
            alpha1,
            alpha2,
            potential: PotentialForm::None,
        })
    }

    pub fn alpha1(&self) -> &RationalFn {
        &self.alpha1
    }

    pub fn alpha2(&self) -> &RationalFn {
        &self.alpha2
    }

    pub fn potential(&self) -> &PotentialForm {
        &self.potential
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Degree condition, sampled conjugate symmetry and decay.
    pub fn validate(&self) -> ValidationReport {
        let mut diagnostics = Vec::new();

        let degree_ok = self.alpha1.is_proper() && self.alpha2.is_proper();
        for (label, f) in [("alpha1", &self.alpha1), ("alpha2", &self.alpha2)] {
            let dn = f.num().total_degree();
            let dd = f.den().total_degree();
            let fmt = |d: Option<usize>| d.map_or("-inf".to_string(), |d| d.to_string());
            diagnostics.push(format!("{label}: deg U = {}, deg V = {}", fmt(dn), fmt(dd)));
        }

        // 32 samples on each of two circles; radii avoid the usual lens
        // positions and Einstein radii.
        let mut max_symmetry_error: f64 = 0.0;
        let mut samples = 0;
        for radius in [0.73, 1.91] {
            for k in 0..32 {
                let z = Complex::from_polar(radius, TAU * k as f64 / 32.0 + 0.1);
                let (Some(a1), Some(a2)) =
                    (self.alpha1.eval(z, z.conj()), self.alpha2.eval(z, z.conj()))
                else {
                    continue;
                };
                if !(a1.is_finite() && a2.is_finite()) {
                    continue;
                }
                samples += 1;
                let err = (a2 - a1.conj()).norm() / (1.0 + a1.norm());
                max_symmetry_error = max_symmetry_error.max(err);
            }
        }
        let symmetry_ok = samples > 0 && max_symmetry_error <= SYMMETRY_TOL;
        diagnostics.push(format!(
            "conjugate symmetry: max relative error {max_symmetry_error:.3e} over {samples} samples"
        ));

        let mut max_decay: f64 = 0.0;
        for k in 0..16 {
            let z = Complex::from_polar(DECAY_RADIUS, TAU * k as f64 / 16.0 + 0.05);
            for f in [&self.alpha1, &self.alpha2] {
                let v = f.eval(z, z.conj()).map_or(f64::INFINITY, |v| v.norm());
                max_decay = max_decay.max(v);
            }
        }
        let decay_ok = max_decay < DECAY_TOL;
        diagnostics.push(format!(
            "decay: max |alpha| = {max_decay:.3e} at radius {DECAY_RADIUS:e}"
        ));

        ValidationReport {
            degree_ok,
            symmetry_ok,
            decay_ok,
            max_symmetry_error,
            max_decay,
            diagnostics,
        }
    }

    fn pole_error(z: Complex) -> ModelError {
        ModelError::PoleEvaluation { re: z.re, im: z.im }
    }

    fn is_pole(f: &RationalFn, z1: Complex, z2: Complex) -> bool {
        f.den_at(z1, z2).norm() <= POLE_EVAL_TOL * f.den().max_abs_coeff()
    }

    /// `eta(z) = z - alpha1(z, conj z)`.
    pub fn lens_map_real(&self, z: Complex) -> Result<Complex, ModelError> {
        if Self::is_pole(&self.alpha1, z, z.conj()) {
            return Err(Self::pole_error(z));
        }
        let a = self
            .alpha1
            .eval(z, z.conj())
            .ok_or_else(|| Self::pole_error(z))?;
        Ok(z - a)
    }

    /// Same map computed through `alpha2`: `conj(conj(z) - alpha2(z, conj z))`.
    /// Agrees with [`Self::lens_map_real`] for conjugate-symmetric models.
    pub fn lens_map_real_conj_path(&self, z: Complex) -> Result<Complex, ModelError> {
        if Self::is_pole(&self.alpha2, z, z.conj()) {
            return Err(Self::pole_error(z));
        }
        let a = self
            .alpha2
            .eval(z, z.conj())
            .ok_or_else(|| Self::pole_error(z))?;
        Ok((z.conj() - a).conj())
    }

    /// `I - J_f` at an arbitrary point of `C^2`.
    pub fn complex_jacobian(
        &self,
        z1: Complex,
        z2: Complex,
    ) -> Result<ComplexJacobian, ModelError> {
        if Self::is_pole(&self.alpha1, z1, z2) || Self::is_pole(&self.alpha2, z1, z2) {
            return Err(Self::pole_error(z1));
        }
        let a1 = self
            .alpha1
            .eval_with_partials(z1, z2)
            .ok_or_else(|| Self::pole_error(z1))?;
        let a2 = self
            .alpha2
            .eval_with_partials(z1, z2)
            .ok_or_else(|| Self::pole_error(z1))?;
        let one = real(1.0);
        Ok(ComplexJacobian {
            m: [[one - a1.d_z1, -a1.d_z2], [-a2.d_z1, one - a2.d_z2]],
        })
    }

    /// `det J_eta` at a real point, computed as the determinant of the
    /// complex Jacobian at `(z, conj z)`.
    pub fn det_real_jacobian(&self, z: Complex) -> Result<f64, ModelError> {
        let det = self.complex_jacobian(z, z.conj())?.det();
        if det.im.abs() > DET_IMAG_TOL * (1.0 + det.norm()) {
            return Err(ModelError::SymmetryViolation { imag: det.im });
        }
        Ok(det.re)
    }

    /// Real Jacobian of `eta` from the Wirtinger derivatives of `alpha1`
    /// alone: with `w = 1 - d alpha/dz` and `v = -d alpha/d conj(z)`,
    /// `d eta/dx1 = w + v` and `d eta/dx2 = i (w - v)`.
    pub fn real_jacobian(&self, z: Complex) -> Result<RealJacobian, ModelError> {
        if Self::is_pole(&self.alpha1, z, z.conj()) {
            return Err(Self::pole_error(z));
        }
        let a = self
            .alpha1
            .eval_with_partials(z, z.conj())
            .ok_or_else(|| Self::pole_error(z))?;
        let w = real(1.0) - a.d_z1;
        let v = -a.d_z2;
        let dx1 = w + v;
        let dx2 = Complex::new(0.0, 1.0) * (w - v);
        Ok(RealJacobian::from_entries([
            [dx1.re, dx2.re],
            [dx1.im, dx2.im],
        ]))
    }

    /// Deflection potential `Psi(x)` from the recorded closed form.
    pub fn deflection_potential(&self, x: Complex) -> Result<f64, ModelError> {
        let singular = || ModelError::PotentialSingularity { re: x.re, im: x.im };
        match &self.potential {
            PotentialForm::PointEnsemble { masses, positions } => {
                let mut psi = 0.0;
                for (m, c) in masses.iter().zip(positions) {
                    let r = (x - c).norm();
                    if r < 1e-12 {
                        return Err(singular());
                    }
                    psi += m * r.ln();
                }
                Ok(psi)
            }
            PotentialForm::Plummer { theta_e, a } => {
                Ok(0.5 * theta_e * theta_e * (a * a + x.norm_sqr()).ln())
            }
            PotentialForm::Filament { sigma0 } => {
                if x.re.abs() < 1e-12 {
                    return Err(singular());
                }
                Ok(-2.0 * sigma0 * x.re.abs().ln())
            }
            PotentialForm::None => Err(ModelError::NoPotentialForm),
        }
    }

    /// Fermat potential `|x - y|^2 / 2 - Psi(x)`.
    pub fn fermat_potential(&self, x: Complex, y: SourcePos) -> Result<f64, ModelError> {
        let psi = self.deflection_potential(x)?;
        Ok(0.5 * (x - y.zeta).norm_sqr() - psi)
    }

    /// Projected surface density `sigma = lap(Psi) / 2`.
    pub fn surface_density(&self, x: Complex) -> Result<f64, ModelError> {
        match &self.potential {
            PotentialForm::PointEnsemble { positions, .. } => {
                if positions.iter().any(|c| (x - c).norm() < 1e-12) {
                    Err(ModelError::PotentialSingularity { re: x.re, im: x.im })
                } else {
                    Ok(0.0)
                }
            }
            PotentialForm::Plummer { theta_e, a } => {
                let s = a * a + x.norm_sqr();
                Ok(theta_e * theta_e * a * a / (s * s))
            }
            PotentialForm::Filament { sigma0 } => {
                if x.re.abs() < 1e-12 {
                    return Err(ModelError::PotentialSingularity { re: x.re, im: x.im });
                }
                Ok(sigma0 / (x.re * x.re))
            }
            PotentialForm::None => Err(ModelError::NoPotentialForm),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Var;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn identity_lens() -> DeflectionModel {
        DeflectionModel::raw(
            "identity",
            (BiPoly::zero(), BiPoly::constant(c(1.0, 0.0))),
            (BiPoly::zero(), BiPoly::constant(c(1.0, 0.0))),
        )
        .unwrap()
    }

    #[test]
    fn single_point_mass_deflection() {
        let m = DeflectionModel::point_mass_ensemble(&[1.0], &[c(0.0, 0.0)]).unwrap();
        assert_eq!(m.alpha1().num(), &BiPoly::constant(c(1.0, 0.0)));
        assert_eq!(m.alpha1().den(), &BiPoly::z2());
        assert_eq!(m.alpha2().den(), &BiPoly::z1());
        assert!(m.validate().all_pass());
    }

    #[test]
    fn binary_degrees() {
        let m = DeflectionModel::point_mass_ensemble(&[0.5, 0.5], &[c(-0.5, 0.0), c(0.5, 0.0)])
            .unwrap();
        let a1 = m.alpha1();
        assert_eq!(a1.num().degree_in(Var::Z2), Some(1));
        assert_eq!(a1.den().degree_in(Var::Z2), Some(2));
        assert_eq!(a1.num().degree_in(Var::Z1), Some(0));
        assert!(m.validate().all_pass());
    }

    #[test]
    fn ensemble_errors() {
        assert_eq!(
            DeflectionModel::point_mass_ensemble(&[1.0, 1.0], &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(ModelError::DuplicatePosition(0, 1))
        );
        assert!(matches!(
            DeflectionModel::point_mass_ensemble(&[1.0, -1.0], &[c(1.0, 0.0), c(0.0, 0.0)]),
            Err(ModelError::NonpositiveMass { index: 1, .. })
        ));
        assert_eq!(
            DeflectionModel::point_mass_ensemble(&[], &[]),
            Err(ModelError::EmptyEnsemble)
        );
    }

    #[test]
    fn plummer_examples() {
        let m = DeflectionModel::plummer(1.0, 1.0).unwrap();
        let v = m.alpha1().eval(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(v, c(0.5, 0.0));
        assert_eq!(m.alpha1().num().total_degree(), Some(1));
        assert_eq!(m.alpha1().den().total_degree(), Some(2));
        let far = c(3e6, -4e6);
        assert!(m.alpha1().eval(far, far.conj()).unwrap().norm() < 1e-6);
        assert!(m.validate().all_pass());
        assert!(matches!(
            DeflectionModel::plummer(0.0, 1.0),
            Err(ModelError::NonpositiveParameter {
                name: "theta_e",
                ..
            })
        ));
        assert!(DeflectionModel::plummer(1.0, -1.0).is_err());
    }

    #[test]
    fn filament_examples() {
        let m = DeflectionModel::filament(0.125).unwrap();
        let v = m.alpha1().eval(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(v, c(-0.25, 0.0));
        assert_eq!(m.alpha1().num().total_degree(), Some(0));
        assert_eq!(m.alpha1().den().total_degree(), Some(1));
        assert_eq!(m.alpha1(), m.alpha2());
        assert!(m.validate().all_pass());
        assert!(DeflectionModel::filament(-0.1).is_err());
    }

    #[test]
    fn raw_model_validation_flags() {
        let one = BiPoly::constant(c(1.0, 0.0));
        let pm = DeflectionModel::raw(
            "raw",
            (one.clone(), BiPoly::z2()),
            (one.clone(), BiPoly::z1()),
        )
        .unwrap();
        let reference = DeflectionModel::point_mass_ensemble(&[1.0], &[c(0.0, 0.0)]).unwrap();
        let z = c(0.7, -1.3);
        assert_eq!(pm.lens_map_real(z), reference.lens_map_real(z));
        assert!(pm.validate().all_pass());

        let asym = DeflectionModel::raw(
            "asym",
            (one.clone(), BiPoly::z2()),
            (BiPoly::constant(c(2.0, 0.0)), BiPoly::z1()),
        )
        .unwrap();
        let r = asym.validate();
        assert!(r.degree_ok && !r.symmetry_ok);
        assert_eq!(r.failures(), vec!["conjugate_symmetry"]);

        let flat = DeflectionModel::raw(
            "flat",
            (BiPoly::z1(), BiPoly::z2()),
            (BiPoly::z2(), BiPoly::z1()),
        )
        .unwrap();
        let r = flat.validate();
        assert!(!r.degree_ok);
        assert!(!r.decay_ok);
        assert!(r.failures().contains(&"degree_condition"));

        assert_eq!(
            DeflectionModel::raw("bad", (one.clone(), BiPoly::zero()), (one, BiPoly::z1())),
            Err(ModelError::ZeroDenominator)
        );
    }

    #[test]
    fn lens_map_examples() {
        let pm = DeflectionModel::point_mass_ensemble(&[1.0], &[c(0.0, 0.0)]).unwrap();
        assert_eq!(pm.lens_map_real(c(2.0, 0.0)).unwrap(), c(1.5, 0.0));
        assert!(matches!(
            pm.lens_map_real(c(0.0, 0.0)),
            Err(ModelError::PoleEvaluation { .. })
        ));

        let fil = DeflectionModel::filament(0.125).unwrap();
        let x = 1.0 + 0.75f64.sqrt();
        let y = fil.lens_map_real(c(x, 0.0)).unwrap();
        assert!((y - c(2.0, 0.0)).norm() < 1e-12);

        let far = c(6e5, 8e5);
        for m in [pm, fil, DeflectionModel::plummer(1.0, 0.5).unwrap()] {
            let eta = m.lens_map_real(far).unwrap();
            assert!((eta - far).norm() / far.norm() < 1e-5);
        }
    }

    #[test]
    fn jacobian_examples() {
        let pm = DeflectionModel::point_mass_ensemble(&[1.0], &[c(0.0, 0.0)]).unwrap();
        let j = pm.complex_jacobian(c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        assert_eq!(j.m[0][0], c(1.0, 0.0));
        assert_eq!(j.m[0][1], c(0.25, 0.0));
        assert_eq!(j.m[1][0], c(0.25, 0.0));
        assert_eq!(j.m[1][1], c(1.0, 0.0));
        assert_eq!(j.det(), c(15.0 / 16.0, 0.0));
        // det = 1 - m^2 / |z|^4 vanishes on the Einstein ring
        let z = Complex::from_polar(1.0, 0.7);
        assert!(pm.det_real_jacobian(z).unwrap().abs() < 1e-14);

        let fil = DeflectionModel::filament(0.125).unwrap();
        let d = fil
            .complex_jacobian(c(1.0, 0.0), c(1.0, 0.0))
            .unwrap()
            .det();
        assert!((d - c(0.75, 0.0)).norm() < 1e-15);
        let x = 1.0 + 0.75f64.sqrt();
        let d = fil.det_real_jacobian(c(x, 0.0)).unwrap();
        assert!((d - (1.0 - 0.25 / (x * x))).abs() < 1e-15);
        assert!((d - 0.9282032).abs() < 1e-7);

        let id = identity_lens();
        assert_eq!(id.det_real_jacobian(c(0.3, 0.4)).unwrap(), 1.0);
        assert_eq!(
            id.complex_jacobian(c(0.3, 0.4), c(1.0, 2.0)).unwrap().det(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn real_jacobian_matches_complex_route() {
        let m = DeflectionModel::point_mass_ensemble(&[0.5, 0.3], &[c(-0.5, 0.1), c(0.5, 0.0)])
            .unwrap();
        for z in [c(0.3, 0.9), c(-1.4, -0.2), c(2.0, 1.0)] {
            let a = m.real_jacobian(z).unwrap().det;
            let b = m.det_real_jacobian(z).unwrap();
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn asymmetric_model_has_complex_real_determinant() {
        let asym = DeflectionModel::raw(
            "asym",
            (BiPoly::constant(c(1.0, 0.0)), BiPoly::z2()),
            (BiPoly::constant(c(0.0, 1.0)), BiPoly::z1()),
        )
        .unwrap();
        assert!(matches!(
            asym.det_real_jacobian(c(0.8, 0.3)),
            Err(ModelError::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn potentials_and_densities() {
        let pm = DeflectionModel::point_mass_ensemble(&[1.0], &[c(0.0, 0.0)]).unwrap();
        let phi = pm
            .fermat_potential(c(2.0, 0.0), SourcePos::new(1.5, 0.0))
            .unwrap();
        assert!((phi - (0.125 - 2f64.ln())).abs() < 1e-15);
        assert!((phi + 0.5681).abs() < 1e-4);
        assert_eq!(pm.surface_density(c(0.4, 0.2)).unwrap(), 0.0);
        assert!(pm
            .fermat_potential(c(0.0, 0.0), SourcePos::new(1.0, 0.0))
            .is_err());

        let fil = DeflectionModel::filament(0.125).unwrap();
        assert_eq!(fil.surface_density(c(0.5, 3.0)).unwrap(), 0.5);
        assert!(matches!(
            fil.surface_density(c(0.0, 1.0)),
            Err(ModelError::PotentialSingularity { .. })
        ));
        let x = c(0.7, 0.2);
        assert_eq!(
            fil.fermat_potential(x, SourcePos { zeta: x }).unwrap(),
            0.25 * 0.7f64.ln()
        );

        let pl = DeflectionModel::plummer(1.0, 1.0).unwrap();
        assert_eq!(pl.surface_density(c(0.0, 0.0)).unwrap(), 1.0);

        let raw = identity_lens();
        assert_eq!(raw.surface_density(x), Err(ModelError::NoPotentialForm));
        assert_eq!(
            raw.fermat_potential(x, SourcePos { zeta: x }),
            Err(ModelError::NoPotentialForm)
        );
    }
}
