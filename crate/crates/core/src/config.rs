//! TOML model files.
//!
//! ```toml
//! type = "point_ensemble"   # or "plummer", "filament", "raw"
//! name = "binary"           # optional
//! masses = [0.5, 0.5]
//! positions = [[-0.5, 0.0], [0.5, 0.0]]
//! ```
//!
//! Plummer takes `theta_e` and `a`, the filament `sigma0`. A raw model lists
//! the four polynomials as `[i, j, re, im]` rows, meaning `(re + i im) z1^i z2^j`:
//!
//! ```toml
//! type = "raw"
//! [alpha1]
//! num = [[0, 0, -0.5, 0.0]]
//! den = [[1, 0, 1.0, 0.0], [0, 1, 1.0, 0.0]]
//! [alpha2]
//! num = [[0, 0, -0.5, 0.0]]
//! den = [[1, 0, 1.0, 0.0], [0, 1, 1.0, 0.0]]
//! ```

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::algebra::{BiPoly, Complex};
use crate::lens::{DeflectionModel, ModelError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed model file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("bad coefficient row {row} in {table}: exponents must be non-negative integers")]
    BadExponent { table: String, row: usize },
    #[error("positions must be [re, im] pairs, and there must be one per mass")]
    BadPositions,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalSpec {
    num: Vec<[f64; 4]>,
    den: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ModelSpec {
    PointEnsemble {
        name: Option<String>,
        masses: Vec<f64>,
        positions: Vec<Vec<f64>>,
    },
    Plummer {
        name: Option<String>,
        theta_e: f64,
        a: f64,
    },
    Filament {
        name: Option<String>,
        sigma0: f64,
    },
    Raw {
        name: Option<String>,
        alpha1: RationalSpec,
        alpha2: RationalSpec,
    },
}

fn poly(rows: &[[f64; 4]], table: &str) -> Result<BiPoly, ConfigError> {
    let mut terms = Vec::with_capacity(rows.len());
    for (k, &[i, j, re, im]) in rows.iter().enumerate() {
        let ok = |e: f64| e >= 0.0 && e.fract() == 0.0 && e < 64.0;
        if !ok(i) || !ok(j) {
            return Err(ConfigError::BadExponent {
                table: table.to_string(),
                row: k,
            });
        }
        terms.push((i as usize, j as usize, Complex::new(re, im)));
    }
    Ok(BiPoly::from_terms(&terms))
}

/// Build a model from TOML text.
pub fn parse_model(text: &str) -> Result<DeflectionModel, ConfigError> {
    let spec: ModelSpec = toml::from_str(text)?;
    let (model, name) = match spec {
        ModelSpec::PointEnsemble {
            name,
            masses,
            positions,
        } => {
            if positions.len() != masses.len() || positions.iter().any(|p| p.len() != 2) {
                return Err(ConfigError::BadPositions);
            }
            let pos: Vec<Complex> = positions.iter().map(|p| Complex::new(p[0], p[1])).collect();
            (DeflectionModel::point_mass_ensemble(&masses, &pos)?, name)
        }
        ModelSpec::Plummer { name, theta_e, a } => (DeflectionModel::plummer(theta_e, a)?, name),
        ModelSpec::Filament { name, sigma0 } => (DeflectionModel::filament(sigma0)?, name),
        ModelSpec::Raw {
            name,
            alpha1,
            alpha2,
        } => {
            let a1 = (
                poly(&alpha1.num, "alpha1.num")?,
                poly(&alpha1.den, "alpha1.den")?,
            );
            let a2 = (
                poly(&alpha2.num, "alpha2.num")?,
                poly(&alpha2.den, "alpha2.den")?,
            );
            (DeflectionModel::raw("raw", a1, a2)?, name)
        }
    };
    Ok(match name {
        Some(n) => model.with_name(n),
        None => model,
    })
}

pub fn load_model(path: &Path) -> Result<DeflectionModel, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let m = parse_model("type = \"filament\"\nsigma0 = 0.125\n").unwrap();
        assert_eq!(m.name, "filament");
        assert!(m.validate().all_pass());

        let m = parse_model(
            "type = \"point_ensemble\"\nname = \"binary\"\nmasses = [0.5, 0.5]\npositions = [[-0.5, 0.0], [0.5, 0.0]]\n",
        )
        .unwrap();
        assert_eq!(m.name, "binary");
        let z = Complex::new(0.3, 0.2);
        let want = DeflectionModel::point_mass_ensemble(
            &[0.5, 0.5],
            &[Complex::new(-0.5, 0.0), Complex::new(0.5, 0.0)],
        )
        .unwrap();
        assert_eq!(m.lens_map_real(z), want.lens_map_real(z));

        let m = parse_model("type = \"plummer\"\ntheta_e = 1.0\na = 0.5\n").unwrap();
        assert!(m.validate().all_pass());
    }

    #[test]
    fn raw_filament_matches_builtin() {
        let text = r#"
type = "raw"
[alpha1]
num = [[0, 0, -0.5, 0.0]]
den = [[1, 0, 1.0, 0.0], [0, 1, 1.0, 0.0]]
[alpha2]
num = [[0, 0, -0.5, 0.0]]
den = [[1, 0, 1.0, 0.0], [0, 1, 1.0, 0.0]]
"#;
        let m = parse_model(text).unwrap();
        let f = DeflectionModel::filament(0.125).unwrap();
        let z = Complex::new(0.7, -0.4);
        let (a, b) = (m.lens_map_real(z).unwrap(), f.lens_map_real(z).unwrap());
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_model("type = \"filament\"\n"),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            parse_model("type = \"sis\"\n"),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            parse_model("type = \"filament\"\nsigma0 = 0.1\nextra = 1\n"),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            parse_model("type = \"filament\"\nsigma0 = -1.0\n"),
            Err(ConfigError::Model(ModelError::NonpositiveParameter { .. }))
        ));
        assert!(matches!(
            parse_model("type = \"point_ensemble\"\nmasses = [1.0]\npositions = [[0.0]]\n"),
            Err(ConfigError::BadPositions)
        ));
        let bad = "type = \"raw\"\n[alpha1]\nnum = [[0.5, 0, 1.0, 0.0]]\nden = [[0, 0, 1.0, 0.0]]\n[alpha2]\nnum = []\nden = [[0, 0, 1.0, 0.0]]\n";
        assert!(matches!(
            parse_model(bad),
            Err(ConfigError::BadExponent { .. })
        ));
    }
}
