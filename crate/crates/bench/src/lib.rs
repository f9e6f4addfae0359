//! Lens models shared by the benchmarks.

use lensfix_core::{Complex, DeflectionModel};

pub fn binary() -> DeflectionModel {
    DeflectionModel::point_mass_ensemble(
        &[0.5, 0.5],
        &[Complex::new(-0.5, 0.0), Complex::new(0.5, 0.0)],
    )
    .expect("valid binary")
}

/// Three unequal masses; 10 complex fixed points per source.
pub fn triple() -> DeflectionModel {
    DeflectionModel::point_mass_ensemble(
        &[0.5, 0.3, 0.2],
        &[
            Complex::new(-0.6, 0.1),
            Complex::new(0.5, -0.2),
            Complex::new(0.1, 0.7),
        ],
    )
    .expect("valid triple")
}
