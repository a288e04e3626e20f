//! Shared fixtures for the kernel benchmarks.

use inls_core::{presets, Field, RadialGrid, SystemSpec};
use num_complex::Complex64;

/// Two-wave system in the intercritical regime.
pub fn benchmark_system() -> SystemSpec {
    presets::two_wave(3, 0.6, 1.0, 0.0).expect("valid preset")
}

pub fn grid(points: usize) -> RadialGrid {
    RadialGrid::new(3, points, 20.0).expect("valid grid")
}

/// Chirped Gaussian pair on `grid`.
pub fn gaussian_pair(grid: &RadialGrid) -> Field {
    Field::from_radial_fn(grid.clone(), 2, |k, r| {
        Complex64::from_polar([1.0, 0.5][k] * (-r * r).exp(), 0.1 * r * r)
    })
}
