//! Radial and Cartesian discretisations, fields on them, and snapshots.

mod cartesian;
mod radial;
pub mod snapshot;

use std::sync::Arc;

use num_complex::Complex64;

pub use cartesian::CartesianGrid;
pub use radial::{sphere_surface, RadialGrid, DEFAULT_POINTS, DEFAULT_R_MAX};

use crate::error::{Error, Result};
use crate::interaction::SystemSpec;

/// A shared handle to either backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    Radial(Arc<RadialGrid>),
    Cartesian(Arc<CartesianGrid>),
}

impl From<RadialGrid> for Grid {
    fn from(g: RadialGrid) -> Self {
        Grid::Radial(Arc::new(g))
    }
}

impl From<CartesianGrid> for Grid {
    fn from(g: CartesianGrid) -> Self {
        Grid::Cartesian(Arc::new(g))
    }
}

impl Grid {
    pub fn n(&self) -> usize {
        match self {
            Grid::Radial(g) => g.n(),
            Grid::Cartesian(g) => g.n(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Radial(g) => g.len(),
            Grid::Cartesian(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, Grid::Radial(_))
    }

    pub fn as_radial(&self) -> Option<&RadialGrid> {
        match self {
            Grid::Radial(g) => Some(g),
            Grid::Cartesian(_) => None,
        }
    }

    /// `|x|` at every node.
    pub fn radii(&self) -> Vec<f64> {
        match self {
            Grid::Radial(g) => g.nodes().to_vec(),
            Grid::Cartesian(g) => (0..g.len()).map(|j| g.radius(j)).collect(),
        }
    }

    /// Diagonal mass weights.
    pub fn volumes(&self) -> Vec<f64> {
        match self {
            Grid::Radial(g) => g.volumes().to_vec(),
            Grid::Cartesian(g) => vec![g.cell_volume(); g.len()],
        }
    }

    /// Diagonal weights carrying `|x|^{-b}`.
    pub fn singular_volumes(&self, b: f64) -> Result<Vec<f64>> {
        match self {
            Grid::Radial(g) => g.singular_volumes(b),
            Grid::Cartesian(g) => g.singular_volumes(b),
        }
    }

    pub fn l2_norm_sq(&self, psi: &[Complex64]) -> f64 {
        match self {
            Grid::Radial(g) => g.l2_norm_sq(psi),
            Grid::Cartesian(g) => g.l2_norm_sq(psi),
        }
    }

    pub fn gradient_norm_sq(&self, psi: &[Complex64]) -> f64 {
        match self {
            Grid::Radial(g) => g.gradient_norm_sq(psi),
            Grid::Cartesian(g) => g.gradient_norm_sq(psi),
        }
    }

    pub fn laplacian(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        match self {
            Grid::Radial(g) => g.laplacian(psi),
            Grid::Cartesian(g) => g.laplacian(psi),
        }
    }

    /// `∫|x|^{-b} v dx` from node values.
    pub fn weighted_integral(&self, values: &[f64], b: f64) -> Result<f64> {
        match self {
            Grid::Radial(g) => g.weighted_integral(values, b),
            Grid::Cartesian(g) => {
                if values.len() != g.len() {
                    return Err(Error::LengthMismatch { expected: g.len(), got: values.len() });
                }
                Ok(g.singular_volumes(b)?.iter().zip(values).map(|(w, v)| w * v).sum())
            }
        }
    }

    /// `(tail, total)` gradient content used by the resolution monitor.
    pub fn gradient_tail(&self, psi: &[Complex64]) -> (f64, f64) {
        match self {
            Grid::Radial(g) => g.gradient_tail_fraction(psi),
            Grid::Cartesian(g) => g.gradient_tail_fraction(psi),
        }
    }

    /// Same node count, physical extent multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Ok(match self {
            Grid::Radial(g) => g.scaled(factor)?.into(),
            Grid::Cartesian(g) => g.scaled(factor)?.into(),
        })
    }
}

/// `l` complex components sampled on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    components: Vec<Vec<Complex64>>,
}

impl Field {
    pub fn new(grid: impl Into<Grid>, components: Vec<Vec<Complex64>>) -> Result<Self> {
        let grid = grid.into();
        if components.is_empty() {
            return Err(Error::InvalidArgument("a field needs at least one component".into()));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), got: c.len() });
            }
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: impl Into<Grid>, l: usize) -> Self {
        let grid = grid.into();
        let len = grid.len();
        Self { grid, components: vec![vec![Complex64::new(0.0, 0.0); len]; l.max(1)] }
    }

    /// Samples `profile(k, |x|)` for each component.
    pub fn from_radial_fn<F>(grid: impl Into<Grid>, l: usize, profile: F) -> Self
    where
        F: Fn(usize, f64) -> Complex64,
    {
        let grid = grid.into();
        let radii = grid.radii();
        let components = (0..l.max(1)).map(|k| radii.iter().map(|&r| profile(k, r)).collect()).collect();
        Self { grid, components }
    }

    pub fn from_real(grid: impl Into<Grid>, components: Vec<Vec<f64>>) -> Result<Self> {
        let comps =
            components.into_iter().map(|c| c.into_iter().map(|x| Complex64::new(x, 0.0)).collect()).collect();
        Self::new(grid, comps)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn l(&self) -> usize {
        self.components.len()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn component(&self, k: usize) -> &[Complex64] {
        &self.components[k]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.components
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.components
    }

    /// Node values `(u_1(x_j), …, u_l(x_j))`.
    pub fn node(&self, j: usize) -> Vec<Complex64> {
        self.components.iter().map(|c| c[j]).collect()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let components = self.components.iter().map(|c| c.iter().map(|z| z * factor).collect()).collect();
        Self { grid: self.grid.clone(), components }
    }

    /// The field `x ↦ u(λx)`: identical samples on a grid shrunk by `1/λ`.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("dilation {lambda} must be positive")));
        }
        Ok(Self { grid: self.grid.scaled(1.0 / lambda)?, components: self.components.clone() })
    }

    /// The same samples on another grid of equal size.
    pub fn with_grid(&self, grid: Grid) -> Result<Self> {
        Self::new(grid, self.components.clone())
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().flatten().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// `max_{k,j} |u_k(x_j) − v_k(x_j)|`.
    pub fn sup_distance(&self, other: &Field) -> Result<f64> {
        if self.l() != other.l() || self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }

    pub fn sup_norm(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Per-component squared `L²` and `Ḣ¹` norms.
#[derive(Clone, Debug, PartialEq)]
pub struct H1Report {
    pub l2_sq: Vec<f64>,
    pub gradient_sq: Vec<f64>,
}

impl H1Report {
    pub fn l2_norms(&self) -> Vec<f64> {
        self.l2_sq.iter().map(|x| x.sqrt()).collect()
    }

    pub fn gradient_norms(&self) -> Vec<f64> {
        self.gradient_sq.iter().map(|x| x.sqrt()).collect()
    }

    pub fn h1_norm(&self) -> f64 {
        self.l2_sq.iter().chain(&self.gradient_sq).sum::<f64>().sqrt()
    }
}

/// `L²` norms use the high-order quadrature on radial grids; gradient norms
/// use the stiffness form shared with the Laplacian.
pub fn h1_report(spec: &SystemSpec, field: &Field) -> Result<H1Report> {
    if field.l() != spec.l() {
        return Err(Error::LengthMismatch { expected: spec.l(), got: field.l() });
    }
    let grid = field.grid();
    let l2_sq = match grid {
        Grid::Radial(g) => {
            let w = g.quadrature_weights(0.0)?;
            field.components().iter().map(|c| c.iter().zip(&w).map(|(z, w)| w * z.norm_sqr()).sum()).collect()
        }
        Grid::Cartesian(g) => field.components().iter().map(|c| g.l2_norm_sq(c)).collect(),
    };
    let gradient_sq = field.components().iter().map(|c| grid.gradient_norm_sq(c)).collect();
    Ok(H1Report { l2_sq, gradient_sq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::presets;
    use std::f64::consts::PI;

    fn scalar3() -> SystemSpec {
        presets::scalar(3, 0.5).unwrap()
    }

    #[test]
    fn h1_report_zero_field() {
        let g = RadialGrid::new(3, 64, 4.0).unwrap();
        let rep = h1_report(&scalar3(), &Field::zeros(g, 1)).unwrap();
        assert_eq!(rep.l2_sq, vec![0.0]);
        assert_eq!(rep.gradient_sq, vec![0.0]);
    }

    #[test]
    fn h1_report_gaussian_mass() {
        let g = RadialGrid::new(3, 4096, 8.0).unwrap();
        let f = Field::from_radial_fn(g, 1, |_, r| Complex64::new((-r * r).exp(), 0.0));
        let rep = h1_report(&scalar3(), &f).unwrap();
        assert!((rep.l2_sq[0] - (PI / 2.0).powf(1.5)).abs() < 1e-6);
    }

    #[test]
    fn h1_report_tent_gradient() {
        // |∇ψ| = 1 on the ball of radius 2
        let g = RadialGrid::new(3, 2001, 4.0).unwrap();
        let f = Field::from_radial_fn(g, 1, |_, r| {
            Complex64::new(if r <= 1.0 { r } else { (2.0 - r).max(0.0) }, 0.0)
        });
        let rep = h1_report(&scalar3(), &f).unwrap();
        let ball = 4.0 * PI / 3.0 * 8.0;
        assert!((rep.gradient_sq[0] - ball).abs() < 1e-5 * ball);
    }

    #[test]
    fn field_rejects_ragged_components() {
        let g = RadialGrid::new(3, 10, 1.0).unwrap();
        let z = Complex64::new(0.0, 0.0);
        assert!(Field::new(g, vec![vec![z; 10], vec![z; 9]]).is_err());
    }

    #[test]
    fn dilation_keeps_samples() {
        let g = RadialGrid::new(3, 10, 1.0).unwrap();
        let f = Field::from_radial_fn(g, 1, |_, r| Complex64::new(r, 0.0));
        let d = f.dilated(2.0).unwrap();
        assert_eq!(d.component(0), f.component(0));
        assert!((d.grid().as_radial().unwrap().r_max() - 0.5).abs() < 1e-15);
    }
}
