use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::radial::GAUSS_LEGENDRE_8;
use crate::error::{Error, Result};

/// Periodic box `[-L, L)ⁿ` with `M` points per axis, `M` a power of two.
/// Storage is row-major with the last axis fastest.
pub struct CartesianGrid {
    n: usize,
    points: usize,
    half_width: f64,
    h: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CartesianGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CartesianGrid")
            .field("n", &self.n)
            .field("points", &self.points)
            .field("half_width", &self.half_width)
            .finish()
    }
}

impl Clone for CartesianGrid {
    fn clone(&self) -> Self {
        Self::new(self.n, self.points, self.half_width).expect("validated at construction")
    }
}

impl PartialEq for CartesianGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.points == other.points && self.half_width == other.half_width
    }
}

impl CartesianGrid {
    pub fn new(n: usize, points: usize, half_width: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!("Cartesian dimension {n} outside 1..=3")));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two ≥ 4, got {points}"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        let h = 2.0 * half_width / points as f64;
        let dk = PI / half_width;
        let wavenumbers = (0..points)
            .map(|j| {
                let m = if j < points / 2 { j as i64 } else { j as i64 - points as i64 };
                m as f64 * dk
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            points,
            half_width,
            h,
            wavenumbers,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        })
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.points, self.half_width * factor)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.n as i32)
    }

    /// Multi-index of a flat offset.
    pub fn index(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for axis in (0..self.n).rev() {
            idx[axis] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    /// Coordinates of node `flat`; entries beyond `n` are zero.
    pub fn coordinates(&self, flat: usize) -> [f64; 3] {
        let idx = self.index(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.n {
            x[axis] = -self.half_width + idx[axis] as f64 * self.h;
        }
        x
    }

    pub fn radius(&self, flat: usize) -> f64 {
        let x = self.coordinates(flat);
        x.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `|ξ|²` at spectral index `flat`.
    pub fn wavenumber_sq(&self, flat: usize) -> f64 {
        let idx = self.index(flat);
        (0..self.n).map(|a| self.wavenumbers[idx[a]].powi(2)).sum()
    }

    /// Cell integrals of `|x|^{-b}`: `hⁿ|x_j|^{-b}` away from the origin and
    /// the exact cube integral at the origin node.
    pub fn singular_volumes(&self, b: f64) -> Result<Vec<f64>> {
        if b >= self.n as f64 {
            return Err(Error::InvalidArgument(format!(
                "|x|^-b with b = {b} is not integrable near 0 in dimension {}",
                self.n
            )));
        }
        let cell = self.cell_volume();
        Ok((0..self.len())
            .map(|j| {
                let r = self.radius(j);
                if r == 0.0 {
                    cell * self.h.powf(-b) * centered_cube_average(self.n, b)
                } else {
                    cell * r.powf(-b)
                }
            })
            .collect())
    }

    pub fn l2_norm_sq(&self, psi: &[Complex64]) -> f64 {
        self.cell_volume() * psi.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Spectral `‖∇ψ‖²` via Parseval.
    pub fn gradient_norm_sq(&self, psi: &[Complex64]) -> f64 {
        let hat = self.fft(psi);
        let total: f64 = hat.iter().enumerate().map(|(j, z)| self.wavenumber_sq(j) * z.norm_sqr()).sum();
        total * self.cell_volume() / self.len() as f64
    }

    /// Spectral Laplacian.
    pub fn laplacian(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: psi.len() });
        }
        Ok(self.apply_multiplier(psi, |k2| Complex64::new(-k2, 0.0)))
    }

    /// `F⁻¹[m(|ξ|²) F ψ]`.
    pub fn apply_multiplier<M>(&self, psi: &[Complex64], multiplier: M) -> Vec<Complex64>
    where
        M: Fn(f64) -> Complex64,
    {
        let mut hat = self.fft(psi);
        for (j, z) in hat.iter_mut().enumerate() {
            *z *= multiplier(self.wavenumber_sq(j));
        }
        self.transform(&mut hat, false);
        let scale = 1.0 / self.len() as f64;
        hat.iter_mut().for_each(|z| *z *= scale);
        hat
    }

    /// Share of `Σ|ξ|²|ψ̂|²` carried by modes with some `|ξ_a|` above half
    /// the Nyquist wavenumber.
    pub fn gradient_tail_fraction(&self, psi: &[Complex64]) -> (f64, f64) {
        let hat = self.fft(psi);
        let cutoff = 0.5 * PI / self.h;
        let mut tail = 0.0;
        let mut total = 0.0;
        for (j, z) in hat.iter().enumerate() {
            let idx = self.index(j);
            let e = self.wavenumber_sq(j) * z.norm_sqr();
            total += e;
            if (0..self.n).any(|a| self.wavenumbers[idx[a]].abs() > cutoff) {
                tail += e;
            }
        }
        (tail, total)
    }

    fn fft(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut data = psi.to_vec();
        self.transform(&mut data, true);
        data
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        let plan = if forward { &self.forward } else { &self.inverse };
        let m = self.points;
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for axis in 0..self.n {
            let stride = m.pow((self.n - 1 - axis) as u32);
            let block = stride * m;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    plan.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Average of `|x|^{-b}` over the unit cube `[-1/2, 1/2]ⁿ`.
///
/// The cube of side 1/2 inside it contributes `2^{b-n}` times the whole, so
/// the average is the shell integral divided by `1 − 2^{b−n}`; the shell is
/// tiled by cubes of side 1/4 that avoid the origin.
pub(crate) fn centered_cube_average(n: usize, b: f64) -> f64 {
    let quarter = 0.25;
    let tiles = 4usize.pow(n as u32);
    let mut shell = 0.0;
    for t in 0..tiles {
        let mut idx = [0usize; 3];
        let mut rest = t;
        for slot in idx.iter_mut().take(n) {
            *slot = rest % 4;
            rest /= 4;
        }
        if idx[..n].iter().all(|&i| i == 1 || i == 2) {
            continue;
        }
        let lower: Vec<f64> = idx[..n].iter().map(|&i| -0.5 + i as f64 * quarter).collect();
        shell += gauss_cube(&lower, quarter, b);
    }
    shell / (1.0 - 2f64.powf(b - n as f64))
}

fn gauss_cube(lower: &[f64], side: f64, b: f64) -> f64 {
    let n = lower.len();
    let count = 8usize.pow(n as u32);
    let mut sum = 0.0;
    for q in 0..count {
        let mut rest = q;
        let mut weight = 1.0;
        let mut r2 = 0.0;
        for lo in lower {
            let (x, w) = GAUSS_LEGENDRE_8[rest % 8];
            rest /= 8;
            let c = lo + 0.5 * side * (x + 1.0);
            r2 += c * c;
            weight *= 0.5 * side * w;
        }
        sum += weight * r2.powf(-0.5 * b);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(CartesianGrid::new(2, 48, 5.0).is_err());
        assert!(CartesianGrid::new(4, 16, 5.0).is_err());
        assert!(CartesianGrid::new(2, 16, -1.0).is_err());
    }

    #[test]
    fn cube_average_limits() {
        assert!((centered_cube_average(2, 0.0) - 1.0).abs() < 1e-12);
        // one dimension: 2∫_0^{1/2} x^{-b} dx = 2^b/(1-b)
        let b = 0.4;
        let exact = 2f64.powf(b) / (1.0 - b);
        assert!((centered_cube_average(1, b) - exact).abs() < 1e-9);
    }

    #[test]
    fn spectral_laplacian_of_gaussian() {
        let g = CartesianGrid::new(2, 64, 8.0).unwrap();
        let psi: Vec<_> = (0..g.len()).map(|j| Complex64::new((-g.radius(j).powi(2)).exp(), 0.0)).collect();
        let lap = g.laplacian(&psi).unwrap();
        for (j, v) in lap.iter().enumerate() {
            let r2 = g.radius(j).powi(2);
            let exact = (4.0 * r2 - 4.0) * (-r2).exp();
            assert!((v.re - exact).abs() < 1e-9);
        }
        let grad = g.gradient_norm_sq(&psi);
        // ∫|∇e^{-r²}|² over ℝ² = π
        assert!((grad - PI).abs() < 1e-9);
    }

    #[test]
    fn index_roundtrip() {
        let g = CartesianGrid::new(3, 8, 1.0).unwrap();
        let idx = g.index(3 * 64 + 5 * 8 + 7);
        assert_eq!(&idx, &[3, 5, 7]);
        assert!(g.radius(4 * 64 + 4 * 8 + 4) == 0.0);
    }
}
