use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_R_MAX: f64 = 40.0;
pub const DEFAULT_POINTS: usize = 4096;

// Below this many cells from the origin the product-quadrature moments are
// taken in closed form; further out the weight is smooth on each cell and
// Gauss–Legendre is used to avoid cancellation in r^k differences.
const EXACT_MOMENT_CELLS: usize = 64;

pub(crate) const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329, 0.313_706_645_877_887),
    (-0.183_434_642_495_65, 0.362_683_783_378_362),
    (0.183_434_642_495_65, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// `|S^{n-1}| = 2π^{n/2} / Γ(n/2)`.
pub fn sphere_surface(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        _ => unreachable!("dimension checked at construction"),
    }
}

/// Uniform radial grid `r_j = j h`, `j = 0..N`, `r_{N-1} = r_max`, for
/// radially symmetric functions on `ℝⁿ`.
///
/// The discrete operators are finite-volume: node `j` owns the dual cell
/// `[r_{j-1/2}, r_{j+1/2}] ∩ [0, r_max]`, fluxes cross the faces `r_{j+1/2}`
/// and a zero ghost value sits one step beyond `r_max`. All stored weights
/// include the surface factor `|S^{n-1}|`, so sums over nodes are integrals
/// over `ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    n: usize,
    r_max: f64,
    h: f64,
    nodes: Vec<f64>,
    volumes: Vec<f64>,
    face_couplings: Vec<f64>,
    boundary_coupling: f64,
}

impl RadialGrid {
    pub fn new(n: usize, points: usize, r_max: f64) -> Result<Self> {
        if !(1..=5).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension {n} outside 1..=5")));
        }
        if points < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {points}")));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!("r_max = {r_max} must be positive")));
        }
        let h = r_max / (points - 1) as f64;
        let nodes: Vec<f64> = (0..points).map(|j| j as f64 * h).collect();
        let omega = sphere_surface(n);
        let nf = n as f64;
        let volumes = (0..points)
            .map(|j| {
                let (lo, hi) = dual_cell(j, points, h, r_max);
                omega * (hi.powi(n as i32) - lo.powi(n as i32)) / nf
            })
            .collect();
        let face_couplings =
            (0..points - 1).map(|j| omega * ((j as f64 + 0.5) * h).powi(n as i32 - 1) / h).collect();
        let boundary_coupling = omega * r_max.powi(n as i32 - 1) / h;
        Ok(Self { n, r_max, h, nodes, volumes, face_couplings, boundary_coupling })
    }

    pub fn with_defaults(n: usize) -> Result<Self> {
        Self::new(n, DEFAULT_POINTS, DEFAULT_R_MAX)
    }

    /// Same node count, radius multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.len(), self.r_max * factor)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Dual-cell volumes (mass matrix diagonal).
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn surface_factor(&self) -> f64 {
        sphere_surface(self.n)
    }

    /// `|S^{n-1}| ∫_{cell j} r^{n-1-b} dr` over each dual cell: the diagonal
    /// weight that carries `|x|^{-b}` in every discrete pairing.
    pub fn singular_volumes(&self, b: f64) -> Result<Vec<f64>> {
        let p = self.n as f64 - b;
        if p <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "|x|^-b with b = {b} is not integrable near 0 in dimension {}",
                self.n
            )));
        }
        let omega = self.surface_factor();
        Ok((0..self.len())
            .map(|j| {
                let (lo, hi) = dual_cell(j, self.len(), self.h, self.r_max);
                omega * (hi.powf(p) - lo.powf(p)) / p
            })
            .collect())
    }

    /// Cell averages of `|x|^{-b}` (singular volumes over plain volumes).
    pub fn weight_averages(&self, b: f64) -> Result<Vec<f64>> {
        Ok(self.singular_volumes(b)?.iter().zip(&self.volumes).map(|(s, v)| s / v).collect())
    }

    /// Product-integration weights for `∫ |x|^{-b} v dx` with `v` interpolated
    /// by piecewise quadratics; `r^{n-1-b}` is integrated exactly per cell.
    pub fn quadrature_weights(&self, b: f64) -> Result<Vec<f64>> {
        let p = self.n as f64 - 1.0 - b;
        if p <= -1.0 {
            return Err(Error::InvalidArgument(format!(
                "|x|^-b with b = {b} is not integrable near 0 in dimension {}",
                self.n
            )));
        }
        let len = self.len();
        let h = self.h;
        let mut w = vec![0.0; len];
        for cell in 0..len - 1 {
            let base = if cell + 2 < len { cell } else { cell - 1 };
            // integer offsets of the cell ends relative to `base`
            let s0 = (cell - base) as f64;
            let local = if cell < EXACT_MOMENT_CELLS {
                exact_cell_moments(base as f64, s0, p)
            } else {
                gauss_cell_moments(base as f64, s0, p)
            };
            for (a, m) in local.iter().enumerate() {
                w[base + a] += m;
            }
        }
        let scale = self.surface_factor() * h.powf(p + 1.0);
        for x in &mut w {
            *x *= scale;
        }
        Ok(w)
    }

    /// `∫_{|x| ≤ r_max} |x|^{-b} v(|x|) dx` from node values of `v`.
    pub fn weighted_integral(&self, values: &[f64], b: f64) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: values.len() });
        }
        if b >= self.n as f64 {
            return Err(Error::InvalidArgument(format!(
                "weighted integral needs b < n, got b = {b}, n = {}",
                self.n
            )));
        }
        let w = self.quadrature_weights(b)?;
        Ok(w.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    /// `Σ_j V_j |ψ_j|²`, the discrete `‖ψ‖²_{L²}`.
    pub fn l2_norm_sq(&self, psi: &[Complex64]) -> f64 {
        psi.iter().zip(&self.volumes).map(|(z, v)| v * z.norm_sqr()).sum()
    }

    /// `ψ* S ψ`, the discrete `‖∇ψ‖²_{L²}`; summation-by-parts partner of
    /// [`laplacian`](Self::laplacian).
    pub fn gradient_norm_sq(&self, psi: &[Complex64]) -> f64 {
        let interior: f64 =
            self.face_couplings.iter().enumerate().map(|(j, c)| c * (psi[j + 1] - psi[j]).norm_sqr()).sum();
        interior + self.boundary_coupling * psi[psi.len() - 1].norm_sqr()
    }

    /// `S ψ` where `S` is the symmetric stiffness matrix, `-Δ_h = V^{-1} S`.
    pub fn apply_stiffness(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let len = self.len();
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for (j, c) in self.face_couplings.iter().enumerate() {
            let flux = (psi[j + 1] - psi[j]) * *c;
            out[j] -= flux;
            out[j + 1] += flux;
        }
        out[len - 1] += psi[len - 1] * self.boundary_coupling;
        out
    }

    /// Second-order conservative discretisation of `ψ'' + (n-1)/r ψ'`.
    ///
    /// At `r = 0` this reduces to `2n (ψ₁ − ψ₀)/h² = n ψ''(0)` (even
    /// extension, `ψ'(0) = 0`); beyond `r_max` the ghost value is zero.
    pub fn laplacian(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: psi.len() });
        }
        let mut out = self.apply_stiffness(psi);
        for (o, v) in out.iter_mut().zip(&self.volumes) {
            *o = -*o / *v;
        }
        Ok(out)
    }

    /// Bands of the stiffness matrix: `(diagonal, off-diagonal)`.
    pub(crate) fn stiffness_bands(&self) -> (Vec<f64>, Vec<f64>) {
        let len = self.len();
        let mut diag = vec![0.0; len];
        for (j, c) in self.face_couplings.iter().enumerate() {
            diag[j] += c;
            diag[j + 1] += c;
        }
        diag[len - 1] += self.boundary_coupling;
        let off = self.face_couplings.iter().map(|c| -c).collect();
        (diag, off)
    }

    pub(crate) fn face_couplings(&self) -> &[f64] {
        &self.face_couplings
    }

    /// Grid-scale content of the gradient: `Σ c |d_{j+1} − d_j|² / (4 Σ c |d_j|²)`
    /// over consecutive differences `d_j = ψ_{j+1} − ψ_j`. Near 0 for resolved
    /// profiles, 1 for a node-to-node oscillation.
    pub(crate) fn gradient_tail_fraction(&self, psi: &[Complex64]) -> (f64, f64) {
        let mut tail = 0.0;
        let mut total = 0.0;
        let len = psi.len();
        for j in 0..len - 1 {
            let c = self.face_couplings[j];
            let d = psi[j + 1] - psi[j];
            total += c * d.norm_sqr();
            if j + 2 < len {
                let d_next = psi[j + 2] - psi[j + 1];
                tail += 0.25 * c * (d_next - d).norm_sqr();
            }
        }
        (tail, total)
    }
}

fn dual_cell(j: usize, points: usize, h: f64, r_max: f64) -> (f64, f64) {
    let lo = if j == 0 { 0.0 } else { (j as f64 - 0.5) * h };
    let hi = if j + 1 == points { r_max } else { (j as f64 + 0.5) * h };
    (lo, hi)
}

/// Lagrange basis on the integer nodes `base, base+1, base+2` (in units of
/// `h`), integrated against `s^p` over `[base + s0, base + s0 + 1]`.
fn exact_cell_moments(base: f64, s0: f64, p: f64) -> [f64; 3] {
    let x = [base, base + 1.0, base + 2.0];
    let lo = base + s0;
    let hi = lo + 1.0;
    let moment = |q: i32| {
        let k = p + f64::from(q) + 1.0;
        (hi.powf(k) - lo.powf(k)) / k
    };
    let m = [moment(0), moment(1), moment(2)];
    let mut out = [0.0; 3];
    for a in 0..3 {
        let (b1, b2) = match a {
            0 => (x[1], x[2]),
            1 => (x[0], x[2]),
            _ => (x[0], x[1]),
        };
        let denom = (x[a] - b1) * (x[a] - b2);
        // (s - b1)(s - b2) = s² - (b1 + b2) s + b1 b2
        out[a] = (m[2] - (b1 + b2) * m[1] + b1 * b2 * m[0]) / denom;
    }
    out
}

fn gauss_cell_moments(base: f64, s0: f64, p: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    let mid = base + s0 + 0.5;
    for &(xi, wi) in &GAUSS_LEGENDRE_8 {
        let t = s0 + 0.5 + 0.5 * xi; // offset from base
        let weight = 0.5 * wi * (mid + 0.5 * xi).powf(p);
        let l = [0.5 * (t - 1.0) * (t - 2.0), -t * (t - 2.0), 0.5 * t * (t - 1.0)];
        for a in 0..3 {
            out[a] += weight * l[a];
        }
    }
    out
}
