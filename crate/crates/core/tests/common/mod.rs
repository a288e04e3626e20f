#![allow(dead_code)]

use inls_core::{Field, RadialGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Radial profile of `ψ'' + (2/r)ψ' − ψ + r^{-1/2}ψ² = 0` found by shooting
/// on `ψ(0)`, integrated in `s = √r` to tame the `r^{-1/2}` weight.
pub struct Shooting {
    pub psi0: f64,
    /// `(r, ψ, ψ_r)` samples on a fine `s` mesh.
    samples: Vec<(f64, f64, f64)>,
    /// Largest radius where the bracketing trajectories still agree.
    pub trusted: f64,
}

enum Fate {
    Crossed,
    TurnedUp,
}

const DS: f64 = 1e-4;
const S0: f64 = 0.01;

fn start(psi0: f64) -> (f64, f64) {
    // ψ ≈ ψ₀ + c r^{3/2} + ψ₀ r²/6 − ψ₀ c r³/6 + e r^{7/2}
    let r = S0 * S0;
    let c = -4.0 * psi0 * psi0 / 15.0;
    let e = (c - psi0 * psi0 / 3.0) / 15.75;
    let d = -psi0 * c / 6.0;
    let y = psi0 + c * r.powf(1.5) + psi0 * r * r / 6.0 + d * r.powi(3) + e * r.powf(3.5);
    let v = 1.5 * c * r.sqrt() + psi0 * r / 3.0 + 3.0 * d * r * r + 3.5 * e * r.powf(2.5);
    (y, v)
}

/// `d(y, v)/ds` with `r = s²`, `v = dψ/dr`.
fn rhs(s: f64, y: f64, v: f64) -> (f64, f64) {
    (2.0 * s * v, -4.0 * v / s + 2.0 * s * y - 2.0 * y * y)
}

fn integrate(psi0: f64, s_max: f64, mut record: Option<&mut Vec<(f64, f64, f64)>>) -> Option<Fate> {
    let (mut y, mut v) = start(psi0);
    let mut s = S0;
    if let Some(rec) = record.as_deref_mut() {
        rec.push((s * s, y, v));
    }
    while s < s_max {
        let (k1y, k1v) = rhs(s, y, v);
        let (k2y, k2v) = rhs(s + 0.5 * DS, y + 0.5 * DS * k1y, v + 0.5 * DS * k1v);
        let (k3y, k3v) = rhs(s + 0.5 * DS, y + 0.5 * DS * k2y, v + 0.5 * DS * k2v);
        let (k4y, k4v) = rhs(s + DS, y + DS * k3y, v + DS * k3v);
        y += DS / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += DS / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s += DS;
        if let Some(rec) = record.as_deref_mut() {
            rec.push((s * s, y, v));
        }
        if y < 0.0 {
            return Some(Fate::Crossed);
        }
        if v > 0.0 && s * s > 0.5 {
            return Some(Fate::TurnedUp);
        }
    }
    None
}

impl Shooting {
    pub fn solve(r_max: f64) -> Self {
        let s_max = r_max.sqrt();
        let (mut lo, mut hi) = (0.5, 20.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            match integrate(mid, s_max, None) {
                Some(Fate::Crossed) => hi = mid,
                _ => lo = mid,
            }
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        integrate(lo, s_max, Some(&mut a));
        integrate(hi, s_max, Some(&mut b));
        let trusted = a
            .iter()
            .zip(&b)
            .take_while(|(x, y)| (x.1 - y.1).abs() < 1e-10 && x.1 > 0.0 && y.1 > 0.0)
            .last()
            .map_or(0.0, |(x, _)| x.0);
        Self { psi0: 0.5 * (lo + hi), samples: a, trusted }
    }

    /// Cubic Hermite interpolation in `r`; `r = 0` returns `ψ(0)`.
    pub fn value(&self, r: f64) -> f64 {
        if r <= self.samples[0].0 {
            return self.psi0 - 4.0 * self.psi0 * self.psi0 / 15.0 * r.powf(1.5);
        }
        let s = r.sqrt();
        let i = (((s - S0) / DS).floor() as usize).min(self.samples.len() - 2);
        let (r0, y0, v0) = self.samples[i];
        let (r1, y1, v1) = self.samples[i + 1];
        let h = r1 - r0;
        let t = (r - r0) / h;
        let h00 = 2.0 * t * t * t - 3.0 * t * t + 1.0;
        let h10 = t * t * t - 2.0 * t * t + t;
        let h01 = -2.0 * t * t * t + 3.0 * t * t;
        let h11 = t * t * t - t * t;
        h00 * y0 + h10 * h * v0 + h01 * y1 + h11 * h * v1
    }
}

/// Sums of positive Gaussian bumps, one set per component.
pub fn random_trial_fields(grid: &RadialGrid, l: usize, count: usize, seed: u64) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let bumps: Vec<Vec<(f64, f64, f64)>> = (0..l)
                .map(|_| {
                    (0..rng.gen_range(1..=3))
                        .map(|_| (rng.gen_range(0.2..2.0), rng.gen_range(0.0..3.0), rng.gen_range(0.5..3.0)))
                        .collect()
                })
                .collect();
            Field::from_radial_fn(grid.clone(), l, |k, r| {
                let v: f64 = bumps[k].iter().map(|(a, c, w)| a * (-((r - c) / w).powi(2)).exp()).sum();
                Complex64::new(v, 0.0)
            })
        })
        .collect()
}

pub fn gaussian(grid: &RadialGrid, amplitudes: &[f64], width: f64, chirp: f64) -> Field {
    Field::from_radial_fn(grid.clone(), amplitudes.len(), |k, r| {
        Complex64::from_polar(amplitudes[k] * (-(r / width).powi(2)).exp(), chirp * r * r)
    })
}
