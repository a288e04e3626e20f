//! Runtime checks of the structural hypotheses on `F` and `f_k`.
//!
//! Every check samples seeded random points and reports the worst residual,
//! scaled so that a correct system sits at rounding level.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Monomial, Polynomial, SystemSpec};
use crate::grid::RadialGrid;

pub const HYPOTHESIS_TOLERANCE: f64 = 1e-12;
pub const CHARGE_IDENTITY_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hypothesis {
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
    H8,
    ChargeIdentity,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 9] = [
        Hypothesis::H1,
        Hypothesis::H2,
        Hypothesis::H3,
        Hypothesis::H4,
        Hypothesis::H5,
        Hypothesis::H6,
        Hypothesis::H7,
        Hypothesis::H8,
        Hypothesis::ChargeIdentity,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Hypothesis::H1 => "H1",
            Hypothesis::H2 => "H2",
            Hypothesis::H3 => "H3",
            Hypothesis::H4 => "H4",
            Hypothesis::H5 => "H5",
            Hypothesis::H6 => "H6",
            Hypothesis::H7 => "H7",
            Hypothesis::H8 => "H8",
            Hypothesis::ChargeIdentity => "charge_identity",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypothesisStatus {
    Pass,
    Fail,
    NotChecked,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub status: HypothesisStatus,
    pub worst_residual: f64,
    /// A sample at which the check failed.
    pub witness: Option<Vec<Complex64>>,
    /// Largest sampled Lipschitz ratio (H2 only).
    pub observed_constant: Option<f64>,
}

impl HypothesisCheck {
    pub fn passed(&self) -> bool {
        self.status == HypothesisStatus::Pass
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn get(&self, h: Hypothesis) -> &HypothesisCheck {
        self.checks.iter().find(|c| c.hypothesis == h).expect("every hypothesis is reported")
    }

    /// True when no checked hypothesis failed.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != HypothesisStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.checks.iter().filter(|c| c.status == HypothesisStatus::Fail)
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples = {}", self.samples)?;
        writeln!(f, "seed = {}", self.seed)?;
        for c in &self.checks {
            let status = match c.status {
                HypothesisStatus::Pass => "pass",
                HypothesisStatus::Fail => "FAIL",
                HypothesisStatus::NotChecked => "not checked",
            };
            write!(f, "{} = {status}  worst_residual = {:.3e}", c.hypothesis, c.worst_residual)?;
            if let Some(cst) = c.observed_constant {
                write!(f, "  observed_constant = {cst:.6e}")?;
            }
            if let Some(w) = &c.witness {
                let parts: Vec<String> = w.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
                write!(f, "  witness = ({})", parts.join(", "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `|Re F(e^{iσ₁θ}z₁, …, e^{iσ_lθ}z_l) − Re F(z)|`.
pub fn gauge_residual(spec: &SystemSpec, z: &[Complex64], theta: f64) -> f64 {
    let rotated: Vec<Complex64> =
        z.iter().zip(spec.sigma()).map(|(zk, s)| zk * Complex64::from_polar(1.0, s * theta)).collect();
    (spec.eval_potential(&rotated).re - spec.eval_potential(z).re).abs()
}

/// `|Im Σ_k σ_k f_k(z) z̄_k|`.
pub fn charge_identity_residual(spec: &SystemSpec, z: &[Complex64]) -> f64 {
    let s: Complex64 = (0..spec.l()).map(|k| spec.sigma()[k] * spec.eval_f(k, z) * z[k].conj()).sum();
    s.im.abs()
}

/// Runs every check with `sample_count` seeded samples.
pub fn check_hypotheses(spec: &SystemSpec, sample_count: usize, seed: u64) -> HypothesisReport {
    let samples = sample_count.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![
        check_h1(spec),
        check_h2(spec, samples, &mut rng),
        check_h3(spec, samples, &mut rng),
        check_h4(spec, samples, &mut rng),
        check_h5(spec, samples, &mut rng),
        check_h6(spec, samples, &mut rng),
        check_h7(spec, samples, &mut rng),
        check_h8(spec, samples, &mut rng),
        check_charge_identity(spec, samples, &mut rng),
    ];
    HypothesisReport { samples, seed, checks }
}

struct Tracker {
    hypothesis: Hypothesis,
    tolerance: f64,
    worst: f64,
    witness: Option<Vec<Complex64>>,
}

impl Tracker {
    fn new(hypothesis: Hypothesis, tolerance: f64) -> Self {
        Self { hypothesis, tolerance, worst: 0.0, witness: None }
    }

    fn record(&mut self, residual: f64, sample: impl FnOnce() -> Vec<Complex64>) {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if residual > self.worst {
            self.worst = residual;
            if residual > self.tolerance {
                self.witness = Some(sample());
            }
        }
    }

    fn finish(self) -> HypothesisCheck {
        let status =
            if self.worst <= self.tolerance { HypothesisStatus::Pass } else { HypothesisStatus::Fail };
        HypothesisCheck {
            hypothesis: self.hypothesis,
            status,
            worst_residual: self.worst,
            witness: self.witness,
            observed_constant: None,
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, l: usize) -> Vec<Complex64> {
    (0..l).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn relative(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

fn check_h1(spec: &SystemSpec) -> HypothesisCheck {
    let zero = vec![Complex64::new(0.0, 0.0); spec.l()];
    let mut t = Tracker::new(Hypothesis::H1, HYPOTHESIS_TOLERANCE);
    for k in 0..spec.l() {
        t.record(spec.eval_f(k, &zero).norm(), || zero.clone());
    }
    t.finish()
}

/// The derivatives of a quadratic `f_k` are linear, so the sampled ratio is
/// bounded by the coefficient norm of `∂f_k`; the largest observed ratio is
/// recorded and compared with that bound.
fn check_h2(spec: &SystemSpec, samples: usize, rng: &mut ChaCha8Rng) -> HypothesisCheck {
    let l = spec.l();
    let mut derivatives: Vec<Polynomial> = Vec::new();
    for f in spec.nonlinearities() {
        for m in 0..l {
            derivatives.push(f.d_z(m));
            derivatives.push(f.d_zbar(m));
        }
    }
    let bound = derivatives.iter().map(Polynomial::coefficient_norm).fold(0.0, f64::max);
    let mut observed = 0.0f64;
    let mut witness = None;
    for _ in 0..samples {
        let z = random_point(rng, l);
        let w = random_point(rng, l);
        let dist: f64 = z.iter().zip(&w).map(|(a, b)| (a - b).norm()).sum();
        if dist == 0.0 {
            continue;
        }
        for d in &derivatives {
            let ratio = (d.eval_unchecked(&z) - d.eval_unchecked(&w)).norm() / dist;
            if ratio > observed {
                observed = ratio;
                if ratio > bound * (1.0 + HYPOTHESIS_TOLERANCE) {
                    witness = Some(z.clone());
                }
            }
        }
    }
    let residual = relative((observed - bound).max(0.0), bound);
    HypothesisCheck {
        hypothesis: Hypothesis::H2,
        status: if residual <= HYPOTHESIS_TOLERANCE {
            HypothesisStatus::Pass
        } else {
            HypothesisStatus::Fail
        },
        worst_residual: residual,
        witness,
        observed_constant: Some(observed),
    }
}

#[derive(Clone, Copy)]
struct Dual {
    v: Complex64,
    d: Complex64,
}

impl Dual {
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}

/// Forward-mode derivative of `F` treating `z` and `z̄` as independent
/// variables: `(∂F/∂z_k, ∂F/∂z̄_k)`.
fn wirtinger_pair(terms: &[Monomial], z: &[Complex64], k: usize) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let eval = |seed_z: bool| {
        let mut total = zero;
        for t in terms {
            let mut acc = Dual { v: t.coeff, d: zero };
            for (j, zj) in z.iter().enumerate() {
                let zf = Dual { v: *zj, d: if seed_z && j == k { one } else { zero } };
                let cf = Dual { v: zj.conj(), d: if !seed_z && j == k { one } else { zero } };
                for _ in 0..t.zpow[j] {
                    acc = acc.mul(zf);
                }
                for _ in 0..t.cpow[j] {
                    acc = acc.mul(cf);
                }
            }
            total += acc.d;
        }
        total
    };
    (eval(true), eval(false))
}

fn check_h3(spec: &SystemSpec, samples: usize, rng: &mut ChaCha8Rng) -> HypothesisCheck {
    let mut t = Tracker::new(Hypothesis::H3, HYPOTHESIS_TOLERANCE);
    let terms = spec.potential().terms();
    for _ in 0..samples {
        let z = random_point(rng, spec.l());
        for (k, f) in spec.nonlinearities().iter().enumerate() {
            let (dz, dzbar) = wirtinger_pair(terms, &z, k);
            let reference = dzbar + dz.conj();
            let scale = f.majorant(&z).max(reference.norm());
            let r = relative((spec.eval_f(k, &z) - reference).norm(), scale);
            t.record(r, || z.clone());
        }
    }
    t.finish()
}

fn check_h4(spec: &SystemSpec, samples: usize, rng: &mut ChaCha8Rng) -> HypothesisCheck {
    let mut t = Tracker::new(Hypothesis::H4, HYPOTHESIS_TOLERANCE);
    let poly = spec.potential().as_polynomial();
    for _ in 0..samples {
        let z = random_point(rng, spec.l());
        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let r = relative(gauge_residual(spec, &z, theta), poly.majorant(&z));
        t.record(r, || z.clone());
    }
    t.finish()
}

fn check_h5(spec: &SystemSpec, samples: usize, rng: &mut ChaCha8Rng) -> HypothesisCheck {
    let mut t = Tracker::new(Hypothesis::H5, HYPOTHESIS_TOLERANCE);
    let poly = spec.potential().as_polynomial();
    for _ in 0..samples {
        let z = random_point(rng, spec.l());
        let lambda: f64 = 10.0 * (1.0 - rng.gen::<f64>()); // (0, 10]
        let scaled: Vec<Complex64> = z.iter().map(|x| x * lambda).collect();
        let l3 = lambda.powi(3);
        let lhs = spec.eval_potential(&scaled);
        let r = relative((lhs - spec.eval_potential(&z) * l3).norm(), l3 * poly.majorant(&z));
        t.record(r, || z.clone());
    }
    t.finish()
}

/// Random smooth radial fields: sums of Gaussian bumps with complex
/// amplitudes, truncated to a grid of radius 8.
fn check_h6(spec: &SystemSpec, samples: usize, rng: &mut ChaCha8Rng) -> HypothesisCheck {
    let mut t = Tracker::new(Hypothesis::H6, HYPOTHESIS_TOLERANCE);
    let grid = RadialGrid::new(spec.n(), 257, 8.0).expect("fixed valid grid");
    let weights = grid.quadrature_weights(spec.b()).expect("b < n for valid systems");
    let l = spec.l();
    let fields = samples.clamp(1, 200);
    for _ in 0..fields {
        let bumps: Vec<Vec<(Complex64, f64, f64)>> = (0..l)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        (
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                            rng.gen_range(0.0..3.0),
                            rng.gen_range(0.5..2.0),
                        )
                    })
                    .collect()
            })
            .collect();
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        let mut z = vec![Complex64::new(0.0, 0.0); l];
        let mut modulus = vec![0.0; l];
        for (j, &r) in grid.nodes().iter().enumerate() {
            for k in 0..l {
                z[k] = bumps[k].iter().map(|(a, c, w)| a * (-((r - c) / w).powi(2)).exp()).sum();
                modulus[k] = z[k].norm();
            }
            lhs += weights[j] * spec.eval_potential(&z).re;
            rhs += weights[j] * spec.eval_potential_real(&modulus);
        }
        let r = relative((lhs.abs() - rhs).max(0.0), rhs.abs());
        let sample = bumps.iter().map(|b| b[0].0).collect::<Vec<_>>();
        t.record(r, || sample);
    }
    t.finish()
}

fn check_h7(spec: &SystemSpec, samples: usize, rng: &mut ChaCha8Rng) -> HypothesisCheck {
    let mut t = Tracker::new(Hypothesis::H7, HYPOTHESIS_TOLERANCE);
    let poly = spec.potential().as_polynomial();
    for _ in 0..samples {
        let z: Vec<Complex64> = (0..spec.l()).map(|_| Complex64::new(rng.gen_range(0.0..1.0), 0.0)).collect();
        let mut r = relative(spec.eval_potential(&z).im.abs(), poly.majorant(&z));
        for (k, f) in spec.nonlinearities().iter().enumerate() {
            let v = spec.eval_f(k, &z);
            let scale = f.majorant(&z);
            r = r.max(relative(v.im.abs(), scale)).max(relative((-v.re).max(0.0), scale));
        }
        t.record(r, || z.clone());
    }
    t.finish()
}

/// Supermodularity of each piece on the positive cone of its variables,
/// vanishing on coordinate hyperplanes, and `Σ F_s = F`.
fn check_h8(spec: &SystemSpec, samples: usize, rng: &mut ChaCha8Rng) -> HypothesisCheck {
    let Some(pieces) = spec.decomposition() else {
        return HypothesisCheck {
            hypothesis: Hypothesis::H8,
            status: HypothesisStatus::NotChecked,
            worst_residual: 0.0,
            witness: None,
            observed_constant: None,
        };
    };
    let l = spec.l();
    let mut t = Tracker::new(Hypothesis::H8, HYPOTHESIS_TOLERANCE);
    let sum = pieces.iter().fold(Polynomial::zero(l), |acc, p| acc.add(p.potential.as_polynomial()));
    let mismatch = sum.add(&spec.potential().as_polynomial().scale(-1.0));
    t.record(mismatch.coefficient_norm(), Vec::new);

    let real = |y: &[f64]| y.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
    for _ in 0..samples {
        let y: Vec<f64> = (0..l).map(|_| rng.gen_range(0.0..1.0)).collect();
        for piece in pieces {
            let f = piece.potential.as_polynomial();
            let ev = |v: &[f64]| f.eval_unchecked(&real(v)).re;
            let vars = &piece.variables;
            for (a, &i) in vars.iter().enumerate() {
                for &j in &vars[a + 1..] {
                    let h = rng.gen_range(0.0..1.0);
                    let k = rng.gen_range(0.0..1.0);
                    let mut yi = y.clone();
                    yi[i] += h;
                    let mut yj = y.clone();
                    yj[j] += k;
                    let mut yij = yi.clone();
                    yij[j] += k;
                    let (a1, a2, b1, b2) = (ev(&yij), ev(&y), ev(&yi), ev(&yj));
                    let scale = a1.abs() + a2.abs() + b1.abs() + b2.abs();
                    let r = relative((b1 + b2 - a1 - a2).max(0.0), scale);
                    t.record(r, || real(&y));
                }
                let mut y0 = y.clone();
                y0[i] = 0.0;
                let r = relative(ev(&y0).abs(), f.majorant(&real(&y)));
                t.record(r, || real(&y0));
            }
        }
    }
    t.finish()
}

fn check_charge_identity(spec: &SystemSpec, samples: usize, rng: &mut ChaCha8Rng) -> HypothesisCheck {
    let mut t = Tracker::new(Hypothesis::ChargeIdentity, CHARGE_IDENTITY_TOLERANCE);
    for _ in 0..samples {
        let z = random_point(rng, spec.l());
        t.record(charge_identity_residual(spec, &z), || z.clone());
    }
    t.finish()
}
