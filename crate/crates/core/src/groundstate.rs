//! Ground states of `−γ_k Δψ_k + b_k ψ_k = |x|^{-b} f_k(ψ)` on a radial
//! grid by Petviashvili iteration, and their certification.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functionals::{
    pohozaev_from_parts, thresholds_from_profile, Evaluator, FunctionalReport, PohozaevResiduals,
};
use crate::grid::{Field, Grid, RadialGrid};
use crate::interaction::SystemSpec;
use crate::linalg::Tridiagonal;

/// Per-component Gaussian `a_k e^{−r²/w_k²}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialProfile {
    pub amplitudes: Vec<f64>,
    pub widths: Vec<f64>,
}

impl InitialProfile {
    fn amplitude(&self, k: usize) -> f64 {
        self.amplitudes.get(k).or(self.amplitudes.last()).copied().unwrap_or(1.0)
    }

    fn width(&self, k: usize) -> f64 {
        self.widths.get(k).or(self.widths.last()).copied().unwrap_or(1.0)
    }
}

impl Default for InitialProfile {
    fn default() -> Self {
        Self { amplitudes: vec![1.0], widths: vec![1.0] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub stabilizer_tolerance: f64,
    pub initial: InitialProfile,
    /// Relaxation factor in `(0, 1]`; 1 is the plain iteration. Coupled
    /// systems such as `F = z̄₁²z₂` carry a neutral period-two mode under the
    /// plain iteration (relative amplitudes map by `(a₁, a₂) ↦ (a₁a₂, a₁²)`,
    /// eigenvalue −1), which relaxation by ½ removes.
    pub damping: f64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            tolerance: 1e-8,
            stabilizer_tolerance: 1e-10,
            initial: InitialProfile::default(),
            damping: 0.5,
        }
    }
}

impl GroundStateOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.stabilizer_tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidArgument(format!("damping {} outside (0, 1]", self.damping)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GroundStateResult {
    pub psi: Field,
    pub omega: f64,
    /// `b_k = α_k σ_k ω + β_k`
    pub masses: Vec<f64>,
    pub iterations: usize,
    /// Final fixed-point residual per component.
    pub residuals: Vec<f64>,
    pub stabilizer: f64,
    /// Max component residual per iteration.
    pub history: Vec<f64>,
    pub tolerance: f64,
    pub report: FunctionalReport,
    pub pohozaev: PohozaevResiduals,
}

impl GroundStateResult {
    pub fn grid(&self) -> &RadialGrid {
        self.psi.grid().as_radial().expect("ground states live on radial grids")
    }

    /// Component `k` as real samples.
    pub fn profile(&self, k: usize) -> Vec<f64> {
        self.psi.component(k).iter().map(|z| z.re).collect()
    }

    /// Sidecar text record.
    pub fn record(&self) -> String {
        let mut s = format!("omega = {}\n", self.omega);
        for (k, m) in self.masses.iter().enumerate() {
            s += &format!("b_{} = {m}\n", k + 1);
        }
        s += &format!("iterations = {}\n", self.iterations);
        s += &format!("stabilizer = {:.16e}\n", self.stabilizer);
        for (k, r) in self.residuals.iter().enumerate() {
            s += &format!("residual_{} = {r:.6e}\n", k + 1);
        }
        s += &format!("pohozaev_P = {:.6e}\n", self.pohozaev.p);
        s += &format!("pohozaev_K = {:.6e}\n", self.pohozaev.k);
        s += &format!("pohozaev_Q = {:.6e}\n", self.pohozaev.q);
        s += &self.report.to_string();
        s
    }
}

/// `γ S + b M` for one component.
struct Operator {
    diag: Vec<f64>,
    off: Vec<f64>,
    solver: Tridiagonal<f64>,
}

impl Operator {
    fn new(grid: &RadialGrid, gamma: f64, mass: f64) -> Self {
        let (sd, so) = grid.stiffness_bands();
        let diag: Vec<f64> = sd.iter().zip(grid.volumes()).map(|(s, v)| gamma * s + mass * v).collect();
        let off: Vec<f64> = so.iter().map(|s| gamma * s).collect();
        let solver = Tridiagonal::factor(&off, &diag, &off);
        Self { diag, off, solver }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|j| {
                let mut y = self.diag[j] * x[j];
                if j > 0 {
                    y += self.off[j - 1] * x[j - 1];
                }
                if j + 1 < n {
                    y += self.off[j] * x[j + 1];
                }
                y
            })
            .collect()
    }
}

/// Weak-form right-hand sides `Vb ⊙ f_k(ψ)`.
fn forcing(spec: &SystemSpec, singular: &[f64], psi: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let l = psi.len();
    let len = singular.len();
    let mut out = vec![vec![0.0; len]; l];
    let mut y = vec![0.0; l];
    for j in 0..len {
        for (yk, pk) in y.iter_mut().zip(psi) {
            *yk = pk[j];
        }
        for (k, ok) in out.iter_mut().enumerate() {
            ok[j] = singular[j] * spec.eval_f_real(k, &y);
        }
    }
    out
}

fn residual_norm(op: &Operator, volumes: &[f64], psi: &[f64], g: &[f64]) -> f64 {
    op.apply(psi).iter().zip(g).zip(volumes).map(|((a, b), v)| (a - b).powi(2) / v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Petviashvili iteration `ψ ← S² (γS + bM)^{-1} Vb f(ψ)` with the global
/// stabiliser `S = Σ⟨(γS+bM)ψ, ψ⟩ / Σ⟨Vb f(ψ), ψ⟩`.
pub fn solve(
    spec: &SystemSpec,
    omega: f64,
    grid: &RadialGrid,
    opts: &GroundStateOptions,
) -> Result<GroundStateResult> {
    opts.validate()?;
    let masses = spec.positive_masses(omega)?;
    if grid.n() != spec.n() {
        return Err(Error::InvalidArgument(format!(
            "grid dimension {} does not match system dimension {}",
            grid.n(),
            spec.n()
        )));
    }
    let l = spec.l();
    let psi0: Vec<Vec<f64>> = (0..l)
        .map(|k| {
            let (a, w) = (opts.initial.amplitude(k), opts.initial.width(k));
            grid.nodes().iter().map(|r| a * (-(r / w).powi(2)).exp()).collect()
        })
        .collect();
    solve_from(spec, omega, grid, opts, psi0, masses)
}

/// Same iteration from a caller-supplied real initial guess.
pub fn solve_with_guess(
    spec: &SystemSpec,
    omega: f64,
    grid: &RadialGrid,
    opts: &GroundStateOptions,
    guess: Vec<Vec<f64>>,
) -> Result<GroundStateResult> {
    opts.validate()?;
    let masses = spec.positive_masses(omega)?;
    if guess.len() != spec.l() {
        return Err(Error::LengthMismatch { expected: spec.l(), got: guess.len() });
    }
    for g in &guess {
        if g.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: g.len() });
        }
    }
    solve_from(spec, omega, grid, opts, guess, masses)
}

fn solve_from(
    spec: &SystemSpec,
    omega: f64,
    grid: &RadialGrid,
    opts: &GroundStateOptions,
    mut psi: Vec<Vec<f64>>,
    masses: Vec<f64>,
) -> Result<GroundStateResult> {
    let singular = grid.singular_volumes(spec.b())?;
    let volumes = grid.volumes();
    let ops: Vec<Operator> = (0..spec.l()).map(|k| Operator::new(grid, spec.gamma()[k], masses[k])).collect();
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let norm: f64 = psi.iter().map(|c| dot(c, c)).sum::<f64>().sqrt();
        if !(norm >= 1e-12) {
            return Err(Error::TrivialAttractor);
        }
        let g = forcing(spec, &singular, &psi);
        let linear: f64 = ops.iter().zip(&psi).map(|(op, p)| dot(&op.apply(p), p)).sum();
        let nonlinear: f64 = g.iter().zip(&psi).map(|(gk, p)| dot(gk, p)).sum();
        if !(nonlinear.abs() > 0.0) || !nonlinear.is_finite() {
            return Err(Error::TrivialAttractor);
        }
        let s = linear / nonlinear;
        let residuals: Vec<f64> =
            ops.iter().zip(&psi).zip(&g).map(|((op, p), gk)| residual_norm(op, volumes, p, gk)).collect();
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        history.push(worst);
        if worst <= opts.tolerance && (s - 1.0).abs() <= opts.stabilizer_tolerance {
            return finish(spec, omega, grid, psi, masses, iterations, residuals, s, history, opts);
        }
        if iterations >= opts.max_iterations {
            return Err(Error::NotConverged { iterations, residual: worst, history });
        }
        let s2 = s * s;
        for ((p, op), mut gk) in psi.iter_mut().zip(&ops).zip(g) {
            op.solver.solve_in_place(&mut gk);
            for (x, y) in p.iter_mut().zip(&gk) {
                *x = (1.0 - opts.damping) * *x + opts.damping * s2 * y;
            }
        }
        iterations += 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    spec: &SystemSpec,
    omega: f64,
    grid: &RadialGrid,
    psi: Vec<Vec<f64>>,
    masses: Vec<f64>,
    iterations: usize,
    residuals: Vec<f64>,
    stabilizer: f64,
    history: Vec<f64>,
    opts: &GroundStateOptions,
) -> Result<GroundStateResult> {
    let field = Field::from_real(grid.clone(), psi)?;
    let ev = Evaluator::new(spec, field.grid())?;
    let report = ev.report_at(&field, omega)?;
    let script_q = ev.script_q(&field, omega)?;
    let pohozaev = pohozaev_from_parts(spec, report.k, script_q, report.p);
    Ok(GroundStateResult {
        psi: field,
        omega,
        masses,
        iterations,
        residuals,
        stabilizer,
        history,
        tolerance: opts.tolerance,
        report,
        pohozaev,
    })
}

/// One pass/fail line of a certification.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificationItem {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certification {
    pub items: Vec<CertificationItem>,
}

impl Certification {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn item(&self, name: &str) -> Option<&CertificationItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.items {
            writeln!(
                f,
                "{} = {}  value = {:.6e}  bound = {:.1e}",
                i.name,
                if i.passed { "pass" } else { "FAIL" },
                i.value,
                i.bound
            )?;
        }
        Ok(())
    }
}

pub const POHOZAEV_CERT_TOLERANCE: f64 = 1e-3;
pub const XI1_GAP_TOLERANCE: f64 = 1e-4;

/// Re-derives every certificate from the stored profile: fixed-point
/// residual, Pohozaev identities, positivity, monotonicity and the two-path
/// sharp-constant gap.
pub fn certify(spec: &SystemSpec, gs: &GroundStateResult) -> Result<Certification> {
    let grid = match gs.psi.grid() {
        Grid::Radial(g) => g.clone(),
        Grid::Cartesian(_) => {
            return Err(Error::InvalidArgument("ground states live on radial grids".into()))
        }
    };
    let masses = spec.positive_masses(gs.omega)?;
    let psi: Vec<Vec<f64>> = (0..gs.psi.l()).map(|k| gs.profile(k)).collect();
    let singular = grid.singular_volumes(spec.b())?;
    let g = forcing(spec, &singular, &psi);
    let pde = (0..spec.l())
        .map(|k| {
            let op = Operator::new(&grid, spec.gamma()[k], masses[k]);
            residual_norm(&op, grid.volumes(), &psi[k], &g[k])
        })
        .fold(0.0, f64::max);
    let ev = Evaluator::new(spec, gs.psi.grid())?;
    let rep = ev.report_at(&gs.psi, gs.omega)?;
    let script_q = ev.script_q(&gs.psi, gs.omega)?;
    let poh = pohozaev_from_parts(spec, rep.k, script_q, rep.p).max();
    let min_value = psi.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let max_rise =
        psi.iter().flat_map(|c| c.windows(2).map(|w| w[1] - w[0])).fold(f64::NEG_INFINITY, f64::max);
    let gap = thresholds_from_profile(spec, &gs.psi, gs.omega).map_or(f64::INFINITY, |t| t.xi1_gap);
    let item =
        |name, value: f64, bound: f64| CertificationItem { name, value, bound, passed: value <= bound };
    Ok(Certification {
        items: vec![
            item("pde_residual", pde, 10.0 * gs.tolerance),
            item("pohozaev", poh, POHOZAEV_CERT_TOLERANCE),
            CertificationItem {
                name: "positivity",
                value: min_value,
                bound: -1e-10,
                passed: min_value >= -1e-10,
            },
            item("monotonicity", max_rise.max(0.0), 1e-8),
            item("xi1_gap", gap, XI1_GAP_TOLERANCE),
        ],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepEntry {
    pub omega: f64,
    /// `(𝒬(ψ_ω), ξ₁)` or the failure message.
    pub outcome: std::result::Result<(f64, f64), String>,
}

/// Independent solves for each `ω`, run in parallel.
pub fn omega_sweep(
    spec: &SystemSpec,
    omegas: &[f64],
    grid: &RadialGrid,
    opts: &GroundStateOptions,
) -> Vec<SweepEntry> {
    omegas
        .par_iter()
        .map(|&omega| {
            let outcome = solve(spec, omega, grid, opts)
                .and_then(|gs| thresholds_from_profile(spec, &gs.psi, omega))
                .map(|t| (t.script_q, t.xi1))
                .map_err(|e| e.to_string());
            SweepEntry { omega, outcome }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::presets;
    use num_complex::Complex64;

    fn small_grid() -> RadialGrid {
        RadialGrid::with_defaults(3).unwrap()
    }

    #[test]
    fn scalar_converges_and_certifies() {
        let spec = presets::scalar(3, 0.5).unwrap();
        let gs = solve(&spec, 1.0, &small_grid(), &GroundStateOptions::default()).unwrap();
        assert!(gs.iterations < 500);
        let cert = certify(&spec, &gs).unwrap();
        assert!(cert.all_pass(), "{cert}");
    }

    #[test]
    fn zero_guess_is_trivial_attractor() {
        let spec = presets::scalar(3, 0.5).unwrap();
        let g = small_grid();
        let err = solve_with_guess(&spec, 1.0, &g, &Default::default(), vec![vec![0.0; g.len()]]);
        assert!(matches!(err, Err(Error::TrivialAttractor)));
    }

    #[test]
    fn rejects_non_positive_mass_and_caps_iterations() {
        let spec = presets::two_wave(3, 0.6, 1.0, 0.0).unwrap();
        assert!(matches!(
            solve(&spec, 0.0, &small_grid(), &Default::default()),
            Err(Error::NonPositiveMass { .. })
        ));
        let opts = GroundStateOptions { max_iterations: 1, ..Default::default() };
        match solve(&spec, 1.0, &small_grid(), &opts) {
            Err(Error::NotConverged { history, .. }) => assert_eq!(history.len(), 2),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn scaled_profile_fails_pohozaev() {
        let spec = presets::two_wave(3, 0.6, 1.0, 0.0).unwrap();
        let grid = RadialGrid::new(3, 4096, 20.0).unwrap();
        let mut gs = solve(&spec, 1.0, &grid, &Default::default()).unwrap();
        assert!(certify(&spec, &gs).unwrap().all_pass());
        gs.psi = gs.psi.scaled(Complex64::new(1.1, 0.0));
        let cert = certify(&spec, &gs).unwrap();
        assert!(!cert.item("pohozaev").unwrap().passed);
    }

    #[test]
    fn sweep_shapes() {
        let spec = presets::scalar(3, 0.5).unwrap();
        let g = RadialGrid::new(3, 256, 20.0).unwrap();
        assert!(omega_sweep(&spec, &[], &g, &Default::default()).is_empty());
        let one = omega_sweep(&spec, &[1.0], &g, &Default::default());
        assert_eq!(one.len(), 1);
        assert!(one[0].outcome.is_ok());
    }
}
