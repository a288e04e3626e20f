//! Strang-split time stepping of the full system with conservation monitors
//! and blow-up detection.
//!
//! Linear flow `iα_k ∂_t u_k = −γ_k Δu_k + β_k u_k`: Crank–Nicolson on radial
//! grids (a Cayley transform of an operator self-adjoint in the mass inner
//! product, hence exactly unitary), the exact Fourier multiplier on Cartesian
//! grids. Nonlinear flow `∂_t u_k = (i/α_k) w f_k(u)`: classical RK4 at each
//! node, `w` being the cell average of `|x|^{-b}`.

use std::fmt;

use num_complex::Complex64;

use crate::dichotomy::VirialSample;
use crate::error::{Error, Result};
use crate::functionals::Evaluator;
use crate::grid::{Field, Grid, RadialGrid};
use crate::interaction::SystemSpec;
use crate::linalg::Tridiagonal;

/// Node amplitudes below this are left untouched by the nonlinear step.
const NEGLIGIBLE: f64 = 1e-100;
const UNDERFLOW: f64 = 1e-250;

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_final: f64,
    /// Steps between monitor rows.
    pub monitor_stride: usize,
    pub nonlinear_substeps: usize,
    /// Flag when `K(t) > kinetic_multiplier · K(0)`.
    pub kinetic_multiplier: f64,
    /// Flag when the grid-scale share of the gradient exceeds this.
    pub tail_threshold: f64,
    /// Keep the state every this many monitor rows.
    pub snapshot_every: Option<usize>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            t_final: 1.0,
            monitor_stride: 10,
            nonlinear_substeps: 1,
            kinetic_multiplier: 100.0,
            tail_threshold: 0.1,
            snapshot_every: None,
        }
    }
}

impl EvolveOptions {
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("T = {} must be positive", self.t_final)));
        }
        if self.monitor_stride == 0 || self.nonlinear_substeps == 0 {
            return Err(Error::InvalidArgument("strides and substeps must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowUpReason {
    Kinetic,
    Resolution,
    Overflow,
}

impl fmt::Display for BlowUpReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlowUpReason::Kinetic => "kinetic",
            BlowUpReason::Resolution => "resolution",
            BlowUpReason::Overflow => "overflow",
        })
    }
}

/// A detected (not certified) singularity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowUp {
    pub time: f64,
    pub reason: BlowUpReason,
    pub row: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub q: f64,
    pub e: f64,
    pub k: f64,
    pub l: f64,
    pub p: f64,
    pub gradient_norms: Vec<f64>,
    pub tail_fraction: f64,
    pub virial: Option<VirialSample>,
}

impl TraceRow {
    fn is_finite(&self) -> bool {
        [self.q, self.e, self.k, self.l, self.p].iter().all(|x| x.is_finite())
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionTrace {
    pub rows: Vec<TraceRow>,
    pub blowup: Option<BlowUp>,
    pub final_state: Field,
    pub steps: usize,
    pub dt: f64,
    pub snapshots: Vec<(f64, Field)>,
}

impl EvolutionTrace {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    /// Largest `|X(t) − X(0)| / |X(0)|` over rows, for `X` picked by `f`.
    pub fn relative_drift(&self, f: impl Fn(&TraceRow) -> f64) -> f64 {
        let x0 = f(&self.rows[0]);
        let scale = if x0 != 0.0 { x0.abs() } else { 1.0 };
        self.rows.iter().map(|r| (f(r) - x0).abs() / scale).fold(0.0, f64::max)
    }

    /// CSV with one row per monitor sample; virial columns appear when any
    /// row carries them.
    pub fn to_csv(&self) -> String {
        let l = self.rows.first().map_or(0, |r| r.gradient_norms.len());
        let virial = self.rows.iter().any(|r| r.virial.is_some());
        let mut out = String::from("t,Q,E,K,L,P");
        for k in 1..=l {
            out += &format!(",grad_norm_{k}");
        }
        out += ",tail_fraction";
        if virial {
            out += ",V,R,virial_rhs,delta_margin";
        }
        out += ",flag\n";
        for (i, r) in self.rows.iter().enumerate() {
            out += &format!("{:.10e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.q, r.e, r.k, r.l, r.p);
            for g in &r.gradient_norms {
                out += &format!(",{g:.16e}");
            }
            out += &format!(",{:.6e}", r.tail_fraction);
            if virial {
                match &r.virial {
                    Some(v) => {
                        out += &format!(",{:.16e},{:.16e},{:.16e},{:.16e}", v.v, v.r, v.rhs, v.delta_margin)
                    }
                    None => out += ",,,,",
                }
            }
            match self.blowup {
                Some(b) if b.row == i => out += &format!(",{}\n", b.reason),
                _ => out += ",\n",
            }
        }
        out
    }
}

/// Earliest row at which a blow-up criterion fires.
pub fn detect_blowup(rows: &[TraceRow], opts: &EvolveOptions) -> Option<BlowUp> {
    let k0 = rows.first()?.k;
    rows.iter()
        .enumerate()
        .find_map(|(i, r)| row_flag(r, k0, opts).map(|reason| BlowUp { time: r.t, reason, row: i }))
}

fn row_flag(r: &TraceRow, k0: f64, opts: &EvolveOptions) -> Option<BlowUpReason> {
    if !r.is_finite() {
        Some(BlowUpReason::Overflow)
    } else if k0 > 0.0 && r.k > opts.kinetic_multiplier * k0 {
        Some(BlowUpReason::Kinetic)
    } else if r.tail_fraction > opts.tail_threshold {
        Some(BlowUpReason::Resolution)
    } else {
        None
    }
}

enum Propagator {
    Radial { solver: Tridiagonal<Complex64>, rhs_diag: Vec<Complex64>, rhs_off: Vec<Complex64> },
    Fourier { rate: f64, gamma: f64, beta: f64 },
}

/// Precomputed linear propagators and nonlinear weights for one
/// `(spec, grid, dt)`.
pub struct Stepper<'a> {
    spec: &'a SystemSpec,
    grid: Grid,
    half: Vec<Propagator>,
    weight: Vec<f64>,
    substeps: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a SystemSpec, grid: &Grid, dt: f64, substeps: usize) -> Result<Self> {
        if grid.n() != spec.n() {
            return Err(Error::InvalidArgument(format!(
                "grid dimension {} does not match system dimension {}",
                grid.n(),
                spec.n()
            )));
        }
        let half = (0..spec.l()).map(|k| propagator(spec, grid, k, 0.5 * dt)).collect::<Result<Vec<_>>>()?;
        let weight =
            grid.singular_volumes(spec.b())?.iter().zip(grid.volumes()).map(|(s, v)| s / v).collect();
        Ok(Self { spec, grid: grid.clone(), half, weight, substeps: substeps.max(1) })
    }

    fn check(&self, state: &Field) -> Result<()> {
        if state.l() != self.spec.l() {
            return Err(Error::LengthMismatch { expected: self.spec.l(), got: state.l() });
        }
        if state.grid() != &self.grid {
            return Err(Error::InvalidArgument("state lives on a different grid".into()));
        }
        Ok(())
    }

    pub fn linear_half(&self, state: &mut Field) {
        for (c, prop) in state.components_mut().iter_mut().zip(&self.half) {
            apply_propagator(prop, &self.grid, c);
        }
    }

    pub fn nonlinear(&self, state: &mut Field, dt: f64) {
        let l = self.spec.l();
        let alpha = self.spec.alpha();
        let h = dt / self.substeps as f64;
        let mut u = vec![Complex64::new(0.0, 0.0); l];
        let mut stage = vec![Complex64::new(0.0, 0.0); l];
        let mut k1 = vec![Complex64::new(0.0, 0.0); l];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let comps = state.components_mut();
        let i = Complex64::new(0.0, 1.0);
        let rhs = |z: &[Complex64], out: &mut [Complex64], w: f64| {
            for k in 0..l {
                out[k] = i * (w / alpha[k]) * self.spec.eval_f(k, z);
            }
        };
        for (j, &w) in self.weight.iter().enumerate() {
            for k in 0..l {
                u[k] = comps[k][j];
            }
            // the quadratic increment would round away; skipping also keeps
            // underflowing tails out of subnormal arithmetic
            if u.iter().all(|z| z.re.abs() < NEGLIGIBLE && z.im.abs() < NEGLIGIBLE) {
                continue;
            }
            for _ in 0..self.substeps {
                rhs(&u, &mut k1, w);
                for k in 0..l {
                    stage[k] = u[k] + k1[k] * (0.5 * h);
                }
                rhs(&stage, &mut k2, w);
                for k in 0..l {
                    stage[k] = u[k] + k2[k] * (0.5 * h);
                }
                rhs(&stage, &mut k3, w);
                for k in 0..l {
                    stage[k] = u[k] + k3[k] * h;
                }
                rhs(&stage, &mut k4, w);
                for k in 0..l {
                    u[k] += (k1[k] + (k2[k] + k3[k]) * 2.0 + k4[k]) * (h / 6.0);
                }
            }
            for k in 0..l {
                comps[k][j] = u[k];
            }
        }
    }

    /// One Strang step: half linear, full nonlinear, half linear.
    pub fn step(&self, state: &mut Field, dt: f64) {
        self.linear_half(state);
        self.nonlinear(state, dt);
        self.linear_half(state);
        flush_underflow(state);
    }
}

/// Zeroes parts below `UNDERFLOW`. Decaying tails otherwise sink into
/// subnormal range, where arithmetic is two orders of magnitude slower.
fn flush_underflow(state: &mut Field) {
    for c in state.components_mut() {
        for z in c.iter_mut() {
            if z.re.abs() < UNDERFLOW {
                z.re = 0.0;
            }
            if z.im.abs() < UNDERFLOW {
                z.im = 0.0;
            }
        }
    }
}

fn propagator(spec: &SystemSpec, grid: &Grid, k: usize, tau: f64) -> Result<Propagator> {
    let (alpha, gamma, beta) = (spec.alpha()[k], spec.gamma()[k], spec.beta()[k]);
    Ok(match grid {
        Grid::Radial(g) => {
            // (M + iθA) u⁺ = (M − iθA) u,  A = γS + βM,  θ = τ/(2α)
            let theta = Complex64::new(0.0, tau / (2.0 * alpha));
            let (sd, so) = g.stiffness_bands();
            let a_diag: Vec<f64> = sd.iter().zip(g.volumes()).map(|(s, v)| gamma * s + beta * v).collect();
            let a_off: Vec<f64> = so.iter().map(|s| gamma * s).collect();
            let lhs_diag: Vec<Complex64> =
                a_diag.iter().zip(g.volumes()).map(|(a, v)| v + theta * a).collect();
            let lhs_off: Vec<Complex64> = a_off.iter().map(|a| theta * a).collect();
            Propagator::Radial {
                solver: Tridiagonal::factor(&lhs_off, &lhs_diag, &lhs_off),
                rhs_diag: a_diag.iter().zip(g.volumes()).map(|(a, v)| v - theta * a).collect(),
                rhs_off: a_off.iter().map(|a| -theta * a).collect(),
            }
        }
        Grid::Cartesian(_) => Propagator::Fourier { rate: tau / alpha, gamma, beta },
    })
}

fn apply_propagator(prop: &Propagator, grid: &Grid, c: &mut Vec<Complex64>) {
    match (prop, grid) {
        (Propagator::Radial { solver, rhs_diag, rhs_off }, _) => {
            let n = c.len();
            let mut rhs: Vec<Complex64> = (0..n)
                .map(|j| {
                    let mut y = rhs_diag[j] * c[j];
                    if j > 0 {
                        y += rhs_off[j - 1] * c[j - 1];
                    }
                    if j + 1 < n {
                        y += rhs_off[j] * c[j + 1];
                    }
                    y
                })
                .collect();
            solver.solve_in_place(&mut rhs);
            *c = rhs;
        }
        (Propagator::Fourier { rate, gamma, beta }, Grid::Cartesian(g)) => {
            *c = g.apply_multiplier(c, |k2| Complex64::from_polar(1.0, -rate * (gamma * k2 + beta)));
        }
        (Propagator::Fourier { .. }, Grid::Radial(_)) => unreachable!("propagator built per grid"),
    }
}

/// `e^{i(dt/2α_k)(γ_kΔ − β_k)}` applied to each component.
pub fn linear_half_step(spec: &SystemSpec, state: &Field, dt: f64) -> Result<Field> {
    let stepper = Stepper::new(spec, state.grid(), dt, 1)?;
    stepper.check(state)?;
    let mut out = state.clone();
    stepper.linear_half(&mut out);
    Ok(out)
}

/// Pointwise RK4 for `iα_k ∂_t u_k = −|x|^{-b} f_k(u)` over `dt`.
pub fn nonlinear_step(spec: &SystemSpec, state: &Field, dt: f64, substeps: usize) -> Result<Field> {
    let stepper = Stepper::new(spec, state.grid(), dt, substeps)?;
    stepper.check(state)?;
    let mut out = state.clone();
    stepper.nonlinear(&mut out, dt);
    Ok(out)
}

/// Hook called at every monitor row with the current state.
pub trait Observer {
    fn observe(&mut self, state: &Field, row: &mut TraceRow) -> Result<()>;
}

impl Observer for () {
    fn observe(&mut self, _: &Field, _: &mut TraceRow) -> Result<()> {
        Ok(())
    }
}

pub fn evolve(spec: &SystemSpec, u0: &Field, opts: &EvolveOptions) -> Result<EvolutionTrace> {
    evolve_observed(spec, u0, opts, &mut ())
}

pub fn evolve_observed(
    spec: &SystemSpec,
    u0: &Field,
    opts: &EvolveOptions,
    observer: &mut dyn Observer,
) -> Result<EvolutionTrace> {
    opts.validate()?;
    if !u0.is_finite() {
        return Err(Error::InvalidArgument("initial data is not finite".into()));
    }
    let stepper = Stepper::new(spec, u0.grid(), opts.dt, opts.nonlinear_substeps)?;
    stepper.check(u0)?;
    let ev = Evaluator::new(spec, u0.grid())?;
    let steps = opts.steps();
    let mut state = u0.clone();
    let mut rows = Vec::new();
    let mut snapshots = Vec::new();
    let mut blowup = None;
    let mut taken = 0;
    loop {
        if taken % opts.monitor_stride == 0 || taken == steps {
            let t = taken as f64 * opts.dt;
            let mut row = monitor_row(&ev, &state, t)?;
            if row.is_finite() && state.is_finite() {
                observer.observe(&state, &mut row)?;
            }
            if let Some(every) = opts.snapshot_every {
                if rows.len() % every.max(1) == 0 {
                    snapshots.push((t, state.clone()));
                }
            }
            let k0 = rows.first().map_or(row.k, |r: &TraceRow| r.k);
            let flag =
                if state.is_finite() { row_flag(&row, k0, opts) } else { Some(BlowUpReason::Overflow) };
            rows.push(row);
            if let Some(reason) = flag {
                blowup = Some(BlowUp { time: t, reason, row: rows.len() - 1 });
                break;
            }
        }
        if taken == steps {
            break;
        }
        stepper.step(&mut state, opts.dt);
        taken += 1;
    }
    Ok(EvolutionTrace { rows, blowup, final_state: state, steps: taken, dt: opts.dt, snapshots })
}

fn monitor_row(ev: &Evaluator<'_>, state: &Field, t: f64) -> Result<TraceRow> {
    let rep = ev.report(state)?;
    let mut tail = 0.0f64;
    for c in state.components() {
        let (tl, total) = ev.grid().gradient_tail(c);
        if total > 0.0 {
            tail = tail.max(tl / total);
        } else if !total.is_finite() {
            tail = f64::INFINITY;
        }
    }
    Ok(TraceRow {
        t,
        q: rep.q,
        e: rep.e,
        k: rep.k,
        l: rep.l,
        p: rep.p,
        gradient_norms: rep.gradient_sq.iter().map(|g| g.sqrt()).collect(),
        tail_fraction: tail,
        virial: None,
    })
}

/// Compares `λ^{2−b} u(λx, λ²T)` with the solution from the pre-scaled data
/// `λ^{2−b} u₀(λx)` at time `T`.
///
/// The pre-scaled data is represented exactly by the same samples on the
/// grid dilated by `1/λ` and is stepped with `dt/λ²`, so both runs take the
/// same number of steps.
pub fn scaling_check(spec: &SystemSpec, u0: &Field, lambda: f64, t_final: f64, dt: f64) -> Result<f64> {
    if spec.beta().iter().any(|&b| b != 0.0) {
        return Err(Error::InvalidArgument("scaling symmetry needs all β_k = 0".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("λ = {lambda} must be positive")));
    }
    let amp = Complex64::new(lambda.powf(2.0 - spec.b()), 0.0);
    let big = EvolveOptions {
        dt,
        t_final: lambda * lambda * t_final,
        monitor_stride: usize::MAX,
        kinetic_multiplier: f64::INFINITY,
        tail_threshold: f64::INFINITY,
        ..Default::default()
    };
    let small = EvolveOptions { dt: dt / (lambda * lambda), t_final, ..big.clone() };
    if big.steps() != small.steps() {
        return Err(Error::InvalidArgument("λ²T/dt must be an integer".into()));
    }
    let u = evolve(spec, u0, &big)?.final_state;
    let w0 = u0.scaled(amp).dilated(lambda)?;
    let w = evolve(spec, &w0, &small)?.final_state;
    let rescaled = u.scaled(amp).with_grid(w.grid().clone())?;
    w.sup_distance(&rescaled)
}

/// Same comparison on one fixed radial grid for integer `λ`: the
/// pre-scaled data are the samples at nodes `λj`, and the rescaled solution
/// is read back from the same nodes. This exposes the discretisation error
/// that [`scaling_check`] cancels by construction.
pub fn scaling_check_fixed_grid(
    spec: &SystemSpec,
    grid: &RadialGrid,
    profile: impl Fn(usize, f64) -> Complex64,
    lambda: usize,
    t_final: f64,
    dt: f64,
) -> Result<f64> {
    if spec.beta().iter().any(|&b| b != 0.0) {
        return Err(Error::InvalidArgument("scaling symmetry needs all β_k = 0".into()));
    }
    if lambda == 0 {
        return Err(Error::InvalidArgument("λ must be a positive integer".into()));
    }
    let lf = lambda as f64;
    let amp = lf.powf(2.0 - spec.b());
    let opts = |t: f64, dt: f64| EvolveOptions {
        dt,
        t_final: t,
        monitor_stride: usize::MAX,
        kinetic_multiplier: f64::INFINITY,
        tail_threshold: f64::INFINITY,
        ..Default::default()
    };
    let u0 = Field::from_radial_fn(grid.clone(), spec.l(), &profile);
    let w0 = Field::from_radial_fn(grid.clone(), spec.l(), |k, r| profile(k, lf * r) * amp);
    let u = evolve(spec, &u0, &opts(lf * lf * t_final, dt))?.final_state;
    let w = evolve(spec, &w0, &opts(t_final, dt / (lf * lf)))?.final_state;
    let mut worst = 0.0f64;
    let len = grid.len();
    for k in 0..spec.l() {
        for j in 0..len {
            let src = j * lambda;
            let value = if src < len { u.component(k)[src] * amp } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((w.component(k)[j] - value).norm());
        }
    }
    Ok(worst)
}
