//! Global-versus-blow-up classification against ground-state thresholds,
//! the Pohozaev functional, the bootstrap threshold and localized virial
//! diagnostics.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{Observer, TraceRow};
use crate::functionals::{Evaluator, ThresholdSet};
use crate::grid::{Field, Grid, RadialGrid};
use crate::interaction::SystemSpec;

/// Tolerance on the pointwise cutoff bounds.
pub const CUTOFF_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    GlobalSubcritical,
    GlobalMassCritical,
    GlobalIntercritical,
    BlowUpCandidate,
    Indeterminate,
}

impl Verdict {
    pub fn is_global(self) -> bool {
        matches!(
            self,
            Verdict::GlobalSubcritical | Verdict::GlobalMassCritical | Verdict::GlobalIntercritical
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::GlobalSubcritical => "GlobalSubcritical",
            Verdict::GlobalMassCritical => "GlobalMassCritical",
            Verdict::GlobalIntercritical => "GlobalIntercritical",
            Verdict::BlowUpCandidate => "BlowUpCandidate",
            Verdict::Indeterminate => "Indeterminate",
        })
    }
}

/// `x^s` extended oddly to negative `x`, so that negative energies compare
/// below every positive threshold.
fn signed_pow(x: f64, s: f64) -> f64 {
    if x == 0.0 {
        if s > 0.0 {
            0.0
        } else if s == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        x.signum() * x.abs().powf(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub s_c: f64,
    /// `E(u₀)^{s_c} Q(u₀)^{1−s_c}` with the sign of `E(u₀)`.
    pub energy_lhs: f64,
    /// `ℰ(ψ)^{s_c} Q(ψ)^{1−s_c}`.
    pub energy_rhs: f64,
    pub kinetic_lhs: f64,
    pub kinetic_rhs: f64,
    /// `rhs − lhs`; positive means the global side.
    pub energy_margin: f64,
    pub kinetic_margin: f64,
    /// `Q(ψ) − Q(u₀)`, used at the mass-critical point.
    pub charge_margin: f64,
    pub radial: bool,
}

impl Classification {
    pub fn energy_condition(&self) -> bool {
        self.energy_lhs < self.energy_rhs
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict = {}", self.verdict)?;
        writeln!(f, "s_c = {}", self.s_c)?;
        writeln!(f, "energy_lhs = {:.16e}", self.energy_lhs)?;
        writeln!(f, "energy_rhs = {:.16e}", self.energy_rhs)?;
        writeln!(f, "kinetic_lhs = {:.16e}", self.kinetic_lhs)?;
        writeln!(f, "kinetic_rhs = {:.16e}", self.kinetic_rhs)?;
        writeln!(f, "energy_margin = {:.16e}", self.energy_margin)?;
        writeln!(f, "kinetic_margin = {:.16e}", self.kinetic_margin)?;
        writeln!(f, "charge_margin = {:.16e}", self.charge_margin)?;
        writeln!(f, "radial = {}", self.radial)
    }
}

/// Places `u0` relative to the ground-state thresholds.
///
/// Each verdict is issued only inside the parameter range of the result it
/// rests on; everything else, including exact equality, is `Indeterminate`.
pub fn classify(
    spec: &SystemSpec,
    u0: &Field,
    thresholds: &ThresholdSet,
    radial: bool,
) -> Result<Classification> {
    if thresholds.n != spec.n() || thresholds.b != spec.b() {
        return Err(Error::InvalidArgument(format!(
            "thresholds for (n, b) = ({}, {}) do not match system ({}, {})",
            thresholds.n,
            thresholds.b,
            spec.n(),
            spec.b()
        )));
    }
    let rep = Evaluator::new(spec, u0.grid())?.report(u0)?;
    let (n, b) = (spec.n(), spec.b());
    let d = spec.scaling_degree();
    let s = (d - 4.0) / 2.0;
    let mix = |x: f64, q: f64| signed_pow(x, s) * q.powf(1.0 - s);
    let energy_lhs = mix(rep.e, rep.q);
    let energy_rhs = mix(thresholds.e_script, thresholds.q);
    let kinetic_lhs = mix(rep.k, rep.q);
    let kinetic_rhs = mix(thresholds.k, thresholds.q);
    let mut c = Classification {
        verdict: Verdict::Indeterminate,
        s_c: s,
        energy_lhs,
        energy_rhs,
        kinetic_lhs,
        kinetic_rhs,
        energy_margin: energy_rhs - energy_lhs,
        kinetic_margin: kinetic_rhs - kinetic_lhs,
        charge_margin: thresholds.q - rep.q,
        radial,
    };
    let b_ok = b > 0.0 && b < 2f64.min(n as f64 / 2.0);
    if !b_ok || n < 2 {
        return Ok(c);
    }
    c.verdict = if d < 4.0 {
        if n <= 3 {
            Verdict::GlobalSubcritical
        } else {
            Verdict::Indeterminate
        }
    } else if d == 4.0 {
        if n == 3 && rep.q < thresholds.q {
            Verdict::GlobalMassCritical
        } else {
            Verdict::Indeterminate
        }
    } else if d < 6.0 {
        let energy = energy_lhs < energy_rhs;
        if energy && kinetic_lhs < kinetic_rhs && b < 1.0 {
            Verdict::GlobalIntercritical
        } else if energy && kinetic_lhs > kinetic_rhs && radial {
            Verdict::BlowUpCandidate
        } else {
            Verdict::Indeterminate
        }
    } else {
        Verdict::Indeterminate
    };
    Ok(c)
}

/// `γ = (βq)^{−1/(q−1)}` and the admissible bound `(1 − 1/q)γ` for the
/// bootstrap inequality `G ≤ a + βG^q`.
pub fn bootstrap_gamma(beta: f64, q: f64) -> Result<(f64, f64)> {
    if !(q > 1.0) {
        return Err(Error::InvalidArgument(format!("q = {q} must exceed 1")));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("β = {beta} must be positive")));
    }
    let gamma = (beta * q).powf(-1.0 / (q - 1.0));
    Ok((gamma, (1.0 - 1.0 / q) * gamma))
}

/// The Pohozaev functional computed directly and by recombining `E`, `K`, `L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PohozaevFunctional {
    /// `K − (n+2b)/2 · P`
    pub direct: f64,
    /// `(n+2b)/4 · E − (n+2b−4)/4 · K − (n+2b)/4 · L`
    pub recombined: f64,
}

impl PohozaevFunctional {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.direct.abs().max(self.recombined.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.direct - self.recombined).abs() / scale
        }
    }
}

pub fn pohozaev_functional(spec: &SystemSpec, field: &Field) -> Result<PohozaevFunctional> {
    let rep = Evaluator::new(spec, field.grid())?.report(field)?;
    let d = spec.scaling_degree();
    Ok(PohozaevFunctional {
        direct: rep.k - 0.5 * d * rep.p,
        recombined: 0.25 * d * rep.e - 0.25 * (d - 4.0) * rep.k - 0.25 * d * rep.l,
    })
}

/// `−𝒯_n(field)`: positive on the blow-up side.
pub fn delta_margin(spec: &SystemSpec, field: &Field, thresholds: &ThresholdSet) -> Result<f64> {
    if thresholds.n != spec.n() || thresholds.b != spec.b() {
        return Err(Error::InvalidArgument("thresholds do not match the system".into()));
    }
    Ok(-pohozaev_functional(spec, field)?.direct)
}

/// Transition on `t = (r − R)/R ∈ [0, 1]`: matches `(1 + t)²` to third order
/// at `t = 0` and vanishes to third order at `t = 1`.
const TRANSITION: [f64; 8] = [1.0, 2.0, 1.0, 0.0, -85.0, 194.0, -157.0, 44.0];

fn transition(t: f64, derivative: usize) -> f64 {
    let mut acc = 0.0;
    for (p, &c) in TRANSITION.iter().enumerate().rev() {
        if p < derivative {
            break;
        }
        let falling: f64 = (0..derivative).map(|i| (p - i) as f64).product();
        acc += c * falling * t.powi((p - derivative) as i32);
    }
    acc
}

/// Recorded extremes of the cutoff over the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffBounds {
    /// `max (φ − r²)`
    pub max_excess: f64,
    pub min_value: f64,
    /// `max φ''`
    pub max_second: f64,
    /// `C` with `|Δ²φ| ≤ C/R²`.
    pub bilaplacian_constant: f64,
}

/// `r²` on `[0, R]`, a degree-7 transition on `[R, 2R]`, zero beyond,
/// sampled at the grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct CutoffFunction {
    pub radius: f64,
    pub n: usize,
    pub nodes: Vec<f64>,
    pub phi: Vec<f64>,
    pub d_phi: Vec<f64>,
    pub d2_phi: Vec<f64>,
    pub laplacian: Vec<f64>,
    pub bilaplacian: Vec<f64>,
    pub bounds: CutoffBounds,
}

impl CutoffFunction {
    /// Radial derivatives `φ, φ', φ'', φ''', φ''''` at `r`.
    pub fn derivatives(radius: f64, r: f64) -> [f64; 5] {
        if r <= radius {
            [r * r, 2.0 * r, 2.0, 0.0, 0.0]
        } else if r < 2.0 * radius {
            let t = (r - radius) / radius;
            let mut out = [0.0; 5];
            for (m, o) in out.iter_mut().enumerate() {
                *o = radius.powi(2 - m as i32) * transition(t, m);
            }
            out
        } else {
            [0.0; 5]
        }
    }

    /// Errors when a pointwise bound fails on this grid.
    pub fn check_bounds(&self) -> Result<()> {
        let b = &self.bounds;
        let mut failures = Vec::new();
        if b.max_excess > CUTOFF_TOLERANCE {
            failures.push(format!("max(φ − r²) = {:.6e}", b.max_excess));
        }
        if b.min_value < -CUTOFF_TOLERANCE {
            failures.push(format!("min φ = {:.6e}", b.min_value));
        }
        if b.max_second > 2.0 + CUTOFF_TOLERANCE {
            failures.push(format!("max φ'' = {:.6e} > 2", b.max_second));
        }
        if !b.bilaplacian_constant.is_finite() {
            failures.push("Δ²φ is not finite".into());
        }
        if failures.is_empty() {
            Ok(())
        } else {
            Err(Error::CutoffBound(format!("R = {}: {}", self.radius, failures.join("; "))))
        }
    }
}

/// Samples the cutoff and records its bounds; call
/// [`CutoffFunction::check_bounds`] to enforce them.
pub fn build_cutoff(grid: &RadialGrid, radius: f64) -> Result<CutoffFunction> {
    if !(radius > 0.0) || 2.0 * radius >= grid.r_max() {
        return Err(Error::InvalidArgument(format!(
            "cutoff radius {radius} needs 0 < 2R < r_max = {}",
            grid.r_max()
        )));
    }
    let n = grid.n();
    let m = (n - 1) as f64;
    let len = grid.len();
    let mut cf = CutoffFunction {
        radius,
        n,
        nodes: grid.nodes().to_vec(),
        phi: Vec::with_capacity(len),
        d_phi: Vec::with_capacity(len),
        d2_phi: Vec::with_capacity(len),
        laplacian: Vec::with_capacity(len),
        bilaplacian: Vec::with_capacity(len),
        bounds: CutoffBounds {
            max_excess: f64::NEG_INFINITY,
            min_value: f64::INFINITY,
            max_second: f64::NEG_INFINITY,
            bilaplacian_constant: 0.0,
        },
    };
    for &r in grid.nodes() {
        let [p0, p1, p2, p3, p4] = CutoffFunction::derivatives(radius, r);
        let (lap, bilap) = if r <= radius {
            (2.0 * n as f64, 0.0)
        } else {
            (p2 + m * p1 / r, p4 + 2.0 * m * p3 / r + m * (m - 2.0) * (p2 / (r * r) - p1 / (r * r * r)))
        };
        cf.phi.push(p0);
        cf.d_phi.push(p1);
        cf.d2_phi.push(p2);
        cf.laplacian.push(lap);
        cf.bilaplacian.push(bilap);
        let b = &mut cf.bounds;
        b.max_excess = b.max_excess.max(p0 - r * r);
        b.min_value = b.min_value.min(p0);
        b.max_second = b.max_second.max(p2);
        b.bilaplacian_constant = b.bilaplacian_constant.max(bilap.abs() * radius * radius);
    }
    Ok(cf)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirialSample {
    pub t: f64,
    /// `∫φ Σ(α_k²/γ_k)|u_k|²`
    pub v: f64,
    /// `2Σα_k Im∫∇φ·∇u_k ū_k`
    pub r: f64,
    /// `R − 4∫φ|x|^{-b} Im Σ m_k f_k(u)ū_k`, `m_k = α_k/(2γ_k)`: the exact
    /// rate of change of `V` along the flow.
    pub rhs: f64,
    pub delta_margin: f64,
}

fn radial_grid(field: &Field) -> Result<&RadialGrid> {
    match field.grid() {
        Grid::Radial(g) => Ok(g),
        Grid::Cartesian(_) => Err(Error::InvalidArgument("virial diagnostics need a radial field".into())),
    }
}

/// Weighted sums are taken with the same cell volumes and edge couplings as
/// the evolution, so `V' = rhs` holds exactly for the semi-discrete flow.
pub fn virial_sample(
    spec: &SystemSpec,
    field: &Field,
    cutoff: &CutoffFunction,
    t: f64,
) -> Result<VirialSample> {
    let grid = radial_grid(field)?;
    if cutoff.phi.len() != grid.len() || cutoff.n != grid.n() {
        return Err(Error::InvalidArgument("cutoff sampled on a different grid".into()));
    }
    let ev = Evaluator::new(spec, field.grid())?;
    ev.check(field)?;
    let (alpha, gamma) = (spec.alpha(), spec.gamma());
    let phi = &cutoff.phi;
    let volumes = grid.volumes();
    let couplings = grid.face_couplings();
    let mut v = 0.0;
    let mut r = 0.0;
    for k in 0..spec.l() {
        let u = field.component(k);
        let weight = alpha[k] * alpha[k] / gamma[k];
        v += weight * u.iter().zip(phi).zip(volumes).map(|((z, p), w)| p * w * z.norm_sqr()).sum::<f64>();
        let mut edge = 0.0;
        for (j, s) in couplings.iter().enumerate() {
            edge += s * (phi[j + 1] - phi[j]) * (u[j + 1] * u[j].conj()).im;
        }
        r += 2.0 * alpha[k] * edge;
    }
    let singular = ev.singular_volumes();
    let mut forcing = 0.0;
    let mut z = vec![Complex64::new(0.0, 0.0); spec.l()];
    for j in 0..grid.len() {
        if phi[j] == 0.0 {
            continue;
        }
        for (k, zk) in z.iter_mut().enumerate() {
            *zk = field.component(k)[j];
        }
        let im: f64 =
            (0..spec.l()).map(|k| alpha[k] / (2.0 * gamma[k]) * (spec.eval_f(k, &z) * z[k].conj()).im).sum();
        forcing += phi[j] * singular[j] * im;
    }
    let rep = ev.report(field)?;
    let delta_margin = -(rep.k - 0.5 * spec.scaling_degree() * rep.p);
    Ok(VirialSample { t, v, r, rhs: r - 4.0 * forcing, delta_margin })
}

/// Largest `|(V_{i+1} − V_{i−1})/(t_{i+1} − t_{i−1}) − rhs_i|` over interior
/// samples.
pub fn virial_defect(samples: &[VirialSample]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "virial consistency needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let step = samples[1].t - samples[0].t;
    let uniform =
        samples.windows(2).all(|w| ((w[1].t - w[0].t) - step).abs() <= 1e-9 * step.abs().max(1e-300));
    if !(step > 0.0) || !uniform {
        return Err(Error::InvalidArgument("virial samples must be uniformly spaced".into()));
    }
    Ok(samples
        .windows(3)
        .map(|w| ((w[2].v - w[0].v) / (w[2].t - w[0].t) - w[1].rhs).abs())
        .fold(0.0, f64::max))
}

/// Virial defect over stored snapshots.
pub fn virial_consistency(
    spec: &SystemSpec,
    snapshots: &[(f64, Field)],
    cutoff: &CutoffFunction,
) -> Result<f64> {
    if snapshots.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "virial consistency needs at least 3 snapshots, got {}",
            snapshots.len()
        )));
    }
    let samples =
        snapshots.iter().map(|(t, f)| virial_sample(spec, f, cutoff, *t)).collect::<Result<Vec<_>>>()?;
    virial_defect(&samples)
}

/// Fills the virial columns of every trace row.
pub struct VirialObserver<'a> {
    spec: &'a SystemSpec,
    cutoff: &'a CutoffFunction,
}

impl<'a> VirialObserver<'a> {
    pub fn new(spec: &'a SystemSpec, cutoff: &'a CutoffFunction) -> Self {
        Self { spec, cutoff }
    }
}

impl Observer for VirialObserver<'_> {
    fn observe(&mut self, state: &Field, row: &mut TraceRow) -> Result<()> {
        row.virial = Some(virial_sample(self.spec, state, self.cutoff, row.t)?);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::presets;

    fn thresholds(n: usize, b: f64) -> ThresholdSet {
        // ℰ = (d−4)I, K = dI, Q = (6−d)I with I = 1
        let d = n as f64 + 2.0 * b;
        ThresholdSet {
            n,
            b,
            omega: 1.0,
            q: 6.0 - d,
            script_q: 6.0 - d,
            k: d,
            p: 2.0,
            e_script: d - 4.0,
            xi1: 1.0,
            xi1_direct: 1.0,
            xi1_gap: 0.0,
            c_op: 1.0,
            c_op_direct: 1.0,
        }
    }

    #[test]
    fn signed_power() {
        assert_eq!(signed_pow(-8.0, 1.0 / 3.0), -2.0);
        assert_eq!(signed_pow(0.0, 0.1), 0.0);
        assert_eq!(signed_pow(4.0, 0.5), 2.0);
    }

    #[test]
    fn bootstrap_examples() {
        assert_eq!(bootstrap_gamma(1.0, 2.0).unwrap(), (0.5, 0.25));
        let (g1, _) = bootstrap_gamma(1.0, 2.0).unwrap();
        let (g2, _) = bootstrap_gamma(2.0, 2.0).unwrap();
        assert!((g2 - 0.5 * g1).abs() < 1e-15);
        assert!(bootstrap_gamma(1.0, 1.0).is_err());
        assert!(bootstrap_gamma(0.0, 2.0).is_err());
    }

    #[test]
    fn bootstrap_matches_threshold_formula() {
        let (n, b) = (3usize, 0.6);
        let d = n as f64 + 2.0 * b;
        let (q_psi, q_u0): (f64, f64) = (3.7, 2.9);
        let xi1 = crate::functionals::xi1_closed_form(n, b, q_psi);
        let beta = 2.0 / xi1 * q_u0.powf((6.0 - d) / 4.0);
        let (gamma, _) = bootstrap_gamma(beta, d / 4.0).unwrap();
        let expected = d / (6.0 - d) * q_psi.powf(2.0 / (d - 4.0)) / q_u0.powf((6.0 - d) / (d - 4.0));
        assert!(((gamma - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn transition_matches_endpoints() {
        let left = [1.0, 2.0, 2.0, 0.0];
        for (m, &want) in left.iter().enumerate() {
            assert!((transition(0.0, m) - want).abs() < 1e-12);
            assert!(transition(1.0, m).abs() < 1e-9, "derivative {m} at t = 1");
        }
    }

    #[test]
    fn cutoff_shape_and_bounds() {
        let grid = RadialGrid::with_defaults(3).unwrap();
        let cf = build_cutoff(&grid, 5.0).unwrap();
        assert_eq!(cf.phi[0], 0.0);
        let at = |r: f64| CutoffFunction::derivatives(5.0, r)[0];
        assert_eq!(at(5.0), 25.0);
        assert_eq!(at(10.0), 0.0);
        assert!(cf.bounds.max_excess <= CUTOFF_TOLERANCE);
        assert!(cf.bounds.min_value >= -CUTOFF_TOLERANCE);
        // the transition overshoots φ'' ≤ 2
        assert!(cf.bounds.max_second > 2.0);
        assert!(matches!(cf.check_bounds(), Err(Error::CutoffBound(_))));
        assert!(build_cutoff(&grid, 20.0).is_err());
    }

    #[test]
    fn cutoff_derivatives_are_consistent() {
        let h = 1e-5;
        for &r in &[5.5, 7.3, 9.1] {
            let d = CutoffFunction::derivatives(5.0, r);
            let p = CutoffFunction::derivatives(5.0, r + h);
            let m = CutoffFunction::derivatives(5.0, r - h);
            for k in 0..4 {
                let fd = (p[k] - m[k]) / (2.0 * h);
                assert!((fd - d[k + 1]).abs() < 1e-5 * (1.0 + d[k + 1].abs()), "order {k} at {r}");
            }
        }
    }

    #[test]
    fn rejects_mismatched_thresholds() {
        let spec = presets::two_wave(3, 0.6, 1.0, 0.0).unwrap();
        let g = RadialGrid::new(3, 64, 10.0).unwrap();
        let u = Field::zeros(g, 2);
        assert!(classify(&spec, &u, &thresholds(3, 0.5), true).is_err());
        assert!(delta_margin(&spec, &u, &thresholds(2, 0.6)).is_err());
    }

    #[test]
    fn zero_field_virial_and_pohozaev() {
        let spec = presets::two_wave(3, 0.6, 1.0, 0.0).unwrap();
        let g = RadialGrid::new(3, 256, 20.0).unwrap();
        let cf = build_cutoff(&g, 5.0).unwrap();
        let u = Field::zeros(g, 2);
        let s = virial_sample(&spec, &u, &cf, 0.0).unwrap();
        assert_eq!((s.v, s.r, s.rhs), (0.0, 0.0, 0.0));
        let t = pohozaev_functional(&spec, &u).unwrap();
        assert_eq!((t.direct, t.recombined), (0.0, 0.0));
        let snaps: Vec<_> = (0..4).map(|i| (i as f64 * 0.1, u.clone())).collect();
        assert_eq!(virial_consistency(&spec, &snaps, &cf).unwrap(), 0.0);
        assert!(virial_consistency(&spec, &snaps[..2], &cf).is_err());
    }

    #[test]
    fn real_field_has_no_virial_flux() {
        let spec = presets::two_wave(3, 0.6, 1.0, 0.0).unwrap();
        let g = RadialGrid::new(3, 512, 20.0).unwrap();
        let cf = build_cutoff(&g, 5.0).unwrap();
        let u =
            Field::from_radial_fn(g, 2, |k, r| Complex64::new((1.0 + k as f64) * (-r * r / 4.0).exp(), 0.0));
        let s = virial_sample(&spec, &u, &cf, 0.0).unwrap();
        assert!(s.v > 0.0);
        assert_eq!(s.r, 0.0);
        assert_eq!(s.rhs, 0.0);
    }

    #[test]
    fn quadratic_phase_flux() {
        // u = e^{−r²/2 + iμr²}: Im(∂_r u ū) = 2μr|u|², so with φ' = 2r
        // inside the support R = 2Σα_k ∫ 4μr²|u|²
        let spec = presets::two_wave(3, 0.6, 1.0, 0.0).unwrap();
        let g = RadialGrid::new(3, 4096, 40.0).unwrap();
        let cf = build_cutoff(&g, 10.0).unwrap();
        let mu = 0.3;
        let u = Field::from_radial_fn(g.clone(), 2, |_, r| {
            Complex64::from_polar((-r * r / 2.0).exp(), mu * r * r)
        });
        let s = virial_sample(&spec, &u, &cf, 0.0).unwrap();
        // ∫ r²e^{−r²} d³x = 4π · 3√π/8
        let moment = 4.0 * std::f64::consts::PI * 3.0 * std::f64::consts::PI.sqrt() / 8.0;
        let expected = 2.0 * (2.0 + 2.0) * 4.0 * mu * moment;
        assert!(((s.r - expected) / expected).abs() < 1e-3, "{} vs {}", s.r, expected);
    }

    #[test]
    fn pohozaev_forms_agree() {
        let spec = presets::two_wave(3, 0.6, 1.0, 0.5).unwrap();
        let g = RadialGrid::new(3, 512, 20.0).unwrap();
        let u = Field::from_radial_fn(g, 2, |k, r| Complex64::new((2.0 + k as f64) * (-r * r).exp(), 0.3));
        let t = pohozaev_functional(&spec, &u).unwrap();
        assert!(t.relative_gap() < 1e-10);
    }
}
