//! Charge, energy and its parts, action, the Weinstein quotient, the
//! criticality index, Pohozaev residuals and the sharp constants.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::groundstate::GroundStateResult;
use crate::interaction::SystemSpec;

/// Sub/critical/super relative to a conserved-quantity scaling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

/// Position of `(n, b)` relative to the `L²` and `Ḣ¹` scalings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Criticality {
    pub l2: Regime,
    pub h1: Regime,
}

impl Criticality {
    pub fn is_intercritical(&self) -> bool {
        self.l2 == Regime::Supercritical && self.h1 == Regime::Subcritical
    }

    pub fn label(&self) -> &'static str {
        match (self.l2, self.h1) {
            (Regime::Subcritical, _) => "L2-subcritical",
            (Regime::Critical, _) => "L2-critical",
            (Regime::Supercritical, Regime::Subcritical) => "intercritical",
            (Regime::Supercritical, Regime::Critical) => "energy-critical",
            (Regime::Supercritical, Regime::Supercritical) => "energy-supercritical",
        }
    }
}

impl fmt::Display for Criticality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

const CRITICAL_EPS: f64 = 1e-12;

/// `s_c = (n + 2b − 4)/2` and the regime it places `(n, b)` in.
pub fn critical_index(n: usize, b: f64) -> (f64, Criticality) {
    let d = n as f64 + 2.0 * b;
    let l2 = if (d - 4.0).abs() <= CRITICAL_EPS {
        Regime::Critical
    } else if d < 4.0 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    };
    let h1 = if (d - 6.0).abs() <= CRITICAL_EPS {
        Regime::Critical
    } else if d < 6.0 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    };
    ((d - 4.0) / 2.0, Criticality { l2, h1 })
}

/// Every scalar functional of a field.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalReport {
    /// `Σ α_k σ_k ‖u_k‖²`
    pub q: f64,
    /// `Σ γ_k ‖∇u_k‖²`
    pub k: f64,
    /// `Σ β_k ‖u_k‖²`
    pub l: f64,
    /// `Re ∫ |x|^{-b} F(u)`
    pub p: f64,
    /// `K + L − 2P`
    pub e: f64,
    pub omega: Option<f64>,
    /// Action at `omega`.
    pub action: Option<f64>,
    /// Weinstein quotient at `omega`; absent when `P = 0`.
    pub weinstein: Option<f64>,
    pub s_c: f64,
    pub criticality: Criticality,
    pub l2_sq: Vec<f64>,
    pub gradient_sq: Vec<f64>,
}

impl fmt::Display for FunctionalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x:.16e}"));
        writeln!(f, "Q = {:.16e}", self.q)?;
        writeln!(f, "K = {:.16e}", self.k)?;
        writeln!(f, "L = {:.16e}", self.l)?;
        writeln!(f, "P = {:.16e}", self.p)?;
        writeln!(f, "E = {:.16e}", self.e)?;
        writeln!(f, "omega = {}", opt(self.omega))?;
        writeln!(f, "I = {}", opt(self.action))?;
        writeln!(f, "J = {}", opt(self.weinstein))?;
        writeln!(f, "s_c = {:.16e}", self.s_c)?;
        writeln!(f, "criticality = {}", self.criticality)?;
        for (k, (a, g)) in self.l2_sq.iter().zip(&self.gradient_sq).enumerate() {
            writeln!(f, "l2_sq_{} = {a:.16e}", k + 1)?;
            writeln!(f, "grad_sq_{} = {g:.16e}", k + 1)?;
        }
        Ok(())
    }
}

/// Cached quadrature weights for repeated evaluation on one grid.
#[derive(Clone, Debug)]
pub struct Evaluator<'a> {
    spec: &'a SystemSpec,
    grid: Grid,
    volumes: Vec<f64>,
    singular: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(spec: &'a SystemSpec, grid: &Grid) -> Result<Self> {
        if grid.n() != spec.n() {
            return Err(Error::InvalidArgument(format!(
                "grid dimension {} does not match system dimension {}",
                grid.n(),
                spec.n()
            )));
        }
        Ok(Self {
            spec,
            grid: grid.clone(),
            volumes: grid.volumes(),
            singular: grid.singular_volumes(spec.b())?,
        })
    }

    pub fn spec(&self) -> &SystemSpec {
        self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Cell integrals of `|x|^{-b}`.
    pub fn singular_volumes(&self) -> &[f64] {
        &self.singular
    }

    pub(crate) fn check(&self, field: &Field) -> Result<()> {
        if field.l() != self.spec.l() {
            return Err(Error::LengthMismatch { expected: self.spec.l(), got: field.l() });
        }
        if field.grid() != &self.grid {
            return Err(Error::InvalidArgument("field lives on a different grid".into()));
        }
        Ok(())
    }

    pub fn l2_sq(&self, field: &Field) -> Vec<f64> {
        field
            .components()
            .iter()
            .map(|c| c.iter().zip(&self.volumes).map(|(z, v)| v * z.norm_sqr()).sum())
            .collect()
    }

    pub fn gradient_sq(&self, field: &Field) -> Vec<f64> {
        field.components().iter().map(|c| self.grid.gradient_norm_sq(c)).collect()
    }

    pub fn potential(&self, field: &Field) -> f64 {
        let comps = field.components();
        let mut z = vec![num_complex::Complex64::new(0.0, 0.0); comps.len()];
        let mut total = 0.0;
        for (j, w) in self.singular.iter().enumerate() {
            for (k, c) in comps.iter().enumerate() {
                z[k] = c[j];
            }
            total += w * self.spec.eval_potential(&z).re;
        }
        total
    }

    pub fn report(&self, field: &Field) -> Result<FunctionalReport> {
        self.check(field)?;
        let s = self.spec;
        let l2_sq = self.l2_sq(field);
        let gradient_sq = self.gradient_sq(field);
        let q = weighted(&l2_sq, s.alpha().iter().zip(s.sigma()).map(|(a, b)| a * b));
        let k = weighted(&gradient_sq, s.gamma().iter().copied());
        let l = weighted(&l2_sq, s.beta().iter().copied());
        let p = self.potential(field);
        let (s_c, criticality) = critical_index(s.n(), s.b());
        Ok(FunctionalReport {
            q,
            k,
            l,
            p,
            e: k + l - 2.0 * p,
            omega: None,
            action: None,
            weinstein: None,
            s_c,
            criticality,
            l2_sq,
            gradient_sq,
        })
    }

    /// Report including the `ω`-dependent quantities.
    pub fn report_at(&self, field: &Field, omega: f64) -> Result<FunctionalReport> {
        let masses = self.spec.positive_masses(omega)?;
        let mut rep = self.report(field)?;
        let script_q = weighted(&rep.l2_sq, masses.iter().copied());
        rep.omega = Some(omega);
        rep.action = Some(0.5 * (rep.k + script_q) - rep.p);
        rep.weinstein = weinstein_quotient(self.spec, script_q, rep.k, rep.p);
        Ok(rep)
    }

    /// `𝒬 = Σ (α_k σ_k ω + β_k) ‖u_k‖²`.
    pub fn script_q(&self, field: &Field, omega: f64) -> Result<f64> {
        self.check(field)?;
        let masses = self.spec.positive_masses(omega)?;
        Ok(weighted(&self.l2_sq(field), masses.iter().copied()))
    }
}

fn weighted(values: &[f64], weights: impl Iterator<Item = f64>) -> f64 {
    values.iter().zip(weights).map(|(v, w)| v * w).sum()
}

fn weinstein_quotient(spec: &SystemSpec, script_q: f64, k: f64, p: f64) -> Option<f64> {
    if p == 0.0 {
        return None;
    }
    let d = spec.scaling_degree();
    Some(script_q.powf((6.0 - d) / 4.0) * k.powf(d / 4.0) / p)
}

/// `Σ α_k σ_k ‖u_k‖²`.
pub fn charge(spec: &SystemSpec, field: &Field) -> Result<f64> {
    Ok(Evaluator::new(spec, field.grid())?.report(field)?.q)
}

pub fn energy(spec: &SystemSpec, field: &Field) -> Result<FunctionalReport> {
    Evaluator::new(spec, field.grid())?.report(field)
}

/// `I = ½[K + Σ b_k ‖u_k‖²] − P` with `b_k = α_k σ_k ω + β_k`.
pub fn action(spec: &SystemSpec, field: &Field, omega: f64) -> Result<f64> {
    Ok(Evaluator::new(spec, field.grid())?.report_at(field, omega)?.action.expect("set by report_at"))
}

/// `J = 𝒬^{(6−n−2b)/4} K^{(n+2b)/4} / P`, absent when `P = 0`.
pub fn weinstein(spec: &SystemSpec, field: &Field, omega: f64) -> Result<Option<f64>> {
    Ok(Evaluator::new(spec, field.grid())?.report_at(field, omega)?.weinstein)
}

/// Residuals of `P = 2I`, `K = (n+2b)I`, `𝒬 = (6−n−2b)I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PohozaevResiduals {
    pub p: f64,
    pub k: f64,
    pub q: f64,
    /// Set when `I = 0`; the residuals are then absolute.
    pub absolute: bool,
}

impl PohozaevResiduals {
    pub fn max(&self) -> f64 {
        self.p.max(self.k).max(self.q)
    }
}

pub fn pohozaev_residuals(spec: &SystemSpec, field: &Field, omega: f64) -> Result<PohozaevResiduals> {
    let ev = Evaluator::new(spec, field.grid())?;
    let rep = ev.report_at(field, omega)?;
    let script_q = ev.script_q(field, omega)?;
    Ok(pohozaev_from_parts(spec, rep.k, script_q, rep.p))
}

pub(crate) fn pohozaev_from_parts(spec: &SystemSpec, k: f64, script_q: f64, p: f64) -> PohozaevResiduals {
    let d = spec.scaling_degree();
    let i = 0.5 * (k + script_q) - p;
    if i == 0.0 {
        return PohozaevResiduals { p: p.abs(), k: k.abs(), q: script_q.abs(), absolute: true };
    }
    let rel = |num: f64, den: f64| if den != 0.0 { (num / den).abs() } else { num.abs() };
    PohozaevResiduals {
        p: rel(p - 2.0 * i, i),
        k: rel(k - d * i, k),
        q: rel(script_q - (6.0 - d) * i, script_q),
        absolute: false,
    }
}

/// `ξ₁ = ½ (n+2b)^{(n+2b)/4} (6−n−2b)^{(4−n−2b)/4} 𝒬^{1/2}`.
pub fn xi1_closed_form(n: usize, b: f64, script_q: f64) -> f64 {
    let d = n as f64 + 2.0 * b;
    0.5 * d.powf(d / 4.0) * (6.0 - d).powf((4.0 - d) / 4.0) * script_q.sqrt()
}

/// Optimal Gagliardo–Nirenberg constant
/// `2 (6−n−2b)^{(n+2b−4)/4} / ((n+2b)^{(n+2b)/4} 𝒬^{1/2})`.
pub fn optimal_constant(n: usize, b: f64, script_q: f64) -> f64 {
    let d = n as f64 + 2.0 * b;
    2.0 * (6.0 - d).powf((d - 4.0) / 4.0) / (d.powf(d / 4.0) * script_q.sqrt())
}

/// Thresholds read off a ground state.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSet {
    pub n: usize,
    pub b: f64,
    pub omega: f64,
    pub q: f64,
    pub script_q: f64,
    pub k: f64,
    pub p: f64,
    /// `ℰ(ψ) = K(ψ) − 2P(ψ)`
    pub e_script: f64,
    pub xi1: f64,
    pub xi1_direct: f64,
    pub xi1_gap: f64,
    pub c_op: f64,
    pub c_op_direct: f64,
}

impl fmt::Display for ThresholdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "b = {}", self.b)?;
        writeln!(f, "omega = {}", self.omega)?;
        writeln!(f, "Q = {:.16e}", self.q)?;
        writeln!(f, "script_Q = {:.16e}", self.script_q)?;
        writeln!(f, "K = {:.16e}", self.k)?;
        writeln!(f, "P = {:.16e}", self.p)?;
        writeln!(f, "E_script = {:.16e}", self.e_script)?;
        writeln!(f, "xi1 = {:.16e}", self.xi1)?;
        writeln!(f, "xi1_direct = {:.16e}", self.xi1_direct)?;
        writeln!(f, "xi1_gap = {:.6e}", self.xi1_gap)?;
        writeln!(f, "C_op = {:.16e}", self.c_op)?;
        writeln!(f, "C_op_direct = {:.16e}", self.c_op_direct)
    }
}

pub fn thresholds_from_profile(spec: &SystemSpec, psi: &Field, omega: f64) -> Result<ThresholdSet> {
    let ev = Evaluator::new(spec, psi.grid())?;
    let rep = ev.report_at(psi, omega)?;
    let script_q = ev.script_q(psi, omega)?;
    let direct = rep
        .weinstein
        .ok_or_else(|| Error::InvalidArgument("profile has P = 0; no Weinstein quotient".into()))?;
    let xi1 = xi1_closed_form(spec.n(), spec.b(), script_q);
    Ok(ThresholdSet {
        n: spec.n(),
        b: spec.b(),
        omega,
        q: rep.q,
        script_q,
        k: rep.k,
        p: rep.p,
        e_script: rep.k - 2.0 * rep.p,
        xi1,
        xi1_direct: direct,
        xi1_gap: ((xi1 - direct) / xi1).abs(),
        c_op: optimal_constant(spec.n(), spec.b(), script_q),
        c_op_direct: 1.0 / direct,
    })
}

pub fn thresholds_from_groundstate(spec: &SystemSpec, gs: &GroundStateResult) -> Result<ThresholdSet> {
    thresholds_from_profile(spec, &gs.psi, gs.omega)
}
