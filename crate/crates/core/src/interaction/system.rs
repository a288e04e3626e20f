use num_complex::Complex64;

use super::{CompiledPolynomial, InteractionPotential, Monomial, Polynomial};
use crate::error::{Error, Result};

/// Per-component coefficients of the system
/// `i α_k ∂_t u_k + γ_k Δu_k − β_k u_k + |x|^{-b} f_k(u) = 0`
/// together with the gauge weights `σ_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub alpha: Vec<f64>,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// One summand `F_s` of a supermodular decomposition `F = Σ F_s`, acting on
/// the listed components (zero-based) of the positive cone.
#[derive(Clone, Debug)]
pub struct SupermodularPiece {
    pub potential: InteractionPotential,
    pub variables: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SystemSpec {
    name: Option<String>,
    n: usize,
    b: f64,
    coefficients: Coefficients,
    potential: InteractionPotential,
    nonlinearities: Vec<Polynomial>,
    compiled_f: Vec<CompiledPolynomial>,
    compiled_potential: CompiledPolynomial,
    decomposition: Option<Vec<SupermodularPiece>>,
}

impl SystemSpec {
    pub fn new(
        n: usize,
        b: f64,
        coefficients: Coefficients,
        potential: InteractionPotential,
    ) -> Result<Self> {
        let l = potential.l();
        if !(2..=5).contains(&n) {
            return Err(Error::InvalidSystem(format!("dimension n = {n} outside 2..=5")));
        }
        let b_max = f64::min(2.0, n as f64 / 2.0);
        if !(b > 0.0 && b < b_max) {
            return Err(Error::InvalidSystem(format!("b = {b} outside (0, {b_max})")));
        }
        let Coefficients { alpha, gamma, beta, sigma } = &coefficients;
        for (name, v) in [("alpha", alpha), ("gamma", gamma), ("beta", beta), ("sigma", sigma)] {
            if v.len() != l {
                return Err(Error::InvalidSystem(format!("{name} has {} entries, expected {l}", v.len())));
            }
            let ok = if name == "beta" {
                v.iter().all(|&x| x >= 0.0 && x.is_finite())
            } else {
                v.iter().all(|&x| x > 0.0 && x.is_finite())
            };
            if !ok {
                return Err(Error::InvalidSystem(format!("{name} = {v:?} out of range")));
            }
        }
        let nonlinearities = potential.derive_nonlinearities();
        let compiled_f = nonlinearities.iter().map(Polynomial::compile).collect();
        let compiled_potential = potential.as_polynomial().compile();
        Ok(Self {
            name: None,
            n,
            b,
            coefficients,
            potential,
            nonlinearities,
            compiled_f,
            compiled_potential,
            decomposition: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Attaches a supermodular decomposition used by the H8 check.
    pub fn with_decomposition(mut self, pieces: Vec<SupermodularPiece>) -> Result<Self> {
        for p in &pieces {
            if p.potential.l() != self.l() || p.variables.iter().any(|&v| v >= self.l()) {
                return Err(Error::InvalidSystem("decomposition piece does not match l".into()));
            }
        }
        self.decomposition = Some(pieces);
        Ok(self)
    }

    pub fn with_beta(&self, beta: Vec<f64>) -> Result<Self> {
        let coefficients = Coefficients { beta, ..self.coefficients.clone() };
        self.rebuild(coefficients)
    }

    pub fn with_sigma(&self, sigma: Vec<f64>) -> Result<Self> {
        let coefficients = Coefficients { sigma, ..self.coefficients.clone() };
        self.rebuild(coefficients)
    }

    pub fn with_zero_beta(&self) -> Self {
        self.with_beta(vec![0.0; self.l()]).expect("zero beta is always valid")
    }

    fn rebuild(&self, coefficients: Coefficients) -> Result<Self> {
        let mut out = Self::new(self.n, self.b, coefficients, self.potential.clone())?;
        out.name = self.name.clone();
        out.decomposition = self.decomposition.clone();
        Ok(out)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn l(&self) -> usize {
        self.potential.l()
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    pub fn alpha(&self) -> &[f64] {
        &self.coefficients.alpha
    }

    pub fn gamma(&self) -> &[f64] {
        &self.coefficients.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.coefficients.beta
    }

    pub fn sigma(&self) -> &[f64] {
        &self.coefficients.sigma
    }

    pub fn potential(&self) -> &InteractionPotential {
        &self.potential
    }

    pub fn nonlinearities(&self) -> &[Polynomial] {
        &self.nonlinearities
    }

    pub fn decomposition(&self) -> Option<&[SupermodularPiece]> {
        self.decomposition.as_deref()
    }

    /// `n + 2b`, the exponent that governs every scaling law of the system.
    pub fn scaling_degree(&self) -> f64 {
        self.n as f64 + 2.0 * self.b
    }

    /// `b_k = α_k σ_k ω + β_k`.
    pub fn masses(&self, omega: f64) -> Vec<f64> {
        let c = &self.coefficients;
        (0..self.l()).map(|k| c.alpha[k] * c.sigma[k] * omega + c.beta[k]).collect()
    }

    /// Like [`masses`](Self::masses) but rejects any `b_k ≤ 0`.
    pub fn positive_masses(&self, omega: f64) -> Result<Vec<f64>> {
        let masses = self.masses(omega);
        if let Some((index, &value)) = masses.iter().enumerate().find(|(_, &m)| m <= 0.0) {
            return Err(Error::NonPositiveMass { index, value });
        }
        Ok(masses)
    }

    #[inline]
    pub(crate) fn eval_f(&self, k: usize, z: &[Complex64]) -> Complex64 {
        self.compiled_f[k].eval(z)
    }

    #[inline]
    pub(crate) fn eval_f_real(&self, k: usize, y: &[f64]) -> f64 {
        self.compiled_f[k].eval_real(y)
    }

    #[inline]
    pub(crate) fn eval_potential(&self, z: &[Complex64]) -> Complex64 {
        self.compiled_potential.eval(z)
    }

    #[inline]
    pub(crate) fn eval_potential_real(&self, y: &[f64]) -> f64 {
        self.compiled_potential.eval_real(y)
    }
}

fn term(coeff: f64, zpow: &[u32], cpow: &[u32]) -> Monomial {
    Monomial::new(Complex64::new(coeff, 0.0), zpow.to_vec(), cpow.to_vec())
}

fn piece(l: usize, t: Monomial, variables: Vec<usize>) -> SupermodularPiece {
    SupermodularPiece {
        potential: InteractionPotential::new(l, vec![t]).expect("degree-3 preset term"),
        variables,
    }
}

/// Built-in systems in canonical form, with `f_k` derived from `F`.
pub mod presets {
    use super::*;

    pub const NAMES: [&str; 4] = ["two_wave", "three_wave_a", "three_wave_b", "scalar"];

    /// Free parameters of the presets. Unset slots take the preset default.
    #[derive(Clone, Copy, Debug, Default, PartialEq)]
    pub struct PresetParams {
        pub kappa: Option<f64>,
        pub beta_tilde: Option<f64>,
        pub beta_tilde1: Option<f64>,
    }

    pub fn by_name(name: &str, n: usize, b: f64, params: PresetParams) -> Result<SystemSpec> {
        match name {
            "two_wave" => two_wave(n, b, params.kappa.unwrap_or(1.0), params.beta_tilde.unwrap_or(0.0)),
            "three_wave_a" => {
                three_wave_a(n, b, params.beta_tilde.unwrap_or(1.0), params.beta_tilde1.unwrap_or(1.0))
            }
            "three_wave_b" => {
                three_wave_b(n, b, params.beta_tilde.unwrap_or(1.0), params.beta_tilde1.unwrap_or(1.0))
            }
            "scalar" => scalar(n, b),
            other => {
                Err(Error::InvalidSystem(format!("unknown preset '{other}' (expected one of {NAMES:?})")))
            }
        }
    }

    /// Degenerate two-wave (FF/SH) interaction, `F = z̄₁² z₂`.
    ///
    /// Both equations are written with `α = 2` so that `f₁ = 2 z̄₁ z₂` comes out
    /// of the Wirtinger derivative unchanged; `SH` detuning enters as
    /// `β₂ = 2 β̃`.
    pub fn two_wave(n: usize, b: f64, kappa: f64, beta_tilde: f64) -> Result<SystemSpec> {
        let coefficients = Coefficients {
            alpha: vec![2.0, 2.0],
            gamma: vec![1.0, kappa],
            beta: vec![0.0, 2.0 * beta_tilde],
            sigma: vec![1.0, 2.0],
        };
        let t = term(1.0, &[0, 1], &[2, 0]);
        SystemSpec::new(n, b, coefficients, InteractionPotential::new(2, vec![t.clone()])?)?
            .with_name("two_wave")
            .with_decomposition(vec![piece(2, t, vec![0, 1])])
    }

    /// Three-wave model with `F = ½ z̄₁ (z₂² + z₃²)`.
    pub fn three_wave_a(n: usize, b: f64, beta: f64, beta1: f64) -> Result<SystemSpec> {
        let coefficients = Coefficients {
            alpha: vec![2.0, 1.0, 1.0],
            gamma: vec![1.0, 1.0, 1.0],
            beta: vec![beta, beta1, 1.0],
            sigma: vec![2.0, 1.0, 1.0],
        };
        let t1 = term(0.5, &[0, 2, 0], &[1, 0, 0]);
        let t2 = term(0.5, &[0, 0, 2], &[1, 0, 0]);
        SystemSpec::new(n, b, coefficients, InteractionPotential::new(3, vec![t1.clone(), t2.clone()])?)?
            .with_name("three_wave_a")
            .with_decomposition(vec![piece(3, t1, vec![0, 1]), piece(3, t2, vec![0, 2])])
    }

    /// Three-wave model with `F = ½ z₁² z̄₂ + z₁ z₂ z̄₃`.
    pub fn three_wave_b(n: usize, b: f64, beta: f64, beta1: f64) -> Result<SystemSpec> {
        let coefficients = Coefficients {
            alpha: vec![1.0, 2.0, 3.0],
            gamma: vec![1.0, 1.0, 1.0],
            beta: vec![1.0, beta, beta1],
            sigma: vec![1.0, 2.0, 3.0],
        };
        let t1 = term(0.5, &[2, 0, 0], &[0, 1, 0]);
        let t2 = term(1.0, &[1, 1, 0], &[0, 0, 1]);
        SystemSpec::new(n, b, coefficients, InteractionPotential::new(3, vec![t1.clone(), t2.clone()])?)?
            .with_name("three_wave_b")
            .with_decomposition(vec![piece(3, t1, vec![0, 1]), piece(3, t2, vec![0, 1, 2])])
    }

    /// Single-component test case with `F = z³/3`, so `f(ψ) = ψ²` on real
    /// profiles. No positive gauge weight makes `Re F` phase invariant, so this
    /// system is only meaningful for the elliptic problem.
    pub fn scalar(n: usize, b: f64) -> Result<SystemSpec> {
        let coefficients =
            Coefficients { alpha: vec![1.0], gamma: vec![1.0], beta: vec![0.0], sigma: vec![1.0] };
        let t = term(1.0 / 3.0, &[3], &[0]);
        SystemSpec::new(n, b, coefficients, InteractionPotential::new(1, vec![t.clone()])?)?
            .with_name("scalar")
            .with_decomposition(vec![piece(1, t, vec![0])])
    }
}
