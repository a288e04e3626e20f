//! Cubic interaction potentials `F(z, z̄)` and the quadratic nonlinearities
//! `f_k = ∂F/∂z̄_k + conj(∂F/∂z_k)` derived from them.
//!
//! Polynomials are kept in collected form: one term per distinct pair of
//! exponent vectors, zero coefficients dropped.

mod hypotheses;
mod system;

pub use hypotheses::{
    charge_identity_residual, check_hypotheses, gauge_residual, Hypothesis, HypothesisCheck,
    HypothesisReport, HypothesisStatus, CHARGE_IDENTITY_TOLERANCE, HYPOTHESIS_TOLERANCE,
};
pub use system::{presets, Coefficients, SupermodularPiece, SystemSpec};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `coeff · Π z_j^{zpow_j} · Π z̄_j^{cpow_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: Complex64,
    pub zpow: Vec<u32>,
    pub cpow: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: Complex64, zpow: Vec<u32>, cpow: Vec<u32>) -> Self {
        Self { coeff, zpow, cpow }
    }

    pub fn degree(&self) -> u32 {
        self.zpow.iter().sum::<u32>() + self.cpow.iter().sum::<u32>()
    }

    fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = self.coeff;
        for (j, zj) in z.iter().enumerate() {
            for _ in 0..self.zpow[j] {
                acc *= zj;
            }
            for _ in 0..self.cpow[j] {
                acc *= zj.conj();
            }
        }
        acc
    }

    /// `|coeff| · Π |z_j|^{zpow_j + cpow_j}`, an upper bound for `|self(z)|`.
    fn majorant(&self, z: &[Complex64]) -> f64 {
        let mut acc = self.coeff.norm();
        for (j, zj) in z.iter().enumerate() {
            acc *= zj.norm().powi((self.zpow[j] + self.cpow[j]) as i32);
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{:+}i)", self.coeff.re, self.coeff.im)?;
        for (j, (&p, &q)) in self.zpow.iter().zip(&self.cpow).enumerate() {
            if p > 0 {
                write!(f, "·z{}^{}", j + 1, p)?;
            }
            if q > 0 {
                write!(f, "·z̄{}^{}", j + 1, q)?;
            }
        }
        Ok(())
    }
}

/// A polynomial in `(z, z̄) ∈ ℂ^l × ℂ^l` with collected terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    l: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero(l: usize) -> Self {
        Self { l, terms: Vec::new() }
    }

    /// Collects like terms and drops exact zeros. Exponent vectors must have
    /// length `l`.
    pub fn from_terms(l: usize, terms: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        let mut collected: BTreeMap<(Vec<u32>, Vec<u32>), Complex64> = BTreeMap::new();
        for term in terms {
            if term.zpow.len() != l {
                return Err(Error::LengthMismatch { expected: l, got: term.zpow.len() });
            }
            if term.cpow.len() != l {
                return Err(Error::LengthMismatch { expected: l, got: term.cpow.len() });
            }
            *collected.entry((term.zpow, term.cpow)).or_default() += term.coeff;
        }
        let terms = collected
            .into_iter()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .map(|((zpow, cpow), coeff)| Monomial { coeff, zpow, cpow })
            .collect();
        Ok(Self { l, terms })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.l {
            return Err(Error::LengthMismatch { expected: self.l, got: z.len() });
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|t| t.eval_unchecked(z)).sum()
    }

    pub(crate) fn majorant(&self, z: &[Complex64]) -> f64 {
        self.terms.iter().map(|t| t.majorant(z)).sum()
    }

    /// Sum of coefficient moduli.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// `∂/∂z_m` in the Wirtinger sense.
    pub fn d_z(&self, m: usize) -> Polynomial {
        let terms = self.terms.iter().filter(|t| t.zpow[m] > 0).map(|t| {
            let mut zpow = t.zpow.clone();
            zpow[m] -= 1;
            Monomial { coeff: t.coeff * f64::from(t.zpow[m]), zpow, cpow: t.cpow.clone() }
        });
        Self::from_terms(self.l, terms).expect("exponent lengths preserved")
    }

    /// `∂/∂z̄_m` in the Wirtinger sense.
    pub fn d_zbar(&self, m: usize) -> Polynomial {
        let terms = self.terms.iter().filter(|t| t.cpow[m] > 0).map(|t| {
            let mut cpow = t.cpow.clone();
            cpow[m] -= 1;
            Monomial { coeff: t.coeff * f64::from(t.cpow[m]), zpow: t.zpow.clone(), cpow }
        });
        Self::from_terms(self.l, terms).expect("exponent lengths preserved")
    }

    /// The polynomial `z ↦ conj(p(z))`.
    pub fn conj(&self) -> Polynomial {
        let terms = self.terms.iter().map(|t| Monomial {
            coeff: t.coeff.conj(),
            zpow: t.cpow.clone(),
            cpow: t.zpow.clone(),
        });
        Self::from_terms(self.l, terms).expect("exponent lengths preserved")
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.l, other.l);
        Self::from_terms(self.l, self.terms.iter().chain(&other.terms).cloned())
            .expect("exponent lengths preserved")
    }

    pub fn scale(&self, factor: f64) -> Polynomial {
        let terms = self.terms.iter().map(|t| Monomial { coeff: t.coeff * factor, ..t.clone() });
        Self::from_terms(self.l, terms).expect("exponent lengths preserved")
    }

    pub(crate) fn compile(&self) -> CompiledPolynomial {
        CompiledPolynomial::new(self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// A homogeneous polynomial of degree three: the interaction potential `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionPotential {
    poly: Polynomial,
}

impl InteractionPotential {
    pub fn new(l: usize, terms: Vec<Monomial>) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidSystem("component count l must be at least 1".into()));
        }
        for (index, t) in terms.iter().enumerate() {
            if t.zpow.len() != l || t.cpow.len() != l {
                return Err(Error::LengthMismatch { expected: l, got: t.zpow.len().min(t.cpow.len()) });
            }
            let degree = t.degree();
            if degree != 3 {
                return Err(Error::MalformedDegree { index, degree, expected: 3 });
            }
        }
        Ok(Self { poly: Polynomial::from_terms(l, terms)? })
    }

    pub fn zero(l: usize) -> Self {
        Self { poly: Polynomial::zero(l) }
    }

    pub fn l(&self) -> usize {
        self.poly.l
    }

    pub fn terms(&self) -> &[Monomial] {
        self.poly.terms()
    }

    pub fn as_polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        self.poly.eval(z)
    }

    /// `f_k = ∂F/∂z̄_k + conj(∂F/∂z_k)` for every component.
    pub fn derive_nonlinearities(&self) -> Vec<Polynomial> {
        (0..self.l()).map(|k| self.poly.d_zbar(k).add(&self.poly.d_z(k).conj())).collect()
    }
}

impl fmt::Display for InteractionPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

/// Evaluates a nonlinearity `f_k` at `z`.
pub fn eval_nonlinearity(f_k: &Polynomial, z: &[Complex64]) -> Result<Complex64> {
    f_k.eval(z)
}

/// Flattened homogeneous polynomial for the per-node hot loops.
#[derive(Clone, Debug)]
pub(crate) struct CompiledPolynomial {
    coeffs: Vec<Complex64>,
    // (component index, conjugated?) repeated `degree` times per term
    factors: Vec<(usize, bool)>,
    degree: usize,
}

impl CompiledPolynomial {
    fn new(p: &Polynomial) -> Self {
        let degree = p.terms.first().map_or(0, |t| t.degree() as usize);
        let mut coeffs = Vec::with_capacity(p.terms.len());
        let mut factors = Vec::with_capacity(p.terms.len() * degree);
        for t in &p.terms {
            assert_eq!(t.degree() as usize, degree, "compiled polynomials must be homogeneous");
            coeffs.push(t.coeff);
            for j in 0..p.l {
                factors.extend(std::iter::repeat_n((j, false), t.zpow[j] as usize));
                factors.extend(std::iter::repeat_n((j, true), t.cpow[j] as usize));
            }
        }
        Self { coeffs, factors, degree }
    }

    #[inline]
    pub(crate) fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let mut acc = *c;
            for &(j, conj) in &self.factors[i * self.degree..(i + 1) * self.degree] {
                acc *= if conj { z[j].conj() } else { z[j] };
            }
            sum += acc;
        }
        sum
    }

    /// Real-cone evaluation; the imaginary part is discarded.
    #[inline]
    pub(crate) fn eval_real(&self, y: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let mut acc = c.re;
            for &(j, _) in &self.factors[i * self.degree..(i + 1) * self.degree] {
                acc *= y[j];
            }
            sum += acc;
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_wave_potential() -> InteractionPotential {
        InteractionPotential::new(2, vec![Monomial::new(c(1.0, 0.0), vec![0, 1], vec![2, 0])]).unwrap()
    }

    #[test]
    fn two_wave_nonlinearities_carry_factor_two() {
        let f = two_wave_potential().derive_nonlinearities();
        let f1 = Polynomial::from_terms(2, [Monomial::new(c(2.0, 0.0), vec![0, 1], vec![1, 0])]).unwrap();
        let f2 = Polynomial::from_terms(2, [Monomial::new(c(1.0, 0.0), vec![2, 0], vec![0, 0])]).unwrap();
        assert_eq!(f[0], f1);
        assert_eq!(f[1], f2);
    }

    #[test]
    fn zero_potential_gives_zero_nonlinearities() {
        for f in InteractionPotential::zero(3).derive_nonlinearities() {
            assert!(f.is_zero());
        }
    }

    #[test]
    fn three_wave_a_nonlinearities() {
        // F = ½ z̄₁(z₂² + z₃²)
        let pot = InteractionPotential::new(
            3,
            vec![
                Monomial::new(c(0.5, 0.0), vec![0, 2, 0], vec![1, 0, 0]),
                Monomial::new(c(0.5, 0.0), vec![0, 0, 2], vec![1, 0, 0]),
            ],
        )
        .unwrap();
        let f = pot.derive_nonlinearities();
        let expect = [
            Polynomial::from_terms(
                3,
                [
                    Monomial::new(c(0.5, 0.0), vec![0, 2, 0], vec![0, 0, 0]),
                    Monomial::new(c(0.5, 0.0), vec![0, 0, 2], vec![0, 0, 0]),
                ],
            )
            .unwrap(),
            Polynomial::from_terms(3, [Monomial::new(c(1.0, 0.0), vec![1, 0, 0], vec![0, 1, 0])]).unwrap(),
            Polynomial::from_terms(3, [Monomial::new(c(1.0, 0.0), vec![1, 0, 0], vec![0, 0, 1])]).unwrap(),
        ];
        assert_eq!(f, expect);
    }

    #[test]
    fn malformed_degree_names_the_term() {
        let err = InteractionPotential::new(
            2,
            vec![
                Monomial::new(c(1.0, 0.0), vec![0, 1], vec![2, 0]),
                Monomial::new(c(1.0, 0.0), vec![1, 1], vec![0, 0]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::MalformedDegree { index: 1, degree: 2, expected: 3 }));
    }

    #[test]
    fn potential_evaluation() {
        let f = two_wave_potential();
        assert_eq!(f.eval(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(), c(1.0, 0.0));
        assert_eq!(f.eval(&[c(0.0, 1.0), c(1.0, 0.0)]).unwrap(), c(-1.0, 0.0));
        assert_eq!(f.eval(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), c(0.0, 0.0));
        assert!(matches!(f.eval(&[c(1.0, 0.0)]), Err(Error::LengthMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn nonlinearity_evaluation() {
        let f = two_wave_potential().derive_nonlinearities();
        assert_eq!(eval_nonlinearity(&f[1], &[c(2.0, 0.0), c(5.0, 0.0)]).unwrap(), c(4.0, 0.0));
        assert_eq!(eval_nonlinearity(&f[0], &[c(1.0, 1.0), c(1.0, 0.0)]).unwrap(), c(2.0, -2.0));
        for fk in &f {
            assert_eq!(fk.eval(&[c(0.0, 0.0); 2]).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn compiled_matches_symbolic() {
        let f = two_wave_potential().derive_nonlinearities();
        let z = [c(0.3, -1.2), c(-0.7, 0.4)];
        for fk in &f {
            let compiled = fk.compile();
            assert!((compiled.eval(&z) - fk.eval(&z).unwrap()).norm() < 1e-15);
        }
        let y = [0.4, 1.3];
        let zr: Vec<_> = y.iter().map(|&v| c(v, 0.0)).collect();
        assert!((f[0].compile().eval_real(&y) - f[0].eval(&zr).unwrap().re).abs() < 1e-15);
    }
}
