use std::path::{Path, PathBuf};

use inls_core::interaction::{Coefficients, Monomial};
use inls_core::presets::{self, PresetParams};
use inls_core::{EvolveOptions, GroundStateOptions, InteractionPotential, RadialGrid, SystemSpec};
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::CliError;

/// Everything a run needs. Every section is optional and falls back to the
/// defaults below; command-line flags override the top-level keys.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub system: SystemConfig,
    pub grid: GridConfig,
    pub ground_state: GroundStateConfig,
    pub evolve: EvolveConfig,
    pub dichotomy: DichotomyConfig,
    pub check: CheckConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub preset: Option<String>,
    pub n: usize,
    pub b: f64,
    pub kappa: Option<f64>,
    pub beta_tilde: Option<f64>,
    pub beta_tilde1: Option<f64>,
    /// Inline coefficients; with a preset they override its values.
    pub alpha: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub sigma: Option<Vec<f64>>,
    #[serde(rename = "F")]
    pub terms: Option<Vec<TermConfig>>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            preset: None,
            n: 3,
            b: 0.6,
            kappa: None,
            beta_tilde: None,
            beta_tilde1: None,
            alpha: None,
            gamma: None,
            beta: None,
            sigma: None,
            terms: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub coeff_re: f64,
    #[serde(default)]
    pub coeff_im: f64,
    pub zpow: Vec<u32>,
    pub cpow: Vec<u32>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    pub r_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points: inls_core::grid::DEFAULT_POINTS, r_max: inls_core::grid::DEFAULT_R_MAX }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundStateConfig {
    pub omega: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub damping: f64,
    /// Load the ground state from this snapshot instead of solving.
    pub snapshot: Option<PathBuf>,
}

impl Default for GroundStateConfig {
    fn default() -> Self {
        let d = GroundStateOptions::default();
        Self {
            omega: 1.0,
            max_iterations: d.max_iterations,
            tolerance: d.tolerance,
            damping: d.damping,
            snapshot: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_final: f64,
    pub monitor_stride: usize,
    pub nonlinear_substeps: usize,
    pub kinetic_multiplier: f64,
    pub tail_threshold: f64,
    /// Initial data is `c·ψ`.
    pub c: f64,
    /// Largest tolerated relative drift of `Q` and `E`, measured while
    /// `K(t) ≤ drift_window · K(0)`. Past that point a collapsing solution is
    /// no longer resolved by any fixed step.
    pub charge_tolerance: f64,
    pub energy_tolerance: f64,
    pub drift_window: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        let d = EvolveOptions::default();
        Self {
            dt: d.dt,
            t_final: d.t_final,
            monitor_stride: d.monitor_stride,
            nonlinear_substeps: d.nonlinear_substeps,
            kinetic_multiplier: d.kinetic_multiplier,
            tail_threshold: d.tail_threshold,
            c: 1.0,
            charge_tolerance: 1e-8,
            energy_tolerance: 1e-2,
            drift_window: 10.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DichotomyConfig {
    /// Virial cutoff radius; no virial columns when absent or too large.
    pub cutoff_radius: Option<f64>,
    pub c_values: Vec<f64>,
    pub radial: bool,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        Self { cutoff_radius: None, c_values: Vec::new(), radial: true }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    pub samples: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { samples: 1000 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn system(&self) -> Result<SystemSpec, CliError> {
        let s = &self.system;
        // Without inline terms the two-wave preset is the default.
        let preset = s.preset.clone().or_else(|| s.terms.is_none().then(|| "two_wave".to_string()));
        let spec = match (&preset, &s.terms) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("give either a preset or inline F terms, not both".into()))
            }
            (Some(name), None) => {
                let params =
                    PresetParams { kappa: s.kappa, beta_tilde: s.beta_tilde, beta_tilde1: s.beta_tilde1 };
                let base = presets::by_name(name, s.n, s.b, params)?;
                let c = base.coefficients().clone();
                let coefficients = Coefficients {
                    alpha: s.alpha.clone().unwrap_or(c.alpha),
                    gamma: s.gamma.clone().unwrap_or(c.gamma),
                    beta: s.beta.clone().unwrap_or(c.beta),
                    sigma: s.sigma.clone().unwrap_or(c.sigma),
                };
                if coefficients == *base.coefficients() {
                    base
                } else {
                    let mut spec = SystemSpec::new(s.n, s.b, coefficients, base.potential().clone())?
                        .with_name(name.clone());
                    if let Some(pieces) = base.decomposition() {
                        spec = spec.with_decomposition(pieces.to_vec())?;
                    }
                    spec
                }
            }
            (None, Some(terms)) => {
                let missing = |k: &str| CliError::Usage(format!("inline system needs '{k}'"));
                let alpha = s.alpha.clone().ok_or_else(|| missing("alpha"))?;
                let l = alpha.len();
                let coefficients = Coefficients {
                    alpha,
                    gamma: s.gamma.clone().ok_or_else(|| missing("gamma"))?,
                    beta: s.beta.clone().unwrap_or_else(|| vec![0.0; l]),
                    sigma: s.sigma.clone().ok_or_else(|| missing("sigma"))?,
                };
                let monomials = terms
                    .iter()
                    .map(|t| {
                        Monomial::new(Complex64::new(t.coeff_re, t.coeff_im), t.zpow.clone(), t.cpow.clone())
                    })
                    .collect();
                SystemSpec::new(s.n, s.b, coefficients, InteractionPotential::new(l, monomials)?)?
            }
            (None, None) => unreachable!("a preset is filled in above"),
        };
        Ok(spec)
    }

    pub fn grid(&self) -> Result<RadialGrid, CliError> {
        Ok(RadialGrid::new(self.system.n, self.grid.points, self.grid.r_max)?)
    }

    pub fn ground_state_options(&self) -> GroundStateOptions {
        GroundStateOptions {
            max_iterations: self.ground_state.max_iterations,
            tolerance: self.ground_state.tolerance,
            damping: self.ground_state.damping,
            ..Default::default()
        }
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        let e = &self.evolve;
        EvolveOptions {
            dt: e.dt,
            t_final: e.t_final,
            monitor_stride: e.monitor_stride,
            nonlinear_substeps: e.nonlinear_substeps,
            kinetic_multiplier: e.kinetic_multiplier,
            tail_threshold: e.tail_threshold,
            ..Default::default()
        }
    }
}
