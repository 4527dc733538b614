//! Run settings: built-in defaults, overridden by a flat TOML file, overridden
//! by command-line flags.

use std::path::Path;

use coulomb_pt::cross_section::XSecConfig;
use coulomb_pt::kinematics::{ELECTRON_MASS_MEV, FINE_STRUCTURE};
use coulomb_pt::phase_shifts::{ExtensionPolicy, DEFAULT_L_MAX_DELTA2};
use coulomb_pt::quadrature::PVQuadConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Every tunable of every subcommand, fully resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub p_mev: f64,
    pub mass_mev: f64,
    pub alpha: f64,
    pub epsilon: f64,
    /// Highest partial wave; `None` picks the command default.
    pub l_max: Option<usize>,
    pub l_max_delta2: usize,
    pub order: u8,
    pub symmetrize: bool,
    pub delta: f64,
    pub r_over_sigma_x: Option<f64>,
    pub extension: ExtensionPolicy,

    pub pv_window_half_width: f64,
    pub pv_inner_cutoff: f64,
    pub pv_grading_ratio: f64,
    pub pv_outer_x_max: f64,
    pub pv_abs_tol: f64,
    pub pv_rel_tol: f64,

    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub theta_step_deg: f64,
    pub theta_deg: f64,
    pub p_min_mev: f64,
    pub p_max_mev: f64,
    pub p_points: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_step: f64,
}

impl Default for Settings {
    fn default() -> Self {
        let pv = PVQuadConfig::default();
        let xs = XSecConfig::default();
        Settings {
            p_mev: 0.02,
            mass_mev: ELECTRON_MASS_MEV,
            alpha: FINE_STRUCTURE,
            epsilon: xs.epsilon,
            l_max: None,
            l_max_delta2: DEFAULT_L_MAX_DELTA2,
            order: 2,
            symmetrize: false,
            delta: 0.0,
            r_over_sigma_x: None,
            extension: ExtensionPolicy::Hold,
            pv_window_half_width: pv.window_half_width,
            pv_inner_cutoff: pv.inner_cutoff,
            pv_grading_ratio: pv.grading_ratio,
            pv_outer_x_max: pv.outer_x_max,
            pv_abs_tol: pv.abs_tol,
            pv_rel_tol: pv.rel_tol,
            theta_min_deg: 5.0,
            theta_max_deg: 175.0,
            theta_step_deg: 1.0,
            theta_deg: 90.0,
            p_min_mev: 0.03,
            p_max_mev: 19.0,
            p_points: 40,
            delta_min: -5.0,
            delta_max: 5.0,
            delta_step: 0.05,
        }
    }
}

/// A partial set of settings, as read from a config file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub p_mev: Option<f64>,
    pub mass_mev: Option<f64>,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub l_max: Option<usize>,
    pub l_max_delta2: Option<usize>,
    pub order: Option<u8>,
    pub symmetrize: Option<bool>,
    pub delta: Option<f64>,
    pub r_over_sigma_x: Option<f64>,
    pub extension: Option<ExtensionPolicy>,
    pub pv_window_half_width: Option<f64>,
    pub pv_inner_cutoff: Option<f64>,
    pub pv_grading_ratio: Option<f64>,
    pub pv_outer_x_max: Option<f64>,
    pub pv_abs_tol: Option<f64>,
    pub pv_rel_tol: Option<f64>,
    pub theta_min_deg: Option<f64>,
    pub theta_max_deg: Option<f64>,
    pub theta_step_deg: Option<f64>,
    pub theta_deg: Option<f64>,
    pub p_min_mev: Option<f64>,
    pub p_max_mev: Option<f64>,
    pub p_points: Option<usize>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub delta_step: Option<f64>,
}

impl Overrides {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::BadArgs(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::BadArgs(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

macro_rules! apply_fields {
    ($target:expr, $source:expr; $($plain:ident),*; $($optional:ident),*) => {
        $(if let Some(v) = $source.$plain { $target.$plain = v; })*
        $(if let Some(v) = $source.$optional { $target.$optional = Some(v); })*
    };
}

impl Settings {
    pub fn apply(&mut self, o: &Overrides) {
        apply_fields!(self, o;
            p_mev, mass_mev, alpha, epsilon, l_max_delta2, order, symmetrize, delta, extension,
            pv_window_half_width, pv_inner_cutoff, pv_grading_ratio, pv_outer_x_max, pv_abs_tol,
            pv_rel_tol, theta_min_deg, theta_max_deg, theta_step_deg, theta_deg, p_min_mev,
            p_max_mev, p_points, delta_min, delta_max, delta_step;
            l_max, r_over_sigma_x);
    }

    /// Defaults, then each layer in turn.
    pub fn resolve(layers: &[&Overrides]) -> Self {
        let mut s = Settings::default();
        for layer in layers {
            s.apply(layer);
        }
        s
    }

    pub fn pv_config(&self) -> PVQuadConfig {
        PVQuadConfig {
            window_half_width: self.pv_window_half_width,
            inner_cutoff: self.pv_inner_cutoff,
            grading_ratio: self.pv_grading_ratio,
            outer_x_max: self.pv_outer_x_max,
            abs_tol: self.pv_abs_tol,
            rel_tol: self.pv_rel_tol,
        }
    }

    /// Cross-section settings with the defaults that depend on `ε` made explicit.
    pub fn xsec_config(&self) -> XSecConfig {
        let partial = XSecConfig {
            epsilon: self.epsilon,
            delta_shift: self.delta,
            l_max: self.l_max,
            symmetrize: self.symmetrize,
            r_over_sigma_x: self.r_over_sigma_x,
        };
        XSecConfig {
            l_max: Some(partial.l_max()),
            r_over_sigma_x: Some(partial.r_over_sigma_x()),
            ..partial
        }
    }

    pub fn second_order(&self) -> bool {
        self.order == 2
    }

    /// Checks shared by every command.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::BadArgs(msg));
        if !(self.mass_mev.is_finite() && self.mass_mev > 0.0) {
            return bad(format!("--mass-mev must be positive, got {}", self.mass_mev));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("--alpha must be non-negative, got {}", self.alpha));
        }
        if !(self.order == 1 || self.order == 2) {
            return bad(format!("--order must be 1 or 2, got {}", self.order));
        }
        self.pv_config().validate()?;
        Ok(())
    }
}

/// `lo, lo+step, ..., hi`, with the count rounded so that `hi` is hit when
/// the span is a whole number of steps.
pub fn stepped_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && hi >= lo) {
        return Err(CliError::BadArgs(format!("invalid grid [{lo}, {hi}] with step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

/// `n` logarithmically spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite() && n >= 1) {
        return Err(CliError::BadArgs(format!("invalid log grid [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let ratio = (hi / lo).ln();
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo * (ratio * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layers_apply_in_order() {
        let file = Overrides::from_toml_str("p_mev = 5.0\nepsilon = 0.002\nextension = \"zero\"").unwrap();
        let flags = Overrides {
            p_mev: Some(1.0),
            ..Default::default()
        };
        let s = Settings::resolve(&[&file, &flags]);
        assert_eq!(s.p_mev, 1.0);
        assert_eq!(s.epsilon, 0.002);
        assert_eq!(s.extension, ExtensionPolicy::Zero);
        assert_eq!(s.alpha, FINE_STRUCTURE);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Overrides::from_toml_str("momentum = 3").is_err());
        assert!(Overrides::from_toml_str("p_mev = \"fast\"").is_err());
    }

    #[test]
    fn resolved_xsec_defaults() {
        let x = Settings::default().xsec_config();
        assert_eq!(x.l_max, Some(7000));
        assert!((x.r_over_sigma_x.unwrap() - 0.001f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn grids() {
        let g = stepped_grid(-5.0, 5.0, 0.05).unwrap();
        assert_eq!(g.len(), 201);
        assert!((g[200] - 5.0).abs() < 1e-12);
        let l = log_grid(0.03, 19.0, 40).unwrap();
        assert_eq!(l.len(), 40);
        assert_eq!(l[0], 0.03);
        assert_eq!(l[39], 19.0);
        assert!(stepped_grid(1.0, 0.0, 0.1).is_err());
        assert!(log_grid(0.0, 1.0, 3).is_err());
    }
}
