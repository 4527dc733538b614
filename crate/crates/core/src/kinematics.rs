//! Two equal-mass particles in their centre-of-mass frame, natural units (MeV).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Electron mass in MeV.
pub const ELECTRON_MASS_MEV: f64 = 0.510_998_95;
/// Fine-structure constant.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
/// `(ħc)²` in MeV²·mb, converting MeV⁻² to millibarn.
pub const HBARC_SQ_MEV2_MB: f64 = 0.389_379_372_1e6;

/// Kinematic state of one scattering configuration.
///
/// `p` is the magnitude of either particle's momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub p: f64,
    pub mass: f64,
    pub alpha: f64,
    /// Total CM energy `2 sqrt(p² + m²)`.
    pub energy: f64,
    /// Velocity of either particle, `p / sqrt(p² + m²)`.
    pub beta: f64,
}

impl Kinematics {
    pub fn new(p: f64, mass: f64, alpha: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::domain("Kinematics::new", format!("momentum p = {p} must be >= 0")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::domain("Kinematics::new", format!("mass = {mass} must be > 0")));
        }
        // alpha = 0 is the free theory and is accepted.
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::domain("Kinematics::new", format!("alpha = {alpha} must be >= 0")));
        }
        let omega = p.hypot(mass);
        Ok(Kinematics {
            p,
            mass,
            alpha,
            energy: 2.0 * omega,
            beta: p / omega,
        })
    }

    /// Electron mass and the physical fine-structure constant.
    pub fn electron(p: f64) -> Result<Self> {
        Self::new(p, ELECTRON_MASS_MEV, FINE_STRUCTURE)
    }

    /// Single-particle energy `sqrt(p² + m²)`.
    pub fn omega(&self) -> f64 {
        self.p.hypot(self.mass)
    }

    /// Total CM energy at momentum `k`, with this configuration's mass.
    pub fn energy_total(&self, k: f64) -> Result<f64> {
        energy_total(k, self.mass)
    }

    /// Coulomb parameter `η = α / (2β)`. Undefined at rest.
    pub fn eta(&self) -> Result<f64> {
        if self.p == 0.0 {
            return Err(Error::domain("Kinematics::eta", "eta diverges at p = 0"));
        }
        Ok(self.alpha / (2.0 * self.beta))
    }

    /// Same state with the coupling replaced.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.p, self.mass, alpha)
    }

    /// `g(p, x) = 2β (E(p(1+x)) + E(p)) / (4p (2+x))`, equal to 1 at `x = 0`.
    ///
    /// Written as `(ω' + ω) / (ω (2 + x))`, which is algebraically identical and
    /// evaluates to exactly 1 at the origin.
    pub fn g_factor(&self, x: f64) -> Result<f64> {
        if !(x.is_finite() && x > -1.0) {
            return Err(Error::domain("g_factor", format!("x = {x} must be > -1")));
        }
        if self.p == 0.0 {
            return Err(Error::domain("g_factor", "requires p > 0"));
        }
        Ok(self.g_unchecked(x))
    }

    pub(crate) fn g_unchecked(&self, x: f64) -> f64 {
        let omega = self.omega();
        let shifted = (self.p * (1.0 + x)).hypot(self.mass);
        (shifted + omega) / (omega * (2.0 + x))
    }
}

/// `E(k) = 2 sqrt(k² + m²)`.
pub fn energy_total(k: f64, mass: f64) -> Result<f64> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::domain("energy_total", format!("k = {k} must be >= 0")));
    }
    Ok(2.0 * k.hypot(mass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_energy() {
        let k = Kinematics::electron(0.0).unwrap();
        assert_eq!(k.energy, 2.0 * ELECTRON_MASS_MEV);
        assert_eq!(k.beta, 0.0);
        assert!(k.eta().is_err());
    }

    #[test]
    fn energy_identities() {
        let m = ELECTRON_MASS_MEV;
        assert_eq!(energy_total(0.0, m).unwrap(), 2.0 * m);
        assert!((energy_total(m, m).unwrap() - 2.0 * 2f64.sqrt() * m).abs() < 1e-15);
        assert!((energy_total(5.0, m).unwrap() - 10.052_088_325_696_527).abs() < 1e-12);
        assert!(energy_total(-1.0, m).is_err());
    }

    #[test]
    fn reference_parameter_points() {
        let low = Kinematics::electron(0.02).unwrap();
        assert!((low.beta - 0.0391).abs() < 1e-4);
        assert!((low.eta().unwrap() - 0.0933).abs() < 1e-4);
        let high = Kinematics::electron(5.0).unwrap();
        assert!((high.eta().unwrap() - 0.00367).abs() < 1e-5);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Kinematics::new(-0.1, 1.0, 0.01).is_err());
        assert!(Kinematics::new(0.1, 0.0, 0.01).is_err());
        assert!(Kinematics::new(0.1, 1.0, -0.01).is_err());
        assert!(Kinematics::new(0.1, 1.0, 0.0).is_ok());
    }

    #[test]
    fn eta_bounded_below_by_half_alpha() {
        for &p in &[1e-3, 0.1, 1.0, 10.0, 1e4] {
            let k = Kinematics::electron(p).unwrap();
            assert!(k.beta > 0.0 && k.beta < 1.0);
            assert!(k.eta().unwrap() > k.alpha / 2.0);
        }
    }

    #[test]
    fn nonrelativistic_eta() {
        let k = Kinematics::electron(0.01 * ELECTRON_MASS_MEV).unwrap();
        let reduced = k.mass / 2.0;
        let product = k.eta().unwrap() * (k.p / reduced);
        assert!((product / k.alpha - 1.0).abs() < 1e-3);
    }

    #[test]
    fn g_factor_limits() {
        let k = Kinematics::electron(0.02).unwrap();
        assert_eq!(k.g_factor(0.0).unwrap(), 1.0);
        assert!(k.g_factor(-1.0).is_err());
        // Ultrarelativistic limit: g -> β.
        let big = k.g_factor(1e9).unwrap();
        assert!((big / k.beta - 1.0).abs() < 1e-6);
    }

    #[test]
    fn g_factor_slope_matches_finite_difference() {
        // d g / dx at 0 = (β² - 1)/2 analytically: ω'(0) = p β, so
        // g'(0) = p β / (2ω) - 2ω / (4ω) = (β² - 1) / 2.
        let k = Kinematics::electron(0.02).unwrap();
        let h = 1e-6;
        let fd = (k.g_factor(h).unwrap() - k.g_factor(-h).unwrap()) / (2.0 * h);
        let analytic = 0.5 * (k.beta * k.beta - 1.0);
        assert!((fd - analytic).abs() < 1e-8);
    }
}
