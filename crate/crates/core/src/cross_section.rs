//! Wavepacket-regularised partial-wave cross section.
//!
//! Colliding Gaussian wavepackets with relative momentum spread `ε = σ_p/p`
//! turn the divergent Coulomb partial-wave sum into
//!
//! ```text
//! f(θ) = (1/2p) Σ_l (2l+1) S_l e^{-ε²(l+½)²} e^{2i(δ̄_l + δ_l^(2))} e^{-(δ-Δ_l)²/4} P_l(cos θ)
//! ```
//!
//! where `δ` is the dimensionless time shift of the observation and `Δ_l`
//! the partial-wave time delay. With symmetrisation, `S_l = 1 + (-1)^l`
//! keeps only the even waves of two identical bosons.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::phase_shifts::PhaseShiftTable;
use crate::special::{psi, LegendreSeq};

/// Smallest `ε (l_max + ½)` accepted: the regulator must be below `e^{-36}`
/// where the sum is cut.
const MIN_REGULATOR_EXPONENT: f64 = 36.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct XSecConfig {
    /// Relative momentum spread `σ_p / p` of the wavepackets.
    pub epsilon: f64,
    /// Dimensionless observation time shift `δ`.
    pub delta_shift: f64,
    /// Highest partial wave summed; `None` means `ceil(7/ε)`.
    pub l_max: Option<usize>,
    pub symmetrize: bool,
    /// Initial separation in units of the position spread; `None` means `√ε`.
    pub r_over_sigma_x: Option<f64>,
}

impl Default for XSecConfig {
    fn default() -> Self {
        XSecConfig {
            epsilon: 1e-3,
            delta_shift: 0.0,
            l_max: None,
            symmetrize: false,
            r_over_sigma_x: None,
        }
    }
}

impl XSecConfig {
    pub fn l_max(&self) -> usize {
        self.l_max.unwrap_or_else(|| (7.0 / self.epsilon).ceil() as usize)
    }

    pub fn r_over_sigma_x(&self) -> f64 {
        self.r_over_sigma_x.unwrap_or_else(|| self.epsilon.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon = {} must lie in (0, 1)", self.epsilon)));
        }
        if !self.delta_shift.is_finite() {
            return Err(Error::Config("delta_shift must be finite".into()));
        }
        let r = self.r_over_sigma_x();
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Config(format!("R/sigma_x = {r} must be positive")));
        }
        let l_max = self.l_max();
        if l_max < 1 {
            return Err(Error::Config("l_max must be at least 1".into()));
        }
        let exponent = (self.epsilon * (l_max as f64 + 0.5)).powi(2);
        if exponent < MIN_REGULATOR_EXPONENT {
            return Err(Error::Config(format!(
                "l_max = {l_max} truncates the sum before the regulator decays \
                 (epsilon^2 (l_max + 1/2)^2 = {exponent:.3} < {MIN_REGULATOR_EXPONENT})"
            )));
        }
        Ok(())
    }
}

/// Partial-wave time delay `Δ_l = 4εη (ln(4pR) - 1 - ψ(l+1))`, with
/// `4pR = 2 (R/σ_x)/ε` from `σ_x σ_p = 1/2`.
pub fn delta_l_shift(l: usize, kin: &Kinematics, cfg: &XSecConfig) -> Result<f64> {
    let eta = kin.eta()?;
    let four_p_r = 2.0 * cfg.r_over_sigma_x() / cfg.epsilon;
    Ok(4.0 * cfg.epsilon * eta * (four_p_r.ln() - 1.0 - psi(l as f64 + 1.0)))
}

/// The partial-wave coefficients of `f(θ)` for one table and configuration,
/// so that each angle costs a single Legendre recurrence.
#[derive(Debug, Clone)]
pub struct PartialWaveSum {
    kin: Kinematics,
    cfg: XSecConfig,
    coefficients: Vec<Complex64>,
}

impl PartialWaveSum {
    pub fn new(table: &PhaseShiftTable, cfg: &XSecConfig) -> Result<Self> {
        cfg.validate()?;
        Self::truncated(table, cfg, cfg.l_max())
    }

    /// The sum cut at `l_max` regardless of how far the regulator has decayed
    /// there; useful for studying truncation. `cfg.l_max` is ignored.
    pub fn truncated(table: &PhaseShiftTable, cfg: &XSecConfig, l_max: usize) -> Result<Self> {
        XSecConfig {
            l_max: None,
            ..*cfg
        }
        .validate()?;
        if l_max > table.l_max() {
            return Err(Error::TableCoverage {
                requested: l_max,
                available: table.l_max(),
            });
        }
        let kin = table.kin;
        if kin.p <= 0.0 {
            return Err(Error::domain("scattering_amplitude", "requires p > 0"));
        }
        let eta = kin.eta()?;
        let eps = cfg.epsilon;
        let log_4pr = (2.0 * cfg.r_over_sigma_x() / eps).ln();
        let scale = 0.5 / kin.p;

        let coefficients = table.entries[..=l_max]
            .iter()
            .map(|e| {
                let lf = e.l as f64;
                let parity = if cfg.symmetrize {
                    if e.l % 2 == 0 {
                        2.0
                    } else {
                        0.0
                    }
                } else {
                    1.0
                };
                let big_delta = 4.0 * eps * eta * (log_4pr - 1.0 - psi(lf + 1.0));
                let shift = cfg.delta_shift - big_delta;
                let envelope = -(eps * (lf + 0.5)).powi(2) - 0.25 * shift * shift;
                let modulus = scale * (2.0 * lf + 1.0) * parity * envelope.exp();
                Complex64::from_polar(modulus, 2.0 * (e.delta1_bar + e.delta2))
            })
            .collect();
        Ok(PartialWaveSum {
            kin,
            cfg: XSecConfig {
                l_max: Some(l_max),
                ..*cfg
            },
            coefficients,
        })
    }

    pub fn kinematics(&self) -> &Kinematics {
        &self.kin
    }

    pub fn config(&self) -> &XSecConfig {
        &self.cfg
    }

    /// `f(θ)` in MeV⁻¹.
    pub fn amplitude(&self, theta: f64) -> Result<Complex64> {
        check_angle("scattering_amplitude", theta)?;
        Ok(self.sum_at(mirrored_cos(theta)))
    }

    /// `f` as a function of `cos θ`.
    pub fn amplitude_at_cos(&self, cos_theta: f64) -> Result<Complex64> {
        if !(-1.0..=1.0).contains(&cos_theta) {
            return Err(Error::domain("scattering_amplitude", format!("cos theta = {cos_theta}")));
        }
        Ok(self.sum_at(cos_theta))
    }

    fn sum_at(&self, x: f64) -> Complex64 {
        self.coefficients
            .iter()
            .zip(LegendreSeq::new(x))
            .fold(Complex64::new(0.0, 0.0), |acc, (c, p)| acc + c * p)
    }

    /// `|f(θ)|²` in MeV⁻².
    pub fn cross_section(&self, theta: f64) -> Result<f64> {
        Ok(self.amplitude(theta)?.norm_sqr())
    }

    /// Cross sections for many angles, evaluated in parallel and returned in input order.
    pub fn cross_sections(&self, thetas: &[f64]) -> Result<Vec<f64>> {
        thetas.par_iter().map(|&t| self.cross_section(t)).collect()
    }

    /// Model, Rutherford and Møller values at one angle in `(0, π)`.
    pub fn record(&self, theta: f64) -> Result<XSecRecord> {
        Ok(XSecRecord {
            p: self.kin.p,
            theta,
            model: self.cross_section(theta)?,
            rutherford: rutherford(theta, &self.kin)?,
            moller: moller(theta, &self.kin)?,
            delta_shift_used: self.cfg.delta_shift,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XSecRecord {
    pub p: f64,
    pub theta: f64,
    pub model: f64,
    pub rutherford: f64,
    pub moller: f64,
    pub delta_shift_used: f64,
}

pub fn scattering_amplitude(theta: f64, table: &PhaseShiftTable, cfg: &XSecConfig) -> Result<Complex64> {
    PartialWaveSum::new(table, cfg)?.amplitude(theta)
}

pub fn differential_cross_section(theta: f64, table: &PhaseShiftTable, cfg: &XSecConfig) -> Result<f64> {
    PartialWaveSum::new(table, cfg)?.cross_section(theta)
}

/// Rutherford cross section of the relative motion, `μ²α² / (4 p⁴ sin⁴(θ/2))`
/// with the reduced mass `μ = m/2`.
pub fn rutherford(theta: f64, kin: &Kinematics) -> Result<f64> {
    check_angle("rutherford", theta)?;
    if theta == 0.0 {
        return Err(Error::Pole {
            func: "rutherford",
            detail: "forward divergence at theta = 0".into(),
        });
    }
    let mu = 0.5 * kin.mass;
    let s = (0.5 * theta).sin();
    let p2 = kin.p * kin.p;
    Ok(mu * mu * kin.alpha * kin.alpha / (4.0 * p2 * p2 * s.powi(4)))
}

/// Spin-averaged Møller cross section in the centre-of-mass frame.
pub fn moller(theta: f64, kin: &Kinematics) -> Result<f64> {
    check_angle("moller", theta)?;
    if theta == 0.0 || theta == std::f64::consts::PI {
        return Err(Error::Pole {
            func: "moller",
            detail: format!("divergent at theta = {theta}"),
        });
    }
    let b2 = kin.beta * kin.beta;
    let s2 = theta.sin().powi(2);
    let a2m2 = kin.alpha * kin.alpha / (kin.mass * kin.mass);
    let first = (1.0 + b2) * (1.0 - b2 * b2) / (4.0 * b2 * b2) * (4.0 / (s2 * s2) - 3.0 / s2);
    let second = (1.0 - b2) / 4.0 * (1.0 + 4.0 / s2);
    Ok(a2m2 * (first + second))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaProfile {
    /// `(δ, dσ/dΩ)` in grid order.
    pub points: Vec<(f64, f64)>,
    /// Grid value with the largest cross section (first one on ties).
    pub argmax: f64,
}

/// Cross section at fixed angle as a function of the time shift `δ`.
pub fn delta_profile(
    theta: f64,
    table: &PhaseShiftTable,
    cfg: &XSecConfig,
    delta_grid: &[f64],
) -> Result<DeltaProfile> {
    if delta_grid.is_empty() {
        return Err(Error::Config("delta grid is empty".into()));
    }
    let points = delta_grid
        .par_iter()
        .map(|&delta| {
            let cfg = XSecConfig {
                delta_shift: delta,
                ..*cfg
            };
            Ok((delta, differential_cross_section(theta, table, &cfg)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let argmax = points
        .iter()
        .fold(points[0], |best, &pt| if pt.1 > best.1 { pt } else { best })
        .0;
    Ok(DeltaProfile { points, argmax })
}

/// `n` equally spaced values from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `cos θ`, taken as `-cos(π - θ)` past the right angle.
///
/// `π - θ` is exact there, so `θ` and `π - θ` get cosines of exactly opposite
/// sign. The sum over thousands of waves is sensitive enough that a one-ulp
/// difference in `cos θ` shows up at the 1e-12 level.
fn mirrored_cos(theta: f64) -> f64 {
    if theta > std::f64::consts::FRAC_PI_2 {
        -(std::f64::consts::PI - theta).cos()
    } else {
        theta.cos()
    }
}

fn check_angle(func: &'static str, theta: f64) -> Result<()> {
    if (0.0..=std::f64::consts::PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::domain(func, format!("theta = {theta} outside [0, pi]")))
    }
}
