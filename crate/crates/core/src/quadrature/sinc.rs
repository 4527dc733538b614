//! Numerical check of the identity
//!
//! ```text
//! -(α/π) ∫_{-∞}^{∞} dz sinc(z) (C_l - ln|z/pr|) = α (ψ(l+1) - ln(2 pr))
//! ```
//!
//! through which `sin(prx)/x` acts as a delta function on the logarithmic
//! singularity of the Coulomb matrix element.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kronrod::{adaptive, gk15};
use super::graded_breaks;
use crate::error::{Error, Result};
use crate::potential::c_l;
use crate::special::psi;

/// Default truncation of the `z` range.
pub const DEFAULT_SINC_RANGE: f64 = 1e6;

const FIRST_LOBE_CUTOFF: f64 = 1e-14;
const AVERAGING_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SincLogCheck {
    pub l: usize,
    pub pr: f64,
    pub numeric: f64,
    pub analytic: f64,
    /// Error estimate of `numeric`.
    pub est_error: f64,
    pub half_periods: usize,
}

impl SincLogCheck {
    pub fn difference(&self) -> f64 {
        self.numeric - self.analytic
    }
}

pub fn sinc_log_identity(l: usize, pr: f64, alpha: f64) -> Result<SincLogCheck> {
    sinc_log_identity_with(l, pr, alpha, DEFAULT_SINC_RANGE)
}

/// As [`sinc_log_identity`] with the integral truncated near `|z| = z_max`.
///
/// The integrand is even, so only `z > 0` is integrated. Past the first lobe
/// the range is cut into whole half-periods `[kπ, (k+1)π]`; the alternating
/// partial sums are then averaged pairwise a few times, which removes the
/// leading oscillating remainder of the truncation.
pub fn sinc_log_identity_with(l: usize, pr: f64, alpha: f64, z_max: f64) -> Result<SincLogCheck> {
    if !(pr.is_finite() && pr > 0.0) {
        return Err(Error::domain("sinc_log_identity", format!("pr = {pr} must be > 0")));
    }
    let half_periods = (z_max / PI).floor() as usize;
    if half_periods < AVERAGING_LEVELS + 2 {
        return Err(Error::domain("sinc_log_identity", format!("range {z_max} is too short")));
    }
    let shift = c_l(l) + pr.ln();
    let h = |z: f64| z.sin() / z * (shift - z.ln());

    let c = FIRST_LOBE_CUTOFF;
    let lobe = adaptive(&h, &graded_breaks(c, PI, 0.5), 1e-13, 1e-13, 10_000)?;
    let sliver = c * (shift - c.ln() + 1.0);

    let mut sum = lobe.value + sliver;
    let mut panel_error = lobe.error;
    let keep = AVERAGING_LEVELS + 1;
    let mut last = Vec::with_capacity(keep);
    for k in 1..half_periods {
        let kf = k as f64;
        let p = gk15(&h, kf * PI, (kf + 1.0) * PI);
        sum += p.value;
        panel_error += p.error;
        if k + keep >= half_periods {
            last.push(sum);
        }
    }

    let mut level = last;
    let mut previous = level[level.len() - 1];
    while level.len() > 1 {
        previous = level[level.len() - 1];
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    let integral = level[0];
    let averaging_error = (integral - previous).abs();

    let scale = 2.0 * alpha / PI;
    Ok(SincLogCheck {
        l,
        pr,
        numeric: -scale * integral,
        analytic: alpha * (psi(l as f64 + 1.0) - (2.0 * pr).ln()),
        est_error: scale * (panel_error + averaging_error),
        half_periods,
    })
}
