//! Cauchy principal-value integration for integrands with a simple pole at
//! `x = 0`, possibly dressed by integrable powers of `ln|x|`.
//!
//! Inside a window `[-w, w]` the integrand is folded onto `x > 0`: the pair
//! `f(x) + f(-x)` has the odd `1/x` part cancelled exactly and only an
//! integrable remainder is left. That remainder is integrated on a grid graded
//! geometrically towards the origin, down to an inner cutoff whose sliver is
//! estimated separately. Outside the window ordinary adaptive quadrature is
//! used, and a semi-infinite upper limit is truncated with a power-law tail
//! estimate.

mod kronrod;
mod sinc;

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sinc::{sinc_log_identity, sinc_log_identity_with, SincLogCheck, DEFAULT_SINC_RANGE};

pub(crate) use kronrod::adaptive;

const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PVQuadConfig {
    /// Half-width of the symmetric pairing window around the pole.
    pub window_half_width: f64,
    /// Smallest `|x|` sampled inside the window.
    pub inner_cutoff: f64,
    /// Ratio between successive breakpoints of the graded grid (`0 < r < 1`).
    pub grading_ratio: f64,
    /// Truncation point for a semi-infinite upper limit.
    pub outer_x_max: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for PVQuadConfig {
    fn default() -> Self {
        PVQuadConfig {
            window_half_width: 0.5,
            inner_cutoff: 1e-10,
            grading_ratio: 0.5,
            outer_x_max: 1e4,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
        }
    }
}

impl PVQuadConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.inner_cutoff > 0.0
            && self.inner_cutoff < self.window_half_width
            && self.window_half_width <= 1.0
            && self.grading_ratio > 0.0
            && self.grading_ratio < 1.0
            && self.outer_x_max > self.window_half_width
            && self.outer_x_max.is_finite()
            && self.abs_tol > 0.0
            && self.rel_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid principal-value settings: {self:?}")))
        }
    }

    /// Every resolution parameter refined by a factor of 2: cutoff, grading
    /// ratio and tolerances halved, truncation pushed out twice as far.
    pub fn refined(&self) -> Self {
        PVQuadConfig {
            inner_cutoff: 0.5 * self.inner_cutoff,
            grading_ratio: 0.5 * self.grading_ratio,
            outer_x_max: 2.0 * self.outer_x_max,
            abs_tol: 0.5 * self.abs_tol,
            rel_tol: 0.5 * self.rel_tol,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PVResult {
    pub value: f64,
    /// Estimated quadrature error, including the inner sliver.
    pub est_error: f64,
    pub evaluations: usize,
    /// Estimated remainder beyond `outer_x_max` (zero for a finite upper limit).
    pub tail_bound: f64,
}

impl PVResult {
    pub fn zero() -> Self {
        PVResult {
            value: 0.0,
            est_error: 0.0,
            evaluations: 0,
            tail_bound: 0.0,
        }
    }

    /// Quadrature error and truncation remainder combined.
    pub fn total_error(&self) -> f64 {
        self.est_error + self.tail_bound
    }
}

/// Principal value of `∫_{x_lo}^{x_hi} f(x) dx` with the pole at `x = 0`.
///
/// `x_hi` may be `f64::INFINITY`, in which case the range is truncated at
/// `config.outer_x_max` and the remainder is reported in `tail_bound`.
pub fn principal_value<F>(f: F, x_lo: f64, x_hi: f64, config: &PVQuadConfig) -> Result<PVResult>
where
    F: Fn(f64) -> f64,
{
    config.validate()?;
    if !(x_lo.is_finite() && x_lo < 0.0 && x_hi > 0.0) || x_hi.is_nan() {
        return Err(Error::domain(
            "principal_value",
            format!("pole at 0 must be interior to [{x_lo}, {x_hi}]"),
        ));
    }
    let evals = Cell::new(0usize);
    let f = |x: f64| {
        evals.set(evals.get() + 1);
        f(x)
    };

    let upper = if x_hi.is_finite() { x_hi } else { config.outer_x_max };
    let w = config.window_half_width.min(-x_lo).min(upper);
    if w <= 2.0 * config.inner_cutoff {
        return Err(Error::domain(
            "principal_value",
            format!("pairing window {w:e} is not wider than the inner cutoff"),
        ));
    }
    let paired = |t: f64| f(t) + f(-t);
    let breaks = graded_breaks(config.inner_cutoff, w, config.grading_ratio);
    let (sliver, sliver_err) = sliver(&paired, config.inner_cutoff);
    // The window, left and right pieces each get a third of the budget.
    let pieces = |abs_tol: f64, rel_tol: f64| -> Result<(f64, f64)> {
        let inner = adaptive(&paired, &breaks, abs_tol, rel_tol, MAX_PANELS)?;
        let mut value = inner.value + sliver;
        let mut error = inner.error + sliver_err;
        if x_lo < -w {
            let left = adaptive(&f, &[x_lo, -w], abs_tol, rel_tol, MAX_PANELS)?;
            value += left.value;
            error += left.error;
        }
        if upper > w {
            let right = adaptive(&f, &doubling_breaks(w, upper), abs_tol, rel_tol, MAX_PANELS)?;
            value += right.value;
            error += right.error;
        }
        Ok((value, error))
    };
    let (mut value, mut error) = pieces(config.abs_tol / 3.0, config.rel_tol)?;
    let target = config.abs_tol.max(config.rel_tol * value.abs());
    if value.is_finite() && error > target {
        // The pieces can be much larger than their sum, so a relative
        // tolerance per piece is too loose; redo them against the absolute
        // target implied by the first pass.
        (value, error) = pieces((target - sliver_err).max(0.0) / 3.0, 0.0)?;
    }

    let tail_bound = if x_hi.is_finite() {
        0.0
    } else {
        power_tail(&f, upper)?
    };

    if !value.is_finite() {
        return Err(Error::no_convergence("principal_value", "non-finite result"));
    }
    let target = config.abs_tol.max(config.rel_tol * value.abs());
    if error > target {
        return Err(Error::no_convergence(
            "principal_value",
            format!("estimated error {error:e} exceeds target {target:e} (value {value:e}, sliver error {sliver_err:e})"),
        ));
    }
    Ok(PVResult {
        value,
        est_error: error,
        evaluations: evals.get(),
        tail_bound,
    })
}

/// `∫_0^c h` for a paired integrand that is at worst log² singular at 0.
///
/// `h` is fitted by a quadratic in `u = ln(t/c)` through samples at `c`,
/// `2c`, `4c` and integrated exactly over `[0, c]` (`∫ 1, u, u²` give
/// `c, -c, 2c`). The error is the contribution of the cubic term, estimated
/// from a fourth sample at `8c`. Sampling outward keeps the fit away from
/// the roundoff that the pairing cancellation leaves at the smallest `t`.
fn sliver<F: Fn(f64) -> f64>(h: &F, c: f64) -> (f64, f64) {
    let s: [f64; 4] = std::array::from_fn(|k| h(c * f64::from(1u32 << k)));
    let d = std::f64::consts::LN_2;
    let curv = (s[2] - 2.0 * s[1] + s[0]) / (2.0 * d * d);
    let slope = (s[1] - s[0] - curv * d * d) / d;
    let value = c * (s[0] - slope + 2.0 * curv);
    let third = s[3] - 3.0 * s[2] + 3.0 * s[1] - s[0];
    (value, c * third.abs() / (d * d * d))
}

/// Breakpoints `cutoff, ..., w r², w r, w`, ascending.
pub(crate) fn graded_breaks(cutoff: f64, w: f64, ratio: f64) -> Vec<f64> {
    let mut breaks = vec![w];
    let mut x = w * ratio;
    while x > cutoff {
        breaks.push(x);
        x *= ratio;
    }
    breaks.push(cutoff);
    breaks.reverse();
    breaks
}

fn doubling_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut breaks = vec![lo];
    let mut x = 2.0 * lo;
    while x < hi {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(hi);
    breaks
}

/// `∫_X^∞ f` assuming `f ~ X^{-n}` locally, with `n` read off from `f(X/2)/f(X)`.
fn power_tail<F: Fn(f64) -> f64>(f: &F, x_max: f64) -> Result<f64> {
    let at_max = f(x_max);
    if at_max == 0.0 {
        return Ok(0.0);
    }
    let at_half = f(0.5 * x_max);
    let ratio = at_half / at_max;
    let n = if ratio > 0.0 { ratio.log2() } else { f64::NAN };
    if !(n > 1.0) {
        return Err(Error::no_convergence(
            "principal_value",
            format!("integrand does not decay faster than 1/x at x = {x_max:e} (local power {n})"),
        ));
    }
    Ok(at_max.abs() * x_max / (n - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn cfg() -> PVQuadConfig {
        PVQuadConfig::default()
    }

    #[test]
    fn odd_pole_vanishes() {
        let r = principal_value(|x| 1.0 / x, -1.0, 1.0, &cfg()).unwrap();
        assert!(r.value.abs() < 1e-14);
    }

    #[test]
    fn asymmetric_pole() {
        let r = principal_value(|x| 1.0 / x, -1.0, 2.0, &cfg()).unwrap();
        assert!((r.value - LN_2).abs() < 1e-12);
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn log_dressed_odd_integrand() {
        for &(c, a) in &[(0.0, 1.0), (1.3, 0.7), (-2.0, 0.3)] {
            let f = move |x: f64| (c - x.abs().ln()).powi(2) / x;
            let r = principal_value(f, -a, a, &cfg()).unwrap();
            assert!(r.value.abs() < 1e-12, "c = {c}, a = {a}: {}", r.value);
        }
    }

    #[test]
    fn sliver_is_exact_for_log_quadratics() {
        let c: f64 = 1e-3;
        let h = |t: f64| 2.0 - 3.0 * t.ln() + 0.5 * t.ln().powi(2);
        let lc = c.ln();
        let exact = c * (2.0 - 3.0 * (lc - 1.0) + 0.5 * (lc * lc - 2.0 * lc + 2.0));
        let (v, e) = sliver(&h, c);
        assert!((v - exact).abs() < 1e-15, "{v} vs {exact}");
        assert!(e < 1e-15);
    }

    #[test]
    fn pole_must_be_interior() {
        assert!(principal_value(|x| 1.0 / x, 0.0, 1.0, &cfg()).is_err());
        assert!(principal_value(|x| 1.0 / x, -1.0, -0.5, &cfg()).is_err());
    }

    #[test]
    fn bad_config_rejected() {
        let bad = PVQuadConfig {
            inner_cutoff: 0.8,
            ..cfg()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = PVQuadConfig {
            grading_ratio: 1.0,
            ..cfg()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn semi_infinite_tail() {
        // F(x) = ln|x/(2+x)|/4 + 1/(2(2+x)) is an antiderivative of
        // 1/(x (2+x)²); the PV over [-1, ∞) is F(∞) - F(-1) = -1/2.
        let f = |x: f64| 1.0 / (x * (2.0 + x) * (2.0 + x));
        let exact = -0.5;
        let r = principal_value(f, -1.0, f64::INFINITY, &cfg()).unwrap();
        assert!(r.tail_bound > 0.0 && r.tail_bound < 1e-8);
        assert!((r.value - exact).abs() < 1e-8, "{} vs {exact}", r.value);
    }

    #[test]
    fn slow_decay_is_rejected() {
        let r = principal_value(|x| 1.0 / x, -1.0, f64::INFINITY, &cfg());
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn unreachable_tolerance_fails() {
        let tight = PVQuadConfig {
            abs_tol: 1e-30,
            rel_tol: 1e-30,
            ..cfg()
        };
        let r = principal_value(|x: f64| (1.0 - x.abs().ln()).powi(2) * x.exp() / x, -1.0, 1.0, &tight);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
