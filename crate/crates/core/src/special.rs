//! Special functions used throughout the crate: digamma, real and complex
//! log-gamma, the Gauss hypergeometric family `2F1(1/2, l+1; l+3/2; z)`,
//! Legendre polynomials and the exact Coulomb phase shift `arg Γ(l+1+iη)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k)`, k = 1..7, for the digamma asymptotic series.
const DIGAMMA_ASYMP: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// `B_{2k} / (2k (2k-1))`, k = 1..7, for the Stirling series.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

const DIGAMMA_SHIFT: f64 = 8.0;
const STIRLING_SHIFT: f64 = 15.0;

/// A series evaluation together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialFnResult {
    pub value: f64,
    /// Absolute error estimate.
    pub est_error: f64,
    pub terms_used: usize,
}

/// Digamma `ψ(x)` for `x > 0`.
///
/// Shifts the argument to `x >= 8` with `ψ(x+1) = ψ(x) + 1/x`, then applies the
/// asymptotic series in `1/x²`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain("digamma", format!("x = {x} must be finite and > 0")));
    }
    Ok(psi(x))
}

/// Unchecked digamma for positive finite arguments.
pub(crate) fn psi(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    let mut x = x;
    while x < DIGAMMA_SHIFT {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut pow = inv2;
    for c in DIGAMMA_ASYMP {
        series += c * pow;
        pow *= inv2;
    }
    acc + x.ln() - 0.5 / x - series
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain("ln_gamma", format!("x = {x} must be finite and > 0")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    let mut x = x;
    let mut shift = 0.0;
    // Accumulate the product in chunks so the log is taken rarely but never overflows.
    let mut prod = 1.0;
    while x < STIRLING_SHIFT {
        prod *= x;
        if prod > 1e250 {
            shift += prod.ln();
            prod = 1.0;
        }
        x += 1.0;
    }
    shift += prod.ln();
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series - shift
}

/// `ln Γ(z)` for complex `z` with `Re z > 0`, on the branch continuous from the real axis.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite() && z.re > 0.0) {
        return Err(Error::domain("ln_gamma_complex", format!("z = {z} must have Re z > 0")));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < STIRLING_SHIFT {
        // ln|w| + i arg(w) summed term by term keeps the imaginary part unwrapped.
        shift += Complex64::new(w.norm().ln(), w.im.atan2(w.re));
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + HALF_LN_2PI + series - shift)
}

/// The exact Coulomb phase shift `σ_l = arg Γ(l + 1 + iη)`.
pub fn coulomb_sigma_exact(l: usize, eta: f64) -> Result<f64> {
    if !eta.is_finite() {
        return Err(Error::domain("coulomb_sigma_exact", format!("eta = {eta} is not finite")));
    }
    if eta == 0.0 {
        return Ok(0.0);
    }
    Ok(ln_gamma_complex(Complex64::new(l as f64 + 1.0, eta))?.im)
}

/// Above this value of `(l+1) ln(1/z)` the `z -> 1-z` series loses too many
/// digits to cancellation, so the direct series is used instead.
const TRANSFORM_GROWTH_LIMIT: f64 = 9.0;
const SERIES_EPS: f64 = 1e-17;
const MAX_TERMS: usize = 200_000;

/// `2F1(1/2, l+1; l+3/2; z)` on `0 <= z < 1`.
///
/// Uses the power series away from `z = 1` and the logarithmic `z -> 1-z`
/// expansion (the `c = a + b` degenerate case) close to it.
pub fn hyp2f1_half(l: usize, z: f64) -> Result<SpecialFnResult> {
    if !(z.is_finite() && (0.0..1.0).contains(&z)) {
        return Err(Error::domain("hyp2f1_half", format!("z = {z} must lie in [0, 1)")));
    }
    hyp2f1_half_split(l, z, 1.0 - z)
}

/// As [`hyp2f1_half`], with `1 - z` supplied separately so callers that know it
/// to full relative precision do not lose it to cancellation.
pub(crate) fn hyp2f1_half_split(l: usize, z: f64, w: f64) -> Result<SpecialFnResult> {
    if z <= 0.5 || (l as f64 + 1.0) * (-z.ln()) > TRANSFORM_GROWTH_LIMIT {
        direct_series(l, z)
    } else {
        complement_series(l, w)
    }
}

fn direct_series(l: usize, z: f64) -> Result<SpecialFnResult> {
    let b = l as f64 + 1.0;
    let c = l as f64 + 1.5;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (0.5 + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        // Term ratios increase monotonically towards z, so the tail is a
        // geometric series dominated by ratio z.
        let tail = term * z / (1.0 - z);
        if tail <= SERIES_EPS * sum {
            return Ok(SpecialFnResult {
                value: sum,
                est_error: tail + (k as f64 + 2.0) * f64::EPSILON * sum,
                terms_used: k + 2,
            });
        }
    }
    Err(Error::no_convergence(
        "hyp2f1_half",
        format!("power series at l = {l}, z = {z} did not converge in {MAX_TERMS} terms"),
    ))
}

fn complement_series(l: usize, w: f64) -> Result<SpecialFnResult> {
    let lf = l as f64;
    let b = lf + 1.0;
    let ln_w = w.ln();
    // Γ(l+3/2) / (Γ(1/2) Γ(l+1))
    let prefactor = (ln_gamma_pos(lf + 1.5) - ln_gamma_pos(b) - LN_SQRT_PI).exp();

    let mut psi_k1 = -EULER_GAMMA; // ψ(k+1)
    let mut psi_a = -EULER_GAMMA - 2.0 * std::f64::consts::LN_2; // ψ(1/2+k)
    let mut psi_b = psi(b); // ψ(l+1+k)
    let mut coeff = 1.0;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let term = coeff * (2.0 * psi_k1 - psi_a - psi_b - ln_w);
        sum += term;
        abs_sum += term.abs();

        let ratio = (0.5 + kf) * (b + kf) / ((kf + 1.0) * (kf + 1.0)) * w;
        coeff *= ratio;
        psi_k1 += 1.0 / (kf + 1.0);
        psi_a += 1.0 / (0.5 + kf);
        psi_b += 1.0 / (b + kf);

        if ratio < 1.0 {
            let next = coeff * (2.0 * psi_k1 - psi_a - psi_b - ln_w).abs();
            let tail = next / (1.0 - ratio.max(w));
            if tail <= SERIES_EPS * sum.abs() {
                let roundoff = 4.0 * f64::EPSILON * abs_sum;
                return Ok(SpecialFnResult {
                    value: prefactor * sum,
                    est_error: prefactor * (tail + roundoff),
                    terms_used: k + 1,
                });
            }
        }
    }
    Err(Error::no_convergence(
        "hyp2f1_half",
        format!("1-z expansion at l = {l}, 1-z = {w} did not converge in {MAX_TERMS} terms"),
    ))
}

/// Legendre polynomial `P_l(x)` by the three-term recurrence.
pub fn legendre_p(l: usize, x: f64) -> Result<f64> {
    if !(x.is_finite() && x.abs() <= 1.0) {
        return Err(Error::domain("legendre_p", format!("|x| = {} exceeds 1", x.abs())));
    }
    Ok(LegendreSeq::new(x).nth(l).expect("sequence is unbounded"))
}

/// Streams `P_0(x), P_1(x), ...` for a fixed `x`.
#[derive(Debug, Clone)]
pub struct LegendreSeq {
    x: f64,
    l: usize,
    prev: f64,
    cur: f64,
}

impl LegendreSeq {
    pub fn new(x: f64) -> Self {
        LegendreSeq {
            x,
            l: 0,
            prev: 0.0,
            cur: 1.0,
        }
    }
}

impl Iterator for LegendreSeq {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let l = self.l as f64;
        // (l+1) P_{l+1} = (2l+1) x P_l - l P_{l-1}
        let next = ((2.0 * l + 1.0) * self.x * self.cur - l * self.prev) / (l + 1.0);
        self.prev = self.cur;
        self.cur = next;
        self.l += 1;
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digamma_at_one_and_two() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-14);
        // ψ(1/2) = -γ - 2 ln 2
        let half = -EULER_GAMMA - 2.0 * std::f64::consts::LN_2;
        assert!((digamma(0.5).unwrap() - half).abs() < 1e-14);
    }

    #[test]
    fn digamma_rejects_nonpositive() {
        assert!(matches!(digamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(digamma(-1.5), Err(Error::Domain { .. })));
        assert!(digamma(f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_integers() {
        let mut fact: f64 = 1.0;
        for n in 1..30 {
            let got = ln_gamma(n as f64).unwrap();
            assert!((got - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0), "n = {n}");
            fact *= n as f64;
        }
        // Γ(1/2) = √π
        assert!((ln_gamma(0.5).unwrap() - LN_SQRT_PI).abs() < 1e-14);
    }

    #[test]
    fn complex_log_gamma_on_real_axis() {
        for &x in &[0.5, 1.0, 3.7, 20.0] {
            let c = ln_gamma_complex(Complex64::new(x, 0.0)).unwrap();
            assert!((c.re - ln_gamma(x).unwrap()).abs() < 1e-13);
            assert!(c.im.abs() < 1e-15);
        }
    }

    #[test]
    fn complex_log_gamma_reflection_modulus() {
        // |Γ(1+iy)|² = πy / sinh(πy)
        for &y in &[0.1, 1.0, 3.0] {
            let re = ln_gamma_complex(Complex64::new(1.0, y)).unwrap().re;
            let pi = std::f64::consts::PI;
            let expected = 0.5 * (pi * y / (pi * y).sinh()).ln();
            assert!((re - expected).abs() < 1e-13, "y = {y}");
        }
    }

    #[test]
    fn sigma_zero_coupling() {
        for l in [0, 1, 10, 500] {
            assert_eq!(coulomb_sigma_exact(l, 0.0).unwrap(), 0.0);
        }
        assert!(coulomb_sigma_exact(0, 0.0933).unwrap() < 0.0);
    }

    #[test]
    fn hyp2f1_at_origin() {
        for l in [0, 1, 7, 50] {
            let r = hyp2f1_half(l, 0.0).unwrap();
            assert_eq!(r.value, 1.0);
            assert!(r.terms_used >= 1);
        }
    }

    #[test]
    fn hyp2f1_l0_closed_form() {
        // 2F1(1/2, 1; 3/2; z) = atanh(√z)/√z
        let r = hyp2f1_half(0, 0.25).unwrap();
        assert!((r.value - 0.5f64.atanh() / 0.5).abs() < 1e-14);
        assert!((r.value - 1.098_612_288_668_109_6).abs() < 1e-14);
    }

    #[test]
    fn hyp2f1_domain() {
        assert!(hyp2f1_half(0, -0.1).is_err());
        assert!(hyp2f1_half(0, 1.0).is_err());
        assert!(hyp2f1_half(3, f64::NAN).is_err());
    }

    #[test]
    fn legendre_low_orders() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert!((legendre_p(2, 0.5).unwrap() + 0.125).abs() < 1e-16);
        for l in 0..60 {
            assert_eq!(legendre_p(l, 1.0).unwrap(), 1.0);
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(legendre_p(l, -1.0).unwrap(), sign);
        }
        assert!(legendre_p(3, 1.0001).is_err());
    }
}
