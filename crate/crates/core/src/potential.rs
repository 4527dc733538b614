//! Partial-wave matrix elements of the Coulomb potential `α/r` between free
//! radial momentum states normalised as `<p1|p2> = δ(p1 - p2)`.
//!
//! ```text
//! V_l(k1, k2) = α/√π · l!/Γ(l+3/2) · ρ^{l+1} · 2F1(1/2, l+1; l+3/2; ρ²),   ρ = min/max
//! ```
//!
//! The element diverges logarithmically at `k1 = k2`; near the diagonal it
//! approaches `(α/π)(C_l - ln|x|)` with `k1 = k2 (1 + x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{self, EULER_GAMMA};

/// Below this `|x|` the singular limit replaces the full series.
///
/// The neglected remainder grows like `(l+1)|x|` relative to the leading
/// logarithm, so the switch has to sit well below `1/(l+1)` for a seamless join.
pub const DEFAULT_CROSSOVER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialMatrixElement {
    pub l: usize,
    pub k1: f64,
    pub k2: f64,
    pub value: f64,
    /// Set when the singular approximation was used.
    pub near_singular: bool,
}

/// `C_l = ln 2 - C - ψ(l+1)`.
pub fn c_l(l: usize) -> f64 {
    std::f64::consts::LN_2 - EULER_GAMMA - special::psi(l as f64 + 1.0)
}

/// `(α/π)(C_l - ln|x|)`, the leading behaviour of `V_l(k(1+x), k)` at small `x`.
pub fn singular_approx(l: usize, x: f64, alpha: f64) -> Result<f64> {
    if !(x.is_finite() && x != 0.0) {
        return Err(Error::Pole {
            func: "singular_approx",
            detail: format!("x = {x}"),
        });
    }
    if x.abs() >= 0.1 {
        return Err(Error::domain("singular_approx", format!("|x| = {} is not small", x.abs())));
    }
    Ok(alpha / std::f64::consts::PI * (c_l(l) - x.abs().ln()))
}

/// `V_l(k1, k2)` for the potential `α/r`.
pub fn matrix_element(l: usize, k1: f64, k2: f64, alpha: f64) -> Result<PotentialMatrixElement> {
    let wave = CoulombWave::new(l);
    let (value, near_singular) = wave.between(k1, k2)?;
    Ok(PotentialMatrixElement {
        l,
        k1,
        k2,
        value: alpha * value,
        near_singular,
    })
}

/// Per-`l` constants of the Coulomb matrix element, cached for repeated evaluation.
///
/// Values returned by the methods are in units of `α`.
#[derive(Debug, Clone, Copy)]
pub struct CoulombWave {
    l: usize,
    /// `l! / (√π Γ(l+3/2))`
    prefactor: f64,
    c_l: f64,
    crossover: f64,
}

impl CoulombWave {
    pub fn new(l: usize) -> Self {
        Self::with_crossover(l, DEFAULT_CROSSOVER)
    }

    pub fn with_crossover(l: usize, crossover: f64) -> Self {
        let lf = l as f64;
        let ln_ratio = special::ln_gamma_pos(lf + 1.0) - special::ln_gamma_pos(lf + 1.5);
        CoulombWave {
            l,
            prefactor: ln_ratio.exp() / std::f64::consts::PI.sqrt(),
            c_l: c_l(l),
            crossover,
        }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// `V_l(k1, k2) / α` and whether the singular limit was used.
    pub fn between(&self, k1: f64, k2: f64) -> Result<(f64, bool)> {
        if !(k1.is_finite() && k2.is_finite() && k1 > 0.0 && k2 > 0.0) {
            return Err(Error::domain(
                "matrix_element",
                format!("momenta must be positive, got k1 = {k1}, k2 = {k2}"),
            ));
        }
        if k1 == k2 {
            return Err(Error::Pole {
                func: "matrix_element",
                detail: format!("k1 = k2 = {k1}"),
            });
        }
        let (lo, hi) = if k1 < k2 { (k1, k2) } else { (k2, k1) };
        let r = lo / hi;
        let gap = (hi - lo) / hi;
        if gap < self.crossover {
            return Ok((self.singular(gap), true));
        }
        // 1 - r² = (hi - lo)(hi + lo) / hi², symmetric in the arguments.
        let w = gap * ((hi + lo) / hi);
        Ok((self.reduced(r, w)?, false))
    }

    /// `V_l(k(1+x), k) / α`, independent of `k`.
    pub fn at_offset(&self, x: f64) -> Result<f64> {
        if !(x.is_finite() && x > -1.0) {
            return Err(Error::domain("matrix_element", format!("offset x = {x} must be > -1")));
        }
        if x == 0.0 {
            return Err(Error::Pole {
                func: "matrix_element",
                detail: "offset x = 0".into(),
            });
        }
        if x.abs() < self.crossover {
            return Ok(self.singular(x.abs()));
        }
        let (r, w) = if x > 0.0 {
            let s = 1.0 + x;
            (1.0 / s, x * (2.0 + x) / (s * s))
        } else {
            (1.0 + x, -x * (2.0 + x))
        };
        self.reduced(r, w)
    }

    fn singular(&self, t: f64) -> f64 {
        (self.c_l - t.ln()) / std::f64::consts::PI
    }

    /// Series form for `r = ρ < 1` with `w = 1 - r²` supplied exactly.
    fn reduced(&self, r: f64, w: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let f = special::hyp2f1_half_split(self.l, r * r, w)?;
        Ok(self.prefactor * r.powi(self.l as i32 + 1) * f.value)
    }
}
