//! Partial-wave phase shifts to second order in the coupling.
//!
//! The first-order shift with its long-range logarithm removed is
//! `δ̄_l = η ψ(l+1)`. The second-order shift is a principal-value momentum
//! integral, taken in the offset variable `k' = p(1+x)`:
//!
//! ```text
//! δ_l^(2) = (1/2) π/(2β)² PV ∫_{-1}^{∞} dx V_l(p(1+x), p)² g(p, x) / x
//! ```

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::potential::CoulombWave;
use crate::quadrature::{principal_value, PVQuadConfig, PVResult};
use crate::special::psi;

/// Largest `l` for which the second-order shift is computed by default.
pub const DEFAULT_L_MAX_DELTA2: usize = 50;

/// How the second-order shift is continued past the last computed `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionPolicy {
    /// Keep the last computed value.
    #[default]
    Hold,
    Zero,
    /// Continue linearly in `ln l` using the slope of the last two values.
    LogExtrapolate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftEntry {
    pub l: usize,
    pub delta1_bar: f64,
    pub delta2: f64,
    /// Quadrature diagnostics, present only where `delta2` was computed.
    pub delta2_quad: Option<PVResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftTable {
    pub kin: Kinematics,
    /// Contiguous from `l = 0`.
    pub entries: Vec<PhaseShiftEntry>,
    /// Largest `l` with a computed second-order shift; `None` for a first-order table.
    pub l_max_delta2: Option<usize>,
    pub extension_policy: ExtensionPolicy,
}

impl PhaseShiftTable {
    pub fn l_max(&self) -> usize {
        self.entries.len() - 1
    }

    /// `δ̄_l^(1) + δ_l^(2)`.
    pub fn total(&self, l: usize) -> Option<f64> {
        self.entries.get(l).map(|e| e.delta1_bar + e.delta2)
    }

    /// A table with only the first-order shifts; every `delta2` is zero.
    pub fn first_order(kin: &Kinematics, l_max: usize) -> Result<Self> {
        let entries = (0..=l_max)
            .map(|l| {
                Ok(PhaseShiftEntry {
                    l,
                    delta1_bar: delta1_bar(l, kin)?,
                    delta2: 0.0,
                    delta2_quad: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PhaseShiftTable {
            kin: *kin,
            entries,
            l_max_delta2: None,
            extension_policy: ExtensionPolicy::Zero,
        })
    }
}

/// `δ̄_l^(1) = η ψ(l+1)`.
pub fn delta1_bar(l: usize, kin: &Kinematics) -> Result<f64> {
    Ok(kin.eta()? * psi(l as f64 + 1.0))
}

/// Second-order phase shift and the diagnostics of its principal-value integral.
///
/// The returned diagnostics are scaled to radians, like the shift itself.
pub fn delta2(l: usize, kin: &Kinematics, qcfg: &PVQuadConfig) -> Result<(f64, PVResult)> {
    if kin.p == 0.0 {
        return Err(Error::domain("delta2", "requires p > 0"));
    }
    qcfg.validate()?;
    if kin.alpha == 0.0 {
        return Ok((0.0, PVResult::zero()));
    }
    // The full series is used right up to the pole: the singular limit would
    // drop the O(x ln x) asymmetry that survives the pairing.
    let wave = CoulombWave::with_crossover(l, 0.0);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // V in units of α, so the integral is independent of the coupling.
    let integrand = |x: f64| match wave.at_offset(x) {
        Ok(v) => v * v * kin.g_unchecked(x) / x,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let pv = principal_value(integrand, -1.0, f64::INFINITY, qcfg);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let pv = pv?;
    let two_beta = 2.0 * kin.beta;
    let scale = 0.5 * std::f64::consts::PI / (two_beta * two_beta) * kin.alpha * kin.alpha;
    let scaled = PVResult {
        value: scale * pv.value,
        est_error: scale * pv.est_error,
        evaluations: pv.evaluations,
        tail_bound: scale * pv.tail_bound,
    };
    Ok((scaled.value, scaled))
}

/// Phase shifts for `l = 0..=l_max`, with second-order shifts computed up to
/// `l_max_delta2` and held constant beyond it.
pub fn build_table(
    kin: &Kinematics,
    l_max: usize,
    l_max_delta2: usize,
    qcfg: &PVQuadConfig,
) -> Result<PhaseShiftTable> {
    build_table_with(kin, l_max, l_max_delta2, ExtensionPolicy::Hold, qcfg)
}

pub fn build_table_with(
    kin: &Kinematics,
    l_max: usize,
    l_max_delta2: usize,
    policy: ExtensionPolicy,
    qcfg: &PVQuadConfig,
) -> Result<PhaseShiftTable> {
    if l_max_delta2 > l_max {
        return Err(Error::Config(format!(
            "l_max_delta2 = {l_max_delta2} exceeds l_max = {l_max}"
        )));
    }
    let mut table = PhaseShiftTable::first_order(kin, l_max)?;
    let computed = (0..=l_max_delta2)
        .into_par_iter()
        .map(|l| delta2(l, kin, qcfg))
        .collect::<Result<Vec<_>>>()?;

    for (entry, (value, quad)) in table.entries.iter_mut().zip(&computed) {
        entry.delta2 = *value;
        entry.delta2_quad = Some(*quad);
    }
    let last = computed[l_max_delta2].0;
    let slope = if l_max_delta2 > 0 {
        let prev = computed[l_max_delta2 - 1].0;
        (last - prev) / (l_max_delta2 as f64 / (l_max_delta2 as f64 - 1.0)).ln()
    } else {
        0.0
    };
    for entry in table.entries.iter_mut().skip(l_max_delta2 + 1) {
        entry.delta2 = match policy {
            ExtensionPolicy::Hold => last,
            ExtensionPolicy::Zero => 0.0,
            ExtensionPolicy::LogExtrapolate if l_max_delta2 > 0 => {
                last + slope * (entry.l as f64 / l_max_delta2 as f64).ln()
            }
            ExtensionPolicy::LogExtrapolate => last,
        };
    }
    table.l_max_delta2 = Some(l_max_delta2);
    table.extension_policy = policy;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::EULER_GAMMA;

    fn low() -> Kinematics {
        Kinematics::electron(0.02).unwrap()
    }

    #[test]
    fn first_order_s_wave() {
        let kin = low();
        let d = delta1_bar(0, &kin).unwrap();
        assert!((d + kin.eta().unwrap() * EULER_GAMMA).abs() < 1e-15);
        assert!((d + 0.05386).abs() < 1e-4);
    }

    #[test]
    fn first_order_requires_motion() {
        let kin = Kinematics::electron(0.0).unwrap();
        assert!(delta1_bar(0, &kin).is_err());
        assert!(delta2(0, &kin, &PVQuadConfig::default()).is_err());
    }

    #[test]
    fn free_theory_table_is_zero() {
        let kin = low().with_alpha(0.0).unwrap();
        let t = build_table(&kin, 10, 0, &PVQuadConfig::default()).unwrap();
        assert!(t.entries.iter().all(|e| e.delta1_bar == 0.0 && e.delta2 == 0.0));
    }

    #[test]
    fn coupling_scaling() {
        let kin = low();
        let q = PVQuadConfig::default();
        let (d, _) = delta2(2, &kin, &q).unwrap();
        let (d2, _) = delta2(2, &kin.with_alpha(2.0 * kin.alpha).unwrap(), &q).unwrap();
        assert!((d2 - 4.0 * d).abs() <= 1e-14 * d.abs());
    }

    #[test]
    fn extension_policies() {
        let kin = low();
        let q = PVQuadConfig::default();
        let hold = build_table_with(&kin, 8, 3, ExtensionPolicy::Hold, &q).unwrap();
        let zero = build_table_with(&kin, 8, 3, ExtensionPolicy::Zero, &q).unwrap();
        let log = build_table_with(&kin, 8, 3, ExtensionPolicy::LogExtrapolate, &q).unwrap();
        for l in 4..=8 {
            assert_eq!(hold.entries[l].delta2, hold.entries[3].delta2);
            assert_eq!(zero.entries[l].delta2, 0.0);
            assert!(hold.entries[l].delta2_quad.is_none());
        }
        let slope = (log.entries[3].delta2 - log.entries[2].delta2) / (1.5f64).ln();
        let expected = log.entries[3].delta2 + slope * (8.0f64 / 3.0).ln();
        assert!((log.entries[8].delta2 - expected).abs() < 1e-15);
    }

    #[test]
    fn table_bounds_checked() {
        assert!(build_table(&low(), 3, 4, &PVQuadConfig::default()).is_err());
    }
}
