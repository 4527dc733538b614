//! Globally adaptive 7/15-point Gauss–Kronrod integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Result of a single 15-point rule on one interval.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
}

/// QUADPACK-style error scaling of `|K15 - G7|`.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    Panel {
        a,
        b,
        value: res_k * half,
        error: rescale_error((res_k - res_g) * half, res_abs * abs_half, res_asc * abs_half),
    }
}

pub(crate) const EVALS_PER_PANEL: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the given
/// partition and bisecting the worst panel until the summed error meets
/// `max(abs_tol, rel_tol |I|)`.
pub(crate) fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    debug_assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        heap.push(ByError(gk15(f, w[0], w[1])));
        evaluations += EVALS_PER_PANEL;
    }

    loop {
        let (value, error) = totals(heap.iter().map(|p| &p.0).chain(settled.iter()));
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::no_convergence("adaptive quadrature", "integrand produced non-finite values"));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        if heap.len() + settled.len() >= max_panels {
            return Err(Error::no_convergence(
                "adaptive quadrature",
                format!(
                    "panel limit {max_panels} reached on [{}, {}]: value {value:e}, error {error:e}",
                    breaks[0],
                    breaks[breaks.len() - 1]
                ),
            ));
        }
        let Some(ByError(worst)) = heap.pop() else {
            // Every panel is at the resolution limit; the error cannot shrink further.
            return Err(Error::no_convergence(
                "adaptive quadrature",
                format!("roundoff limit reached: value {value:e}, error {error:e}"),
            ));
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            settled.push(worst);
            continue;
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        evaluations += 2 * EVALS_PER_PANEL;
        heap.push(ByError(left));
        heap.push(ByError(right));
    }
}

fn totals<'a>(panels: impl Iterator<Item = &'a Panel>) -> (f64, f64) {
    panels.fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let p = gk15(&|x: f64| x.powi(9) - 3.0 * x * x, -1.0, 2.0);
        let exact = (2f64.powi(10) - 1.0) / 10.0 - (8.0 + 1.0);
        assert!((p.value - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_log_singularity() {
        // ∫_0^1 ln x dx = -1
        let r = adaptive(&|x: f64| x.ln(), &[0.0, 1.0], 1e-12, 1e-12, 500).unwrap();
        assert!((r.value + 1.0).abs() < 1e-11);
        assert!(r.error >= 0.0);
    }

    #[test]
    fn panel_limit_is_reported() {
        let r = adaptive(&|x: f64| (1.0 / x).sin() / x, &[1e-6, 1.0], 1e-14, 0.0, 4);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
