//! The subcommands. Each resolves its settings, computes a [`Table`] and
//! hands it to [`output::emit`] together with a manifest.

use std::f64::consts::LN_2;

use coulomb_pt::cross_section::{delta_profile, moller, rutherford, PartialWaveSum, XSecConfig};
use coulomb_pt::kinematics::Kinematics;
use coulomb_pt::phase_shifts::{build_table_with, delta1_bar, delta2, PhaseShiftTable};
use coulomb_pt::quadrature::{principal_value, sinc_log_identity, PVQuadConfig};
use coulomb_pt::special::{coulomb_sigma_exact, digamma, hyp2f1_half, legendre_p};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Common};
use crate::error::CliError;
use crate::output::{self, Cell, RunManifest, Table};
use crate::settings::{log_grid, stepped_grid, Overrides, Settings};

/// Default highest partial wave of the phase-shift table.
pub const PHASE_SHIFT_L_MAX: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    ValidationFailed,
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    match &cli.command {
        Command::PhaseShifts(a) => {
            let s = resolve(&a.common, &Overrides::default())?;
            phase_shifts(&s, &a.common)
        }
        Command::XsecAngle(a) => {
            let extra = Overrides {
                theta_min_deg: a.theta_min_deg,
                theta_max_deg: a.theta_max_deg,
                theta_step_deg: a.theta_step_deg,
                ..Default::default()
            };
            let s = resolve(&a.common, &extra)?;
            xsec_angle(&s, &a.common)
        }
        Command::XsecMomentum(a) => {
            let extra = Overrides {
                theta_deg: a.theta_deg,
                p_min_mev: a.p_min_mev,
                p_max_mev: a.p_max_mev,
                p_points: a.p_points,
                ..Default::default()
            };
            let s = resolve(&a.common, &extra)?;
            xsec_momentum(&s, &a.common)
        }
        Command::DeltaProfile(a) => {
            let extra = Overrides {
                theta_deg: a.theta_deg,
                delta_min: a.delta_min,
                delta_max: a.delta_max,
                delta_step: a.delta_step,
                ..Default::default()
            };
            let s = resolve(&a.common, &extra)?;
            delta_profile_cmd(&s, &a.common)
        }
        Command::Validate(a) => {
            let s = resolve(&a.common, &Overrides::default())?;
            if let Some(t) = a.force_tolerance {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(CliError::BadArgs(format!("--force-tolerance must be >= 0, got {t}")));
                }
            }
            validate(&s, &a.common, a.force_tolerance)
        }
    }
}

fn resolve(common: &Common, extra: &Overrides) -> Result<Settings, CliError> {
    let file = match &common.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    let s = Settings::resolve(&[&file, &common.overrides(), extra]);
    s.validate()?;
    Ok(s)
}

fn kinematics_at(s: &Settings, p: f64) -> Result<Kinematics, CliError> {
    if !(p.is_finite() && p > 0.0) {
        return Err(CliError::BadArgs(format!("momentum must be positive, got {p}")));
    }
    Ok(Kinematics::new(p, s.mass_mev, s.alpha)?)
}

fn kinematics_json(kin: &Kinematics) -> Value {
    json!({
        "p_mev": kin.p,
        "mass_mev": kin.mass,
        "alpha": kin.alpha,
        "energy_mev": kin.energy,
        "beta": kin.beta,
        "eta": kin.eta().ok(),
    })
}

fn manifest(command: &str, common: &Common, config: Value) -> RunManifest {
    RunManifest::new(command, config, common.format)
}

fn finish(table: &Table, manifest: RunManifest, common: &Common) -> Result<Status, CliError> {
    output::emit(table, manifest, common.out.as_deref())?;
    Ok(Status::Success)
}

/// Phase shifts for `l = 0..=l_max` at the order requested.
fn table_for(s: &Settings, kin: &Kinematics, l_max: usize) -> Result<(PhaseShiftTable, usize), CliError> {
    let l_max_delta2 = s.l_max_delta2.min(l_max);
    let table = if s.second_order() {
        build_table_with(kin, l_max, l_max_delta2, s.extension, &s.pv_config())?
    } else {
        PhaseShiftTable::first_order(kin, l_max)?
    };
    Ok((table, l_max_delta2))
}

fn common_config(s: &Settings, l_max: usize, l_max_delta2: usize) -> Value {
    let mut settings = s.clone();
    settings.l_max = Some(l_max);
    settings.l_max_delta2 = l_max_delta2;
    settings.r_over_sigma_x = s.xsec_config().r_over_sigma_x;
    json!({
        "settings": settings,
        "pv_quad": s.pv_config(),
        "second_order": s.second_order(),
    })
}

fn with_extra(mut base: Value, key: &str, value: Value) -> Value {
    base.as_object_mut().expect("config is an object").insert(key.into(), value);
    base
}

fn phase_shifts(s: &Settings, common: &Common) -> Result<Status, CliError> {
    let kin = kinematics_at(s, s.p_mev)?;
    let l_max = s.l_max.unwrap_or(PHASE_SHIFT_L_MAX);
    let (table, l_max_delta2) = table_for(s, &kin, l_max)?;
    let eta = kin.eta()?;

    let mut out = Table::new(&["l", "delta1_bar", "delta2", "sigma_exact", "delta2_quad_error"]);
    for e in &table.entries {
        out.push(vec![
            Cell::Int(e.l as i64),
            Cell::Float(e.delta1_bar),
            Cell::Float(e.delta2),
            Cell::Float(coulomb_sigma_exact(e.l, eta)?),
            e.delta2_quad.map_or(Cell::Empty, |q| Cell::Float(q.total_error())),
        ]);
    }
    let config = with_extra(common_config(s, l_max, l_max_delta2), "kinematics", kinematics_json(&kin));
    finish(&out, manifest("phase-shifts", common, config), common)
}

/// `cos θ` for an angle in degrees, exactly antisymmetric under `θ → 180° - θ`
/// whenever `180 - θ` is exact.
fn cos_deg(deg: f64) -> f64 {
    if deg > 90.0 {
        -(180.0 - deg).to_radians().cos()
    } else {
        deg.to_radians().cos()
    }
}

fn check_open_angle(deg: f64) -> Result<(), CliError> {
    if deg > 0.0 && deg < 180.0 {
        Ok(())
    } else {
        Err(CliError::BadArgs(format!(
            "angles must lie strictly between 0 and 180 degrees (reference formulas diverge), got {deg}"
        )))
    }
}

/// Model, Rutherford and Møller cross sections at one angle.
fn xsec_row(sum: &PartialWaveSum, deg: f64) -> Result<[f64; 3], CliError> {
    let theta = deg.to_radians();
    let kin = sum.kinematics();
    Ok([
        sum.amplitude_at_cos(cos_deg(deg))?.norm_sqr(),
        rutherford(theta, kin)?,
        moller(theta, kin)?,
    ])
}

fn cross_section_sum(s: &Settings, kin: &Kinematics) -> Result<(PartialWaveSum, XSecConfig, usize), CliError> {
    let xcfg = s.xsec_config();
    xcfg.validate()?;
    let l_max = xcfg.l_max();
    let (table, l_max_delta2) = table_for(s, kin, l_max)?;
    Ok((PartialWaveSum::new(&table, &xcfg)?, xcfg, l_max_delta2))
}

fn xsec_angle(s: &Settings, common: &Common) -> Result<Status, CliError> {
    let kin = kinematics_at(s, s.p_mev)?;
    let angles = stepped_grid(s.theta_min_deg, s.theta_max_deg, s.theta_step_deg)?;
    for &a in &angles {
        check_open_angle(a)?;
    }
    let (sum, xcfg, l_max_delta2) = cross_section_sum(s, &kin)?;
    let rows = angles
        .par_iter()
        .map(|&deg| xsec_row(&sum, deg))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = Table::new(&["theta_deg", "model", "rutherford", "moller"]);
    for (deg, [m, r, mo]) in angles.iter().zip(rows) {
        out.push(vec![Cell::Float(*deg), Cell::Float(m), Cell::Float(r), Cell::Float(mo)]);
    }
    let config = common_config(s, xcfg.l_max(), l_max_delta2);
    let config = with_extra(config, "kinematics", kinematics_json(&kin));
    let config = with_extra(config, "xsec", json!(xcfg));
    finish(&out, manifest("xsec-angle", common, config), common)
}

fn xsec_momentum(s: &Settings, common: &Common) -> Result<Status, CliError> {
    check_open_angle(s.theta_deg)?;
    let momenta = log_grid(s.p_min_mev, s.p_max_mev, s.p_points)?;
    let xcfg = s.xsec_config();
    xcfg.validate()?;
    let mut l_max_delta2 = 0;
    let rows = momenta
        .par_iter()
        .map(|&p| {
            let kin = kinematics_at(s, p)?;
            let (sum, _, lmd2) = cross_section_sum(s, &kin)?;
            Ok((xsec_row(&sum, s.theta_deg)?, lmd2))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut out = Table::new(&["p_mev", "model", "rutherford", "moller"]);
    for (p, ([m, r, mo], lmd2)) in momenta.iter().zip(rows) {
        l_max_delta2 = lmd2;
        out.push(vec![Cell::Float(*p), Cell::Float(m), Cell::Float(r), Cell::Float(mo)]);
    }
    let config = with_extra(common_config(s, xcfg.l_max(), l_max_delta2), "xsec", json!(xcfg));
    finish(&out, manifest("xsec-momentum", common, config), common)
}

fn delta_profile_cmd(s: &Settings, common: &Common) -> Result<Status, CliError> {
    let kin = kinematics_at(s, s.p_mev)?;
    if !(0.0..=180.0).contains(&s.theta_deg) {
        return Err(CliError::BadArgs(format!("theta must lie in [0, 180] degrees, got {}", s.theta_deg)));
    }
    let grid = stepped_grid(s.delta_min, s.delta_max, s.delta_step)?;
    let xcfg = s.xsec_config();
    xcfg.validate()?;
    let (table, l_max_delta2) = table_for(s, &kin, xcfg.l_max())?;
    let profile = delta_profile(s.theta_deg.to_radians(), &table, &xcfg, &grid)?;

    let mut out = Table::new(&["delta", "xsec"]);
    for (d, x) in &profile.points {
        out.push(vec![Cell::Float(*d), Cell::Float(*x)]);
    }
    out.footer.push(("argmax_delta".into(), Cell::Float(profile.argmax)));
    let config = common_config(s, xcfg.l_max(), l_max_delta2);
    let config = with_extra(config, "kinematics", kinematics_json(&kin));
    let config = with_extra(config, "xsec", json!(xcfg));
    finish(&out, manifest("delta-profile", common, config), common)
}

/// One self-check: `|computed - reference| <= tolerance`.
struct Check {
    name: String,
    computed: f64,
    reference: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, computed: f64, reference: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            computed,
            reference,
            tolerance,
        }
    }

    fn error(&self) -> f64 {
        (self.computed - self.reference).abs()
    }
}

/// Oracle values from 40-digit mpmath evaluations.
const SPECIAL_ORACLES: [(&str, f64); 5] = [
    ("digamma(10.5)", 2.303_001_034_297_686_4),
    ("hyp2f1(1/2,4;9/2;0.9)", 2.466_951_953_556_088_2),
    ("hyp2f1(1/2,51;103/2;0.9999)", 24.569_552_823_822_594),
    ("legendre P_500(0.73)", 0.017_094_799_105_961_185),
    ("coulomb sigma_10(eta=0.0933)", 0.219_419_741_526_130_73),
];

/// Second-order shifts at p = 0.02 MeV for an electron pair, from an
/// independent mpmath principal-value computation.
const DELTA2_ORACLES: [(usize, f64); 3] = [
    (0, 1.034_800_370_467_849_4e-5),
    (5, 9.505_282_426_623_762e-7),
    (50, 1.035_235_413_731_020_8e-7),
];

fn run_checks(pv: &PVQuadConfig) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();

    let special = [
        digamma(10.5)?,
        hyp2f1_half(3, 0.9)?.value,
        hyp2f1_half(50, 0.9999)?.value,
        legendre_p(500, 0.73)?,
        coulomb_sigma_exact(10, 0.0933)?,
    ];
    for ((name, want), got) in SPECIAL_ORACLES.iter().zip(special) {
        checks.push(Check::new(format!("special {name}"), got, *want, 1e-12 * want.abs()));
    }

    let default_pv = PVQuadConfig::default();
    checks.push(Check::new(
        "pv 1/x on [-1,1]",
        principal_value(|x| 1.0 / x, -1.0, 1.0, &default_pv)?.value,
        0.0,
        1e-10,
    ));
    checks.push(Check::new(
        "pv 1/x on [-1,2]",
        principal_value(|x| 1.0 / x, -1.0, 2.0, &default_pv)?.value,
        LN_2,
        1e-10,
    ));
    checks.push(Check::new(
        "pv e^x/x on [-1,1]",
        principal_value(|x: f64| x.exp() / x, -1.0, 1.0, &default_pv)?.value,
        2.114_501_750_751_457,
        1e-10,
    ));

    let alpha = coulomb_pt::kinematics::FINE_STRUCTURE;
    for l in [0, 1, 5] {
        for pr in [10.0, 100.0, 1000.0] {
            let r = sinc_log_identity(l, pr, alpha)?;
            checks.push(Check::new(
                format!("sinc-log identity l={l} pr={pr}"),
                r.numeric,
                r.analytic,
                1e-6 * alpha,
            ));
        }
    }

    let kin = Kinematics::electron(0.02)?;
    let eta = kin.eta()?;
    let mut worst: f64 = 0.0;
    for l in 1..=50 {
        worst = worst.max((delta1_bar(l, &kin)? - coulomb_sigma_exact(l, eta)?).abs());
    }
    checks.push(Check::new("max |delta1_bar - sigma_l|, l=1..50", worst, 0.0, 2e-3));

    for (l, want) in DELTA2_ORACLES {
        let (got, _) = delta2(l, &kin, pv)?;
        checks.push(Check::new(format!("delta2 l={l}"), got, want, 1e-6 * want));
    }
    let mut drift: f64 = 0.0;
    for l in 0..=50 {
        let (a, _) = delta2(l, &kin, pv)?;
        let (b, _) = delta2(l, &kin, &pv.refined())?;
        drift = drift.max((a - b).abs() / a.abs());
    }
    checks.push(Check::new("delta2 refinement drift (relative)", drift, 0.0, 1e-2));

    let cfg = XSecConfig::default();
    let table = build_table_with(&kin, cfg.l_max(), 50, Default::default(), pv)?;
    let sum = PartialWaveSum::new(&table, &cfg)?;
    let mut dev: f64 = 0.0;
    for deg in (30..=150).step_by(5) {
        let r = sum.record(f64::from(deg).to_radians())?;
        dev = dev.max((r.model / r.rutherford - 1.0).abs());
    }
    checks.push(Check::new("rutherford deviation, p=0.02 MeV, 30-150 deg", dev, 0.0, 0.05));

    let fast = Kinematics::electron(5.0)?;
    let sym = XSecConfig {
        symmetrize: true,
        ..cfg
    };
    let table = build_table_with(&fast, sym.l_max(), 50, Default::default(), pv)?;
    let sum = PartialWaveSum::new(&table, &sym)?;
    let (mut log_ratio, mut parity): (f64, f64) = (0.0, 0.0);
    for deg in (30..=150).step_by(5) {
        let deg = f64::from(deg);
        let [m, _, mo] = xsec_row(&sum, deg)?;
        log_ratio = log_ratio.max((m / mo).log10().abs());
        let [mirror, _, _] = xsec_row(&sum, 180.0 - deg)?;
        parity = parity.max((m - mirror).abs() / m);
    }
    checks.push(Check::new("max |log10(model/moller)|, p=5 MeV symmetrised", log_ratio, 0.0, 1.0));
    checks.push(Check::new("symmetrised parity (relative)", parity, 0.0, 1e-12));
    Ok(checks)
}

fn validate(s: &Settings, common: &Common, force_tolerance: Option<f64>) -> Result<Status, CliError> {
    let mut checks = run_checks(&s.pv_config())?;
    if let Some(t) = force_tolerance {
        for c in &mut checks {
            c.tolerance = t;
        }
    }
    let mut out = Table::new(&["check", "computed", "reference", "abs_error", "tolerance", "pass"]);
    let mut failed = 0;
    for c in &checks {
        let pass = c.error() <= c.tolerance;
        if !pass {
            failed += 1;
        }
        eprintln!(
            "[{}] {}: computed {:.6e}, reference {:.6e}, error {:.2e}, tolerance {:.2e}",
            if pass { "PASS" } else { "FAIL" },
            c.name,
            c.computed,
            c.reference,
            c.error(),
            c.tolerance
        );
        out.push(vec![
            Cell::Text(c.name.replace(',', ";")),
            Cell::Float(c.computed),
            Cell::Float(c.reference),
            Cell::Float(c.error()),
            Cell::Float(c.tolerance),
            Cell::Bool(pass),
        ]);
    }
    eprintln!("{} of {} checks passed", checks.len() - failed, checks.len());
    let mut settings = s.clone();
    settings.r_over_sigma_x = s.xsec_config().r_over_sigma_x;
    let config = json!({
        "settings": settings,
        "pv_quad": s.pv_config(),
        "force_tolerance": force_tolerance,
    });
    output::emit(&out, manifest("validate", common, config), common.out.as_deref())?;
    Ok(if failed == 0 {
        Status::Success
    } else {
        Status::ValidationFailed
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrored_cosines() {
        for deg in [5.0, 17.5, 60.0, 89.0] {
            assert_eq!(cos_deg(180.0 - deg), -cos_deg(deg));
        }
        assert!((cos_deg(120.0) + 0.5).abs() < 1e-15);
    }
}
