//! Subcommand implementations. Each returns the tables to emit.

use std::path::Path;

use photon_darwinism::config::load_scenario;
use photon_darwinism::information::{max_estimate_delta, redundancy_lower_bound_scaled};
use photon_darwinism::oracle::battery::{self, BatteryConfig, BatteryReport};
use photon_darwinism::superposition::max_entropy;
use photon_darwinism::{
    alpha_disk, alpha_numeric, disk_rate, mi_mway, mi_mway_limit, mi_unbalanced, mi_unbalanced_limit,
    mutual_information, redundancy_estimate, redundancy_exact, CatSpec, DecoherenceFactor, Disk, Error,
    QuadratureOrder, Scenario, SkyRegion,
};
use rayon::prelude::*;

use crate::output::{Cell, Table};
use crate::sweep::{Axis, Range};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn scenario(path: Option<&Path>) -> Result<Scenario<f64>> {
    let path = path.ok_or_else(|| CliError::config("config", "this command needs --config <path>"))?;
    load_scenario(path).map_err(|e| match e {
        Error::Io { path, message } => CliError::config("config", format!("{path}: {message}")),
        other => other.into(),
    })
}

fn gamma(t: f64) -> Result<DecoherenceFactor<f64>> {
    DecoherenceFactor::from_time(t).map_err(|_| CliError::config("t_over_tauD", format!("{t} must be >= 0")))
}

/// Closed-form rate ratio and receptivity where the region has one.
fn closed_forms(region: &SkyRegion<f64>) -> Option<(f64, f64)> {
    match region {
        SkyRegion::Disk(Disk { theta0, chi }) => Some((disk_rate(*theta0, *chi), alpha_disk(*theta0, *chi).ok()?)),
        SkyRegion::Isotropic => Some((1.0, 0.0)),
        SkyRegion::Point { .. } => Some((0.0, 1.0)),
        SkyRegion::Custom(_) => None,
    }
}

pub fn rate(config: Option<&Path>, order: QuadratureOrder) -> Result<Vec<Table>> {
    let s = scenario(config)?;
    s.dipole_warnings();
    let r = s.decoherence_rate(order)?;
    let closed = match s.region {
        SkyRegion::Point { .. } => None,
        ref region => closed_forms(region).map(|c| c.0),
    };
    let mut t = Table::new(&["tau_d_inv_s", "td_inv_s", "ratio", "ratio_closed_form", "photon_density_m3"]);
    t.push(vec![
        r.tau_d_inv.into(),
        r.td_inv.into(),
        r.ratio.into(),
        closed.into(),
        s.photon_number_density()?.into(),
    ]);
    Ok(vec![t])
}

pub fn alpha(config: Option<&Path>, order: QuadratureOrder) -> Result<Vec<Table>> {
    let s = scenario(config)?;
    s.dipole_warnings();
    let rec = alpha_numeric(&s.region, order)?;
    let closed = closed_forms(&s.region).map(|c| c.1);
    let gap = closed.map(|c| (c - rec.alpha).abs());
    let tau_d = match s.decoherence_rate(order) {
        Ok(r) => Some(r.tau_d_inv),
        Err(Error::Config { key, message }) if key == "irradiance_W_m2" => {
            log::warn!("{message}; SI rates left blank");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let mut t = Table::new(&["alpha", "alpha_closed_form", "closed_form_gap", "tau_d_inv_s", "tau_r_inv_s", "tau_r_ratio"]);
    t.push(vec![
        rec.alpha.into(),
        closed.into(),
        gap.into(),
        tau_d.into(),
        tau_d.map(|x| rec.alpha * x).into(),
        rec.tau_r_ratio.into(),
    ]);
    Ok(vec![t])
}

pub struct PipArgs {
    pub times: Vec<f64>,
    pub alphas: Vec<f64>,
    pub f_count: usize,
}

pub fn pip(args: &PipArgs) -> Result<Vec<Table>> {
    let fs = Range::new(0.0, 1.0, args.f_count, Default::default()).map_err(|e| CliError::config("f_count", e.message))?.values();
    let mut out = Vec::new();
    for &alpha in &args.alphas {
        check_alpha(alpha)?;
        for &t in &args.times {
            let g = gamma(t)?;
            let mut table = Table::new(&["f", "mi_nats"]).titled("partial information").param("alpha", alpha).param("t_over_tauD", t);
            for &f in &fs {
                table.push(vec![f.into(), mutual_information(g, alpha, f)?.value().into()]);
            }
            out.push(table);
        }
    }
    Ok(out)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(CliError::config("alpha", format!("{alpha} is outside [0, 1]")))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < max_estimate_delta::<f64>() {
        Ok(())
    } else {
        Err(CliError::config("delta", format!("{delta} is outside (0, 1/(2 ln 2))")))
    }
}

/// `R_δ`, blank for a non-receptive environment where it is undefined.
fn exact(g: DecoherenceFactor<f64>, alpha: f64, delta: f64) -> Result<Option<f64>> {
    if alpha == 0.0 {
        return Ok(None);
    }
    Ok(redundancy_exact(g, alpha, delta)?)
}

/// `R_lower` where the bound is defined.
fn lower_bound(t: f64, alpha: f64, delta: f64) -> Option<f64> {
    redundancy_lower_bound_scaled(t, alpha, delta).ok()
}

/// Receptivity for redundancy curves: explicit, else from the scenario's
/// region, else 1.
pub fn resolve_alpha(explicit: Option<f64>, config: Option<&Path>, order: QuadratureOrder) -> Result<f64> {
    match (explicit, config) {
        (Some(a), _) => {
            check_alpha(a)?;
            Ok(a)
        }
        (None, Some(_)) => Ok(alpha_numeric(&scenario(config)?.region, order)?.alpha),
        (None, None) => Ok(1.0),
    }
}

pub fn redundancy(times: &Range, alpha: f64, delta: f64) -> Result<Vec<Table>> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    let mut table = Table::new(&["t_over_tauD", "R_exact", "R_estimate", "R_lower"]).param("alpha", alpha).param("delta", delta);
    let mut started = false;
    for t in times.values() {
        let exact = exact(gamma(t)?, alpha, delta)?;
        // Blank until the first point where R ≥ 1 exists.
        started |= exact.is_some_and(|r| r >= 1.0);
        table.push(vec![
            t.into(),
            if started { exact.into() } else { Cell::Blank },
            redundancy_estimate(t, alpha, delta)?.into(),
            lower_bound(t, alpha, delta).into(),
        ]);
    }
    Ok(vec![table])
}

pub struct OracleArgs {
    pub seed: u64,
    pub cap: Option<f64>,
    pub fragment_photons: Option<usize>,
    pub trials: Option<usize>,
}

pub fn oracle(args: &OracleArgs, order: QuadratureOrder) -> Result<BatteryReport> {
    let mut config = BatteryConfig { seed: args.seed, quadrature: order, ..BatteryConfig::default() };
    if let Some(cap) = args.cap {
        config.enumeration_cap = cap;
    }
    if let Some(n) = args.fragment_photons {
        config.fragment_photons = n;
    }
    if let Some(n) = args.trials {
        config.interval_trials = n;
    }
    Ok(battery::run(&config)?)
}

pub fn oracle_table(report: &BatteryReport) -> Table {
    let mut t = Table::new(&["check", "passed", "value", "threshold", "detail"]).param("seed", Cell::Int(report.config.seed as i64));
    for c in &report.checks {
        t.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Bool(c.passed),
            c.value.into(),
            c.threshold.into(),
            Cell::Text(c.detail.clone()),
        ]);
    }
    t
}

/// Fixed values for the parameters a sweep does not vary.
#[derive(Debug, Clone)]
pub struct Fixed {
    pub t: f64,
    pub f: f64,
    pub alpha: f64,
    pub delta: f64,
    pub theta0_deg: f64,
    pub chi_deg: f64,
    pub mu: f64,
    pub m: usize,
}

fn columns(axis: Axis, si: bool) -> Vec<&'static str> {
    match axis {
        Axis::TOverTauD => vec!["t_over_tauD", "mi_nats", "R_exact", "R_estimate", "R_lower"],
        Axis::F => vec!["f", "mi_nats", "mi_unbalanced_nats", "mi_mway_nats"],
        Axis::Theta0 | Axis::Chi => {
            let mut c = vec!["theta0_deg", "chi_deg", "rate_ratio", "alpha", "alpha_quadrature", "tau_r_ratio"];
            if si {
                c.push("tau_d_inv_s");
            }
            c
        }
        Axis::Delta => vec!["delta", "R_exact", "R_estimate", "R_lower"],
        Axis::Mu => vec!["mu", "mi_nats", "max_entropy_nats", "renormalized", "renormalized_limit"],
        Axis::M => vec!["M", "mi_nats", "ln_M", "renormalized", "renormalized_limit"],
    }
}

fn sweep_point(axis: Axis, x: f64, p: &Fixed, order: QuadratureOrder, base: Option<&Scenario<f64>>) -> Result<Vec<Cell>> {
    match axis {
        Axis::TOverTauD => {
            let g = gamma(x)?;
            Ok(vec![
                x.into(),
                mutual_information(g, p.alpha, p.f)?.value().into(),
                exact(g, p.alpha, p.delta)?.into(),
                redundancy_estimate(x, p.alpha, p.delta)?.into(),
                lower_bound(x, p.alpha, p.delta).into(),
            ])
        }
        Axis::F => {
            let g = gamma(p.t)?;
            Ok(vec![
                x.into(),
                mutual_information(g, p.alpha, x)?.value().into(),
                mi_unbalanced(g, x, p.mu)?.value().into(),
                mi_mway(g, x, p.m)?.value().into(),
            ])
        }
        Axis::Theta0 | Axis::Chi => {
            let (theta0_deg, chi_deg) = if axis == Axis::Theta0 { (x, p.chi_deg) } else { (p.theta0_deg, x) };
            let disk = Disk::from_degrees(theta0_deg, chi_deg).map_err(|e| CliError::config(if axis == Axis::Theta0 { "theta0" } else { "chi" }, e.to_string()))?;
            let rate_ratio = disk_rate(disk.theta0, disk.chi);
            let alpha = alpha_disk(disk.theta0, disk.chi)?;
            let quad = alpha_numeric(&SkyRegion::Disk(disk), order)?;
            let mut row = vec![
                theta0_deg.into(),
                chi_deg.into(),
                rate_ratio.into(),
                alpha.into(),
                quad.alpha.into(),
                (alpha * rate_ratio).into(),
            ];
            if let Some(s) = base {
                row.push((rate_ratio * s.td_inv()?).into());
            }
            Ok(row)
        }
        Axis::Delta => {
            let g = gamma(p.t)?;
            check_delta(x)?;
            Ok(vec![
                x.into(),
                exact(g, p.alpha, x)?.into(),
                redundancy_estimate(p.t, p.alpha, x)?.into(),
                lower_bound(p.t, p.alpha, x).into(),
            ])
        }
        Axis::Mu => {
            let g = gamma(p.t)?;
            let mi = mi_unbalanced(g, p.f, x)?.value();
            let cat = CatSpec::unbalanced(x)?;
            let plateau = max_entropy(&cat.probabilities)?.value();
            Ok(vec![
                x.into(),
                mi.into(),
                plateau.into(),
                if plateau > 0.0 { Cell::Num(mi / plateau) } else { Cell::Blank },
                mi_unbalanced_limit(g, p.f)?.into(),
            ])
        }
        Axis::M => {
            let g = gamma(p.t)?;
            let m = x.round().max(2.0) as usize;
            let mi = mi_mway(g, p.f, m)?.value();
            let ln_m = (m as f64).ln();
            Ok(vec![Cell::Int(m as i64), mi.into(), ln_m.into(), (mi / ln_m).into(), mi_mway_limit(g, p.f)?.into()])
        }
    }
}

pub fn sweep(axis: Axis, range: &Range, fixed: &Fixed, order: QuadratureOrder, config: Option<&Path>) -> Result<Vec<Table>> {
    check_alpha(fixed.alpha)?;
    if !(0.0..=1.0).contains(&fixed.f) {
        return Err(CliError::config("f", format!("{} is outside [0, 1]", fixed.f)));
    }
    if matches!(axis, Axis::TOverTauD) {
        check_delta(fixed.delta)?;
    }
    if matches!(axis, Axis::Delta) && fixed.t < 0.0 {
        return Err(CliError::config("t", "must be >= 0"));
    }
    if fixed.m < 2 {
        return Err(CliError::config("M", "must be at least 2"));
    }
    let base = match (axis, config) {
        (Axis::Theta0 | Axis::Chi, Some(_)) => Some(scenario(config)?),
        _ => None,
    };
    let xs = range.values();
    // Emission follows the grid regardless of completion order.
    let rows: Vec<Result<Vec<Cell>>> =
        xs.par_iter().map(|&x| sweep_point(axis, x, fixed, order, base.as_ref())).collect();
    let mut table = Table::new(&columns(axis, base.is_some())).param("axis", Cell::Text(axis.to_string()));
    table = match axis {
        Axis::TOverTauD => table.param("alpha", fixed.alpha).param("f", fixed.f).param("delta", fixed.delta),
        Axis::F => table.param("t_over_tauD", fixed.t).param("alpha", fixed.alpha).param("mu", fixed.mu).param("M", Cell::Int(fixed.m as i64)),
        Axis::Theta0 => table.param("chi_deg", fixed.chi_deg),
        Axis::Chi => table.param("theta0_deg", fixed.theta0_deg),
        Axis::Delta => table.param("t_over_tauD", fixed.t).param("alpha", fixed.alpha),
        Axis::Mu | Axis::M => table.param("t_over_tauD", fixed.t).param("f", fixed.f),
    };
    for r in rows {
        table.push(r?);
    }
    Ok(vec![table])
}
