use crate::args::*;
use crate::config::{load_substrate, require};
use crate::output::{Cell, PointRecord, Table};
use crate::{config_err, CliError, CliResult};
use cavityj::bulk::{BulkCavity, DEFAULT_L_PERP_M};
use cavityj::dielectric::DielectricModel;
use cavityj::exchange::{
    self, delta_u_dipole_mode_sum, delta_u_image_charge, exchange_from_nodes, ExchangeOptions, ExchangeResult,
    HubbardBond, InteractionInM, Mode, Screening,
};
use cavityj::fp::FabryPerot;
use cavityj::kernel::{centroid, Kernel, KernelNodes, Regularizer, TableKernel};
use cavityj::single_mode;
use cavityj::spinwave::{bz_path, peak_position, Broadening, SpinWaveModel};
use cavityj::surface::SurfaceCavity;
use cavityj::units::{p0_rho0, spaced, Spacing};
use rayon::prelude::*;
use serde_json::{json, Value};

/// What a command hands back for writing.
pub struct Outcome {
    pub resolved: Value,
    pub table: Table,
    pub points: Vec<PointRecord>,
    pub results: Value,
}

const NM_PER_UM: f64 = 1000.0;
const DEFAULT_U0: f64 = 5.0;
const DEFAULT_A: f64 = 0.6;
const DEFAULT_T: f64 = 0.5;
const DEFAULT_FP_CUTOFF: f64 = 20.0;

fn spacing(s: Option<SpacingArg>) -> Spacing {
    match s.unwrap_or(SpacingArg::Lin) {
        SpacingArg::Lin => Spacing::Linear,
        SpacingArg::Log => Spacing::Logarithmic,
    }
}

fn shape(s: Option<ShapeArg>) -> Broadening {
    match s.unwrap_or(ShapeArg::Lorentzian) {
        ShapeArg::Lorentzian => Broadening::Lorentzian,
        ShapeArg::Gaussian => Broadening::Gaussian,
    }
}

fn cells(xs: &[f64]) -> Vec<Cell> {
    xs.iter().map(|&x| Cell::F(x)).collect()
}

/// `mid` (FP only), a number in nm, or the explicit `z_nm`.
fn probe_height(z: &Option<String>, z_nm: Option<f64>, d_nm: Option<f64>) -> CliResult<f64> {
    if let Some(v) = z_nm {
        return Ok(v);
    }
    match z.as_deref() {
        None | Some("mid") => match d_nm {
            Some(d) => Ok(0.5 * d),
            None => Err(CliError::Config("missing required option `z_nm`".into())),
        },
        Some(s) => s
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("probe height '{s}' is neither `mid` nor a number in nm"))),
    }
}

fn regularizer(cutoff: f64) -> CliResult<Regularizer> {
    if cutoff == 0.0 {
        Ok(Regularizer::NONE)
    } else {
        Regularizer::from_cutoff(cutoff).map_err(config_err)
    }
}

fn log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && b.is_finite() && **b != 0.0)
        .map(|(a, b)| (a.ln(), b.abs().ln()))
        .collect();
    if pts.len() < 2 || pts.len() != x.len() {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

// ---------------------------------------------------------------- pdos

pub fn pdos(a: PdosArgs) -> CliResult<Outcome> {
    let cavity = require(a.cavity, "cavity")?;
    let n = a.n.unwrap_or(1000);
    let sp = spacing(a.spacing);
    match cavity {
        CavityKind::Fp => {
            let d = require(a.d_um, "d_um")? * NM_PER_UM;
            let z = probe_height(&a.z, a.z_nm, Some(d))?;
            let fp = FabryPerot::new(d, z).map_err(config_err)?;
            let wmax = a.omega_max_ev.unwrap_or(20.0 * fp.omega_c());
            let wmin = a.omega_min_ev.unwrap_or(default_min(wmax, n, sp));
            let grid = spaced(wmin, wmax, n, sp).map_err(config_err)?;
            let resolved = json!({
                "cavity": "fp", "d_um": d / NM_PER_UM, "z_nm": z, "omega_min_ev": wmin,
                "omega_max_ev": wmax, "n": n, "spacing": sp,
            });
            let flag = if fp.outside_model_validity() { "outside_model_validity" } else { "ok" };
            let mut table = Table::new(&["omega_eV", "pdos", "pdos_free", "delta_pdos", "pdos_parallel", "pdos_perp"]);
            let mut points = Vec::with_capacity(n);
            for (i, &w) in grid.iter().enumerate() {
                let par = fp.pdos_parallel(w);
                table.push(cells(&[w, par, w * w, fp.delta_pdos(w), par, fp.pdos_perp(w)]));
                points.push(PointRecord::ok(i, Some(w), flag));
            }
            let results = json!({ "omega_c_eV": fp.omega_c(), "outside_model_validity": fp.outside_model_validity() });
            Ok(Outcome { resolved, table, points, results })
        }
        CavityKind::Surface => {
            let sub_spec = require(a.substrate.clone(), "substrate")?;
            let sub = load_substrate(&sub_spec)?;
            let z = probe_height(&a.z, a.z_nm, None)?;
            let sc = SurfaceCavity::new(sub, z).map_err(config_err)?;
            let modes = a.modes.unwrap_or(ModeSelection::Surface);
            let l_perp = a.l_perp_m.unwrap_or(DEFAULT_L_PERP_M);
            let bulk = match modes {
                ModeSelection::Surface => None,
                _ => Some(BulkCavity::new(sub, z, l_perp).map_err(config_err)?),
            };
            let wmax = a.omega_max_ev.unwrap_or(1.2 * sub.omega_lo());
            let wmin = a.omega_min_ev.unwrap_or(default_min(wmax, n, sp));
            let grid = spaced(wmin, wmax, n, sp).map_err(config_err)?;
            let resolved = json!({
                "cavity": "surface", "substrate": sub_spec, "substrate_model": sub, "z_nm": z,
                "omega_min_ev": wmin, "omega_max_ev": wmax, "n": n, "spacing": sp, "modes": modes,
                "l_perp_m": bulk.as_ref().map(|_| l_perp),
            });
            let rows: Vec<(Vec<Cell>, PointRecord)> = grid
                .par_iter()
                .enumerate()
                .map(|(i, &w)| {
                    let surf = sc.pdos(w);
                    let free = w * w;
                    let bulk_val = bulk.as_ref().map(|b| b.pdos(w).map(|p| p.total()));
                    let (rho, bulk_col, rec) = match bulk_val {
                        None => (surf + free, f64::NAN, PointRecord::ok(i, Some(w), "ok")),
                        Some(Ok(b)) => {
                            let rho = if modes == ModeSelection::Bulk { b } else { surf + b };
                            (rho, b, PointRecord::ok(i, Some(w), "ok"))
                        }
                        Some(Err(e)) => (f64::NAN, f64::NAN, PointRecord::failed(i, Some(w), e.to_string())),
                    };
                    (cells(&[w, rho, free, rho - free, surf, bulk_col]), rec)
                })
                .collect();
            let mut table = Table::new(&["omega_eV", "pdos", "pdos_free", "delta_pdos", "pdos_surface", "pdos_bulk"]);
            let mut points = Vec::with_capacity(n);
            for (r, p) in rows {
                table.push(r);
                points.push(p);
            }
            let results = json!({ "limit_frequency_eV": sc.limit_frequency(), "omega_TO_eV": sub.omega_to() });
            Ok(Outcome { resolved, table, points, results })
        }
    }
}

fn default_min(wmax: f64, n: usize, sp: Spacing) -> f64 {
    match sp {
        Spacing::Linear => wmax / n.max(1) as f64,
        Spacing::Logarithmic => wmax * 1e-3,
    }
}

// ---------------------------------------------------------------- exchange

struct Geometry {
    cavity: CavityKind,
    substrate: Option<DielectricModel>,
    fixed_z: Option<f64>,
    modes: ModeSelection,
    l_perp_m: f64,
    bulk_omega_max: f64,
    bulk_n: usize,
    reg: Regularizer,
}

/// Kernel nodes and characteristic energy for one geometry point.
fn point_nodes(g: &Geometry, param: f64, p0: f64) -> cavityj::Result<(KernelNodes, f64, bool)> {
    match g.cavity {
        CavityKind::Fp => {
            let d = param * NM_PER_UM;
            let fp = FabryPerot::new(d, g.fixed_z.unwrap_or(0.5 * d))?;
            let k = fp.kernel(p0, g.reg)?;
            Ok((k.nodes()?, k.characteristic_energy()?, fp.outside_model_validity()))
        }
        CavityKind::Surface => {
            let sub = g.substrate.expect("validated");
            let sc = SurfaceCavity::new(sub, param)?;
            let mut nodes = KernelNodes::default();
            let mut omega_star = sc.limit_frequency();
            if g.modes != ModeSelection::Bulk {
                let k = sc.kernel(p0, g.reg);
                nodes = k.nodes()?;
                omega_star = centroid(&nodes)?;
            }
            if g.modes != ModeSelection::Surface {
                let b = BulkCavity::new(sub, param, g.l_perp_m)?;
                let grid = spaced(g.bulk_omega_max / g.bulk_n as f64, g.bulk_omega_max, g.bulk_n, Spacing::Linear)?;
                let drho = grid
                    .iter()
                    .map(|&w| b.pdos(w).map(|p| p.total() - w * w))
                    .collect::<cavityj::Result<Vec<f64>>>()?;
                let t = TableKernel::new(grid, drho, p0, g.reg)?;
                nodes = nodes.merged(t.nodes()?);
            }
            Ok((nodes, omega_star, false))
        }
    }
}

pub fn exchange_cmd(a: ExchangeArgs) -> CliResult<Outcome> {
    let cavity = require(a.cavity, "cavity")?;
    let t = a.t_ev.unwrap_or(DEFAULT_T);
    let u0 = a.u0_ev.unwrap_or(DEFAULT_U0);
    let a_nm = a.a_nm.unwrap_or(DEFAULT_A);
    let bond = HubbardBond::new(t, u0, a_nm).map_err(config_err)?;
    let p0 = p0_rho0(a_nm).map_err(config_err)?;
    let cutoff = a.cutoff_ev.unwrap_or(match cavity {
        CavityKind::Fp => DEFAULT_FP_CUTOFF,
        CavityKind::Surface => 0.0,
    });
    let reg = regularizer(cutoff)?;
    if cavity == CavityKind::Fp && cutoff == 0.0 {
        return Err(CliError::Config("the Fabry-Perot kernel needs a finite cutoff_ev".into()));
    }
    let screening = a.screening.unwrap_or(match cavity {
        CavityKind::Fp => ScreeningArg::None,
        CavityKind::Surface => ScreeningArg::ImageCharge,
    });
    if cavity == CavityKind::Fp && screening != ScreeningArg::None {
        return Err(CliError::Config("screening applies to surface cavities only".into()));
    }
    let interaction = a.interaction_in_m.unwrap_or(InteractionArg::Screened);
    let opts = ExchangeOptions {
        interaction_in_m: match interaction {
            InteractionArg::Screened => InteractionInM::Screened,
            InteractionArg::Bare => InteractionInM::Bare,
        },
        ..Default::default()
    };
    let substrate = match cavity {
        CavityKind::Surface => Some(load_substrate(&require(a.substrate.clone(), "substrate")?)?),
        CavityKind::Fp => None,
    };
    let modes = a.modes.unwrap_or(ModeSelection::Surface);
    if cavity == CavityKind::Fp && modes != ModeSelection::Surface {
        return Err(CliError::Config("`modes` applies to surface cavities only".into()));
    }
    let (param_name, single) = match cavity {
        CavityKind::Fp => ("d_um", a.d_um),
        CavityKind::Surface => ("z_nm", a.z_nm),
    };
    let fixed_z = match cavity {
        CavityKind::Fp => match (&a.z, a.z_nm) {
            (_, Some(z)) => Some(z),
            (None, None) => None,
            (Some(s), None) if s == "mid" => None,
            (Some(s), None) => Some(probe_height(&Some(s.clone()), None, None)?),
        },
        CavityKind::Surface => None,
    };
    let sweep_spacing = spacing(a.sweep_spacing);
    let params: Vec<f64> = match (a.sweep_from, a.sweep_to) {
        (Some(from), Some(to)) => spaced(from, to, a.sweep_count.unwrap_or(10), sweep_spacing).map_err(config_err)?,
        (None, None) => vec![require(single, param_name)?],
        _ => return Err(CliError::Config("give both sweep_from and sweep_to".into())),
    };
    let bulk_n = a.bulk_n.unwrap_or(200);
    if bulk_n == 0 {
        return Err(CliError::Config("bulk_n must be positive".into()));
    }
    let geom = Geometry {
        cavity,
        substrate,
        fixed_z,
        modes,
        l_perp_m: a.l_perp_m.unwrap_or(DEFAULT_L_PERP_M),
        bulk_omega_max: a.bulk_omega_max_ev.unwrap_or_else(|| substrate.map(|s| 2.0 * s.omega_lo()).unwrap_or(0.0)),
        bulk_n,
        reg,
    };
    let resolved = json!({
        "cavity": cavity, "param": param_name, "points": params, "t_ev": t, "u0_ev": u0, "a_nm": a_nm,
        "cutoff_ev": cutoff, "screening": screening, "interaction_in_m": interaction,
        "substrate": a.substrate, "substrate_model": substrate, "fixed_z_nm": fixed_z,
        "modes": modes,
        "l_perp_m": (modes != ModeSelection::Surface).then_some(geom.l_perp_m),
        "bulk_omega_max_ev": (modes != ModeSelection::Surface).then_some(geom.bulk_omega_max),
        "bulk_n": (modes != ModeSelection::Surface).then_some(bulk_n),
    });

    let compute = |param: f64| -> cavityj::Result<(ExchangeResult, f64, bool)> {
        let (nodes, omega_star, outside) = point_nodes(&geom, param, p0)?;
        let scr = match (screening, geom.substrate) {
            (ScreeningArg::ImageCharge, Some(s)) => delta_u_image_charge(&bond, &s, param)?,
            (ScreeningArg::DipoleModeSum, Some(s)) => delta_u_dipole_mode_sum(&bond, &SurfaceCavity::new(s, param)?)?,
            _ => Screening::NONE,
        };
        let r = exchange_from_nodes(&bond, &nodes, omega_star, scr, opts)?;
        let single = if r.g_eff_sq >= 0.0 {
            single_mode::closed_form(r.g_eff_sq, omega_star / u0)?
        } else {
            f64::NAN
        };
        Ok((r, single, outside))
    };
    let results: Vec<cavityj::Result<(ExchangeResult, f64, bool)>> = params.par_iter().map(|&p| compute(p)).collect();

    let mut table = Table::new(&[
        param_name,
        "J_over_J0_total",
        "J_over_J0_dynamical",
        "J_over_J0_screening",
        "delta_J_total",
        "delta_J_dynamical",
        "delta_U_eV",
        "g_eff_sq",
        "theta",
        "omega_star_eV",
        "J_perturbative",
        "delta_J_perturbative",
        "J_single_mode_dynamical",
        "validity_flag",
    ]);
    let mut points = Vec::new();
    let (mut dyn_dev, mut scr_dev) = (Vec::new(), Vec::new());
    for (i, (p, r)) in params.iter().zip(&results).enumerate() {
        match r {
            Ok((r, single, outside)) => {
                let flag = if *outside { "outside_model_validity" } else { "ok" };
                let mut row = cells(&[
                    *p,
                    r.j_over_j0,
                    r.contribution_dynamical,
                    r.contribution_screening,
                    r.delta_j_over_j0,
                    r.delta_dynamical,
                    r.delta_u,
                    r.g_eff_sq,
                    r.theta,
                    r.omega_star,
                    r.j_perturbative,
                    r.delta_j_perturbative,
                    *single,
                ]);
                row.push(Cell::S(flag.into()));
                table.push(row);
                points.push(PointRecord::ok(i, Some(*p), flag));
                dyn_dev.push(r.delta_dynamical);
                scr_dev.push(r.contribution_screening - 1.0);
            }
            Err(e) => {
                let mut row = cells(&[*p]);
                row.extend(std::iter::repeat_n(Cell::F(f64::NAN), 12));
                row.push(Cell::S("failed".into()));
                table.push(row);
                points.push(PointRecord::failed(i, Some(*p), e.to_string()));
                dyn_dev.push(f64::NAN);
                scr_dev.push(f64::NAN);
            }
        }
    }
    let mut summary = json!({
        "slope_dynamical": log_slope(&params, &dyn_dev),
        "slope_screening": log_slope(&params, &scr_dev),
    });
    if cavity == CavityKind::Fp {
        summary["eta_sensitivity"] = eta_sensitivity(&geom, params[0], p0, &bond, opts, cutoff);
    }
    Ok(Outcome { resolved, table, points, results: summary })
}

/// Dynamical shift at the first sweep point for half and double the cutoff.
fn eta_sensitivity(g: &Geometry, param: f64, p0: f64, bond: &HubbardBond, opts: ExchangeOptions, cutoff: f64) -> Value {
    let rows: Vec<Value> = [0.5, 1.0, 2.0]
        .iter()
        .map(|f| {
            let reg = Regularizer::from_cutoff(cutoff * f).expect("positive cutoff");
            let geo = Geometry { reg, substrate: g.substrate, modes: g.modes, ..*g };
            let v = point_nodes(&geo, param, p0)
                .and_then(|(n, w, _)| exchange_from_nodes(bond, &n, w, Screening::NONE, opts))
                .map(|r| r.delta_dynamical)
                .unwrap_or(f64::NAN);
            json!({ "cutoff_ev": cutoff * f, "delta_J_dynamical": v })
        })
        .collect();
    Value::Array(rows)
}

// ---------------------------------------------------------------- single-mode

pub fn single_mode_cmd(a: SingleModeArgs) -> CliResult<Outcome> {
    let cavity = require(a.cavity, "cavity")?;
    let u0 = a.u0_ev.unwrap_or(DEFAULT_U0);
    let a_nm = a.a_nm.unwrap_or(DEFAULT_A);
    let p0 = p0_rho0(a_nm).map_err(config_err)?;
    let n_max = a.n_max.unwrap_or(4);
    let cutoff = a.cutoff_ev.unwrap_or(match cavity {
        CavityKind::Fp => DEFAULT_FP_CUTOFF,
        CavityKind::Surface => 0.0,
    });
    let reg = regularizer(cutoff)?;
    let (nodes, omega_star, resolved) = match cavity {
        CavityKind::Fp => {
            let d = require(a.d_um, "d_um")? * NM_PER_UM;
            let z = probe_height(&a.z, a.z_nm, Some(d))?;
            let k = FabryPerot::new(d, z).and_then(|f| f.kernel(p0, reg)).map_err(config_err)?;
            let nodes = k.nodes().map_err(num_err)?;
            let resolved = json!({ "cavity": "fp", "d_um": d / NM_PER_UM, "z_nm": z });
            (nodes, k.characteristic_energy().map_err(num_err)?, resolved)
        }
        CavityKind::Surface => {
            let spec = require(a.substrate.clone(), "substrate")?;
            let sub = load_substrate(&spec)?;
            let z = probe_height(&a.z, a.z_nm, None)?;
            let k = SurfaceCavity::new(sub, z).map_err(config_err)?.kernel(p0, reg);
            let nodes = k.nodes().map_err(num_err)?;
            let resolved = json!({ "cavity": "surface", "substrate": spec, "substrate_model": sub, "z_nm": z });
            (nodes, k.characteristic_energy().map_err(num_err)?, resolved)
        }
    };
    let mut resolved = resolved;
    resolved["n_max"] = json!(n_max);
    resolved["u0_ev"] = json!(u0);
    resolved["a_nm"] = json!(a_nm);
    resolved["cutoff_ev"] = json!(cutoff);
    let full = exchange::dynamical(&nodes, u0, 1e-11).map_err(num_err)?;
    let theta = omega_star / u0;
    let weights: Vec<f64> = (0..=n_max).map(|n| exchange::single_mode_weight(&nodes, n, omega_star, p0)).collect();
    let mut table = Table::new(&["n", "K_bar", "K_bar_ratio", "g2_bar", "theta", "J_closed_form", "J_full_dynamical"]);
    let mut points = Vec::new();
    for (n, &w) in weights.iter().enumerate() {
        let g2 = p0 * omega_star * omega_star * w;
        let j = if g2 >= 0.0 { single_mode::closed_form(g2, theta).map_err(num_err)? } else { f64::NAN };
        let mut row = vec![Cell::I(n as i64)];
        row.extend(cells(&[w, w / weights[0], g2, theta, j, full.ratio]));
        table.push(row);
        points.push(PointRecord::ok(n, Some(n as f64), "ok"));
    }
    let sign_change = weights.iter().any(|w| w.signum() != weights[0].signum());
    let max_dev = weights.iter().map(|w| (w / weights[0] - 1.0).abs()).fold(0.0, f64::max);
    let results = json!({ "omega_star_eV": omega_star, "sign_change": sign_change, "max_ratio_deviation": max_dev });
    Ok(Outcome { resolved, table, points, results })
}

fn num_err(e: cavityj::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

// ---------------------------------------------------------------- variational

pub fn variational_cmd(a: VariationalArgs) -> CliResult<Outcome> {
    let t = a.t_ev.unwrap_or(DEFAULT_T);
    let u0 = a.u0_ev.unwrap_or(DEFAULT_U0);
    let bond = HubbardBond::new(t, u0, DEFAULT_A).map_err(config_err)?;
    let omega = require(a.omega_ev.clone(), "omega_ev")?;
    let g2 = require(a.g2.clone(), "g2")?;
    let g2l = a.g2_long.clone().unwrap_or_else(|| vec![0.0; omega.len()]);
    if omega.len() != g2.len() || g2.len() != g2l.len() || omega.is_empty() {
        return Err(CliError::Config("omega_ev, g2 and g2_long need the same non-zero length".into()));
    }
    let modes: Vec<Mode> = omega
        .iter()
        .zip(&g2)
        .zip(&g2l)
        .map(|((&w, &g), &gl)| Mode::new(w, g, gl))
        .collect::<cavityj::Result<_>>()
        .map_err(config_err)?;
    let resolved = json!({ "t_ev": t, "u0_ev": u0, "omega_ev": omega, "g2": g2, "g2_long": g2l });
    let v = exchange::variational_exchange(&bond, &modes).map_err(num_err)?;
    let mut table = Table::new(&[
        "J_over_J0",
        "s",
        "bound_s1_over_J0",
        "delta_U_eV",
        "residual",
        "sum_g2",
        "sum_omega_g2_eV",
    ]);
    let sg: f64 = g2.iter().sum();
    let swg: f64 = omega.iter().zip(&g2).map(|(w, g)| w * g).sum();
    table.push(cells(&[v.j_over_j0, v.s, v.bound_s1_over_j0, v.delta_u, v.residual, sg, swg]));
    let results = json!({ "enhanced": v.j_over_j0 > 1.0 });
    Ok(Outcome { resolved, table, points: vec![PointRecord::ok(0, None, "ok")], results })
}

// ---------------------------------------------------------------- raman

pub fn raman_cmd(a: RamanArgs) -> CliResult<Outcome> {
    let j = a.j_ev.unwrap_or(0.1);
    let k = a.k_ev.unwrap_or(0.0);
    let spin = a.spin.unwrap_or(0.5);
    let base = SpinWaveModel::new(j, k, spin).map_err(config_err)?;
    let shifts = a.delta_j_pct.clone().unwrap_or_else(|| vec![0.0, 2.0, 4.0]);
    if shifts.is_empty() {
        return Err(CliError::Config("delta_j_pct must not be empty".into()));
    }
    let max_shift = shifts.iter().cloned().fold(0.0, f64::max);
    let wmin = a.omega_min_ev.unwrap_or(0.0);
    let wmax = a.omega_max_ev.unwrap_or(6.0 * j * (1.0 + max_shift / 100.0));
    let n = a.n_omega.unwrap_or(2401);
    let lw = a.linewidth_mev.unwrap_or(2.0);
    let grid_n = a.grid.unwrap_or(256);
    let sh = shape(a.shape);
    let omegas = spaced(wmin, wmax, n, Spacing::Linear).map_err(config_err)?;
    let resolved = json!({
        "j_ev": j, "k_ev": k, "spin": spin, "delta_j_pct": shifts, "omega_min_ev": wmin, "omega_max_ev": wmax,
        "n_omega": n, "linewidth_mev": lw, "shape": a.shape.unwrap_or(ShapeArg::Lorentzian), "grid": grid_n,
    });
    let mut spectra = Vec::new();
    for &pct in &shifts {
        let m = base.with_j(j * (1.0 + pct / 100.0)).map_err(config_err)?;
        let xx = m.raman_spectrum([1.0, 0.0], [1.0, 0.0], &omegas, lw * 1e-3, sh, grid_n).map_err(config_err)?;
        let xy = m.raman_spectrum([1.0, 0.0], [0.0, 1.0], &omegas, lw * 1e-3, sh, grid_n).map_err(config_err)?;
        spectra.push((pct, m.j(), xx, xy));
    }
    // normalize to the reference two-magnon peak, located above the infrared edge
    let ref_xx = &spectra[0].2;
    let norm = omegas
        .iter()
        .zip(ref_xx)
        .filter(|(w, _)| **w >= 3.0 * j)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    let norm = if norm > 0.0 { norm } else { 1.0 };
    let mut table = Table::new(&["delta_J_pct", "omega_eV", "I_xx", "I_xy"]);
    let mut runs = Vec::new();
    let mut points = Vec::new();
    let ref_peak = peak_position(&omegas, ref_xx, 3.0 * j);
    for (i, (pct, jj, xx, xy)) in spectra.iter().enumerate() {
        for ((w, a), b) in omegas.iter().zip(xx).zip(xy) {
            table.push(cells(&[*pct, *w, a / norm, b / norm]));
        }
        let peak = peak_position(&omegas, xx, 3.0 * jj);
        runs.push(json!({
            "delta_J_pct": pct, "J_eV": jj, "peak_eV": peak,
            "shift_meV": peak.zip(ref_peak).map(|(p, r)| 1e3 * (p - r)),
        }));
        points.push(PointRecord::ok(i, Some(*pct), "ok"));
    }
    let results = json!({ "runs": runs, "normalization": norm });
    Ok(Outcome { resolved, table, points, results })
}

// ---------------------------------------------------------------- sqw

pub fn sqw_cmd(a: SqwArgs) -> CliResult<Outcome> {
    let j = a.j_ev.unwrap_or(0.1);
    let k = a.k_ev.unwrap_or(0.0);
    let spin = a.spin.unwrap_or(0.5);
    let m = SpinWaveModel::new(j, k, spin).map_err(config_err)?;
    let kind = a.kind.unwrap_or(SqwKind::Dispersion);
    let path_spec = a.path.clone().unwrap_or_else(|| "G,M,X,G".into());
    let per = a.points_per_segment.unwrap_or(50);
    let path = bz_path(&path_spec, per).map_err(config_err)?;
    let emax = path
        .iter()
        .map(|p| m.dispersion(p.kx, p.ky))
        .collect::<cavityj::Result<Vec<_>>>()
        .map_err(num_err)?
        .into_iter()
        .fold(0.0, f64::max);
    let mut resolved = json!({ "kind": kind, "path": path_spec, "points_per_segment": per, "j_ev": j, "k_ev": k, "spin": spin });
    let mut points = Vec::new();
    let table = match kind {
        SqwKind::Dispersion => {
            let mut t = Table::new(&["q_index", "distance", "kx", "ky", "label", "energy_eV", "weight"]);
            for (i, p) in path.iter().enumerate() {
                let e = m.dispersion(p.kx, p.ky).map_err(num_err)?;
                let mut row = vec![Cell::I(i as i64)];
                row.extend(cells(&[p.distance, p.kx, p.ky]));
                row.push(Cell::S(p.label.clone()));
                row.extend(cells(&[e, m.structure_factor_weight(p.kx, p.ky)]));
                t.push(row);
                points.push(PointRecord::ok(i, Some(p.distance), "ok"));
            }
            t
        }
        SqwKind::Heatmap => {
            let wmin = a.omega_min_ev.unwrap_or(0.0);
            let wmax = a.omega_max_ev.unwrap_or(1.25 * emax);
            let n = a.n_omega.unwrap_or(400);
            let lw = a.linewidth_mev.unwrap_or(2.0);
            let sh = shape(a.shape);
            let omegas = spaced(wmin, wmax, n, Spacing::Linear).map_err(config_err)?;
            resolved["omega_min_ev"] = json!(wmin);
            resolved["omega_max_ev"] = json!(wmax);
            resolved["n_omega"] = json!(n);
            resolved["linewidth_mev"] = json!(lw);
            resolved["shape"] = json!(a.shape.unwrap_or(ShapeArg::Lorentzian));
            let mut t = Table::new(&["q_index", "distance", "omega_eV", "intensity"]);
            for (i, p) in path.iter().enumerate() {
                let s = m.structure_factor(p.kx, p.ky, &omegas, lw * 1e-3, sh).map_err(num_err)?;
                for (w, v) in omegas.iter().zip(s) {
                    let mut row = vec![Cell::I(i as i64)];
                    row.extend(cells(&[p.distance, *w, v]));
                    t.push(row);
                }
                points.push(PointRecord::ok(i, Some(p.distance), "ok"));
            }
            t
        }
    };
    let results = json!({ "max_energy_eV": emax });
    Ok(Outcome { resolved, table, points, results })
}
