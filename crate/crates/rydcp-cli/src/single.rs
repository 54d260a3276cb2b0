//! Single-shot commands: one potential evaluation, conductivity tables,
//! Green's-tensor probes and the stack describe/regime summary.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::json;

use rydcp::atomic::AtomicState;
use rydcp::constants::{EV, H_PLANCK};
use rydcp::cp::CpSolver;
use rydcp::em::{green_scattering_matsubara, green_scattering_real, LayerStack};
use rydcp::materials::{GrapheneParams, MaterialModel};

use crate::stackfile::StackSpec;

pub struct PotentialArgs<'a> {
    pub spec: &'a StackSpec,
    pub n: u32,
    pub z0: f64,
    pub temp: f64,
    pub ef_ev: Option<f64>,
    pub model: Option<&'a str>,
    pub json: bool,
    pub joules: bool,
}

fn effective_stack(
    spec: &StackSpec,
    ef_ev: Option<f64>,
    model: Option<&str>,
) -> Result<LayerStack> {
    let mut stack = match ef_ev {
        Some(ev) => spec.with_fermi_energy(ev * EV)?,
        None => spec.stack.clone(),
    };
    stack = match model {
        Some("kubo") => stack.with_graphene_model(false),
        Some("nonlocal") => stack.with_graphene_model(true),
        Some(other) => bail!("unknown model '{other}' (kubo|nonlocal)"),
        None => stack,
    };
    Ok(stack)
}

pub fn potential(solver: &CpSolver, args: &PotentialArgs) -> Result<()> {
    let stack = effective_stack(args.spec, args.ef_ev, args.model)?;
    let state = AtomicState::ns(args.n);
    let b = solver.total_potential(&state, &stack, args.z0, args.temp)?;
    let regime = solver.regime_report(&state, args.z0, args.temp)?;
    let unit = if args.joules { H_PLANCK } else { 1.0 };
    let unit_name = if args.joules { "J" } else { "Hz" };
    if args.json {
        let per: Vec<_> = b
            .per_transition
            .iter()
            .map(|t| {
                json!({
                    "state": t.state.to_string(),
                    "contribution": t.contribution_hz * unit,
                    "share": t.share,
                })
            })
            .collect();
        let doc = json!({
            "state": state.to_string(),
            "z0_m": args.z0,
            "temp_k": args.temp,
            "unit": unit_name,
            "u_nres": b.u_nres * unit,
            "u_res_evan": b.u_res_evan * unit,
            "u_res_prop": b.u_res_prop * unit,
            "u_total": b.total * unit,
            "regime": {
                "retardation": regime.retardation_label(),
                "spectroscopic": regime.spectroscopic_label(),
                "geometric": regime.geometric_label(),
                "z_omega_m": regime.z_omega,
                "z_t_m": regime.z_t,
                "t_z_k": regime.t_z,
                "t_omega_k": regime.t_omega,
            },
            "per_transition": per,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
        return Ok(());
    }
    println!(
        "{} at z0 = {:.4e} m, T = {} K",
        state.to_string(),
        args.z0,
        args.temp
    );
    println!("  non-resonant       : {:14.6e} {unit_name}", b.u_nres * unit);
    println!("  resonant evanescent: {:14.6e} {unit_name}", b.u_res_evan * unit);
    println!("  resonant propagating: {:13.6e} {unit_name}", b.u_res_prop * unit);
    println!("  total              : {:14.6e} {unit_name}", b.total * unit);
    println!(
        "  regime: {} / {} / {}   (z_omega = {:.3e} m, z_T = {:.3e} m, T_z = {:.1f} K, T_omega = {:.2f} K)",
        regime.retardation_label(),
        regime.spectroscopic_label(),
        regime.geometric_label(),
        regime.z_omega,
        regime.z_t,
        regime.t_z,
        regime.t_omega
    );
    println!("  per-transition resonant shares:");
    for t in &b.per_transition {
        if t.contribution_hz == 0.0 {
            continue;
        }
        println!(
            "    {:>8}: {:12.4e} {unit_name}  share {:+.4}",
            t.state.to_string(),
            t.contribution_hz * unit,
            t.share
        );
    }
    Ok(())
}

pub struct ConductivityArgs<'a> {
    pub preset: &'a str,
    pub ef_ev: Option<f64>,
    pub gamma: Option<f64>,
    pub temp: f64,
    pub omega: Option<f64>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub ef_min_ev: Option<f64>,
    pub ef_max_ev: Option<f64>,
    pub points: usize,
    pub q: Option<f64>,
    pub imag_axis: bool,
    pub out: &'a Path,
}

pub fn conductivity(
    presets: &rydcp::materials::MaterialPresets,
    args: &ConductivityArgs,
) -> Result<()> {
    let mut model = presets.instantiate(args.preset, args.temp)?;
    if !model.is_sheet() {
        bail!("'{}' is not a sheet-conductivity preset", args.preset);
    }
    if let Some(ev) = args.ef_ev {
        model = model.with_fermi_energy(ev * EV);
    }
    if let Some(g) = args.gamma {
        model = match model {
            MaterialModel::KuboGraphene(p) => {
                MaterialModel::KuboGraphene(GrapheneParams { gamma: g, ..p })
            }
            MaterialModel::NonlocalGraphene(p) => {
                MaterialModel::NonlocalGraphene(GrapheneParams { gamma: g, ..p })
            }
            other => other,
        };
    }
    let q = args.q.unwrap_or(1e3);
    if matches!(model, MaterialModel::NonlocalGraphene(_)) && args.q.is_none() {
        eprintln!("note: non-local conductivity without --q uses q = 1e3 1/m");
    }

    let mut w = csv::Writer::from_path(args.out)?;
    w.write_record(["ef_ev", "omega_rad_s", "q_1_per_m", "re_sigma_s", "im_sigma_s"])?;
    let eval = |model: &MaterialModel, omega: f64| -> Result<(f64, f64)> {
        if args.imag_axis {
            Ok((model.sheet_conductivity_imag_axis(q, omega)?, 0.0))
        } else {
            let s = model.sheet_conductivity(q, omega)?;
            Ok((s.re, s.im))
        }
    };
    match (args.ef_min_ev, args.ef_max_ev, args.omega) {
        (Some(lo), Some(hi), Some(omega)) => {
            for i in 0..args.points {
                let ef = lo + (hi - lo) * i as f64 / (args.points.max(2) - 1) as f64;
                let m = model.with_fermi_energy(ef * EV);
                let (re, im) = eval(&m, omega)?;
                w.write_record([
                    format!("{ef}"),
                    format!("{omega}"),
                    format!("{q}"),
                    format!("{re}"),
                    format!("{im}"),
                ])?;
            }
        }
        (None, None, _) => {
            let (lo, hi) = (
                args.omega_min.context("need --omega-min or an E_F sweep")?,
                args.omega_max.context("need --omega-max or an E_F sweep")?,
            );
            let ef = model.fermi_energy().unwrap_or(0.0) / EV;
            for i in 0..args.points {
                let t = i as f64 / (args.points.max(2) - 1) as f64;
                let omega = (lo.ln() + t * (hi.ln() - lo.ln())).exp();
                let (re, im) = eval(&model, omega)?;
                w.write_record([
                    format!("{ef}"),
                    format!("{omega}"),
                    format!("{q}"),
                    format!("{re}"),
                    format!("{im}"),
                ])?;
            }
        }
        _ => bail!("either an E_F sweep (--ef-min/--ef-max with --omega) or an omega sweep"),
    }
    w.flush()?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

pub fn greens(
    spec: &StackSpec,
    z0: f64,
    temp: f64,
    omega: Option<f64>,
    xi: Option<f64>,
    json: bool,
) -> Result<()> {
    let resolved = spec.stack.resolve(temp);
    match (omega, xi) {
        (Some(w), None) => {
            let (ev, pr) = green_scattering_real(&resolved, z0, w, 1e-9)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "z0_m": z0, "omega_rad_s": w,
                        "evanescent": {"g_xx_re": ev.g_xx.re, "g_xx_im": ev.g_xx.im,
                                        "g_zz_re": ev.g_zz.re, "g_zz_im": ev.g_zz.im},
                        "propagating": {"g_xx_re": pr.g_xx.re, "g_xx_im": pr.g_xx.im,
                                         "g_zz_re": pr.g_zz.re, "g_zz_im": pr.g_zz.im},
                    }))?
                );
            } else {
                println!("scattering Green diagonal at z0 = {z0:.4e} m, omega = {w:.4e} rad/s");
                println!("  evanescent : g_xx = {:.6e}  g_zz = {:.6e}", ev.g_xx, ev.g_zz);
                println!("  propagating: g_xx = {:.6e}  g_zz = {:.6e}", pr.g_xx, pr.g_zz);
            }
        }
        (None, Some(x)) => {
            let m = green_scattering_matsubara(&resolved, z0, x, 1e-9)?;
            if json {
                let g = m.green.map(|g| (g.g_xx.re, g.g_zz.re));
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "z0_m": z0, "xi_rad_s": x,
                        "h_xx": m.h_xx, "h_zz": m.h_zz,
                        "g_xx": g.map(|g| g.0), "g_zz": g.map(|g| g.1),
                    }))?
                );
            } else {
                println!("imaginary-axis Green at z0 = {z0:.4e} m, xi = {x:.4e} rad/s");
                println!("  h = xi^2 g: h_xx = {:.6e}  h_zz = {:.6e}", m.h_xx, m.h_zz);
                if let Some(g) = m.green {
                    println!("  g_xx = {:.6e}  g_zz = {:.6e}", g.g_xx.re, g.g_zz.re);
                }
            }
        }
        _ => bail!("give exactly one of --omega or --xi"),
    }
    Ok(())
}

pub fn describe(
    solver: &CpSolver,
    spec: &StackSpec,
    n: Option<u32>,
    z0: Option<f64>,
    temp: Option<f64>,
) -> Result<()> {
    println!("stack: {} layers, top (atom side) first", spec.stack.layers().len());
    for (i, layer) in spec.stack.layers().iter().enumerate() {
        let thick = match layer.thickness {
            Some(t) => format!("{:.4e} m", t),
            None => "half-space".into(),
        };
        let mat = match &layer.material {
            MaterialModel::Dielectric { epsilon } if *epsilon == 1.0 => "vacuum".to_string(),
            MaterialModel::Dielectric { epsilon } => format!("dielectric eps = {epsilon}"),
            MaterialModel::DrudeMetal { omega_p, gamma_d } => {
                format!("Drude metal, omega_p = {omega_p:.3e} rad/s, Gamma_D = {gamma_d:.3e} rad/s")
            }
            other => format!("{other:?}"),
        };
        let marker = if spec.scan_layer == Some(i) { "  [d-axis]" } else { "" };
        println!("  layer {i}: {mat}, {thick}{marker}");
        if i + 1 < spec.stack.layers().len() {
            match &spec.stack.sheets()[i] {
                Some(sheet) => {
                    let (kind, p) = match &sheet.material {
                        MaterialModel::KuboGraphene(p) => ("graphene (Kubo)", p),
                        MaterialModel::NonlocalGraphene(p) => ("graphene (non-local)", p),
                        _ => unreachable!("validated sheet"),
                    };
                    let marker = if spec.scan_sheets.contains(&i) {
                        "  [ef-axis]"
                    } else {
                        ""
                    };
                    println!(
                        "  interface {i}: {kind}, E_F = {} eV, gamma = {:.3e} rad/s{marker}",
                        p.ef / EV,
                        p.gamma
                    );
                }
                None => println!("  interface {i}: bare"),
            }
        }
    }
    if let (Some(n), Some(z0), Some(temp)) = (n, z0, temp) {
        let state = AtomicState::ns(n);
        let r = solver.regime_report(&state, z0, temp)?;
        println!("regime for {} at z0 = {z0:.4e} m, T = {temp} K:", state.to_string());
        println!("  omega_- = {:.4e} rad/s, omega_+ = {:.4e} rad/s", r.omega_minus, r.omega_plus);
        println!("  z_omega = {:.4e} m, z_T = {:.4e} m", r.z_omega, r.z_t);
        println!("  T_z = {:.2f} K, T_omega = {:.3f} K", r.t_z, r.t_omega);
        println!(
            "  flags: {} / {} / {}",
            r.retardation_label(),
            r.spectroscopic_label(),
            r.geometric_label()
        );
    }
    Ok(())
}
