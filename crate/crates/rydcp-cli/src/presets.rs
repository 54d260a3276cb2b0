//! Bundled experiments. Each preset materializes its stack and scan files in
//! an output directory and (unless dry) runs them; the heavier map-style
//! presets generate their CSVs directly.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use rydcp::analysis::{extract_oscillation_wavelength, fit_empirical_model, P1Basis};
use rydcp::atomic::AtomicState;
use rydcp::constants::{C, EV, HBAR};
use rydcp::cp::CpSolver;
use rydcp::em::LayerStack;
use rydcp::materials::{
    lindhard_region, rpa_rt_polarizability, GrapheneParams, MaterialModel,
};
use rydcp::HalfInt;

use crate::config::ScanConfig;
use crate::plot;
use crate::stackfile::StackSpec;
use crate::Ctx;

pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", "graphene vs gold across n at z0 = lambda/10, 300 K"),
    ("fig3", "15S distance scan at 10 K plus the 30S Kubo/non-local pair"),
    ("fig4", "oscillation wavelength vs n at 10 K and 300 K (slow)"),
    ("fig6", "n scan at 10 um/10 K and 40S temperature scan at 5 um"),
    ("fig7", "per-transition resonant shares for 25S..45S at 5 um, 10 K"),
    ("fig8", "graphene conductivity vs Fermi energy at 9.88e11 rad/s"),
    ("fig9", "empirical-formula accuracy audit for 20S/30S/40S"),
    ("fig10", "double-layer spacing scan and the single-layer comparison"),
    ("fig11", "double-layer maps over Fermi energy and spacing"),
    ("fig12", "region map of the (q, hbar omega) plane"),
    ("fig13", "relaxation-time polarizability maps over four regions"),
];

const STACK_GRAPHENE: &str = "\
version = 1

[[layer]]
material = \"vacuum\"

[[layer]]
material = \"vacuum\"

[[sheet]]
interface = 0
material = \"graphene-kubo\"
";

const STACK_GOLD: &str = "\
version = 1

[[layer]]
material = \"vacuum\"

[[layer]]
material = \"gold-drude\"
thickness_um = 1.0

[[layer]]
material = \"vacuum\"
";

const STACK_DOUBLE_VACUUM: &str = "\
version = 1

[[layer]]
material = \"vacuum\"

[[layer]]
material = \"vacuum\"
thickness_nm = 11.0
scan_thickness = true

[[layer]]
material = \"vacuum\"

[[sheet]]
interface = 0
material = \"graphene-kubo\"
scan_ef = true

[[sheet]]
interface = 1
material = \"graphene-kubo\"
";

const STACK_DOUBLE_HBN: &str = "\
version = 1

[[layer]]
material = \"vacuum\"

[[layer]]
material = \"hbn\"
thickness_nm = 10.0
scan_thickness = true

[[layer]]
material = \"vacuum\"

[[sheet]]
interface = 0
material = \"graphene-kubo\"
scan_ef = true

[[sheet]]
interface = 1
material = \"graphene-kubo\"
";

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::write(dir.join(name), text).with_context(|| format!("writing {name}"))
}

fn run_config_text(ctx: &Ctx, dir: &Path, name: &str, text: &str, dry: bool) -> Result<usize> {
    write_file(dir, name, text)?;
    if dry {
        return Ok(0);
    }
    let path = dir.join(name);
    let config = ScanConfig::from_file(&path)?;
    let spec = StackSpec::from_file(&dir.join(&config.stack.file), &ctx.presets)?;
    let config = ScanConfig {
        out: dir.join(&config.out),
        ..config
    };
    let solver = ctx.solver(config.tol);
    crate::scan::run(&solver, &spec, &config)
}

fn graphene_kubo(temp: f64) -> MaterialModel {
    MaterialModel::KuboGraphene(GrapheneParams::from_ev(0.1, 4e12, temp).unwrap())
}

pub fn run_preset(ctx: &Ctx, name: &str, dir: &Path, dry: bool, scale: f64) -> Result<usize> {
    std::fs::create_dir_all(dir)?;
    let pts = |base: usize| ((base as f64 * scale).round() as usize).max(3);
    let mut failures = 0usize;
    match name {
        "fig2" => {
            write_file(dir, "graphene.toml", STACK_GRAPHENE)?;
            write_file(dir, "gold.toml", STACK_GOLD)?;
            if dry {
                return Ok(0);
            }
            // non-retarded across n: z0 = lambda(nS -> (n-1)P_1/2)/10
            let solver = ctx.solver(1e-8);
            let atom = solver.atom();
            let gold = StackSpec::from_file(&dir.join("gold.toml"), &ctx.presets)?.stack;
            let graphene = StackSpec::from_file(&dir.join("graphene.toml"), &ctx.presets)?.stack;
            let ns: Vec<u32> = (6..=50).step_by(2.max((2.0 / scale) as usize)).collect();
            let rows: Vec<String> = ns
                .par_iter()
                .map(|&n| {
                    let u = AtomicState::ns(n);
                    let k = AtomicState::new(n - 1, 1, HalfInt::HALF).unwrap();
                    let w = atom.transition_frequency(&u, &k).unwrap().abs();
                    let z0 = 2.0 * std::f64::consts::PI * C / w / 10.0;
                    let ug = solver.total_potential(&u, &graphene, z0, 300.0);
                    let ua = solver.total_potential(&u, &gold, z0, 300.0);
                    match (ug, ua) {
                        (Ok(g), Ok(a)) => {
                            format!("{n},{z0},{},{}", g.total, a.total)
                        }
                        (g, a) => format!(
                            "{n},{z0},,{}",
                            g.err()
                                .map(|e| e.to_string())
                                .or(a.err().map(|e| e.to_string()))
                                .unwrap_or_default()
                        ),
                    }
                })
                .collect();
            let mut csv = String::from("n,z0_m,u_graphene_hz,u_gold_hz\n");
            for r in rows {
                let _ = writeln!(csv, "{r}");
            }
            write_file(dir, "fig2.csv", &csv)?;
            write_file(
                dir,
                "fig2.py",
                &plot::xy_script("fig2.csv", "n", &["u_graphene_hz", "u_gold_hz"], false, false),
            )?;
        }
        "fig3" => {
            write_file(dir, "graphene.toml", STACK_GRAPHENE)?;
            let main = format!(
                "version = 1\nmodel = \"kubo\"\nout = \"fig3.csv\"\nplot = true\n\
                 [stack]\nfile = \"graphene.toml\"\n[atom]\nn = 15\n[fixed]\ntemp_k = 10.0\n\
                 [[axis]]\nkind = \"z0\"\nspacing = \"log\"\nmin_um = 1.0\nmax_um = 300.0\npoints = {}\n",
                pts(120)
            );
            failures += run_config_text(ctx, dir, "fig3.toml", &main, dry)?;
            for (model, out) in [("kubo", "fig3c_kubo.csv"), ("nonlocal", "fig3c_nonlocal.csv")] {
                let cfg = format!(
                    "version = 1\nmodel = \"{model}\"\nout = \"{out}\"\n\
                     [stack]\nfile = \"graphene.toml\"\n[atom]\nn = 30\n[fixed]\ntemp_k = 10.0\n\
                     [[axis]]\nkind = \"z0\"\nspacing = \"log\"\nmin_um = 1.0\nmax_um = 10.0\npoints = {}\n",
                    pts(15)
                );
                failures += run_config_text(ctx, dir, &format!("fig3c_{model}.toml"), &cfg, dry)?;
            }
        }
        "fig4" => {
            write_file(dir, "graphene.toml", STACK_GRAPHENE)?;
            if dry {
                return Ok(0);
            }
            let solver = ctx.solver(1e-8);
            let atom = solver.atom();
            let stack = StackSpec::from_file(&dir.join("graphene.toml"), &ctx.presets)?.stack;
            let ns: Vec<u32> = (10..=20).collect();
            let rows: Vec<String> = ns
                .par_iter()
                .map(|&n| {
                    let u = AtomicState::ns(n);
                    let down = AtomicState::new(n - 1, 1, HalfInt::HALF).unwrap();
                    let up = AtomicState::new(n, 1, HalfInt::HALF).unwrap();
                    let w_down = atom.transition_frequency(&u, &down).unwrap().abs();
                    let w_up = atom.transition_frequency(&u, &up).unwrap().abs();
                    let lam_down = 2.0 * std::f64::consts::PI * C / w_down;
                    let lam_up = 2.0 * std::f64::consts::PI * C / w_up;
                    let mut fields = vec![format!("{n}"), format!("{}", lam_down / 2.0), format!("{}", lam_up / 2.0)];
                    for temp in [10.0, 300.0] {
                        let ev = solver.evaluator(&stack, temp);
                        let lo = 0.55 * lam_down / 2.0;
                        let hi = 2.6 * lam_down;
                        let npts = pts(140);
                        let trace: Result<Vec<(f64, f64)>, _> = (0..npts)
                            .map(|i| {
                                let z = lo + (hi - lo) * i as f64 / (npts - 1) as f64;
                                ev.total(&u, z).map(|b| (z, b.total))
                            })
                            .collect();
                        match trace.map(|t| extract_oscillation_wavelength(&t, lam_down)) {
                            Ok(Ok(lam)) => fields.push(format!("{lam}")),
                            _ => fields.push(String::new()),
                        }
                    }
                    fields.join(",")
                })
                .collect();
            let mut csv =
                String::from("n,lambda_down_half_m,lambda_up_half_m,lambda_cp_10k_m,lambda_cp_300k_m\n");
            for r in rows {
                let _ = writeln!(csv, "{r}");
            }
            write_file(dir, "fig4.csv", &csv)?;
            write_file(
                dir,
                "fig4.py",
                &plot::xy_script(
                    "fig4.csv",
                    "n",
                    &["lambda_down_half_m", "lambda_up_half_m", "lambda_cp_10k_m", "lambda_cp_300k_m"],
                    false,
                    false,
                ),
            )?;
        }
        "fig6" => {
            write_file(dir, "graphene.toml", STACK_GRAPHENE)?;
            let a = format!(
                "version = 1\nmodel = \"kubo\"\nout = \"fig6a.csv\"\nplot = true\n\
                 [stack]\nfile = \"graphene.toml\"\n[atom]\n[fixed]\nz0_um = 10.0\ntemp_k = 10.0\n\
                 [[axis]]\nkind = \"n\"\nmin = 20\nmax = 50\nstep = {}\n",
                1.max((1.0 / scale) as u32)
            );
            failures += run_config_text(ctx, dir, "fig6a.toml", &a, dry)?;
            let b = format!(
                "version = 1\nmodel = \"kubo\"\nout = \"fig6b.csv\"\nplot = true\n\
                 [stack]\nfile = \"graphene.toml\"\n[atom]\nn = 40\n[fixed]\nz0_um = 5.0\n\
                 [[axis]]\nkind = \"temp\"\nspacing = \"linear\"\nmin_k = 10.0\nmax_k = 400.0\npoints = {}\n",
                pts(40)
            );
            failures += run_config_text(ctx, dir, "fig6b.toml", &b, dry)?;
        }
        "fig7" => {
            write_file(dir, "graphene.toml", STACK_GRAPHENE)?;
            if dry {
                return Ok(0);
            }
            let solver = ctx.solver(1e-8);
            let stack = StackSpec::from_file(&dir.join("graphene.toml"), &ctx.presets)?.stack;
            let ev = solver.evaluator(&stack, 10.0);
            let mut csv = String::from(
                "n,intermediate_n,intermediate_l,intermediate_j,contribution_hz,share\n",
            );
            for n in [25u32, 30, 35, 40, 45] {
                let res = ev.resonant(&AtomicState::ns(n), 5e-6)?;
                for t in &res.per_transition {
                    let _ = writeln!(
                        csv,
                        "{n},{},{},{},{},{}",
                        t.state.n, t.state.l, t.state.j, t.contribution_hz, t.share
                    );
                }
            }
            write_file(dir, "fig7.csv", &csv)?;
        }
        "fig8" => {
            if dry {
                return Ok(0);
            }
            let args = crate::single::ConductivityArgs {
                preset: "graphene-kubo",
                ef_ev: None,
                gamma: None,
                temp: 300.0,
                omega: Some(9.88e11),
                omega_min: None,
                omega_max: None,
                ef_min_ev: Some(0.0),
                ef_max_ev: Some(0.4),
                points: pts(41),
                q: None,
                imag_axis: false,
                out: &dir.join("fig8.csv"),
            };
            crate::single::conductivity(&ctx.presets, &args)?;
            write_file(
                dir,
                "fig8.py",
                &plot::xy_script("fig8.csv", "ef_ev", &["re_sigma_s", "im_sigma_s"], false, false),
            )?;
        }
        "fig9" => {
            write_file(dir, "graphene.toml", STACK_GRAPHENE)?;
            if dry {
                return Ok(0);
            }
            let solver = ctx.solver(1e-8);
            let stack = StackSpec::from_file(&dir.join("graphene.toml"), &ctx.presets)?.stack;
            // training grid at z0 = 5 um
            let z0_fit = 5e-6;
            let grid: Vec<(f64, f64, f64)> = [20u32, 25, 30, 35, 40]
                .par_iter()
                .flat_map_iter(|&n| {
                    (0..8).map(move |i| (n, 50.0 + 50.0 * i as f64))
                })
                .map(|(n, t)| {
                    let ev = solver.evaluator(&stack, t);
                    let u = ev.total(&AtomicState::ns(n), z0_fit).unwrap().total;
                    (n as f64, t, -u * z0_fit.powi(3))
                })
                .collect();
            let model = fit_empirical_model(&grid, P1Basis::Restricted)?;
            let (p1_7, p1_0) = model.p1.unwrap();
            write_file(
                dir,
                "empirical_model.json",
                &serde_json::to_string_pretty(&serde_json::json!({
                    "p1_n7_hz_m3_per_k": p1_7,
                    "p1_const_hz_m3_per_k": p1_0,
                    "p2_n4_hz_m3": model.p2.0,
                    "p2_n3_hz_m3": model.p2.1,
                }))?,
            )?;
            let mut csv = String::from("n,temp_k,z0_m,u_full_hz,u_empirical_hz,abs_diff_hz\n");
            let npts = pts(12);
            for temp in [10.0, 300.0] {
                let ev = solver.evaluator(&stack, temp);
                for n in [20u32, 30, 40] {
                    for i in 0..npts {
                        let z0 = 1e-6 * 10f64.powf(i as f64 / (npts - 1) as f64);
                        let full = ev.total(&AtomicState::ns(n), z0)?.total;
                        let emp =
                            rydcp::analysis::empirical_potential(&model, n as f64, temp, z0);
                        let _ = writeln!(
                            csv,
                            "{n},{temp},{z0},{full},{emp},{}",
                            (full - emp).abs()
                        );
                    }
                }
            }
            write_file(dir, "fig9.csv", &csv)?;
        }
        "fig10" => {
            write_file(dir, "double_vacuum.toml", STACK_DOUBLE_VACUUM)?;
            write_file(dir, "double_hbn.toml", STACK_DOUBLE_HBN)?;
            write_file(dir, "graphene.toml", STACK_GRAPHENE)?;
            for (stack, out) in [
                ("double_vacuum.toml", "fig10a_vacuum.csv"),
                ("double_hbn.toml", "fig10a_hbn.csv"),
            ] {
                let cfg = format!(
                    "version = 1\nmodel = \"kubo\"\nout = \"{out}\"\nplot = true\n\
                     [stack]\nfile = \"{stack}\"\n[atom]\nn = 30\n[fixed]\nz0_um = 2.0\ntemp_k = 300.0\n\
                     [[axis]]\nkind = \"d\"\nspacing = \"log\"\nmin_nm = 1.0\nmax_nm = 1000.0\npoints = {}\n",
                    pts(25)
                );
                failures += run_config_text(
                    ctx,
                    dir,
                    &format!("{}.toml", out.trim_end_matches(".csv")),
                    &cfg,
                    dry,
                )?;
            }
            // z0 scans: single layer vs d = 11 nm vs d = 1 um
            let single = format!(
                "version = 1\nmodel = \"kubo\"\nout = \"fig10b_slg.csv\"\n\
                 [stack]\nfile = \"graphene.toml\"\n[atom]\nn = 30\n[fixed]\ntemp_k = 300.0\n\
                 [[axis]]\nkind = \"z0\"\nspacing = \"log\"\nmin_um = 1.0\nmax_um = 10.0\npoints = {}\n",
                pts(12)
            );
            failures += run_config_text(ctx, dir, "fig10b_slg.toml", &single, dry)?;
            for (d_nm, out) in [(11.0, "fig10b_d11nm.csv"), (1000.0, "fig10b_d1um.csv")] {
                let cfg = format!(
                    "version = 1\nmodel = \"kubo\"\nout = \"{out}\"\n\
                     [stack]\nfile = \"double_vacuum.toml\"\n[atom]\nn = 30\n[fixed]\ntemp_k = 300.0\n\
                     [[axis]]\nkind = \"z0\"\nspacing = \"log\"\nmin_um = 1.0\nmax_um = 10.0\npoints = {pts}\n\
                     [[axis]]\nkind = \"d\"\nmin_nm = {d_nm}\nmax_nm = {d_nm}\npoints = 1\n",
                    pts = pts(12),
                )
                .replace("{d_nm}", &format!("{d_nm}"));
                failures += run_config_text(
                    ctx,
                    dir,
                    &format!("{}.toml", out.trim_end_matches(".csv")),
                    &cfg,
                    dry,
                )?;
            }
        }
        "fig11" => {
            write_file(dir, "double_hbn.toml", STACK_DOUBLE_HBN)?;
            write_file(dir, "double_vacuum.toml", STACK_DOUBLE_VACUUM)?;
            if dry {
                return Ok(0);
            }
            // (a) E_F(top) x E_F(bottom) at d = 10 nm: direct nested loop
            let solver = ctx.solver(1e-8);
            let spec = StackSpec::from_file(&dir.join("double_hbn.toml"), &ctx.presets)?;
            let npts = pts(9);
            let efs: Vec<f64> = (0..npts)
                .map(|i| -0.4 + 0.8 * i as f64 / (npts - 1) as f64)
                .collect();
            let cells: Vec<String> = efs
                .par_iter()
                .flat_map_iter(|&top| efs.iter().map(move |&bot| (top, bot)))
                .map(|(top, bot)| {
                    let mut sheets = spec.stack.sheets().to_vec();
                    for (i, ef) in [(0usize, top), (1, bot)] {
                        if let Some(s) = &mut sheets[i] {
                            s.material = s.material.with_fermi_energy(ef * EV);
                        }
                    }
                    let stack =
                        LayerStack::new(spec.stack.layers().to_vec(), sheets).unwrap();
                    match solver.total_potential(&AtomicState::ns(30), &stack, 2e-6, 300.0) {
                        Ok(b) => format!("{top},{bot},{}", b.total),
                        Err(e) => format!("{top},{bot},#{e}"),
                    }
                })
                .collect();
            let mut csv = String::from("ef_top_ev,ef_bottom_ev,u_total_hz\n");
            for c in cells {
                let _ = writeln!(csv, "{c}");
            }
            write_file(dir, "fig11a.csv", &csv)?;
            // (b) spacing x E_F(top), bottom pinned at 0 eV
            let cfg = format!(
                "version = 1\nmodel = \"kubo\"\nout = \"fig11b.csv\"\n\
                 [stack]\nfile = \"fig11b_stack.toml\"\n[atom]\nn = 30\n[fixed]\nz0_um = 2.0\ntemp_k = 300.0\n\
                 [[axis]]\nkind = \"d\"\nspacing = \"log\"\nmin_nm = 1.0\nmax_nm = 1000.0\npoints = {}\n\
                 [[axis]]\nkind = \"ef\"\nspacing = \"linear\"\nmin_ev = -0.4\nmax_ev = 0.4\npoints = {}\n",
                pts(10),
                pts(9)
            );
            let stack_b = STACK_DOUBLE_VACUUM.replace(
                "[[sheet]]\ninterface = 1\nmaterial = \"graphene-kubo\"\n",
                "[[sheet]]\ninterface = 1\nmaterial = \"graphene-kubo\"\nef_ev = 0.0\n",
            );
            write_file(dir, "fig11b_stack.toml", &stack_b)?;
            failures += run_config_text(ctx, dir, "fig11b.toml", &cfg, dry)?;
        }
        "fig12" => {
            if dry {
                return Ok(0);
            }
            let p = GrapheneParams::from_ev(0.1, 4e12, 300.0)?;
            let kf = p.fermi_wavevector();
            let ef = p.ef_abs();
            let npts = pts(120);
            let mut csv = String::from("x,y,region\n");
            for i in 1..=npts {
                for k in 0..=npts {
                    let x = 4.0 * i as f64 / npts as f64;
                    let y = 4.0 * k as f64 / npts as f64;
                    let region = lindhard_region(x * kf, y * ef / HBAR, &p)?;
                    let _ = writeln!(csv, "{x},{y},{}", region.label());
                }
            }
            write_file(dir, "fig12.csv", &csv)?;
        }
        "fig13" => {
            if dry {
                return Ok(0);
            }
            let p = GrapheneParams::from_ev(0.1, 4e12, 300.0)?;
            let kf = p.fermi_wavevector();
            let ef = p.ef_abs();
            let npts = pts(60);
            let mut csv = String::from("x,y,re_p_gamma,im_p_gamma\n");
            for i in 1..=npts {
                for k in 1..=npts {
                    let x = 2.4 * i as f64 / npts as f64;
                    let y = 2.4 * k as f64 / npts as f64;
                    if (y - x).abs() < 1e-9 {
                        continue;
                    }
                    let v = rpa_rt_polarizability(x * kf, y * ef / HBAR, &p)?;
                    let _ = writeln!(csv, "{x},{y},{},{}", v.re, v.im);
                }
            }
            write_file(dir, "fig13.csv", &csv)?;
        }
        other => {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            bail!("unknown preset '{other}'; available: {names:?}");
        }
    }
    let _ = graphene_kubo(300.0);
    Ok(failures)
}
