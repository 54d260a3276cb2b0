//! Scan execution: a parallel map over the axis product with deterministic,
//! ordered CSV assembly. Per-point failures land in the `error` column and
//! make the run exit nonzero after the table is written; wall-clock timings
//! go to a JSON run report next to the CSV so reruns stay byte-identical.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use rydcp::atomic::AtomicState;
use rydcp::constants::EV;
use rydcp::cp::{CpBreakdown, CpSolver};
use rydcp::em::LayerStack;
use rydcp::materials::MaterialModel;

use crate::config::{Axis, AxisKind, ScanConfig};
use crate::stackfile::StackSpec;

pub const CSV_COLUMNS: [&str; 18] = [
    "n",
    "l",
    "j",
    "z0_m",
    "z0_um",
    "temp_k",
    "ef_ev",
    "d_m",
    "d_um",
    "model",
    "u_nres_hz",
    "u_res_evan_hz",
    "u_res_prop_hz",
    "u_total_hz",
    "retardation",
    "spectroscopic",
    "geometric",
    "error",
];

/// Coordinates of one scan point (SI).
#[derive(Debug, Clone, Copy)]
pub struct Point {
    pub n: u32,
    pub z0: f64,
    pub temp: f64,
    pub ef: Option<f64>,
    pub d: Option<f64>,
}

#[derive(Debug)]
pub struct RowResult {
    pub point: Point,
    pub model: &'static str,
    pub outcome: Result<(CpBreakdown, rydcp::cp::RegimeReport), String>,
    pub wall_ms: f64,
}

#[derive(Serialize)]
struct RunReport<'a> {
    version: u32,
    out: &'a Path,
    points: usize,
    failures: usize,
    wall_ms_total: f64,
    wall_ms_per_point: Vec<f64>,
}

fn model_label(stack: &LayerStack) -> &'static str {
    let mut label = "none";
    for sheet in stack.sheets().iter().flatten() {
        match sheet.material {
            MaterialModel::NonlocalGraphene(_) => return "nonlocal",
            MaterialModel::KuboGraphene(_) => label = "kubo",
            _ => {}
        }
    }
    label
}

fn fmt(v: f64) -> String {
    // shortest round-trip formatting keeps reruns byte-identical
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Expand the axis product into the ordered point list.
pub fn points(config: &ScanConfig, axes: &[Axis]) -> Result<Vec<Point>> {
    let base = Point {
        n: config.atom.n.unwrap_or(0),
        z0: config.fixed.z0_um.map(|v| v * 1e-6).unwrap_or(f64::NAN),
        temp: config.fixed.temp_k.unwrap_or(f64::NAN),
        ef: config.fixed.ef_ev.map(|v| v * EV),
        d: None,
    };
    let apply = |p: &mut Point, kind: AxisKind, v: f64| match kind {
        AxisKind::Z0 => p.z0 = v,
        AxisKind::Temp => p.temp = v,
        AxisKind::N => p.n = v as u32,
        AxisKind::Ef => p.ef = Some(v),
        AxisKind::D => p.d = Some(v),
    };
    let mut out = Vec::new();
    match axes {
        [a] => {
            for &v in &a.values {
                let mut p = base;
                apply(&mut p, a.kind, v);
                out.push(p);
            }
        }
        [a, b] => {
            for &va in &a.values {
                for &vb in &b.values {
                    let mut p = base;
                    apply(&mut p, a.kind, va);
                    apply(&mut p, b.kind, vb);
                    out.push(p);
                }
            }
        }
        _ => bail!("one or two axes required"),
    }
    for (i, p) in out.iter().enumerate() {
        if p.n == 0 || !p.z0.is_finite() || !p.temp.is_finite() {
            bail!(
                "point {i} is underdetermined (n = {}, z0 = {}, temp = {}); \
                 set the missing coordinate under [fixed] or add an axis",
                p.n,
                p.z0,
                p.temp
            );
        }
    }
    Ok(out)
}

fn stack_for(spec: &StackSpec, config: &ScanConfig, p: &Point) -> Result<LayerStack> {
    let mut stack = match p.d {
        Some(d) => spec.with_spacing(d)?,
        None => spec.stack.clone(),
    };
    if let Some(ef) = p.ef {
        let spec_d = StackSpec {
            stack,
            scan_layer: None,
            scan_sheets: spec.scan_sheets.clone(),
        };
        stack = spec_d.with_fermi_energy(ef)?;
    }
    match config.model.as_str() {
        "kubo" => Ok(stack.with_graphene_model(false)),
        "nonlocal" => Ok(stack.with_graphene_model(true)),
        _ => Ok(stack),
    }
}

pub fn evaluate(solver: &CpSolver, spec: &StackSpec, config: &ScanConfig, p: &Point) -> RowResult {
    let t0 = Instant::now();
    let outcome = (|| -> Result<_> {
        let stack = stack_for(spec, config, p)?;
        let state = AtomicState::ns(p.n);
        let breakdown = solver.total_potential(&state, &stack, p.z0, p.temp)?;
        let regime = solver.regime_report(&state, p.z0, p.temp)?;
        Ok(((breakdown, regime), stack))
    })();
    let (outcome, model) = match outcome {
        Ok((pair, stack)) => (Ok(pair), model_label(&stack)),
        Err(e) => (Err(format!("{e:#}")), "kubo"),
    };
    RowResult {
        point: *p,
        model,
        outcome,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    }
}

pub fn write_csv(path: &Path, rows: &[RowResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        let p = &r.point;
        let mut rec: Vec<String> = vec![
            p.n.to_string(),
            "0".into(),
            "1/2".into(),
            fmt(p.z0),
            fmt(p.z0 * 1e6),
            fmt(p.temp),
            opt(p.ef.map(|v| v / EV)),
            opt(p.d),
            opt(p.d.map(|v| v * 1e6)),
            r.model.into(),
        ];
        match &r.outcome {
            Ok((b, regime)) => {
                rec.extend([
                    fmt(b.u_nres),
                    fmt(b.u_res_evan),
                    fmt(b.u_res_prop),
                    fmt(b.total),
                    regime.retardation_label().into(),
                    regime.spectroscopic_label().into(),
                    regime.geometric_label().into(),
                    String::new(),
                ]);
            }
            Err(msg) => {
                rec.extend([
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    msg.clone(),
                ]);
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Run a scan end to end. Returns the number of failed points.
pub fn run(solver: &CpSolver, spec: &StackSpec, config: &ScanConfig) -> Result<usize> {
    let axes = config.resolved_axes()?;
    let pts = points(config, &axes)?;
    eprintln!(
        "scan: {} points over {}{}",
        pts.len(),
        axes[0].kind.name(),
        axes.get(1)
            .map(|a| format!(" x {}", a.kind.name()))
            .unwrap_or_default()
    );
    let t0 = Instant::now();
    let rows: Vec<RowResult> = pts
        .par_iter()
        .map(|p| evaluate(solver, spec, config, p))
        .collect();
    let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
    if let Some(dir) = config.out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    write_csv(&config.out, &rows)?;
    let report = RunReport {
        version: 1,
        out: &config.out,
        points: rows.len(),
        failures,
        wall_ms_total: t0.elapsed().as_secs_f64() * 1e3,
        wall_ms_per_point: rows.iter().map(|r| r.wall_ms).collect(),
    };
    let report_path = config.out.with_extension("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    if config.plot {
        let plot_path = config.out.with_extension("py");
        std::fs::write(&plot_path, crate::plot::scan_script(config, &axes))?;
        eprintln!("plot script: {}", plot_path.display());
    }
    eprintln!(
        "wrote {} ({} points, {} failed) in {:.1} s",
        config.out.display(),
        rows.len(),
        failures,
        t0.elapsed().as_secs_f64()
    );
    Ok(failures)
}
