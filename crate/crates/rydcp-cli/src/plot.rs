//! Self-contained matplotlib script emission: a runnable recipe next to each
//! CSV instead of rendering images from the batch tool itself.

use crate::config::{Axis, AxisKind, ScanConfig};

fn axis_column(kind: AxisKind) -> (&'static str, &'static str) {
    match kind {
        AxisKind::Z0 => ("z0_um", "z0 (um)"),
        AxisKind::Temp => ("temp_k", "T (K)"),
        AxisKind::N => ("n", "n"),
        AxisKind::Ef => ("ef_ev", "E_F (eV)"),
        AxisKind::D => ("d_um", "d (um)"),
    }
}

pub fn scan_script(config: &ScanConfig, axes: &[Axis]) -> String {
    let (xcol, xlabel) = axis_column(axes[0].kind);
    let group = axes.get(1).map(|a| axis_column(a.kind).0);
    let log_x = config
        .axes
        .first()
        .map(|a| a.spacing == "log")
        .unwrap_or(false);
    let csv = config.out.file_name().unwrap().to_string_lossy();
    let group_py = match group {
        Some(g) => format!("'{g}'"),
        None => "None".into(),
    };
    format!(
        r#"#!/usr/bin/env python3
"""Plot of {csv}: total potential and its decomposition."""
import csv as _csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

XCOL = "{xcol}"
GROUP = {group_py}
LOG_X = {log_x}

rows = []
with open("{csv}") as fh:
    for row in _csv.DictReader(fh):
        if row["error"]:
            continue
        rows.append(row)

series = defaultdict(list)
for row in rows:
    key = row[GROUP] if GROUP else ""
    series[key].append((float(row[XCOL]), float(row["u_total_hz"]),
                        float(row["u_nres_hz"]), float(row["u_res_evan_hz"]),
                        float(row["u_res_prop_hz"])))

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
for key, pts in sorted(series.items()):
    pts.sort()
    xs = [p[0] for p in pts]
    tot = [p[1] / 1e3 for p in pts]
    label = f"{{GROUP}}={{key}}" if GROUP else "total"
    ax1.plot(xs, tot, label=label)
    if not GROUP:
        ax1.plot(xs, [p[2] / 1e3 for p in pts], "--", label="non-resonant")
        ax1.plot(xs, [p[3] / 1e3 for p in pts], "--", label="resonant evanescent")
        ax1.plot(xs, [p[4] / 1e3 for p in pts], "--", label="resonant propagating")
    ax2.plot(xs, [abs(t) for t in tot], label=label)
ax1.set_xlabel("{xlabel}"); ax1.set_ylabel("U/h (kHz)"); ax1.legend(fontsize=7)
ax2.set_xlabel("{xlabel}"); ax2.set_ylabel("|U/h| (kHz)")
ax2.set_yscale("log")
if LOG_X:
    ax1.set_xscale("log"); ax2.set_xscale("log")
fig.tight_layout()
out = "{csv}".rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=160)
print("wrote", out)
"#,
        csv = csv,
        xcol = xcol,
        xlabel = xlabel,
        group_py = group_py,
        log_x = if log_x { "True" } else { "False" },
    )
}

/// Generic two-column plot used by the special presets.
pub fn xy_script(csv_name: &str, xcol: &str, ycols: &[&str], log_x: bool, log_y: bool) -> String {
    let ycols_py: Vec<String> = ycols.iter().map(|c| format!("'{c}'")).collect();
    format!(
        r#"#!/usr/bin/env python3
import csv as _csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

xs, series = [], {{}}
YCOLS = [{ycols}]
with open("{csv_name}") as fh:
    for row in _csv.DictReader(fh):
        xs.append(float(row["{xcol}"]))
        for c in YCOLS:
            series.setdefault(c, []).append(float(row[c]) if row[c] else float("nan"))

fig, ax = plt.subplots(figsize=(6, 4.2))
for c in YCOLS:
    ax.plot(xs, series[c], label=c)
ax.set_xlabel("{xcol}")
ax.legend(fontsize=8)
if {log_x}:
    ax.set_xscale("log")
if {log_y}:
    ax.set_yscale("log")
fig.tight_layout()
out = "{csv_name}".rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=160)
print("wrote", out)
"#,
        csv_name = csv_name,
        xcol = xcol,
        ycols = ycols_py.join(", "),
        log_x = if log_x { "True" } else { "False" },
        log_y = if log_y { "True" } else { "False" },
    )
}
