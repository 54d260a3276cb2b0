//! The `fit` subcommand: read a result table, run a fit from the analysis
//! layer, emit a JSON report.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use rydcp::analysis::{
    empirical_potential, extract_oscillation_wavelength, fit_c3_vs_n, fit_empirical_model,
    fit_power_law, C3Form, P1Basis,
};

/// A loosely typed table keyed by column name.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<BTreeMap<String, String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)
            .with_context(|| format!("reading table {}", path.display()))?;
        let columns: Vec<String> = rdr
            .headers()?
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let mut row = BTreeMap::new();
            for (c, v) in columns.iter().zip(rec.iter()) {
                row.insert(c.clone(), v.to_string());
            }
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    pub fn require(&self, cols: &[&str]) -> Result<()> {
        let missing: Vec<&str> = cols
            .iter()
            .copied()
            .filter(|c| !self.columns.iter().any(|h| h == c))
            .collect();
        if !missing.is_empty() {
            bail!(
                "table schema mismatch: missing column(s) {missing:?}; found {:?}",
                self.columns
            );
        }
        Ok(())
    }

    pub fn f64s(&self, col: &str) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let s = r.get(col).map(|s| s.as_str()).unwrap_or("");
                s.parse::<f64>()
                    .with_context(|| format!("column {col}: cannot parse '{s}'"))
            })
            .collect()
    }

    /// Drop rows with a nonempty error column.
    pub fn without_failures(mut self) -> Self {
        if self.columns.iter().any(|c| c == "error") {
            self.rows
                .retain(|r| r.get("error").map(|e| e.is_empty()).unwrap_or(true));
        }
        self
    }
}

#[derive(Serialize)]
struct PowerLawRow {
    n: Option<u32>,
    c_alpha_hz_m_alpha: f64,
    alpha: f64,
    residual_rel_rms: f64,
    z0_min_m: f64,
    z0_max_m: f64,
}

fn group_by_n(table: &Table) -> Result<BTreeMap<u32, Vec<usize>>> {
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, row) in table.rows.iter().enumerate() {
        let n: u32 = row
            .get("n")
            .context("missing n column")?
            .parse()
            .context("cannot parse n")?;
        groups.entry(n).or_default().push(i);
    }
    Ok(groups)
}

pub fn run_fit(
    input: &Path,
    kind: &str,
    form: Option<&str>,
    lambda_start_um: Option<f64>,
    out: Option<&Path>,
) -> Result<()> {
    let table = Table::read(input)?.without_failures();
    if table.rows.is_empty() {
        bail!("table {} has no usable rows", input.display());
    }
    let report = match kind {
        "power-law" => {
            table.require(&["z0_m", "u_total_hz", "n"])?;
            let z0 = table.f64s("z0_m")?;
            let u = table.f64s("u_total_hz")?;
            let mut fits = Vec::new();
            for (n, idx) in group_by_n(&table)? {
                let samples: Vec<(f64, f64)> = idx.iter().map(|&i| (z0[i], u[i])).collect();
                let fit = fit_power_law(&samples)?;
                fits.push(PowerLawRow {
                    n: Some(n),
                    c_alpha_hz_m_alpha: fit.c_alpha,
                    alpha: fit.alpha,
                    residual_rel_rms: fit.residual,
                    z0_min_m: fit.domain.0,
                    z0_max_m: fit.domain.1,
                });
            }
            json!({ "kind": "power-law", "fits": fits })
        }
        "c3-vs-n" => {
            let form = match form.unwrap_or("two-term") {
                "two-term" => C3Form::TwoTerm,
                "single-power" => C3Form::SinglePower,
                other => bail!("unknown form '{other}' (two-term|single-power)"),
            };
            let data = c3_table(&table)?;
            let fit = fit_c3_vs_n(&data, form)?;
            match form {
                C3Form::TwoTerm => json!({
                    "kind": "c3-vs-n",
                    "form": "two-term",
                    "q1_hz_m3": fit.coefficients.0,
                    "q2_hz_m3": fit.coefficients.1,
                    "residual_rel_rms": fit.residual,
                    "points": data.len(),
                }),
                C3Form::SinglePower => json!({
                    "kind": "c3-vs-n",
                    "form": "single-power",
                    "c_hz_m3": fit.coefficients.0,
                    "exponent": fit.coefficients.1,
                    "residual_rel_rms": fit.residual,
                    "points": data.len(),
                }),
            }
        }
        "empirical" => {
            table.require(&["n", "temp_k", "z0_m", "u_total_hz"])?;
            let z0 = table.f64s("z0_m")?;
            let t = table.f64s("temp_k")?;
            let u = table.f64s("u_total_hz")?;
            let n = table.f64s("n")?;
            let grid: Vec<(f64, f64, f64)> = (0..u.len())
                .map(|i| (n[i], t[i], -u[i] * z0[i].powi(3)))
                .collect();
            let model = fit_empirical_model(&grid, P1Basis::Restricted)?;
            let (p1_7, p1_0) = model.p1.unwrap();
            // audit at the grid corners
            let sample = empirical_potential(&model, model.domain.0, model.domain.2, 5e-6);
            json!({
                "kind": "empirical",
                "p1_n7_hz_m3_per_k": p1_7,
                "p1_const_hz_m3_per_k": p1_0,
                "p2_n4_hz_m3": model.p2.0,
                "p2_n3_hz_m3": model.p2.1,
                "domain": {
                    "n_min": model.domain.0,
                    "n_max": model.domain.1,
                    "t_min_k": model.domain.2,
                    "t_max_k": model.domain.3,
                },
                "sample_u_hz_at_nmin_tmin_5um": sample,
            })
        }
        "wavelength" => {
            table.require(&["z0_m", "u_total_hz"])?;
            let lambda_start = lambda_start_um
                .context("--lambda-start-um required for the wavelength fit")?
                * 1e-6;
            let z0 = table.f64s("z0_m")?;
            let u = table.f64s("u_total_hz")?;
            let mut trace: Vec<(f64, f64)> = z0.into_iter().zip(u).collect();
            trace.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let lambda = extract_oscillation_wavelength(&trace, lambda_start)?;
            json!({
                "kind": "wavelength",
                "lambda_cp_m": lambda,
                "lambda_cp_um": lambda * 1e6,
                "lambda_start_m": lambda_start,
            })
        }
        other => bail!("unknown fit kind '{other}' (power-law|c3-vs-n|empirical|wavelength)"),
    };
    let text = serde_json::to_string_pretty(&report)?;
    match out {
        Some(path) => {
            std::fs::write(path, &text)?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

/// Accept either an explicit (n, c3_hz_m3) table or a scan table at fixed
/// z0, where C3 = -U z0^3.
fn c3_table(table: &Table) -> Result<Vec<(f64, f64)>> {
    if table.columns.iter().any(|c| c == "c3_hz_m3") {
        table.require(&["n", "c3_hz_m3"])?;
        let n = table.f64s("n")?;
        let c3 = table.f64s("c3_hz_m3")?;
        return Ok(n.into_iter().zip(c3).collect());
    }
    table.require(&["n", "z0_m", "u_total_hz"])?;
    let n = table.f64s("n")?;
    let z0 = table.f64s("z0_m")?;
    let u = table.f64s("u_total_hz")?;
    let z0_ref = z0[0];
    if z0.iter().any(|&z| (z - z0_ref).abs() > 1e-12 * z0_ref) {
        bail!("c3-vs-n from a scan table needs a single fixed z0 (found several)");
    }
    Ok(n
        .into_iter()
        .zip(u)
        .map(|(n, u)| (n, -u * z0_ref.powi(3)))
        .collect())
}
