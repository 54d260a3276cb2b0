//! Scan configuration files: stack reference, the atom, fixed coordinates
//! and one or two scan axes with linear or log spacing.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use rydcp::constants::EV;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub version: u32,
    /// force the graphene conductivity model: "kubo" | "nonlocal" | "as-stack"
    #[serde(default = "default_model")]
    pub model: String,
    pub out: PathBuf,
    #[serde(default)]
    pub plot: bool,
    /// relative truncation of the Matsubara sum
    #[serde(default = "default_tol")]
    pub tol: f64,
    pub stack: StackRef,
    pub atom: AtomSpec,
    #[serde(default)]
    pub fixed: Fixed,
    #[serde(rename = "axis", default)]
    pub axes: Vec<AxisEntry>,
}

fn default_model() -> String {
    "as-stack".into()
}

fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackRef {
    pub file: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    /// principal quantum number of the nS_1/2 target (ignored when an
    /// n axis is present)
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixed {
    pub z0_um: Option<f64>,
    pub temp_k: Option<f64>,
    /// override of the scanned sheets' Fermi energy (eV)
    pub ef_ev: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisEntry {
    pub kind: String,
    #[serde(default = "default_spacing")]
    pub spacing: String,
    pub points: Option<usize>,
    // unit-suffixed bounds per axis kind
    pub min_um: Option<f64>,
    pub max_um: Option<f64>,
    pub min_k: Option<f64>,
    pub max_k: Option<f64>,
    pub min_ev: Option<f64>,
    pub max_ev: Option<f64>,
    pub min_nm: Option<f64>,
    pub max_nm: Option<f64>,
    // n axis alternatives
    pub values: Option<Vec<u32>>,
    pub min: Option<u32>,
    pub max: Option<u32>,
    pub step: Option<u32>,
}

fn default_spacing() -> String {
    "linear".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    Z0,
    Temp,
    N,
    Ef,
    D,
}

impl AxisKind {
    pub fn name(self) -> &'static str {
        match self {
            AxisKind::Z0 => "z0",
            AxisKind::Temp => "temp",
            AxisKind::N => "n",
            AxisKind::Ef => "ef",
            AxisKind::D => "d",
        }
    }
}

/// A resolved axis: SI values (z0/d in m, temp in K, ef in J, n as integers).
#[derive(Debug, Clone)]
pub struct Axis {
    pub kind: AxisKind,
    pub values: Vec<f64>,
}

fn grid(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if points == 0 {
        bail!("axis grid is empty (points = 0)");
    }
    if min > max {
        bail!("axis bounds are not monotone: min {min} > max {max}");
    }
    if points == 1 {
        if min != max {
            bail!("a single-point axis needs min == max");
        }
        return Ok(vec![min]);
    }
    if log && min <= 0.0 {
        bail!("log spacing needs positive bounds, got min {min}");
    }
    let vals = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            if log {
                (min.ln() + t * (max.ln() - min.ln())).exp()
            } else {
                min + t * (max - min)
            }
        })
        .collect();
    Ok(vals)
}

impl AxisEntry {
    pub fn resolve(&self) -> Result<Axis> {
        let log = match self.spacing.as_str() {
            "log" => true,
            "linear" => false,
            other => bail!("unknown axis spacing '{other}' (use linear|log)"),
        };
        let need = |v: Option<f64>, field: &str| -> Result<f64> {
            v.with_context(|| format!("axis '{}' needs field {field}", self.kind))
        };
        let points = self.points;
        let need_pts = || -> Result<usize> {
            points.with_context(|| format!("axis '{}' needs field points", self.kind))
        };
        let axis = match self.kind.as_str() {
            "z0" => Axis {
                kind: AxisKind::Z0,
                values: grid(
                    need(self.min_um, "min_um")? * 1e-6,
                    need(self.max_um, "max_um")? * 1e-6,
                    need_pts()?,
                    log,
                )?,
            },
            "temp" => Axis {
                kind: AxisKind::Temp,
                values: grid(
                    need(self.min_k, "min_k")?,
                    need(self.max_k, "max_k")?,
                    need_pts()?,
                    log,
                )?,
            },
            "ef" => Axis {
                kind: AxisKind::Ef,
                values: grid(
                    need(self.min_ev, "min_ev")? * EV,
                    need(self.max_ev, "max_ev")? * EV,
                    need_pts()?,
                    log,
                )?,
            },
            "d" => Axis {
                kind: AxisKind::D,
                values: grid(
                    need(self.min_nm, "min_nm")? * 1e-9,
                    need(self.max_nm, "max_nm")? * 1e-9,
                    need_pts()?,
                    log,
                )?,
            },
            "n" => {
                let values: Vec<u32> = if let Some(v) = &self.values {
                    v.clone()
                } else {
                    let (lo, hi) = (
                        self.min.context("n axis needs values or min/max")?,
                        self.max.context("n axis needs values or min/max")?,
                    );
                    if lo > hi {
                        bail!("n axis bounds are not monotone");
                    }
                    (lo..=hi).step_by(self.step.unwrap_or(1) as usize).collect()
                };
                if values.is_empty() {
                    bail!("n axis grid is empty");
                }
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    bail!("n axis values must be strictly increasing");
                }
                Axis {
                    kind: AxisKind::N,
                    values: values.into_iter().map(|n| n as f64).collect(),
                }
            }
            other => bail!("unknown axis kind '{other}' (z0|temp|n|ef|d)"),
        };
        Ok(axis)
    }
}

impl ScanConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scan config {}", path.display()))?;
        let cfg: ScanConfig =
            toml::from_str(&text).with_context(|| format!("scan config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != 1 {
            bail!("unsupported scan config version {}", self.version);
        }
        if self.axes.is_empty() || self.axes.len() > 2 {
            bail!(
                "a scan needs exactly one or two axes, got {}",
                self.axes.len()
            );
        }
        match self.model.as_str() {
            "kubo" | "nonlocal" | "as-stack" => {}
            other => bail!("unknown model '{other}' (kubo|nonlocal|as-stack)"),
        }
        Ok(())
    }

    pub fn resolved_axes(&self) -> Result<Vec<Axis>> {
        let axes: Vec<Axis> = self
            .axes
            .iter()
            .map(|a| a.resolve())
            .collect::<Result<_>>()?;
        if axes.len() == 2 && axes[0].kind == axes[1].kind {
            bail!("the two scan axes must differ in kind");
        }
        let has_n_axis = axes.iter().any(|a| a.kind == AxisKind::N);
        if !has_n_axis && self.atom.n.is_none() {
            bail!("fixed atom.n required when no n axis is present");
        }
        Ok(axes)
    }
}
