//! Frequency- and wavevector-dependent material response: graphene sheet
//! conductivity (local Kubo and full non-local RPA-RT), Drude metals and
//! constant dielectrics, plus the named presets consumed by stack files.

mod drude;
mod kubo;
mod lindhard;

use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{EV, HBAR};

pub use drude::{drude_permittivity, drude_permittivity_imag_axis};
pub use kubo::{kubo_conductivity, kubo_conductivity_imag_axis, kubo_intraband};
pub use lindhard::{
    lindhard_polarizability, lindhard_polarizability_complex, lindhard_region,
    nonlocal_conductivity, nonlocal_conductivity_imag_axis, rpa_rt_polarizability,
    rpa_rt_polarizability_imag_axis, static_polarizability, PlaneRegion,
};

/// Graphene Dirac velocity (m/s); also recorded in the materials preset file.
pub const FERMI_VELOCITY: f64 = 1.0e6;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("invalid graphene parameters: gamma = {gamma}, T = {temp}")]
    InvalidGrapheneParams { gamma: f64, temp: f64 },
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("wavevector must be positive, got {0}")]
    NonPositiveWavevector(f64),
    #[error("the T = 0 non-local response is undefined for an undoped sheet (E_F = 0)")]
    UndopedNonlocal,
    #[error("interband quadrature: {0}")]
    Quadrature(#[from] crate::quad::QuadError),
    #[error("material preset file: {0}")]
    Presets(String),
    #[error("unknown material preset '{0}'")]
    UnknownPreset(String),
}

/// Graphene sheet parameters. A negative Fermi energy (hole doping) responds
/// identically to |E_F|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrapheneParams {
    /// Fermi energy (J, signed)
    pub ef: f64,
    /// electron relaxation rate (rad/s)
    pub gamma: f64,
    /// sheet temperature (K)
    pub temp: f64,
}

impl GrapheneParams {
    pub fn new(ef: f64, gamma: f64, temp: f64) -> Result<Self, MaterialError> {
        if gamma <= 0.0 || temp < 0.0 {
            return Err(MaterialError::InvalidGrapheneParams { gamma, temp });
        }
        Ok(GrapheneParams { ef, gamma, temp })
    }

    /// From a Fermi energy in eV.
    pub fn from_ev(ef_ev: f64, gamma: f64, temp: f64) -> Result<Self, MaterialError> {
        Self::new(ef_ev * EV, gamma, temp)
    }

    /// |E_F| in J, the value every response formula uses.
    pub fn ef_abs(&self) -> f64 {
        self.ef.abs()
    }

    /// Fermi wavevector k_F = |E_F| / (hbar v_F) (1/m).
    pub fn fermi_wavevector(&self) -> f64 {
        self.ef_abs() / (HBAR * FERMI_VELOCITY)
    }
}

/// Material response model; exactly one variant is active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MaterialModel {
    KuboGraphene(GrapheneParams),
    NonlocalGraphene(GrapheneParams),
    DrudeMetal { omega_p: f64, gamma_d: f64 },
    Dielectric { epsilon: f64 },
}

impl MaterialModel {
    pub fn vacuum() -> Self {
        MaterialModel::Dielectric { epsilon: 1.0 }
    }

    pub fn is_sheet(&self) -> bool {
        matches!(
            self,
            MaterialModel::KuboGraphene(_) | MaterialModel::NonlocalGraphene(_)
        )
    }

    /// Conducting in the static limit (forces r_p -> 1 in the zero-frequency
    /// Matsubara term).
    pub fn is_conductor(&self) -> bool {
        !matches!(self, MaterialModel::Dielectric { .. })
    }

    /// Bulk permittivity at a real frequency. Graphene variants are sheet
    /// materials and have no bulk permittivity.
    pub fn permittivity(&self, omega: f64) -> Option<Complex64> {
        match self {
            MaterialModel::DrudeMetal { omega_p, gamma_d } => {
                Some(drude_permittivity(omega, *omega_p, *gamma_d))
            }
            MaterialModel::Dielectric { epsilon } => Some(Complex64::new(*epsilon, 0.0)),
            _ => None,
        }
    }

    /// Bulk permittivity on the imaginary axis (real-valued).
    pub fn permittivity_imag_axis(&self, xi: f64) -> Option<f64> {
        match self {
            MaterialModel::DrudeMetal { omega_p, gamma_d } => {
                Some(drude_permittivity_imag_axis(xi, *omega_p, *gamma_d))
            }
            MaterialModel::Dielectric { epsilon } => Some(*epsilon),
            _ => None,
        }
    }

    /// Sheet conductivity at (q, omega) on the real frequency axis (S).
    pub fn sheet_conductivity(&self, q: f64, omega: f64) -> Result<Complex64, MaterialError> {
        match self {
            MaterialModel::KuboGraphene(p) => kubo_conductivity(omega, p),
            MaterialModel::NonlocalGraphene(p) => nonlocal_conductivity(q, omega, p),
            _ => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// Sheet conductivity at (q, i xi) on the imaginary axis (real-valued).
    pub fn sheet_conductivity_imag_axis(&self, q: f64, xi: f64) -> Result<f64, MaterialError> {
        match self {
            MaterialModel::KuboGraphene(p) => kubo_conductivity_imag_axis(xi, p),
            MaterialModel::NonlocalGraphene(p) => nonlocal_conductivity_imag_axis(q, xi, p),
            _ => Ok(0.0),
        }
    }

    /// Copy with the sheet temperature replaced (used to track the
    /// environment temperature).
    pub fn at_temperature(&self, temp: f64) -> Self {
        match self {
            MaterialModel::KuboGraphene(p) => {
                MaterialModel::KuboGraphene(GrapheneParams { temp, ..*p })
            }
            MaterialModel::NonlocalGraphene(p) => {
                MaterialModel::NonlocalGraphene(GrapheneParams { temp, ..*p })
            }
            other => other.clone(),
        }
    }

    /// Copy with the Fermi energy replaced, when the model has one.
    pub fn with_fermi_energy(&self, ef: f64) -> Self {
        match self {
            MaterialModel::KuboGraphene(p) => {
                MaterialModel::KuboGraphene(GrapheneParams { ef, ..*p })
            }
            MaterialModel::NonlocalGraphene(p) => {
                MaterialModel::NonlocalGraphene(GrapheneParams { ef, ..*p })
            }
            other => other.clone(),
        }
    }

    /// Fermi energy (J) if the model is a graphene sheet.
    pub fn fermi_energy(&self) -> Option<f64> {
        match self {
            MaterialModel::KuboGraphene(p) | MaterialModel::NonlocalGraphene(p) => Some(p.ef),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// presets

#[derive(Debug, Deserialize)]
struct PresetFile {
    format_version: u32,
    #[allow(dead_code)]
    graphene_fermi_velocity_m_s: f64,
    preset: HashMap<String, PresetEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum PresetEntry {
    KuboGraphene { ef_ev: f64, gamma_rad_s: f64 },
    NonlocalGraphene { ef_ev: f64, gamma_rad_s: f64 },
    Drude { omega_p_rad_s: f64, gamma_d_rad_s: f64 },
    Dielectric { epsilon: f64 },
}

/// Named material presets ("graphene-kubo", "gold-drude", "hbn", ...).
#[derive(Debug, Clone)]
pub struct MaterialPresets {
    entries: HashMap<String, PresetEntry>,
}

const EMBEDDED_PRESETS: &str = include_str!("../../data/materials.toml");

impl MaterialPresets {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_PRESETS).expect("embedded materials data must parse")
    }

    pub fn from_dir(dir: &Path) -> Result<Self, MaterialError> {
        let path = dir.join("materials.toml");
        let text = std::fs::read_to_string(&path)
            .map_err(|e| MaterialError::Presets(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, MaterialError> {
        let file: PresetFile =
            toml::from_str(text).map_err(|e| MaterialError::Presets(e.to_string()))?;
        if file.format_version != 1 {
            return Err(MaterialError::Presets(format!(
                "unsupported format_version {}",
                file.format_version
            )));
        }
        Ok(MaterialPresets {
            entries: file.preset,
        })
    }

    pub fn names(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.entries.keys().map(|s| s.as_str()).collect();
        v.sort_unstable();
        v
    }

    /// Instantiate a preset; graphene sheets are created at temperature
    /// `temp` (K).
    pub fn instantiate(&self, name: &str, temp: f64) -> Result<MaterialModel, MaterialError> {
        let e = self
            .entries
            .get(name)
            .ok_or_else(|| MaterialError::UnknownPreset(name.to_string()))?;
        Ok(match e {
            PresetEntry::KuboGraphene { ef_ev, gamma_rad_s } => {
                MaterialModel::KuboGraphene(GrapheneParams::from_ev(*ef_ev, *gamma_rad_s, temp)?)
            }
            PresetEntry::NonlocalGraphene { ef_ev, gamma_rad_s } => MaterialModel::NonlocalGraphene(
                GrapheneParams::from_ev(*ef_ev, *gamma_rad_s, temp)?,
            ),
            PresetEntry::Drude {
                omega_p_rad_s,
                gamma_d_rad_s,
            } => MaterialModel::DrudeMetal {
                omega_p: *omega_p_rad_s,
                gamma_d: *gamma_d_rad_s,
            },
            PresetEntry::Dielectric { epsilon } => MaterialModel::Dielectric { epsilon: *epsilon },
        })
    }
}
