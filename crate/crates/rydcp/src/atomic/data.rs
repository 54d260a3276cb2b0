//! Atomic data file (quantum defects + model-potential parameters).
//!
//! The file is versioned TOML; an embedded copy ships with the crate and a
//! directory override lets deployments pin their own parameter sets.

use std::path::Path;

use serde::Deserialize;

use super::{AtomicError, HalfInt};

#[derive(Debug, Clone, Deserialize)]
pub struct DefectEntry {
    pub l: u32,
    /// twice j
    pub j2: i32,
    pub delta0: f64,
    pub delta2: f64,
}

/// Four-parameter alkali core potential, rows for l = 0, 1, 2, >= 3.
#[derive(Debug, Clone, Deserialize)]
pub struct PotentialParams {
    pub a1: [f64; 4],
    pub a2: [f64; 4],
    pub a3: [f64; 4],
    pub a4: [f64; 4],
    pub rc: [f64; 4],
}

#[derive(Debug, Clone, Deserialize)]
pub struct AtomData {
    pub format_version: u32,
    pub species: String,
    pub mass_u: f64,
    pub core_charge: u32,
    pub core_polarizability_au: f64,
    /// lowest valence n per l (last entry applies to all higher l)
    pub n_min: Vec<u32>,
    #[serde(rename = "defect")]
    pub defects: Vec<DefectEntry>,
    pub potential: PotentialParams,
}

const EMBEDDED_RB87: &str = include_str!("../../data/rb87.toml");

impl AtomData {
    pub fn embedded_rb87() -> Result<Self, AtomicError> {
        Self::parse(EMBEDDED_RB87)
    }

    pub fn from_dir(dir: &Path) -> Result<Self, AtomicError> {
        let path = dir.join("rb87.toml");
        let text = std::fs::read_to_string(&path)
            .map_err(|e| AtomicError::Data(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, AtomicError> {
        let data: AtomData =
            toml::from_str(text).map_err(|e| AtomicError::Data(e.to_string()))?;
        if data.format_version != 1 {
            return Err(AtomicError::Data(format!(
                "unsupported format_version {}",
                data.format_version
            )));
        }
        if data.n_min.is_empty() {
            return Err(AtomicError::Data("n_min must not be empty".into()));
        }
        Ok(data)
    }

    pub fn defect(&self, l: u32, j: HalfInt) -> Option<&DefectEntry> {
        self.defects
            .iter()
            .find(|d| d.l == l && d.j2 == j.doubled())
    }

    pub fn n_min(&self, l: u32) -> u32 {
        let idx = (l as usize).min(self.n_min.len() - 1);
        self.n_min[idx]
    }

    /// Index into the potential parameter rows for angular momentum `l`.
    pub fn potential_row(&self, l: u32) -> usize {
        (l as usize).min(3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_parses_and_has_five_series() {
        let d = AtomData::embedded_rb87().unwrap();
        assert_eq!(d.defects.len(), 5);
        assert_eq!(d.core_charge, 37);
        assert!(d.defect(0, HalfInt::HALF).is_some());
        assert!(d.defect(2, HalfInt::from_doubled(5)).is_some());
        assert!(d.defect(3, HalfInt::from_doubled(7)).is_none());
    }
}
