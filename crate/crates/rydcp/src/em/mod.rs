//! Planar-multilayer electromagnetics: generalized Fresnel reflection of a
//! layer stack with zero-thickness conducting sheets at interfaces, and the
//! equal-position scattering Green's tensor above the stack.

mod green;
mod reflect;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::materials::{MaterialError, MaterialModel};

pub use green::{
    green_scattering_matsubara, green_scattering_real, GreenPart, MatsubaraGreen,
    ScatteringGreenDiagonal,
};
pub use reflect::{PerfectMirror, ReflectionModel, ResolvedStack};

/// Probe frequency: on the real axis or on the positive imaginary
/// (Matsubara) axis, in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    Real(f64),
    Imaginary(f64),
}

impl Frequency {
    pub fn complex(self) -> Complex64 {
        match self {
            Frequency::Real(w) => Complex64::new(w, 0.0),
            Frequency::Imaginary(xi) => Complex64::new(0.0, xi),
        }
    }
}

#[derive(Debug, Error)]
pub enum EmError {
    #[error("a stack needs at least two layers (got {0})")]
    TooFewLayers(usize),
    #[error("layer 1 (the atom side) must be vacuum")]
    TopNotVacuum,
    #[error("outer layers are half-spaces and may not have a thickness")]
    OuterHasThickness,
    #[error("inner layer {0} needs a positive finite thickness")]
    BadInnerThickness(usize),
    #[error("graphene models describe sheets, not bulk layers (layer {0})")]
    GrapheneAsBulk(usize),
    #[error("sheet at interface {0} must be a graphene (sheet) model")]
    NonSheetMaterial(usize),
    #[error("sheet list length {sheets} != interface count {interfaces}")]
    SheetCount { sheets: usize, interfaces: usize },
    #[error(
        "|r_{pol}| = {magnitude:.6e} > 1 on the imaginary axis at k_par = {k_par:.6e}, \
         xi = {xi:.6e}; branch-cut misselection"
    )]
    PassivityViolation {
        pol: char,
        magnitude: f64,
        k_par: f64,
        xi: f64,
    },
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("green tensor quadrature: {0}")]
    Quadrature(#[from] crate::quad::QuadError),
}

/// One planar layer. `thickness = None` marks the two outer half-spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub material: MaterialModel,
    /// metres; None for the semi-infinite outer layers
    pub thickness: Option<f64>,
    /// relative permeability (nonmagnetic default)
    #[serde(default = "one")]
    pub mu: f64,
}

fn one() -> f64 {
    1.0
}

impl Layer {
    pub fn half_space(material: MaterialModel) -> Self {
        Layer {
            material,
            thickness: None,
            mu: 1.0,
        }
    }

    pub fn slab(material: MaterialModel, thickness: f64) -> Self {
        Layer {
            material,
            thickness: Some(thickness),
            mu: 1.0,
        }
    }

    pub fn vacuum() -> Self {
        Layer::half_space(MaterialModel::vacuum())
    }
}

/// Conducting sheet at a layer interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sheet {
    pub material: MaterialModel,
}

/// Ordered planar layers, top (atom side) to bottom, with optional
/// conducting sheets at the interfaces. Interface i sits between layers
/// i and i+1.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    layers: Vec<Layer>,
    sheets: Vec<Option<Sheet>>,
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>, sheets: Vec<Option<Sheet>>) -> Result<Self, EmError> {
        if layers.len() < 2 {
            return Err(EmError::TooFewLayers(layers.len()));
        }
        if layers[0].material != MaterialModel::vacuum() || layers[0].mu != 1.0 {
            return Err(EmError::TopNotVacuum);
        }
        if layers[0].thickness.is_some() || layers.last().unwrap().thickness.is_some() {
            return Err(EmError::OuterHasThickness);
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.material.is_sheet() {
                return Err(EmError::GrapheneAsBulk(i));
            }
            if i > 0 && i + 1 < layers.len() {
                match layer.thickness {
                    Some(t) if t > 0.0 && t.is_finite() => {}
                    _ => return Err(EmError::BadInnerThickness(i)),
                }
            }
        }
        if sheets.len() != layers.len() - 1 {
            return Err(EmError::SheetCount {
                sheets: sheets.len(),
                interfaces: layers.len() - 1,
            });
        }
        for (i, s) in sheets.iter().enumerate() {
            if let Some(s) = s {
                if !s.material.is_sheet() {
                    return Err(EmError::NonSheetMaterial(i));
                }
            }
        }
        Ok(LayerStack { layers, sheets })
    }

    /// Two vacuum half-spaces, nothing in between.
    pub fn empty() -> Self {
        LayerStack::new(vec![Layer::vacuum(), Layer::vacuum()], vec![None]).unwrap()
    }

    /// A single free-standing sheet (graphene in vacuum).
    pub fn suspended_sheet(material: MaterialModel) -> Result<Self, EmError> {
        LayerStack::new(
            vec![Layer::vacuum(), Layer::vacuum()],
            vec![Some(Sheet { material })],
        )
    }

    /// A free-standing slab of finite thickness (e.g. 1 um of gold).
    pub fn free_slab(material: MaterialModel, thickness: f64) -> Result<Self, EmError> {
        LayerStack::new(
            vec![
                Layer::vacuum(),
                Layer::slab(material, thickness),
                Layer::vacuum(),
            ],
            vec![None, None],
        )
    }

    /// Two sheets separated by a spacer layer (graphene / spacer(d) / graphene).
    pub fn double_sheet(
        top: MaterialModel,
        spacer: MaterialModel,
        d: f64,
        bottom: MaterialModel,
    ) -> Result<Self, EmError> {
        LayerStack::new(
            vec![Layer::vacuum(), Layer::slab(spacer, d), Layer::vacuum()],
            vec![
                Some(Sheet { material: top }),
                Some(Sheet { material: bottom }),
            ],
        )
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn sheets(&self) -> &[Option<Sheet>] {
        &self.sheets
    }

    /// Any sheet or metallic bulk layer, which pins the static r_p at 1.
    pub fn has_conductor(&self) -> bool {
        self.sheets.iter().any(|s| s.is_some())
            || self
                .layers
                .iter()
                .any(|l| matches!(l.material, MaterialModel::DrudeMetal { .. }))
    }

    /// Fermi energy of the first graphene sheet, if any (J).
    pub fn top_sheet_fermi_energy(&self) -> Option<f64> {
        self.sheets
            .iter()
            .flatten()
            .find_map(|s| s.material.fermi_energy())
    }

    /// Bind the environment temperature into every graphene sheet, producing
    /// the reflection evaluator used by the Green's-tensor integrals.
    pub fn resolve(&self, temp: f64) -> ResolvedStack {
        ResolvedStack::new(self, temp)
    }

    /// Generalized reflection coefficients (r_s, r_p) of the stack seen from
    /// the vacuum side.
    pub fn reflection_coefficients(
        &self,
        temp: f64,
        k_par: f64,
        freq: Frequency,
    ) -> Result<(Complex64, Complex64), EmError> {
        self.resolve(temp).reflection(k_par, freq)
    }

    /// Map every graphene sheet to the requested conductivity model
    /// (local Kubo or full non-local), leaving other materials alone.
    pub fn with_graphene_model(&self, nonlocal: bool) -> Self {
        let sheets = self
            .sheets
            .iter()
            .map(|s| {
                s.as_ref().map(|sheet| {
                    let material = match (&sheet.material, nonlocal) {
                        (MaterialModel::KuboGraphene(p), true) => {
                            MaterialModel::NonlocalGraphene(*p)
                        }
                        (MaterialModel::NonlocalGraphene(p), false) => {
                            MaterialModel::KuboGraphene(*p)
                        }
                        (m, _) => m.clone(),
                    };
                    Sheet { material }
                })
            })
            .collect();
        LayerStack {
            layers: self.layers.clone(),
            sheets,
        }
    }
}
