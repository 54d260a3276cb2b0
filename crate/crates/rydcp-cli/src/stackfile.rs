//! Stack description files: a versioned TOML listing layers top to bottom
//! and conducting sheets at interfaces. Materials are named presets or
//! inline parameter tables; sheet temperatures follow the environment
//! temperature of the calculation.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use rydcp::em::{Layer, LayerStack, Sheet};
use rydcp::materials::{GrapheneParams, MaterialModel, MaterialPresets};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StackFile {
    version: u32,
    #[serde(rename = "layer")]
    layers: Vec<LayerEntry>,
    #[serde(rename = "sheet", default)]
    sheets: Vec<SheetEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerEntry {
    material: MaterialRef,
    thickness_nm: Option<f64>,
    thickness_um: Option<f64>,
    thickness_m: Option<f64>,
    /// marks the layer whose thickness a d-axis scans
    #[serde(default)]
    scan_thickness: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SheetEntry {
    /// interface i sits between layers i and i+1 (0-based, top first)
    interface: usize,
    material: MaterialRef,
    ef_ev: Option<f64>,
    gamma_rad_s: Option<f64>,
    /// marks sheets whose Fermi energy an ef-axis scans
    #[serde(default)]
    scan_ef: bool,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MaterialRef {
    Preset(String),
    Inline(InlineMaterial),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum InlineMaterial {
    KuboGraphene { ef_ev: f64, gamma_rad_s: f64 },
    NonlocalGraphene { ef_ev: f64, gamma_rad_s: f64 },
    Drude { omega_p_rad_s: f64, gamma_d_rad_s: f64 },
    Dielectric { epsilon: f64 },
}

/// A parsed stack plus the markers scan axes bind to.
#[derive(Debug, Clone)]
pub struct StackSpec {
    pub stack: LayerStack,
    /// layer index the d-axis rescales
    pub scan_layer: Option<usize>,
    /// interfaces the ef-axis retunes (empty: every graphene sheet)
    pub scan_sheets: Vec<usize>,
}

impl StackSpec {
    pub fn from_file(path: &Path, presets: &MaterialPresets) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading stack file {}", path.display()))?;
        Self::parse(&text, presets).with_context(|| format!("stack file {}", path.display()))
    }

    pub fn parse(text: &str, presets: &MaterialPresets) -> Result<Self> {
        let file: StackFile = toml::from_str(text)?;
        if file.version != 1 {
            bail!("unsupported stack file version {}", file.version);
        }
        let resolve = |m: &MaterialRef,
                       ef_ev: Option<f64>,
                       gamma: Option<f64>|
         -> Result<MaterialModel> {
            // sheet temperature is bound to the environment at evaluation
            // time; the placeholder here is irrelevant
            let mut model = match m {
                MaterialRef::Preset(name) => presets.instantiate(name, 300.0)?,
                MaterialRef::Inline(inline) => match inline {
                    InlineMaterial::KuboGraphene { ef_ev, gamma_rad_s } => {
                        MaterialModel::KuboGraphene(GrapheneParams::from_ev(
                            *ef_ev,
                            *gamma_rad_s,
                            300.0,
                        )?)
                    }
                    InlineMaterial::NonlocalGraphene { ef_ev, gamma_rad_s } => {
                        MaterialModel::NonlocalGraphene(GrapheneParams::from_ev(
                            *ef_ev,
                            *gamma_rad_s,
                            300.0,
                        )?)
                    }
                    InlineMaterial::Drude {
                        omega_p_rad_s,
                        gamma_d_rad_s,
                    } => MaterialModel::DrudeMetal {
                        omega_p: *omega_p_rad_s,
                        gamma_d: *gamma_d_rad_s,
                    },
                    InlineMaterial::Dielectric { epsilon } => {
                        MaterialModel::Dielectric { epsilon: *epsilon }
                    }
                },
            };
            if let Some(ev) = ef_ev {
                model = model.with_fermi_energy(ev * rydcp::constants::EV);
            }
            if let Some(g) = gamma {
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
            Ok(model)
        };

        let mut layers = Vec::new();
        let mut scan_layer = None;
        for (i, entry) in file.layers.iter().enumerate() {
            let thickness = match (entry.thickness_nm, entry.thickness_um, entry.thickness_m) {
                (None, None, None) => None,
                (Some(nm), None, None) => Some(nm * 1e-9),
                (None, Some(um), None) => Some(um * 1e-6),
                (None, None, Some(m)) => Some(m),
                _ => bail!("layer {i}: give the thickness in exactly one unit field"),
            };
            if let Some(t) = thickness {
                if !(t > 0.0 && t.is_finite()) {
                    bail!("layer {i}: field thickness must be positive and finite, got {t}");
                }
            }
            if entry.scan_thickness {
                if thickness.is_none() {
                    bail!("layer {i}: scan_thickness requires a finite thickness");
                }
                if scan_layer.replace(i).is_some() {
                    bail!("only one layer may set scan_thickness");
                }
            }
            layers.push(Layer {
                material: resolve(&entry.material, None, None)?,
                thickness,
                mu: 1.0,
            });
        }

        let mut sheets: Vec<Option<Sheet>> = vec![None; layers.len().saturating_sub(1)];
        let mut scan_sheets = Vec::new();
        for entry in &file.sheets {
            if entry.interface + 1 >= layers.len() {
                bail!(
                    "sheet interface {} out of range (stack has {} interfaces)",
                    entry.interface,
                    layers.len().saturating_sub(1)
                );
            }
            if sheets[entry.interface].is_some() {
                bail!("duplicate sheet at interface {}", entry.interface);
            }
            let material = resolve(&entry.material, entry.ef_ev, entry.gamma_rad_s)?;
            if entry.scan_ef {
                scan_sheets.push(entry.interface);
            }
            sheets[entry.interface] = Some(Sheet { material });
        }

        let stack = LayerStack::new(layers, sheets)?;
        Ok(StackSpec {
            stack,
            scan_layer,
            scan_sheets,
        })
    }

    /// Stack with the marked spacer thickness replaced.
    pub fn with_spacing(&self, d: f64) -> Result<LayerStack> {
        let Some(idx) = self.scan_layer else {
            bail!("a d axis needs a layer marked scan_thickness in the stack file")
        };
        let mut layers = self.stack.layers().to_vec();
        layers[idx].thickness = Some(d);
        Ok(LayerStack::new(layers, self.stack.sheets().to_vec())?)
    }

    /// Stack with the Fermi energy of the marked sheets (or, if none are
    /// marked, of every graphene sheet) replaced.
    pub fn with_fermi_energy(&self, ef: f64) -> Result<LayerStack> {
        let mut sheets = self.stack.sheets().to_vec();
        let mut touched = false;
        for (i, s) in sheets.iter_mut().enumerate() {
            let applies = if self.scan_sheets.is_empty() {
                s.as_ref().map(|s| s.material.is_sheet()).unwrap_or(false)
            } else {
                self.scan_sheets.contains(&i)
            };
            if applies {
                if let Some(sheet) = s {
                    sheet.material = sheet.material.with_fermi_energy(ef);
                    touched = true;
                }
            }
        }
        if !touched {
            bail!("an ef axis needs at least one graphene sheet in the stack");
        }
        Ok(LayerStack::new(self.stack.layers().to_vec(), sheets)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn presets() -> MaterialPresets {
        MaterialPresets::embedded()
    }

    #[test]
    fn canonical_heterostructure_parses() {
        let text = r#"
version = 1
[[layer]]
material = "vacuum"
[[layer]]
material = "hbn"
thickness_nm = 10.0
scan_thickness = true
[[layer]]
material = "vacuum"
[[sheet]]
interface = 0
material = "graphene-kubo"
scan_ef = true
[[sheet]]
interface = 1
material = "graphene-kubo"
ef_ev = 0.0
"#;
        let spec = StackSpec::parse(text, &presets()).unwrap();
        assert_eq!(spec.stack.layers().len(), 3);
        assert_eq!(spec.scan_layer, Some(1));
        assert_eq!(spec.scan_sheets, vec![0]);
        match &spec.stack.layers()[1].material {
            MaterialModel::Dielectric { epsilon } => assert_eq!(*epsilon, 3.58),
            other => panic!("expected hbn dielectric, got {other:?}"),
        }
        let rescaled = spec.with_spacing(5e-8).unwrap();
        assert_eq!(rescaled.layers()[1].thickness, Some(5e-8));
        let retuned = spec.with_fermi_energy(0.2 * rydcp::constants::EV).unwrap();
        let top_ef = retuned.sheets()[0].as_ref().unwrap().material.fermi_energy();
        assert_eq!(top_ef, Some(0.2 * rydcp::constants::EV));
        // unmarked bottom sheet untouched
        let bottom_ef = retuned.sheets()[1].as_ref().unwrap().material.fermi_energy();
        assert_eq!(bottom_ef, Some(0.0));
    }

    #[test]
    fn malformed_thickness_names_the_field() {
        let text = r#"
version = 1
[[layer]]
material = "vacuum"
[[layer]]
material = "hbn"
thickness_nm = -4.0
[[layer]]
material = "vacuum"
"#;
        let err = StackSpec::parse(text, &presets()).unwrap_err().to_string();
        assert!(err.contains("thickness"), "error was: {err}");
    }

    #[test]
    fn unknown_preset_is_reported() {
        let text = "version = 1\n[[layer]]\nmaterial = \"vacuum\"\n[[layer]]\nmaterial = \"unobtainium\"\n";
        assert!(StackSpec::parse(text, &presets()).is_err());
    }
}
