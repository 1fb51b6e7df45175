use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Field, Layout, ModelParams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutEntry {
    pub name: String,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub w3: Vec<f64>,
    pub b3: Vec<f64>,
    pub u: Vec<f64>,
}

impl ParamsFile {
    fn get(&self, f: Field) -> &[f64] {
        match f {
            Field::W1 => &self.w1,
            Field::B1 => &self.b1,
            Field::W2 => &self.w2,
            Field::B2 => &self.b2,
            Field::W3 => &self.w3,
            Field::B3 => &self.b3,
            Field::U => &self.u,
        }
    }
}

/// Trained model on disk. Floats are written in shortest round-trip form,
/// so reading a written checkpoint restores every parameter bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub layout: Vec<LayoutEntry>,
    pub h: usize,
    pub params: ParamsFile,
    pub seed: u64,
    /// Training configuration, kept opaque at this level.
    pub config: serde_json::Value,
}

impl Checkpoint {
    pub fn new(layout: &Layout, params: &ModelParams, seed: u64, config: serde_json::Value) -> Self {
        let layout = layout
            .names()
            .iter()
            .zip(layout.widths())
            .map(|(name, &width)| LayoutEntry {
                name: name.clone(),
                width,
            })
            .collect();
        let f = |field| params.field(field).to_vec();
        Checkpoint {
            layout,
            h: params.hidden(),
            params: ParamsFile {
                w1: f(Field::W1),
                b1: f(Field::B1),
                w2: f(Field::W2),
                b2: f(Field::B2),
                w3: f(Field::W3),
                b3: f(Field::B3),
                u: f(Field::U),
            },
            seed,
            config,
        }
    }

    pub fn layout(&self) -> Result<Layout> {
        Layout::new(
            self.layout.iter().map(|e| e.name.clone()).collect(),
            self.layout.iter().map(|e| e.width).collect(),
        )
    }

    pub fn params(&self) -> Result<ModelParams> {
        let layout = self.layout()?;
        if self.h == 0 {
            return Err(Error::invalid("checkpoint hidden width is zero"));
        }
        let mut p = ModelParams::zeros(layout.width(), self.h);
        for field in Field::ALL {
            let src = self.params.get(field);
            let dst = p.field_mut(field);
            if src.len() != dst.len() {
                return Err(Error::invalid(format!(
                    "checkpoint field `{}` has {} values, expected {}",
                    field.name(),
                    src.len(),
                    dst.len()
                )));
            }
            dst.copy_from_slice(src);
        }
        if p.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("checkpoint contains non-finite parameters"));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ckpt: Checkpoint = serde_json::from_str(text)?;
        ckpt.params()?;
        Ok(ckpt)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
