//! JSON model files.

use serde::{Deserialize, Serialize};

use ratfit::domain::{AffineMap, BoxDomain};
use ratfit::model::{ModelBasis, RationalModel};
use ratfit::multiindex::MultiIndexOrder;
use ratfit::orthobasis::{BasisData, OrthonormalBasis};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalPart {
    #[serde(rename = "L")]
    pub max_degree: usize,
    pub norm0: f64,
    #[serde(rename = "R")]
    pub recurrence: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialPart {
    pub max_degree: usize,
    pub scale: Vec<f64>,
    pub shift: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub n: usize,
    pub basis_kind: String,
    #[serde(rename = "M")]
    pub numerator_degree: usize,
    #[serde(rename = "N")]
    pub denominator_degree: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub domain: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orthonormal: Option<OrthonormalPart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomial: Option<MonomialPart>,
}

impl ModelFile {
    pub fn from_model(model: &RationalModel) -> Self {
        let (orthonormal, monomial) = match model.basis() {
            ModelBasis::Orthonormal(basis) => {
                let data = basis.to_data();
                (
                    Some(OrthonormalPart {
                        max_degree: data.max_degree,
                        norm0: data.norm0,
                        recurrence: data.recurrence,
                    }),
                    None,
                )
            }
            ModelBasis::Monomial { order, map } => (
                None,
                Some(MonomialPart {
                    max_degree: order.max_degree(),
                    scale: map.scale.clone(),
                    shift: map.shift.clone(),
                }),
            ),
        };
        Self {
            format_version: FORMAT_VERSION,
            n: model.n(),
            basis_kind: model.basis().kind().to_string(),
            numerator_degree: model.numerator_degree(),
            denominator_degree: model.denominator_degree(),
            a: model.numerator_coeffs().to_vec(),
            b: model.denominator_coeffs().to_vec(),
            domain: model.domain().bounds().to_vec(),
            orthonormal,
            monomial,
        }
    }

    pub fn to_model(&self) -> ratfit::Result<RationalModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(ratfit::Error::InvalidInput(format!(
                "unsupported model format version {}",
                self.format_version
            )));
        }
        let domain = BoxDomain::new(self.domain.clone())?;
        let basis = match (self.basis_kind.as_str(), &self.orthonormal, &self.monomial) {
            ("orthonormal", Some(o), None) => ModelBasis::Orthonormal(OrthonormalBasis::from_data(BasisData {
                n: self.n,
                max_degree: o.max_degree,
                norm0: o.norm0,
                recurrence: o.recurrence.clone(),
            })?),
            ("monomial", None, Some(m)) => ModelBasis::Monomial {
                order: MultiIndexOrder::generate(self.n, m.max_degree)?,
                map: AffineMap {
                    scale: m.scale.clone(),
                    shift: m.shift.clone(),
                },
            },
            (kind, _, _) => {
                return Err(ratfit::Error::InvalidInput(format!(
                    "basis kind {kind:?} does not match the stored basis data"
                )))
            }
        };
        RationalModel::new(
            basis,
            self.numerator_degree,
            self.denominator_degree,
            self.a.clone(),
            self.b.clone(),
            domain,
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn save_model(path: &str, model: &RationalModel) -> CliResult<()> {
    std::fs::write(path, ModelFile::from_model(model).to_json()).map_err(|e| CliError::io(path, e))
}

pub fn load_model(path: &str) -> CliResult<RationalModel> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file = ModelFile::from_json(&text).map_err(|e| CliError::format(path, e.to_string()))?;
    Ok(file.to_model()?)
}
