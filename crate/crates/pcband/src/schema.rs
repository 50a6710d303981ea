//! JSON profile documents.
//!
//! ```json
//! {"period": 1.0, "type": "expression", "expression": "2 + cos(2*pi*x)"}
//! {"period": 1.0, "type": "canonical", "canonical": "square"}
//! {"type": "layers", "layers": [{"n": 1.0, "d": 0.5}, {"n": 3.0, "d": 0.5}]}
//! ```
//!
//! Exactly one of `expression`, `canonical` and `layers` must be present and
//! it must match `type`. `period` defaults to 1 and, for layers, must equal
//! the summed thickness when given.

use std::fs;
use std::path::Path;

use pcband_core::{CanonicalProfile, Layer, LayerStack, Medium, Profile};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Expression,
    Layers,
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    pub n: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(rename = "type")]
    pub kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<LayerDoc>>,
}

impl ProfileDoc {
    pub fn into_medium(self) -> Result<Medium, CliError> {
        let present = [self.expression.is_some(), self.canonical.is_some(), self.layers.is_some()];
        if present.iter().filter(|&&p| p).count() != 1 {
            return Err(CliError::Config(
                "profile must contain exactly one of 'expression', 'canonical', 'layers'".into(),
            ));
        }
        let period = self.period.unwrap_or(1.0);
        match (self.kind, self.expression, self.canonical, self.layers) {
            (ProfileKind::Expression, Some(text), _, _) => {
                Ok(Medium::Profile(Profile::parse_expr_with_period(&text, period)?))
            }
            (ProfileKind::Canonical, _, Some(name), _) => {
                let kind: CanonicalProfile = name.parse()?;
                Ok(Medium::Profile(Profile::canonical_with_period(kind, period)?))
            }
            (ProfileKind::Layers, _, _, Some(layers)) => {
                let stack = LayerStack::new(layers.into_iter().map(|l| Layer { n: l.n, d: l.d }).collect())?;
                if let Some(p) = self.period {
                    if (p - stack.period()).abs() > 1e-12 * stack.period().max(1.0) {
                        return Err(CliError::Config(format!(
                            "period {} does not match the summed layer thickness {}",
                            p,
                            stack.period()
                        )));
                    }
                }
                Ok(Medium::Layers(stack))
            }
            (kind, ..) => Err(CliError::Config(format!("profile type '{}' needs a matching field", kind_name(kind)))),
        }
    }
}

fn kind_name(kind: ProfileKind) -> &'static str {
    match kind {
        ProfileKind::Expression => "expression",
        ProfileKind::Layers => "layers",
        ProfileKind::Canonical => "canonical",
    }
}

pub fn parse_profile(json: &str) -> Result<Medium, CliError> {
    serde_json::from_str::<ProfileDoc>(json)?.into_medium()
}

/// A canonical profile name, or the path of a JSON profile document.
pub fn load_medium(arg: &str) -> Result<Medium, CliError> {
    if let Ok(kind) = arg.parse::<CanonicalProfile>() {
        return Ok(Medium::Profile(Profile::canonical(kind)));
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(pcband_core::Error::UnknownProfile(arg.to_string()).into());
    }
    let text = fs::read_to_string(path).map_err(|source| CliError::ReadProfile { path: path.to_path_buf(), source })?;
    parse_profile(&text)
}
