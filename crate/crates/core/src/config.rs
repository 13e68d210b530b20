//! On-disk JSON form of [`SystemConfig`].
//!
//! ```json
//! {
//!   "modes": [
//!     {"name": "M", "frequency": {"type": "field_linear", "slope_ghz_per_koe": 0.714, "intercept_ghz": 2.714},
//!      "alpha_ghz": 2e-5, "beta_ghz": 1.8e-4},
//!     {"name": "P1", "frequency": {"type": "static", "value_ghz": 3.4}, "alpha_ghz": 2e-3, "beta_ghz": 1.8e-2}
//!   ],
//!   "couplings": [{"a": "M", "b": "P1", "j_ghz": 0.0, "gamma_ghz": 0.1}],
//!   "field_sweep": {"start_koe": 0.0, "stop_koe": 3.0, "points": 301},
//!   "frequency_sweep": {"start_ghz": 2.5, "stop_ghz": 5.0, "points": 401}
//! }
//! ```
//!
//! `couplings` defaults to empty and each sweep's `points` to 301 (field)
//! and 401 (frequency). Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CouplingSpec, FrequencyLaw, ModeSpec, Sweep, SystemConfig};

pub const DEFAULT_FIELD_POINTS: usize = 301;
pub const DEFAULT_FREQUENCY_POINTS: usize = 401;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub modes: Vec<ModeDocument>,
    #[serde(default)]
    pub couplings: Vec<CouplingDocument>,
    pub field_sweep: FieldSweepDocument,
    pub frequency_sweep: FrequencySweepDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeDocument {
    pub name: String,
    pub frequency: FrequencyDocument,
    pub alpha_ghz: f64,
    pub beta_ghz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrequencyDocument {
    Static {
        value_ghz: f64,
    },
    FieldLinear {
        slope_ghz_per_koe: f64,
        intercept_ghz: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingDocument {
    pub a: String,
    pub b: String,
    pub j_ghz: f64,
    pub gamma_ghz: f64,
}

fn default_field_points() -> usize {
    DEFAULT_FIELD_POINTS
}

fn default_frequency_points() -> usize {
    DEFAULT_FREQUENCY_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSweepDocument {
    pub start_koe: f64,
    pub stop_koe: f64,
    #[serde(default = "default_field_points")]
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySweepDocument {
    pub start_ghz: f64,
    pub stop_ghz: f64,
    #[serde(default = "default_frequency_points")]
    pub points: usize,
}

impl ConfigDocument {
    pub fn into_config(self) -> Result<SystemConfig> {
        let modes = self
            .modes
            .into_iter()
            .map(|m| {
                let law = match m.frequency {
                    FrequencyDocument::Static { value_ghz } => {
                        FrequencyLaw::Static { value: value_ghz }
                    }
                    FrequencyDocument::FieldLinear {
                        slope_ghz_per_koe,
                        intercept_ghz,
                    } => FrequencyLaw::FieldLinear {
                        slope: slope_ghz_per_koe,
                        intercept: intercept_ghz,
                    },
                };
                ModeSpec::new(m.name, law, m.alpha_ghz, m.beta_ghz)
            })
            .collect();
        let couplings = self
            .couplings
            .into_iter()
            .map(|c| CouplingSpec::new(c.a, c.b, c.j_ghz, c.gamma_ghz))
            .collect();
        let field = Sweep::new(
            self.field_sweep.start_koe,
            self.field_sweep.stop_koe,
            self.field_sweep.points,
        );
        let freq = Sweep::new(
            self.frequency_sweep.start_ghz,
            self.frequency_sweep.stop_ghz,
            self.frequency_sweep.points,
        );
        Ok(SystemConfig::new(modes, couplings, field, freq)?.with_notes(self.notes))
    }

    pub fn from_config(config: &SystemConfig) -> Self {
        let modes = config
            .modes()
            .iter()
            .map(|m| ModeDocument {
                name: m.name.clone(),
                frequency: match m.frequency {
                    FrequencyLaw::Static { value } => {
                        FrequencyDocument::Static { value_ghz: value }
                    }
                    FrequencyLaw::FieldLinear { slope, intercept } => {
                        FrequencyDocument::FieldLinear {
                            slope_ghz_per_koe: slope,
                            intercept_ghz: intercept,
                        }
                    }
                },
                alpha_ghz: m.alpha,
                beta_ghz: m.beta,
            })
            .collect();
        let couplings = config
            .couplings()
            .iter()
            .map(|c| CouplingDocument {
                a: c.a.clone(),
                b: c.b.clone(),
                j_ghz: c.j,
                gamma_ghz: c.gamma,
            })
            .collect();
        let (f, w) = (config.field_sweep(), config.frequency_sweep());
        ConfigDocument {
            modes,
            couplings,
            field_sweep: FieldSweepDocument {
                start_koe: f.start,
                stop_koe: f.stop,
                points: f.points,
            },
            frequency_sweep: FrequencySweepDocument {
                start_ghz: w.start,
                stop_ghz: w.stop,
                points: w.points,
            },
            notes: config.notes().map(str::to_owned),
        }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: ConfigDocument =
        serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    de.end().map_err(|e| Error::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    doc.into_config()
}

pub fn to_json(config: &SystemConfig) -> String {
    let mut s = serde_json::to_string_pretty(&ConfigDocument::from_config(config))
        .expect("document serializes");
    s.push('\n');
    s
}

pub fn load_config(path: &Path) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "modes": [{"name": "P", "frequency": {"type": "static", "value_ghz": 3.4}, "alpha_ghz": 0.002, "beta_ghz": 0.018}],
        "field_sweep": {"start_koe": 0, "stop_koe": 3},
        "frequency_sweep": {"start_ghz": 3, "stop_ghz": 4}
    }"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.len(), 1);
        assert!(cfg.couplings().is_empty());
        assert_eq!(cfg.field_sweep().points, 301);
        assert_eq!(cfg.frequency_sweep().points, 401);
    }

    #[test]
    fn unknown_key_reports_path() {
        let text = MINIMAL.replace("\"alpha_ghz\"", "\"alpha\": 1, \"alpha_ghz\"");
        match parse_config(&text) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "modes[0].alpha"),
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("\"static\"", "\"stationary\"");
        match parse_config(&text) {
            Err(Error::Schema { path, .. }) => {
                assert!(path.starts_with("modes[0].frequency"), "{path}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_mode_in_coupling() {
        let text = MINIMAL.replace(
            "\"field_sweep\"",
            "\"couplings\": [{\"a\": \"P\", \"b\": \"P9\", \"j_ghz\": 0, \"gamma_ghz\": 0.1}], \"field_sweep\"",
        );
        assert!(matches!(parse_config(&text), Err(Error::UnknownModeInCoupling(m)) if m == "P9"));
    }

    #[test]
    fn duplicate_mode() {
        let text = MINIMAL.replace(
            "\"beta_ghz\": 0.018}]",
            "\"beta_ghz\": 0.018}, {\"name\": \"P\", \"frequency\": {\"type\": \"static\", \"value_ghz\": 4.1}, \"alpha_ghz\": 0, \"beta_ghz\": 0}]",
        );
        assert!(matches!(parse_config(&text), Err(Error::DuplicateMode(m)) if m == "P"));
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(matches!(
            parse_config(&format!("{MINIMAL} x")),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn serialize_round_trip() {
        let cfg = parse_config(MINIMAL).unwrap().with_notes(Some("n".into()));
        assert_eq!(parse_config(&to_json(&cfg)).unwrap(), cfg);
    }
}
