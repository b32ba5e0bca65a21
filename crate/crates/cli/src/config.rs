//! TOML run configuration.
//!
//! ```toml
//! [design]
//! tau0 = -0.05
//!
//! [design.priors.a]
//! family = "constant"
//! value = 2.0
//!
//! [[scenario]]
//! name = "global-null"
//! orr = [0.2, 0.2, 0.2, 0.2]
//! hr_pfs = [1.0, 1.0, 1.0, 1.0]
//! hr_os = [1.0, 1.0, 1.0, 1.0]
//! ```
//!
//! A single `[scenario]` table is accepted as well as `[[scenario]]` arrays.

use std::path::Path;

use sddo_core::calibration::CalibrationTarget;
use sddo_core::design::{validate, DesignSpec, ScenarioSpec, ValidationErrors};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub design: DesignSpec,
    pub scenarios: Vec<ScenarioSpec>,
    pub calibration: CalibrationTarget,
    /// SHA-256 of the config file contents, hex encoded.
    pub digest: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    design: DesignSpec,
    scenario: Option<toml::Value>,
    #[serde(default)]
    calibration: CalibrationTarget,
}

#[derive(Serialize)]
struct ConfigOut<'a> {
    design: &'a DesignSpec,
    calibration: &'a CalibrationTarget,
    scenario: &'a [ScenarioSpec],
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn parse(text: &str) -> CliResult<Config> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let scenarios = match raw.scenario {
        None => Vec::new(),
        Some(v @ toml::Value::Table(_)) => vec![v
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("[scenario]: {e}")))?],
        Some(v @ toml::Value::Array(_)) => v
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("[[scenario]]: {e}")))?,
        Some(_) => return Err(CliError::Config("scenario must be a table or array of tables".into())),
    };
    let config = Config {
        design: raw.design,
        scenarios,
        calibration: raw.calibration,
        digest: digest(text.as_bytes()),
    };
    config.validate()?;
    Ok(config)
}

pub fn load(path: &Path) -> CliResult<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::Config(format!("{} not found", path.display())),
        _ => CliError::io(path, e),
    })?;
    parse(&text)
}

impl Config {
    fn validate(&self) -> Result<(), ValidationErrors> {
        let mut errors = Vec::new();
        if let Err(e) = self.design.validate() {
            errors.extend(e.0);
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if let Err(e) = validate(self.design.clone(), s.clone()) {
                errors.extend(
                    e.0.into_iter()
                        .filter(|f| !f.path.starts_with("design."))
                        .map(|mut f| {
                            f.path = f.path.replacen("scenario.", &format!("scenario[{i}]."), 1);
                            f
                        }),
                );
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ValidationErrors(errors))
        }
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(&ConfigOut {
            design: &self.design,
            calibration: &self.calibration,
            scenario: &self.scenarios,
        })
        .map_err(|e| CliError::Config(e.to_string()))
    }
}
