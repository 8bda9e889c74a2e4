//! Versioned TOML family description shared by the library and the command line.
//!
//! ```toml
//! version = 1
//!
//! [family]
//! name = "quartic"
//! log_density = "-x^4/4"
//! symmetric = true
//! log_concave = true
//! ```
//!
//! A builtin is selected with `builtin = "logistic"` instead of `name`/`log_density`.
//! Support bounds `lo`/`hi` default to the real line. Tables other than `[family]` are
//! ignored here so front ends can add their own sections.

use serde::{Deserialize, Serialize};

use super::family::{Builtin, CustomFamily, FamilyError, LocationFamily, Support};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not valid TOML: {0}")]
    Syntax(String),
    #[error("config version {found} is not supported (expected {CONFIG_VERSION})")]
    Version { found: u32 },
    #[error("config has no [family] table")]
    MissingFamily,
    #[error("family.{field}: {reason}")]
    Field { field: &'static str, reason: String },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub builtin: Option<Builtin>,
    pub name: Option<String>,
    pub log_density: Option<String>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub symmetric: Option<bool>,
    pub log_concave: Option<bool>,
}

impl FamilySpec {
    pub fn build(&self) -> Result<LocationFamily, ConfigError> {
        let field = |field, reason: &str| Err(ConfigError::Field { field, reason: reason.into() });
        if let Some(b) = self.builtin {
            if self.log_density.is_some() {
                return field("log_density", "not allowed together with builtin");
            }
            if self.lo.is_some() || self.hi.is_some() {
                return field("lo", "builtin families have fixed support");
            }
            if self.symmetric.is_some() || self.log_concave.is_some() {
                return field("symmetric", "builtin families have fixed shape flags");
            }
            return Ok(LocationFamily::builtin(b));
        }
        let Some(src) = &self.log_density else {
            return field("log_density", "required unless builtin is given");
        };
        let name = self.name.as_deref().unwrap_or("custom");
        let support = Support { lo: self.lo.unwrap_or(f64::NEG_INFINITY), hi: self.hi.unwrap_or(f64::INFINITY) };
        let c = CustomFamily::new(name, src, support, self.symmetric.unwrap_or(false), self.log_concave.unwrap_or(false))?;
        Ok(LocationFamily::custom(c))
    }
}

#[derive(Deserialize)]
struct FileShape {
    version: Option<u32>,
    family: Option<FamilySpec>,
}

/// The `[family]` table of a config file, after the version check.
pub fn parse_family_config(src: &str) -> Result<FamilySpec, ConfigError> {
    let shape: FileShape = toml::from_str(src).map_err(|e| ConfigError::Syntax(e.message().to_string()))?;
    check_version(shape.version)?;
    shape.family.ok_or(ConfigError::MissingFamily)
}

pub fn check_version(v: Option<u32>) -> Result<(), ConfigError> {
    match v {
        Some(CONFIG_VERSION) => Ok(()),
        Some(found) => Err(ConfigError::Version { found }),
        None => Err(ConfigError::Version { found: 0 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_and_custom() {
        let b = parse_family_config("version = 1\n[family]\nbuiltin = \"hyperbolic-secant\"\n").unwrap();
        assert_eq!(b.build().unwrap().as_builtin(), Some(Builtin::HyperbolicSecant));
        let src = "version = 1\n[run]\nn = 5\n[family]\nname = \"quartic\"\nlog_density = \"-x^4/4\"\nsymmetric = true\nlog_concave = true\n";
        let f = parse_family_config(src).unwrap().build().unwrap();
        assert_eq!(f.name(), "quartic");
        assert!(f.symmetric() && f.log_concave());
        let half = parse_family_config("version = 1\n[family]\nlog_density = \"-x\"\nlo = 0.0\n").unwrap().build().unwrap();
        assert_eq!(half.support(), Support { lo: 0.0, hi: f64::INFINITY });
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(parse_family_config("version = 2\n[family]\nbuiltin = \"gaussian\"\n"), Err(ConfigError::Version { found: 2 })));
        assert!(matches!(parse_family_config("[family]\nbuiltin = \"gaussian\"\n"), Err(ConfigError::Version { found: 0 })));
        assert!(matches!(parse_family_config("version = 1\n"), Err(ConfigError::MissingFamily)));
        assert!(matches!(parse_family_config("version = 1\n[family]\nbuiltn = \"gaussian\"\n"), Err(ConfigError::Syntax(_))));
        assert!(matches!(parse_family_config("version = = 1"), Err(ConfigError::Syntax(_))));
        let both = parse_family_config("version = 1\n[family]\nbuiltin = \"gaussian\"\nlog_density = \"-x^2\"\n").unwrap();
        assert!(matches!(both.build(), Err(ConfigError::Field { field: "log_density", .. })));
        let none = parse_family_config("version = 1\n[family]\nname = \"x\"\n").unwrap();
        assert!(matches!(none.build(), Err(ConfigError::Field { field: "log_density", .. })));
    }
}
