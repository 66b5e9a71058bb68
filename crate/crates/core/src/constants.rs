//! Physical constants, loaded from the versioned table bundled with the crate.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Contents of `data/constants.toml`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    /// Table schema version.
    pub version: u32,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_boltzmann: f64,
    /// Atomic mass of 87Rb, kg.
    pub rb87_mass: f64,
}

const BUILTIN_TABLE: &str = include_str!("../data/constants.toml");
const SUPPORTED_VERSION: u32 = 1;

static TABLE: OnceLock<PhysicalConstants> = OnceLock::new();

impl PhysicalConstants {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: PhysicalConstants =
            toml::from_str(text).map_err(|e| Error::ConstantsTable(e.to_string()))?;
        if table.version != SUPPORTED_VERSION {
            return Err(Error::ConstantsTable(format!(
                "unsupported table version {} (expected {})",
                table.version, SUPPORTED_VERSION
            )));
        }
        if !(table.hbar > 0.0 && table.k_boltzmann > 0.0 && table.rb87_mass > 0.0) {
            return Err(Error::ConstantsTable("constants must be positive".into()));
        }
        Ok(table)
    }
}

/// The bundled constants table, parsed once on first use.
pub fn constants() -> &'static PhysicalConstants {
    TABLE.get_or_init(|| {
        PhysicalConstants::from_toml_str(BUILTIN_TABLE)
            .expect("bundled constants table must parse")
    })
}
