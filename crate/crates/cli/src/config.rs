//! Optional configuration file, merged underneath command-line flags
//! (flags always win).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DanglingChoice {
    /// Abort the build when a reference points at nothing.
    Fail,
    /// Warn and drop the edge instead.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DedupChoice {
    /// Answers are duplicates iff their undirected edge sets are equal.
    Edges,
    /// Connector endpoints compare by type instead of id.
    Types,
}

/// The file form of the build/query settings. Every field is optional;
/// omitted ones fall back to flag values or the built-in defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub original_weight: Option<f64>,
    pub opposite_weight: Option<f64>,
    /// Property names eligible as an object's display name, best first.
    pub name_attributes: Option<Vec<String>>,
    /// Name nameless relationship objects after what they reference.
    pub synthesize_names: Option<bool>,
    pub dangling: Option<DanglingChoice>,
    /// Attribute name that receives lifted character data in XML builds.
    pub pcdata_attribute: Option<String>,
    /// Path to a significance-override file for XML reference attributes.
    pub overrides: Option<PathBuf>,
    /// Default duplicate-elimination mode for queries.
    pub dedup: Option<DedupChoice>,
    /// Connector types that are inverses of each other.
    pub inverse_types: Option<BTreeMap<String, String>>,
    /// Predicates whose object names a subject's type (RDF builds).
    pub type_predicates: Option<Vec<String>>,
    /// Predicates whose object names a subject, best first (RDF builds).
    pub name_predicates: Option<Vec<String>>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<ConfigFile, Failure> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = fs::read_to_string(path).map_err(|err| {
            Failure::input(format!("cannot read config file `{}`: {err}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|err| {
            Failure::input(format!("config file `{}` is invalid: {err}", path.display()))
        })
    }
}
