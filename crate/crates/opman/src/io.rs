//! Reading and writing `opman/1` documents.

use std::fs;
use std::path::Path;

use opman_core::{
    validate_operator_manifold, Gauge, GaugeField, OperatorManifold, WaveSection, EPS_VALID,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{cell_ids, FieldFile, GaugeFile, ManifoldFile, SectionFile};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a JSON document, locating errors by their path into it.
pub fn parse_document<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let location = match err.path().to_string() {
            p if p == "." => "document".to_string(),
            p => p,
        };
        let inner = err.into_inner();
        Error::schema(location, inner.to_string())
    })
}

pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_document(&read_text(path)?)
}

/// Pretty JSON with a trailing newline. Floats use shortest round-trip form.
pub fn write_document<T: Serialize>(doc: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("documents always serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a manifold without checking the measure axioms.
pub fn read_manifold(path: &Path) -> Result<OperatorManifold> {
    read_document::<ManifoldFile>(path)?.to_manifold()
}

/// Loads a manifold and rejects it unless it validates at [`EPS_VALID`].
pub fn load_manifold(path: &Path) -> Result<OperatorManifold> {
    let om = read_manifold(path)?;
    let report = validate_operator_manifold(&om, EPS_VALID);
    if !report.passed() {
        return Err(Error::Validation {
            what: "manifold validation".into(),
            report,
        });
    }
    Ok(om)
}

pub fn save_manifold(om: &OperatorManifold, path: &Path) -> Result<()> {
    write_document(&ManifoldFile::from_manifold(om), path)
}

pub fn load_gauge(path: &Path) -> Result<(Gauge, Vec<String>)> {
    read_document::<GaugeFile>(path)?.to_gauge()
}

/// Saves a gauge under the cell ids of `om`.
pub fn save_gauge(gauge: &Gauge, om: &OperatorManifold, path: &Path) -> Result<()> {
    write_document(&GaugeFile::from_gauge(gauge, &cell_ids(om)), path)
}

pub fn load_section(path: &Path) -> Result<(WaveSection, Vec<String>)> {
    read_document::<SectionFile>(path)?.to_section()
}

pub fn save_section(psi: &WaveSection, ids: &[String], path: &Path) -> Result<()> {
    write_document(&SectionFile::from_section(psi, ids), path)
}

pub fn load_field(path: &Path) -> Result<(GaugeField, Vec<String>)> {
    read_document::<FieldFile>(path)?.to_field()
}

pub fn save_field(field: &GaugeField, ids: &[String], path: &Path) -> Result<()> {
    write_document(&FieldFile::from_field(field, ids), path)
}
