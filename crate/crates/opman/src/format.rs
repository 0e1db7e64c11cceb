//! JSON schemas, all tagged `"format": "opman/1"`.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.
//! Per-cell data is listed in canonical cell order. Gauge, section and field
//! files open with a `profile` object mapping each cell id to its spin
//! dimension; their `cells` array must follow the same order.
//!
//! ```json
//! {
//!   "format": "opman/1",
//!   "kind": "manifold",
//!   "manifold_dim": 1,
//!   "hilbert_dim": 2,
//!   "cells": [
//!     { "id": "c0", "coords": [0.0], "weight": 1.0, "frame": [[[1.0, 0.0]], [[0.0, 0.0]]] },
//!     { "id": "c1", "coords": [1.0], "weight": 1.0, "frame": [[[0.0, 0.0]], [[1.0, 0.0]]] }
//!   ]
//! }
//! ```

use indexmap::IndexMap;
use opman_core::{
    CMatrix, CVector, Cell, Gauge, GaugeField, MeasureSpace, OperatorManifold, SpectralMeasure,
    SpinDimensionProfile, WaveSection, C64,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT: &str = "opman/1";

/// `[re, im]`.
pub type Complex = [f64; 2];

/// Rows of complex entries.
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Manifold,
    Gauge,
    Section,
    Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldFile {
    pub format: String,
    pub kind: Kind,
    pub manifold_dim: usize,
    pub hilbert_dim: usize,
    pub cells: Vec<ManifoldCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldCell {
    pub id: String,
    pub coords: Vec<f64>,
    pub weight: f64,
    /// `N x r_k`, one row per Hilbert-space coordinate.
    pub frame: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeFile {
    pub format: String,
    pub kind: Kind,
    pub hilbert_dim: usize,
    pub profile: IndexMap<String, usize>,
    pub cells: Vec<GaugeCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeCell {
    pub id: String,
    pub weight: f64,
    /// `m_k x N`.
    pub matrix: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionFile {
    pub format: String,
    pub kind: Kind,
    pub profile: IndexMap<String, usize>,
    pub cells: Vec<SectionCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionCell {
    pub id: String,
    pub values: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub format: String,
    pub kind: Kind,
    pub profile: IndexMap<String, usize>,
    pub cells: Vec<FieldCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldCell {
    pub id: String,
    /// `m_k x m_k`.
    pub matrix: Matrix,
}

fn complex(z: &C64) -> Complex {
    [z.re, z.im]
}

fn matrix_to_rows(m: &CMatrix) -> Matrix {
    m.row_iter()
        .map(|row| row.iter().map(complex).collect())
        .collect()
}

fn rows_to_matrix(
    rows: &Matrix,
    nrows: usize,
    ncols: Option<usize>,
    path: &str,
) -> Result<CMatrix> {
    if rows.len() != nrows {
        return Err(Error::schema(
            path,
            format!("expected {nrows} rows, found {}", rows.len()),
        ));
    }
    let ncols = match ncols {
        Some(c) => c,
        None => rows.first().map_or(0, Vec::len),
    };
    let mut m = CMatrix::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::schema(
                format!("{path}[{i}]"),
                format!("expected {ncols} entries, found {}", row.len()),
            ));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

fn check_header(format: &str, kind: Kind, expected: Kind) -> Result<()> {
    if format != FORMAT {
        return Err(Error::schema(
            "format",
            format!("expected \"{FORMAT}\", found \"{format}\""),
        ));
    }
    if kind != expected {
        return Err(Error::schema(
            "kind",
            format!("expected {expected:?} file, found {kind:?}"),
        ));
    }
    Ok(())
}

/// Checks that `cells` lists exactly the profile's ids, in order.
fn check_ids<'a>(
    profile: &IndexMap<String, usize>,
    ids: impl ExactSizeIterator<Item = &'a str>,
) -> Result<()> {
    if ids.len() != profile.len() {
        return Err(Error::schema(
            "cells",
            format!("{} cells listed, profile has {}", ids.len(), profile.len()),
        ));
    }
    for (k, (id, expected)) in ids.zip(profile.keys()).enumerate() {
        if id != expected {
            return Err(Error::schema(
                format!("cells[{k}].id"),
                format!("expected \"{expected}\", found \"{id}\""),
            ));
        }
    }
    Ok(())
}

fn profile_map(ids: &[String], profile: &SpinDimensionProfile) -> IndexMap<String, usize> {
    ids.iter()
        .cloned()
        .zip(profile.multiplicities().iter().copied())
        .collect()
}

impl ManifoldFile {
    pub fn from_manifold(om: &OperatorManifold) -> Self {
        Self {
            format: FORMAT.into(),
            kind: Kind::Manifold,
            manifold_dim: om.space().dim(),
            hilbert_dim: om.hilbert_dim(),
            cells: om
                .cells()
                .iter()
                .zip(om.measure().frames())
                .map(|(cell, frame)| ManifoldCell {
                    id: cell.id().into(),
                    coords: cell.coords().to_vec(),
                    weight: cell.weight(),
                    frame: matrix_to_rows(frame),
                })
                .collect(),
        }
    }

    /// Builds the manifold, checking structure but not the measure axioms.
    pub fn to_manifold(&self) -> Result<OperatorManifold> {
        check_header(&self.format, self.kind, Kind::Manifold)?;
        let n = self.hilbert_dim;
        let mut cells = Vec::with_capacity(self.cells.len());
        let mut frames = Vec::with_capacity(self.cells.len());
        for (k, c) in self.cells.iter().enumerate() {
            if c.coords.len() != self.manifold_dim {
                return Err(Error::schema(
                    format!("cells[{k}].coords"),
                    format!(
                        "expected {} coordinates, found {}",
                        self.manifold_dim,
                        c.coords.len()
                    ),
                ));
            }
            let cell = Cell::new(c.id.clone(), c.coords.clone(), c.weight)
                .map_err(|e| Error::content(format!("cells[{k}]"), e))?;
            cells.push(cell);
            frames.push(rows_to_matrix(
                &c.frame,
                n,
                None,
                &format!("cells[{k}].frame"),
            )?);
        }
        let space =
            MeasureSpace::new(self.manifold_dim, cells).map_err(|e| Error::content("cells", e))?;
        let measure = SpectralMeasure::new(n, frames).map_err(|e| Error::content("cells", e))?;
        OperatorManifold::new(space, measure).map_err(|e| Error::content("cells", e))
    }
}

impl GaugeFile {
    pub fn from_gauge(gauge: &Gauge, ids: &[String]) -> Self {
        Self {
            format: FORMAT.into(),
            kind: Kind::Gauge,
            hilbert_dim: gauge.hilbert_dim(),
            profile: profile_map(ids, &gauge.profile()),
            cells: ids
                .iter()
                .zip(gauge.blocks())
                .zip(gauge.weights())
                .map(|((id, block), &weight)| GaugeCell {
                    id: id.clone(),
                    weight,
                    matrix: matrix_to_rows(block),
                })
                .collect(),
        }
    }

    /// The gauge and its cell ids.
    pub fn to_gauge(&self) -> Result<(Gauge, Vec<String>)> {
        check_header(&self.format, self.kind, Kind::Gauge)?;
        check_ids(&self.profile, self.cells.iter().map(|c| c.id.as_str()))?;
        let blocks = self
            .cells
            .iter()
            .zip(self.profile.values())
            .enumerate()
            .map(|(k, (c, &m))| {
                rows_to_matrix(
                    &c.matrix,
                    m,
                    Some(self.hilbert_dim),
                    &format!("cells[{k}].matrix"),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = self.cells.iter().map(|c| c.weight).collect();
        let gauge = Gauge::new(self.hilbert_dim, weights, blocks)
            .map_err(|e| Error::content("cells", e))?;
        Ok((gauge, self.profile.keys().cloned().collect()))
    }
}

impl SectionFile {
    pub fn from_section(psi: &WaveSection, ids: &[String]) -> Self {
        Self {
            format: FORMAT.into(),
            kind: Kind::Section,
            profile: profile_map(ids, &psi.profile()),
            cells: ids
                .iter()
                .zip(psi.values())
                .map(|(id, v)| SectionCell {
                    id: id.clone(),
                    values: v.iter().map(complex).collect(),
                })
                .collect(),
        }
    }

    pub fn to_section(&self) -> Result<(WaveSection, Vec<String>)> {
        check_header(&self.format, self.kind, Kind::Section)?;
        check_ids(&self.profile, self.cells.iter().map(|c| c.id.as_str()))?;
        let values = self
            .cells
            .iter()
            .zip(self.profile.values())
            .enumerate()
            .map(|(k, (c, &m))| {
                if c.values.len() != m {
                    return Err(Error::schema(
                        format!("cells[{k}].values"),
                        format!("expected {m} components, found {}", c.values.len()),
                    ));
                }
                Ok(CVector::from_iterator(
                    m,
                    c.values.iter().map(|&[re, im]| C64::new(re, im)),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((
            WaveSection::new(values),
            self.profile.keys().cloned().collect(),
        ))
    }
}

impl FieldFile {
    pub fn from_field(field: &GaugeField, ids: &[String]) -> Self {
        Self {
            format: FORMAT.into(),
            kind: Kind::Field,
            profile: profile_map(ids, &field.profile()),
            cells: ids
                .iter()
                .zip(field.matrices())
                .map(|(id, m)| FieldCell {
                    id: id.clone(),
                    matrix: matrix_to_rows(m),
                })
                .collect(),
        }
    }

    pub fn to_field(&self) -> Result<(GaugeField, Vec<String>)> {
        check_header(&self.format, self.kind, Kind::Field)?;
        check_ids(&self.profile, self.cells.iter().map(|c| c.id.as_str()))?;
        let matrices = self
            .cells
            .iter()
            .zip(self.profile.values())
            .enumerate()
            .map(|(k, (c, &m))| {
                rows_to_matrix(&c.matrix, m, Some(m), &format!("cells[{k}].matrix"))
            })
            .collect::<Result<Vec<_>>>()?;
        let field = GaugeField::new(matrices).map_err(|e| Error::content("cells", e))?;
        Ok((field, self.profile.keys().cloned().collect()))
    }
}

/// Cell ids of a manifold in canonical order.
pub fn cell_ids(om: &OperatorManifold) -> Vec<String> {
    om.cells().iter().map(|c| c.id().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use opman_core::examples;

    #[test]
    fn ragged_frame_is_located() {
        let mut file = ManifoldFile::from_manifold(&examples::spinor(2));
        file.cells[1].frame[2].pop();
        let err = file.to_manifold().unwrap_err();
        assert_eq!(
            err.to_string(),
            "cells[1].frame[2]: expected 2 entries, found 1"
        );
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let mut file = ManifoldFile::from_manifold(&examples::scalar(2));
        file.kind = Kind::Gauge;
        assert!(file
            .to_manifold()
            .unwrap_err()
            .to_string()
            .starts_with("kind:"));
        file.kind = Kind::Manifold;
        file.format = "opman/0".into();
        assert!(file
            .to_manifold()
            .unwrap_err()
            .to_string()
            .starts_with("format:"));
    }

    #[test]
    fn empty_frames_survive_conversion() {
        let om = opman_core::generate_random_manifold(3, 4, &[2, 0, 2], 5).unwrap();
        let file = ManifoldFile::from_manifold(&om);
        assert!(file.cells[1].frame.iter().all(Vec::is_empty));
        assert_eq!(file.to_manifold().unwrap(), om);
    }

    #[test]
    fn section_ids_must_follow_profile() {
        let profile = SpinDimensionProfile::from_multiplicities(vec![1, 2]);
        let ids = vec!["a".to_string(), "b".to_string()];
        let mut file = SectionFile::from_section(&WaveSection::zeros(&profile), &ids);
        assert!(file.to_section().is_ok());
        file.cells.swap(0, 1);
        assert_eq!(
            file.to_section().unwrap_err().to_string(),
            "cells[0].id: expected \"a\", found \"b\""
        );
    }
}
