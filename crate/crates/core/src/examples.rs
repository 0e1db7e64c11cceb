//! Built-in instances: multiplication operators on a line of cells.
//!
//! [`scalar`] is the one-component case (every fiber one-dimensional) and
//! [`spinor`] the two-component case (every fiber two-dimensional). Cells
//! are named `c0, c1, ...`, sit at coordinate `k` on a one-dimensional
//! manifold and carry unit weight.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::CMatrix;
use crate::manifold::{Cell, MeasureSpace, OperatorManifold, SpectralMeasure};

/// `components`-component functions on `cells` cells. Component `alpha` of
/// cell `k` is the standard basis vector `e_{k * components + alpha}`.
pub fn multiplication(cells: usize, components: usize) -> OperatorManifold {
    assert!(cells > 0 && components > 0);
    let n = cells * components;
    let identity = CMatrix::identity(n, n);
    let frames: Vec<CMatrix> = (0..cells)
        .map(|k| identity.columns(k * components, components).into_owned())
        .collect();
    let cell_list = (0..cells)
        .map(|k| Cell::new(format!("c{k}"), vec![k as f64], 1.0).expect("unit weight"))
        .collect();
    let space = MeasureSpace::new(1, cell_list).expect("distinct ids");
    OperatorManifold::new(space, SpectralMeasure::new(n, frames).expect("shapes"))
        .expect("one frame per cell")
}

/// Scalar particle: spin dimension one everywhere.
pub fn scalar(cells: usize) -> OperatorManifold {
    multiplication(cells, 1)
}

/// Two-component spinors: spin dimension two everywhere.
pub fn spinor(cells: usize) -> OperatorManifold {
    multiplication(cells, 2)
}
