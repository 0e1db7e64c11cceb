//! Finite operator manifolds.
//!
//! An operator manifold here is a finite list of weighted cells together with
//! a projection-valued measure on `C^N`, stored as one orthonormal frame per
//! cell. On top of that data model the crate builds
//!
//! * the spin scalar product (the cell-wise density of `<E_V u, v>`),
//! * local orthonormal bases and the unitary function-space representation
//!   they induce,
//! * the spin-dimension profile (the strata `D_m`),
//! * gauges, gauge fields and the extraction of the pointwise `U(m)`
//!   freedom between two gauges.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line tool live in the `opman` crate.

#![no_std]

extern crate alloc;

pub mod decomposition;
mod error;
pub mod examples;
pub mod gauge;
pub mod linalg;
pub mod manifold;
pub mod random;
pub mod spin;
pub mod suite;

pub use decomposition::{
    canonical_gauge, construct_local_onb, cyclic_subspace_basis, gauge_from_local_onb,
    pointwise_completeness_residual, reconstruct_from_components, representation_map,
    spin_dimension_profile, verify_gauge, verify_local_onb, ComponentFunctions, Gauge, LocalOnb,
    OnbEntry, SpinDimensionProfile,
};
pub use error::{Error, Result};
pub use gauge::{
    apply_gauge, apply_gauge_field, check_isomorphism, extract_gauge_transformation,
    gauge_from_field, gauge_invariant_density, invert_gauge, realize_gauge_as_local_onb,
    GaugeField, Isomorphism, WaveSection,
};
pub use linalg::{CMatrix, CVector, C64};
pub use manifold::{
    apply_functional_calculus, apply_spectral_projection, observable_expectation,
    position_operator, validate_operator_manifold, Cell, Check, MeasureSpace, OperatorManifold,
    Region, SpectralMeasure, ValidationReport,
};
pub use random::{generate_random_manifold, SplitMix64};
pub use spin::{spin_scalar_product, vector_measure, SpinDensity};
pub use suite::verify_suite;

/// Default tolerance for structural checks of the projection-valued measure.
pub const EPS_VALID: f64 = 1e-10;

/// Singular-value threshold for every rank and support decision.
pub const EPS_RANK: f64 = 1e-8;

/// Tolerance used when an operation requires a verified local ONB or gauge.
pub const EPS_CHECK: f64 = 1e-9;
