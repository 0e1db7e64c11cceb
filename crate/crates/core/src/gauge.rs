//! Gauges, gauge fields and the isomorphism test.
//!
//! Two gauges of the same manifold differ by a field of unitary `m_k x m_k`
//! matrices `W_k = mu_k G1_k G2_k*`, acting on wave sections cell by cell.
//! Only the pointwise norm `sum_alpha |psi^alpha(x)|^2` is independent of the
//! gauge.

use alloc::format;
use alloc::vec::Vec;

use crate::decomposition::{verify_gauge, Gauge, LocalOnb, OnbEntry, SpinDimensionProfile};
use crate::linalg::{self, CMatrix, CVector, C64, ONE};
use crate::manifold::OperatorManifold;
use crate::{canonical_gauge, spin_dimension_profile, Error, Result, EPS_CHECK};

/// Per-cell spinor components `psi(x_k)` of length `m_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSection {
    values: Vec<CVector>,
}

impl WaveSection {
    pub fn new(values: Vec<CVector>) -> Self {
        Self { values }
    }

    /// The zero section over `profile`.
    pub fn zeros(profile: &SpinDimensionProfile) -> Self {
        Self::new(
            profile
                .multiplicities()
                .iter()
                .map(|&m| CVector::zeros(m))
                .collect(),
        )
    }

    pub fn values(&self) -> &[CVector] {
        &self.values
    }

    pub fn at(&self, k: usize) -> &CVector {
        &self.values[k]
    }

    pub fn at_mut(&mut self, k: usize) -> &mut CVector {
        &mut self.values[k]
    }

    pub fn profile(&self) -> SpinDimensionProfile {
        SpinDimensionProfile::from_multiplicities(self.values.iter().map(|v| v.len()).collect())
    }

    /// `sum_k mu_k |psi(x_k)|^2`.
    pub fn weighted_norm_sq(&self, weights: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(weights)
            .map(|(v, w)| linalg::norm_sq(v) * w)
            .sum()
    }

    /// Largest componentwise difference. Profiles must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| linalg::max_abs_diff_vec(a, b))
            .fold(0.0, f64::max)
    }
}

/// Per-cell unitary matrices `W_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    matrices: Vec<CMatrix>,
}

impl GaugeField {
    /// Checks that every matrix is square; unitarity is checked where a field
    /// is consumed.
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        if let Some(k) = matrices.iter().position(|m| !m.is_square()) {
            return Err(Error::Shape(format!(
                "gauge field matrix at cell #{k} is {}x{}",
                matrices[k].nrows(),
                matrices[k].ncols()
            )));
        }
        Ok(Self { matrices })
    }

    pub fn identity(profile: &SpinDimensionProfile) -> Self {
        Self {
            matrices: profile
                .multiplicities()
                .iter()
                .map(|&m| CMatrix::identity(m, m))
                .collect(),
        }
    }

    /// The same phase `e^{i theta}` at every cell.
    pub fn constant_phase(profile: &SpinDimensionProfile, theta: f64) -> Self {
        let phase = C64::from_polar(1.0, theta);
        Self {
            matrices: profile
                .multiplicities()
                .iter()
                .map(|&m| CMatrix::identity(m, m) * phase)
                .collect(),
        }
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn at(&self, k: usize) -> &CMatrix {
        &self.matrices[k]
    }

    pub fn profile(&self) -> SpinDimensionProfile {
        SpinDimensionProfile::from_multiplicities(self.matrices.iter().map(|m| m.nrows()).collect())
    }

    /// Worst unitarity residual over the cells (row and column form).
    pub fn unitarity_residual(&self) -> f64 {
        self.matrices
            .iter()
            .map(linalg::unitarity_residual)
            .fold(0.0, f64::max)
    }

    /// Pointwise product `(self * other)(x) = self(x) other(x)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        ensure_same_profile(&self.profile(), &other.profile(), "gauge fields")?;
        Ok(Self {
            matrices: self
                .matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Pointwise adjoint, the group inverse.
    pub fn inverse(&self) -> Self {
        Self {
            matrices: self.matrices.iter().map(|m| m.adjoint()).collect(),
        }
    }

    /// Largest entrywise difference. Profiles must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }
}

/// Random unitary field over `profile`, one Haar matrix per cell.
pub fn random_gauge_field(
    profile: &SpinDimensionProfile,
    rng: &mut crate::random::SplitMix64,
) -> GaugeField {
    GaugeField {
        matrices: profile
            .multiplicities()
            .iter()
            .map(|&m| crate::random::haar_unitary(m, rng))
            .collect(),
    }
}

fn ensure_same_profile(
    a: &SpinDimensionProfile,
    b: &SpinDimensionProfile,
    what: &str,
) -> Result<()> {
    match a.first_difference(b) {
        None => Ok(()),
        Some(k) if k < a.cell_count() && k < b.cell_count() => Err(Error::Incompatible(format!(
            "{what}: spin dimension differs at cell #{k} ({} vs {})",
            a.m(k),
            b.m(k)
        ))),
        Some(_) => Err(Error::Incompatible(format!(
            "{what}: {} cells vs {} cells",
            a.cell_count(),
            b.cell_count()
        ))),
    }
}

fn ensure_valid(gauge: &Gauge) -> Result<()> {
    gauge.check(EPS_CHECK).ensure("gauge")
}

/// `psi(x_k) = G_k v`.
pub fn apply_gauge(gauge: &Gauge, v: &CVector) -> Result<WaveSection> {
    if v.len() != gauge.hilbert_dim() {
        return Err(Error::Shape(format!(
            "vector has length {}, gauge acts on C^{}",
            v.len(),
            gauge.hilbert_dim()
        )));
    }
    ensure_valid(gauge)?;
    Ok(WaveSection::new(
        gauge.blocks().iter().map(|b| b * v).collect(),
    ))
}

/// `v = sum_k mu_k G_k* psi(x_k)`.
pub fn invert_gauge(gauge: &Gauge, psi: &WaveSection) -> Result<CVector> {
    ensure_same_profile(&gauge.profile(), &psi.profile(), "section and gauge")?;
    let mut v = CVector::zeros(gauge.hilbert_dim());
    for ((b, p), &w) in gauge.blocks().iter().zip(psi.values()).zip(gauge.weights()) {
        v.gemv_ad(C64::new(w, 0.0), b, p, ONE);
    }
    Ok(v)
}

/// The field `W_k = mu_k G1_k G2_k*` with `apply_gauge(g1, v) = W apply_gauge(g2, v)`.
///
/// Gauges with different spin-dimension profiles cannot be related by any
/// pointwise unitary; that case is reported as [`Error::Incompatible`].
pub fn extract_gauge_transformation(g1: &Gauge, g2: &Gauge) -> Result<GaugeField> {
    if g1.hilbert_dim() != g2.hilbert_dim() {
        return Err(Error::Incompatible(format!(
            "gauges act on C^{} and C^{}",
            g1.hilbert_dim(),
            g2.hilbert_dim()
        )));
    }
    ensure_same_profile(&g1.profile(), &g2.profile(), "gauges")?;
    if g1.weights() != g2.weights() {
        return Err(Error::Incompatible(
            "gauges carry different cell weights".into(),
        ));
    }
    ensure_valid(g1)?;
    ensure_valid(g2)?;
    let matrices = g1
        .blocks()
        .iter()
        .zip(g2.blocks())
        .zip(g1.weights())
        .map(|((a, b), &w)| (a * b.adjoint()) * C64::new(w, 0.0))
        .collect();
    Ok(GaugeField { matrices })
}

/// `psi'(x_k) = W_k psi(x_k)`.
pub fn apply_gauge_field(field: &GaugeField, psi: &WaveSection) -> Result<WaveSection> {
    if field.matrices.len() != psi.values.len() {
        return Err(Error::Shape(format!(
            "field over {} cells, section over {} cells",
            field.matrices.len(),
            psi.values.len()
        )));
    }
    field
        .matrices
        .iter()
        .zip(&psi.values)
        .enumerate()
        .map(|(k, (w, p))| {
            if w.ncols() != p.len() {
                Err(Error::Shape(format!(
                    "cell #{k}: field is {}x{}, section has {} components",
                    w.nrows(),
                    w.ncols(),
                    p.len()
                )))
            } else {
                Ok(w * p)
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(WaveSection::new)
}

/// The gauge `G'_k = W_k* G_k`, so that
/// `extract_gauge_transformation(g, g') = W`.
pub fn gauge_from_field(gauge: &Gauge, field: &GaugeField) -> Result<Gauge> {
    ensure_same_profile(&gauge.profile(), &field.profile(), "field and gauge")?;
    let residual = field.unitarity_residual();
    if residual > EPS_CHECK {
        return Err(Error::Tolerance {
            what: "gauge field is not unitary".into(),
            residual,
            threshold: EPS_CHECK,
        });
    }
    ensure_valid(gauge)?;
    let blocks = gauge
        .blocks()
        .iter()
        .zip(field.matrices())
        .map(|(b, w)| w.ad_mul(b))
        .collect();
    Gauge::new(gauge.hilbert_dim(), gauge.weights().to_vec(), blocks)
}

/// The local ONB whose representation map is `gauge`.
///
/// For every stratum `D_m` (ascending `m`, skipping `m = 0`) and every
/// `alpha < m`, the entry is the preimage of the section equal to the unit
/// vector `e_alpha` on `D_m` and zero elsewhere, supported on `D_m`.
pub fn realize_gauge_as_local_onb(om: &OperatorManifold, gauge: &Gauge) -> Result<LocalOnb> {
    verify_gauge(om, gauge, EPS_CHECK)?.ensure("gauge")?;
    let mut entries = Vec::new();
    for (m, stratum) in gauge.profile().strata() {
        for alpha in 0..m {
            let mut vector = CVector::zeros(gauge.hilbert_dim());
            for k in stratum.iter() {
                let row = gauge.block(k).row(alpha).adjoint();
                vector.axpy(C64::new(gauge.weights()[k], 0.0), &row, ONE);
            }
            entries.push(OnbEntry {
                vector,
                support: stratum.clone(),
            });
        }
    }
    Ok(LocalOnb { entries })
}

/// Outcome of [`check_isomorphism`].
#[derive(Debug, Clone, PartialEq)]
pub enum Isomorphism {
    /// A unitary `U` with `U P1_k U* = P2_k` for every cell.
    Unitary(CMatrix),
    /// The spin dimensions differ at `cell`, which rules out any intertwiner.
    Obstructed {
        cell: usize,
        left: usize,
        right: usize,
    },
}

impl Isomorphism {
    pub fn unitary(&self) -> Option<&CMatrix> {
        match self {
            Isomorphism::Unitary(u) => Some(u),
            Isomorphism::Obstructed { .. } => None,
        }
    }
}

/// Decides whether two manifolds over the same cells are isomorphic with the
/// identity map on cells, and if so returns `U = V2^{-1} V1` built from
/// their canonical gauges.
pub fn check_isomorphism(om1: &OperatorManifold, om2: &OperatorManifold) -> Result<Isomorphism> {
    if om1.hilbert_dim() != om2.hilbert_dim() {
        return Err(Error::Incompatible(format!(
            "Hilbert dimensions {} and {}",
            om1.hilbert_dim(),
            om2.hilbert_dim()
        )));
    }
    if om1.cell_count() != om2.cell_count() {
        return Err(Error::Incompatible(format!(
            "{} cells vs {} cells",
            om1.cell_count(),
            om2.cell_count()
        )));
    }
    for (a, b) in om1.cells().iter().zip(om2.cells()) {
        if a.id() != b.id() {
            return Err(Error::Incompatible(format!(
                "cell `{}` vs cell `{}`",
                a.id(),
                b.id()
            )));
        }
        if a.weight() != b.weight() {
            return Err(Error::Incompatible(format!(
                "cell `{}` has weights {} and {}",
                a.id(),
                a.weight(),
                b.weight()
            )));
        }
    }

    let p1 = spin_dimension_profile(om1, None);
    let p2 = spin_dimension_profile(om2, None);
    if let Some(cell) = p1.first_difference(&p2) {
        return Ok(Isomorphism::Obstructed {
            cell,
            left: p1.m(cell),
            right: p2.m(cell),
        });
    }

    let g1 = canonical_gauge(om1)?;
    let g2 = canonical_gauge(om2)?;
    let n = om1.hilbert_dim();
    let mut u = CMatrix::zeros(n, n);
    for k in 0..om1.cell_count() {
        u.gemm_ad(C64::new(om1.weight(k), 0.0), g2.block(k), g1.block(k), ONE);
    }
    Ok(Isomorphism::Unitary(u))
}

/// `|psi(x_k)|^2 = sum_alpha |psi^alpha(x_k)|^2` per cell.
pub fn gauge_invariant_density(
    psi: &WaveSection,
    profile: &SpinDimensionProfile,
) -> Result<Vec<f64>> {
    ensure_same_profile(profile, &psi.profile(), "section and profile")?;
    Ok(psi.values.iter().map(linalg::norm_sq).collect())
}
