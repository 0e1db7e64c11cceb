//! Local orthonormal bases and the function-space picture they induce.
//!
//! A local ONB is a family `(u_l, C_l)` with `h(u_l, u_m) = delta_lm chi_{C_l}`
//! cell by cell whose images `P_k u_l` span the Hilbert space. It identifies
//! `C^N` with `⊕_l L^2(C_l)` through `v -> (h(v, u_l))_l`, a unitary map that
//! turns `E_V` into multiplication by `chi_V`. Counting how many supports
//! contain a cell gives its spin dimension, which always equals `rank P_k`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{self, CMatrix, CVector, C64, ONE, ZERO};
use crate::manifold::{OperatorManifold, Region, ValidationReport};
use crate::spin::{self, spin_scalar_product};
use crate::{Error, Result, EPS_CHECK, EPS_RANK};

/// One local ONB vector and its support.
#[derive(Debug, Clone, PartialEq)]
pub struct OnbEntry {
    pub vector: CVector,
    pub support: Region,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LocalOnb {
    pub entries: Vec<OnbEntry>,
}

impl LocalOnb {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry indices whose support contains cell `k`, ascending.
    pub fn entries_at(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.support.contains(k))
            .map(|(l, _)| l)
    }

    fn check_shapes(&self, om: &OperatorManifold) -> Result<()> {
        for (l, entry) in self.entries.iter().enumerate() {
            om.check_vector(&entry.vector, &format!("local ONB vector {l}"))?;
            if let Some(k) = entry.support.iter().find(|&k| k >= om.cell_count()) {
                return Err(Error::UnknownCell(format!("#{k} in support of entry {l}")));
            }
        }
        Ok(())
    }
}

/// Spin dimension per cell and the strata `D_m` it induces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinDimensionProfile {
    multiplicities: Vec<usize>,
}

impl SpinDimensionProfile {
    pub fn from_multiplicities(multiplicities: Vec<usize>) -> Self {
        Self { multiplicities }
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Spin dimension `m_x` of cell `k`.
    pub fn m(&self, k: usize) -> usize {
        self.multiplicities[k]
    }

    pub fn cell_count(&self) -> usize {
        self.multiplicities.len()
    }

    /// `sum_k m_k`, which equals the Hilbert dimension for a valid profile.
    pub fn total(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Non-empty strata `D_m`, ascending in `m`. Infinite spin dimension
    /// cannot occur in finite dimension, so that stratum never appears.
    pub fn strata(&self) -> BTreeMap<usize, Region> {
        let mut strata: BTreeMap<usize, Region> = BTreeMap::new();
        for (k, &m) in self.multiplicities.iter().enumerate() {
            strata.entry(m).or_default().insert(k);
        }
        strata
    }

    /// The stratum `D_m`, possibly empty.
    pub fn stratum(&self, m: usize) -> Region {
        self.multiplicities
            .iter()
            .enumerate()
            .filter(|&(_, &mk)| mk == m)
            .map(|(k, _)| k)
            .collect()
    }

    /// First cell where the two profiles differ.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        if self.cell_count() != other.cell_count() {
            return Some(self.cell_count().min(other.cell_count()));
        }
        self.multiplicities
            .iter()
            .zip(&other.multiplicities)
            .position(|(a, b)| a != b)
    }
}

/// Component functions `f_l = h(v, u_l)` of a vector, dense over cells
/// (zero outside `C_l`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFunctions {
    values: Vec<Vec<C64>>,
}

impl ComponentFunctions {
    /// `values[l][k]` is component `l` at cell `k`.
    pub fn new(values: Vec<Vec<C64>>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[Vec<C64>] {
        &self.values
    }

    pub fn component(&self, l: usize) -> &[C64] {
        &self.values[l]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_l sum_k |f_l(x_k)|^2 mu_k`.
    pub fn weighted_norm_sq(&self, weights: &[f64]) -> f64 {
        self.values
            .iter()
            .map(|f| {
                f.iter()
                    .zip(weights)
                    .map(|(z, w)| z.norm_sqr() * w)
                    .sum::<f64>()
            })
            .sum()
    }

    /// Multiplication by `chi_V`.
    pub fn restrict(&self, region: &Region) -> Self {
        let values = self
            .values
            .iter()
            .map(|f| {
                f.iter()
                    .enumerate()
                    .map(|(k, &z)| if region.contains(k) { z } else { ZERO })
                    .collect()
            })
            .collect();
        Self { values }
    }

    /// Largest entrywise difference. Shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }
}

/// A unitary identification of `C^N` with the fibers over the cells.
///
/// Block `G_k` has shape `m_k x N`; a vector `v` becomes the section
/// `psi(x_k) = G_k v` and is recovered as `sum_k mu_k G_k* psi(x_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gauge {
    hilbert_dim: usize,
    weights: Vec<f64>,
    blocks: Vec<CMatrix>,
}

impl Gauge {
    /// Checks shapes only; see [`Gauge::check`] for the unitarity conditions.
    pub fn new(hilbert_dim: usize, weights: Vec<f64>, blocks: Vec<CMatrix>) -> Result<Self> {
        if weights.len() != blocks.len() {
            return Err(Error::Shape(format!(
                "{} weights for {} gauge blocks",
                weights.len(),
                blocks.len()
            )));
        }
        if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::NonPositiveWeight(format!("#{k}")));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.ncols() != hilbert_dim {
                return Err(Error::Shape(format!(
                    "gauge block #{k} has {} columns, expected {hilbert_dim}",
                    b.ncols()
                )));
            }
        }
        Ok(Self {
            hilbert_dim,
            weights,
            blocks,
        })
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn cell_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn profile(&self) -> SpinDimensionProfile {
        SpinDimensionProfile::from_multiplicities(self.blocks.iter().map(|b| b.nrows()).collect())
    }

    /// Pointwise isometry `mu_k G_k G_k* = I`, global unitarity
    /// `sum_k mu_k G_k* G_k = I` and `sum_k m_k = N`.
    pub fn check(&self, tol: f64) -> ValidationReport {
        let n = self.hilbert_dim;
        let mut isometry: f64 = 0.0;
        let mut total = CMatrix::zeros(n, n);
        for (b, &w) in self.blocks.iter().zip(&self.weights) {
            let w = C64::new(w, 0.0);
            isometry = isometry.max(linalg::identity_residual(&((b * b.adjoint()) * w)));
            total += (b.adjoint() * b) * w;
        }
        let mut report = ValidationReport::new();
        report.push("pointwise_isometry", isometry, tol);
        report.push("global_unitarity", linalg::identity_residual(&total), tol);
        report.push("rank_sum", self.profile().total().abs_diff(n) as f64, 0.0);
        report
    }
}

/// Orthonormal frame of the cyclic subspace `span{P_k u}`.
///
/// Columns are `P_k u / |P_k u|` in canonical cell order, skipping cells where
/// `|P_k u| < EPS_RANK |u|`, re-orthogonalized once against the earlier
/// columns.
pub fn cyclic_subspace_basis(om: &OperatorManifold, u: &CVector) -> Result<CMatrix> {
    om.check_vector(u, "vector")?;
    let scale = linalg::norm(u);
    let mut cols: Vec<CVector> = Vec::new();
    if scale == 0.0 {
        return Ok(CMatrix::zeros(om.hilbert_dim(), 0));
    }
    for k in 0..om.cell_count() {
        let mut p = om.measure().project(k, u);
        if linalg::norm(&p) < EPS_RANK * scale {
            continue;
        }
        linalg::project_out(&cols, &mut p);
        let n = linalg::norm(&p);
        p.unscale_mut(n);
        cols.push(p);
    }
    Ok(linalg::columns_to_matrix(om.hilbert_dim(), &cols))
}

/// Builds a local ONB from a seed basis (columns of `seed`; the standard
/// basis when `None`).
///
/// For each seed vector `v_l` in order: `w_l` is `v_l` with the span of all
/// earlier cyclic subspaces projected out (twice), `C_l` is the set of cells
/// where `|P_k w_l| >= EPS_RANK |v_l|`, and `u_l = sum_{k in C_l} sqrt(mu_k)
/// P_k w_l / |P_k w_l|`. Seed vectors whose `w_l` vanishes produce no entry.
pub fn construct_local_onb(om: &OperatorManifold, seed: Option<&CMatrix>) -> Result<LocalOnb> {
    let n = om.hilbert_dim();
    let standard;
    let seed = match seed {
        Some(s) => {
            if s.shape() != (n, n) {
                return Err(Error::Shape(format!(
                    "seed basis is {}x{}, expected {n}x{n}",
                    s.nrows(),
                    s.ncols()
                )));
            }
            let sv = linalg::singular_values(s);
            let largest = sv.iter().copied().fold(0.0, f64::max);
            let rank = sv.iter().filter(|&&x| x >= EPS_RANK * largest).count();
            if rank < n || largest == 0.0 {
                return Err(Error::RankDeficientSeed { rank, dim: n });
            }
            s
        }
        None => {
            standard = CMatrix::identity(n, n);
            &standard
        }
    };

    let measure = om.measure();
    // Orthonormal frame of the accumulated cyclic subspaces.
    let mut span: Vec<CVector> = Vec::with_capacity(n);
    let mut entries = Vec::new();

    for j in 0..n {
        if span.len() == n {
            break;
        }
        let v: CVector = seed.column(j).into_owned();
        let scale = linalg::norm(&v);
        let mut w = v;
        linalg::project_out(&span, &mut w);
        if linalg::norm(&w) < EPS_RANK * scale {
            continue;
        }

        let mut u = CVector::zeros(n);
        let mut support = Region::empty();
        let mut fresh = Vec::new();
        for k in 0..om.cell_count() {
            let coords = measure.fiber_coords(k, &w);
            let len = linalg::norm(&coords);
            if len < EPS_RANK * scale {
                continue;
            }
            let direction = measure.frame(k) * coords.unscale(len);
            u.axpy(C64::new(libm::sqrt(om.weight(k)), 0.0), &direction, ONE);
            support.insert(k);
            fresh.push(direction);
        }
        if support.is_empty() {
            continue;
        }
        for mut d in fresh {
            linalg::project_out(&span, &mut d);
            let len = linalg::norm(&d);
            span.push(d.unscale(len));
        }
        entries.push(OnbEntry { vector: u, support });
    }

    if span.len() != n {
        return Err(Error::Tolerance {
            what: "local ONB construction did not exhaust the Hilbert space".into(),
            residual: (n - span.len()) as f64,
            threshold: 0.0,
        });
    }
    Ok(LocalOnb { entries })
}

/// Checks the local-ONB conditions.
///
/// * `orthonormality`: `max |h(u_l, u_m)(x_k) - delta_lm chi_{C_l}(k)|`.
/// * `support`: number of `(l, k)` where `h(u_l, u_l)(x_k) >= EPS_RANK`
///   disagrees with `k in C_l`.
/// * `completeness_rank`: `N` minus the rank of all nonzero `P_k u_l`.
/// * `support_count`: `|sum_l |C_l| - N|`.
pub fn verify_local_onb(
    om: &OperatorManifold,
    onb: &LocalOnb,
    tol: f64,
) -> Result<ValidationReport> {
    onb.check_shapes(om)?;
    let n = om.hilbert_dim();
    let vectors: Vec<CVector> = onb.entries.iter().map(|e| e.vector.clone()).collect();
    let stacked = linalg::columns_to_matrix(n, &vectors);

    let mut orthonormality: f64 = 0.0;
    let mut support_mismatch = 0usize;
    let mut spanning: Vec<CVector> = Vec::new();
    for k in 0..om.cell_count() {
        let frame = om.measure().frame(k);
        let coords = frame.ad_mul(&stacked);
        // gram[(m, l)] = <P_k u_l, u_m> / mu_k = h(u_l, u_m)(x_k)
        let gram = coords.ad_mul(&coords).unscale(om.weight(k));
        for (l, entry) in onb.entries.iter().enumerate() {
            let inside = entry.support.contains(k);
            for m in 0..onb.len() {
                let target = if l == m && inside { ONE } else { ZERO };
                orthonormality = orthonormality.max((gram[(m, l)] - target).norm());
            }
            if (gram[(l, l)].re >= EPS_RANK) != inside {
                support_mismatch += 1;
            }
            let image = frame * coords.column(l);
            if linalg::norm(&image) >= EPS_RANK {
                spanning.push(image);
            }
        }
    }
    let rank = linalg::numerical_rank(&linalg::columns_to_matrix(n, &spanning), EPS_RANK);
    let support_count: usize = onb.entries.iter().map(|e| e.support.len()).sum();

    let mut report = ValidationReport::new();
    report.push("orthonormality", orthonormality, tol);
    report.push("support", support_mismatch as f64, 0.0);
    report.push("completeness_rank", n.saturating_sub(rank) as f64, 0.0);
    report.push("support_count", support_count.abs_diff(n) as f64, 0.0);
    Ok(report)
}

/// `v -> (h(v, u_l))_l`, restricted to the supports.
pub fn representation_map(
    om: &OperatorManifold,
    onb: &LocalOnb,
    v: &CVector,
) -> Result<ComponentFunctions> {
    om.check_vector(v, "vector")?;
    verify_local_onb(om, onb, EPS_CHECK)?.ensure("local ONB")?;
    Ok(components_unchecked(om, onb, v))
}

fn components_unchecked(om: &OperatorManifold, onb: &LocalOnb, v: &CVector) -> ComponentFunctions {
    let values = onb
        .entries
        .iter()
        .map(|entry| {
            (0..om.cell_count())
                .map(|k| {
                    if entry.support.contains(k) {
                        spin::cell_product(om, k, v, &entry.vector) / om.weight(k)
                    } else {
                        ZERO
                    }
                })
                .collect()
        })
        .collect();
    ComponentFunctions { values }
}

/// `sum_l sum_{k in C_l} f_l(x_k) P_k u_l`, the inverse of
/// [`representation_map`].
pub fn reconstruct_from_components(
    om: &OperatorManifold,
    onb: &LocalOnb,
    comps: &ComponentFunctions,
) -> Result<CVector> {
    onb.check_shapes(om)?;
    if comps.len() != onb.len() || comps.values.iter().any(|f| f.len() != om.cell_count()) {
        return Err(Error::Shape(format!(
            "expected {} component functions over {} cells",
            onb.len(),
            om.cell_count()
        )));
    }
    let mut out = CVector::zeros(om.hilbert_dim());
    for (l, (entry, f)) in onb.entries.iter().zip(&comps.values).enumerate() {
        for (k, &fk) in f.iter().enumerate() {
            if !entry.support.contains(k) {
                if fk.norm() > EPS_CHECK {
                    return Err(Error::Tolerance {
                        what: format!("component {l} is nonzero outside its support at cell #{k}"),
                        residual: fk.norm(),
                        threshold: EPS_CHECK,
                    });
                }
                continue;
            }
            if fk != ZERO {
                out.axpy(fk, &om.measure().project(k, &entry.vector), ONE);
            }
        }
    }
    Ok(out)
}

/// `max_k |h(u, v)(x_k) - sum_l h(u, u_l)(x_k) h(u_l, v)(x_k)|`.
pub fn pointwise_completeness_residual(
    om: &OperatorManifold,
    onb: &LocalOnb,
    u: &CVector,
    v: &CVector,
) -> Result<f64> {
    onb.check_shapes(om)?;
    let direct = spin_scalar_product(om, u, v)?;
    let mut expanded = vec![ZERO; om.cell_count()];
    for entry in &onb.entries {
        let left = spin_scalar_product(om, u, &entry.vector)?;
        let right = spin_scalar_product(om, &entry.vector, v)?;
        for (k, acc) in expanded.iter_mut().enumerate() {
            *acc += left[k] * right[k];
        }
    }
    Ok(direct
        .values()
        .iter()
        .zip(&expanded)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Spin dimension per cell: support counts of `onb` if given, otherwise the
/// numerical ranks of the frames.
pub fn spin_dimension_profile(
    om: &OperatorManifold,
    onb: Option<&LocalOnb>,
) -> SpinDimensionProfile {
    let multiplicities = match onb {
        Some(onb) => (0..om.cell_count())
            .map(|k| onb.entries.iter().filter(|e| e.support.contains(k)).count())
            .collect(),
        None => (0..om.cell_count())
            .map(|k| om.measure().rank(k, EPS_RANK))
            .collect(),
    };
    SpinDimensionProfile::from_multiplicities(multiplicities)
}

/// The gauge induced by a local ONB: the rows of `G_k` are the functionals
/// `v -> h(v, u_l)(x_k)` for the entries `l` whose support contains `k`, in
/// ascending `l`.
pub fn gauge_from_local_onb(om: &OperatorManifold, onb: &LocalOnb) -> Result<Gauge> {
    onb.check_shapes(om)?;
    let n = om.hilbert_dim();
    let blocks = (0..om.cell_count())
        .map(|k| {
            let rows: Vec<usize> = onb.entries_at(k).collect();
            let mut block = CMatrix::zeros(rows.len(), n);
            for (alpha, &l) in rows.iter().enumerate() {
                let image = om.measure().project(k, &onb.entries[l].vector);
                let row = image.adjoint().unscale(om.weight(k));
                block.set_row(alpha, &row);
            }
            block
        })
        .collect();
    Gauge::new(n, om.weights(), blocks)
}

/// The gauge of the local ONB built from the standard seed.
pub fn canonical_gauge(om: &OperatorManifold) -> Result<Gauge> {
    let onb = construct_local_onb(om, None)?;
    gauge_from_local_onb(om, &onb)
}

/// [`Gauge::check`] plus locality `G_k = G_k P_k` against `om`.
pub fn verify_gauge(om: &OperatorManifold, gauge: &Gauge, tol: f64) -> Result<ValidationReport> {
    if gauge.hilbert_dim() != om.hilbert_dim() || gauge.cell_count() != om.cell_count() {
        return Err(Error::Incompatible(format!(
            "gauge over {} cells on C^{} used with a manifold of {} cells on C^{}",
            gauge.cell_count(),
            gauge.hilbert_dim(),
            om.cell_count(),
            om.hilbert_dim()
        )));
    }
    if gauge.weights() != om.weights().as_slice() {
        return Err(Error::Incompatible(
            "gauge weights differ from cell weights".into(),
        ));
    }
    let locality = gauge
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, b)| linalg::max_abs_diff(b, &(b * om.measure().projector(k))))
        .fold(0.0, f64::max);
    let mut report = ValidationReport::new();
    report.push("locality", locality, tol);
    for c in gauge.check(tol).checks {
        report.checks.push(c);
    }
    Ok(report)
}
