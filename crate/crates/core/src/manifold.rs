//! The discretized operator manifold `(M, mu, H, E)`.
//!
//! `M` is a finite, ordered list of cells, `mu` assigns each cell a positive
//! weight and `E` assigns each cell `k` the projection `P_k = B_k B_k*` given
//! by an orthonormal frame `B_k` of shape `N x r_k`. Measurable sets are
//! arbitrary cell subsets ([`Region`]) and `E_V = sum_{k in V} P_k`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::{Error, Result, EPS_VALID};

/// One atom of the discretized measure space.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    id: String,
    coords: Vec<f64>,
    weight: f64,
}

impl Cell {
    pub fn new(id: impl Into<String>, coords: Vec<f64>, weight: f64) -> Result<Self> {
        let id = id.into();
        if !weight.is_finite() || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("cell `{id}`")));
        }
        if weight <= 0.0 {
            return Err(Error::NonPositiveWeight(id));
        }
        Ok(Self { id, coords, weight })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// Cells of a manifold of dimension `n`. Cell order is canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    dim: usize,
    cells: Vec<Cell>,
}

impl MeasureSpace {
    pub fn new(dim: usize, cells: Vec<Cell>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for cell in &cells {
            if cell.coords.len() != dim {
                return Err(Error::Shape(format!(
                    "cell `{}` has {} coordinates, manifold dimension is {dim}",
                    cell.id,
                    cell.coords.len()
                )));
            }
            if !seen.insert(cell.id.as_str()) {
                return Err(Error::DuplicateCell(cell.id.clone()));
            }
        }
        Ok(Self { dim, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.id == id)
    }

    /// The region made of the named cells.
    pub fn region<S: AsRef<str>>(&self, ids: &[S]) -> Result<Region> {
        ids.iter()
            .map(|id| {
                let id = id.as_ref();
                self.index_of(id)
                    .ok_or_else(|| Error::UnknownCell(id.to_string()))
            })
            .collect()
    }
}

/// A measurable set: a subset of cell indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Region(BTreeSet<usize>);

impl Region {
    pub fn empty() -> Self {
        Self::default()
    }

    /// All cells `0..cell_count`.
    pub fn all(cell_count: usize) -> Self {
        (0..cell_count).collect()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.contains(&k)
    }

    pub fn insert(&mut self, k: usize) -> bool {
        self.0.insert(k)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &Region) -> Region {
        self.0.union(&other.0).copied().collect()
    }

    pub fn intersection(&self, other: &Region) -> Region {
        self.0.intersection(&other.0).copied().collect()
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.0.is_disjoint(&other.0)
    }

    fn check(&self, space: &MeasureSpace) -> Result<()> {
        match self.0.iter().find(|&&k| k >= space.len()) {
            Some(k) => Err(Error::UnknownCell(format!("#{k}"))),
            None => Ok(()),
        }
    }
}

impl FromIterator<usize> for Region {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Per-cell orthonormal frames `B_k` on `C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    hilbert_dim: usize,
    frames: Vec<CMatrix>,
}

impl SpectralMeasure {
    pub fn new(hilbert_dim: usize, frames: Vec<CMatrix>) -> Result<Self> {
        if hilbert_dim == 0 {
            return Err(Error::Shape("Hilbert dimension must be positive".into()));
        }
        for (k, frame) in frames.iter().enumerate() {
            if frame.nrows() != hilbert_dim {
                return Err(Error::Shape(format!(
                    "frame #{k} has {} rows, expected {hilbert_dim}",
                    frame.nrows()
                )));
            }
            if frame.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("frame #{k}")));
            }
        }
        Ok(Self {
            hilbert_dim,
            frames,
        })
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn frames(&self) -> &[CMatrix] {
        &self.frames
    }

    pub fn frame(&self, k: usize) -> &CMatrix {
        &self.frames[k]
    }

    /// Number of frame columns `r_k`.
    pub fn frame_width(&self, k: usize) -> usize {
        self.frames[k].ncols()
    }

    /// `P_k` as a dense matrix.
    pub fn projector(&self, k: usize) -> CMatrix {
        let b = &self.frames[k];
        b * b.adjoint()
    }

    /// Frame coordinates `B_k* v` of `v` in fiber `k`.
    pub fn fiber_coords(&self, k: usize, v: &CVector) -> CVector {
        self.frames[k].ad_mul(v)
    }

    /// `P_k v`.
    pub fn project(&self, k: usize, v: &CVector) -> CVector {
        &self.frames[k] * self.fiber_coords(k, v)
    }

    /// Rank of `P_k` from the singular values of `B_k` at `threshold`.
    pub fn rank(&self, k: usize, threshold: f64) -> usize {
        linalg::numerical_rank(&self.frames[k], threshold)
    }
}

/// A finite operator manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorManifold {
    space: MeasureSpace,
    measure: SpectralMeasure,
}

impl OperatorManifold {
    /// Checks structure only. Use [`validate_operator_manifold`] for the
    /// projection-valued-measure axioms.
    pub fn new(space: MeasureSpace, measure: SpectralMeasure) -> Result<Self> {
        if space.len() != measure.frames.len() {
            return Err(Error::Shape(format!(
                "{} cells but {} frames",
                space.len(),
                measure.frames.len()
            )));
        }
        if space.is_empty() {
            return Err(Error::Shape("at least one cell is required".into()));
        }
        Ok(Self { space, measure })
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    pub fn cells(&self) -> &[Cell] {
        self.space.cells()
    }

    pub fn cell_count(&self) -> usize {
        self.space.len()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.measure.hilbert_dim
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.space.cells[k].weight
    }

    pub fn weights(&self) -> Vec<f64> {
        self.space.cells.iter().map(|c| c.weight).collect()
    }

    pub fn region<S: AsRef<str>>(&self, ids: &[S]) -> Result<Region> {
        self.space.region(ids)
    }

    pub(crate) fn check_vector(&self, v: &CVector, what: &str) -> Result<()> {
        if v.len() != self.hilbert_dim() {
            return Err(Error::Shape(format!(
                "{what} has length {}, expected {}",
                v.len(),
                self.hilbert_dim()
            )));
        }
        Ok(())
    }

    /// `E_V` as a dense matrix.
    pub fn spectral_projector(&self, region: &Region) -> Result<CMatrix> {
        region.check(&self.space)?;
        let n = self.hilbert_dim();
        Ok(region.iter().fold(CMatrix::zeros(n, n), |acc, k| {
            acc + self.measure.projector(k)
        }))
    }
}

/// One named residual check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        // NaN never passes.
        self.residual <= self.threshold
    }
}

/// A list of residual checks; passes iff every residual is within its
/// threshold.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64, threshold: f64) {
        self.checks.push(Check {
            name: name.into(),
            residual,
            threshold,
        });
    }

    /// Appends the checks of `other`, prefixing their names.
    pub fn extend_prefixed(&mut self, prefix: &str, other: ValidationReport) {
        for c in other.checks {
            self.push(format!("{prefix}.{}", c.name), c.residual, c.threshold);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `Ok` if every check passed, otherwise the first failure as a
    /// tolerance error naming `what`.
    pub fn ensure(&self, what: &str) -> Result<()> {
        match self.failures().next() {
            None => Ok(()),
            Some(c) => Err(Error::Tolerance {
                what: format!("{what}: {}", c.name),
                residual: c.residual,
                threshold: c.threshold,
            }),
        }
    }

    /// Largest residual over all checks, `0` for an empty report.
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.passed() { "ok" } else { "FAIL" };
            writeln!(
                f,
                "{:<width$}  {:>12.3e}  <= {:>9.1e}  {status}",
                c.name, c.residual, c.threshold
            )?;
        }
        write!(f, "{}", if self.passed() { "passed" } else { "failed" })
    }
}

/// Checks the discrete projection-valued-measure axioms.
///
/// Residuals are entrywise maxima: column orthonormality `|B_k* B_k - I|`,
/// cross-cell orthogonality `|B_j* B_k|`, completeness `|sum_k P_k - I|`.
/// The rank-sum check and weight positivity are integer counts held to a
/// threshold of zero.
pub fn validate_operator_manifold(om: &OperatorManifold, tol: f64) -> ValidationReport {
    let measure = om.measure();
    let n = om.hilbert_dim();
    let frames = measure.frames();

    let orthonormality = frames
        .iter()
        .map(|b| linalg::identity_residual(&b.ad_mul(b)))
        .fold(0.0, f64::max);

    let mut cross: f64 = 0.0;
    for (j, bj) in frames.iter().enumerate() {
        for bk in &frames[j + 1..] {
            cross = cross.max(linalg::max_abs(bj.ad_mul(bk).iter()));
        }
    }

    let rank_sum: usize = frames.iter().map(|b| b.ncols()).sum();
    let mut all = CMatrix::zeros(n, n);
    for b in frames {
        all += b * b.adjoint();
    }
    let completeness = linalg::identity_residual(&all);

    let nonpositive = om.cells().iter().filter(|c| c.weight <= 0.0).count();

    let mut report = ValidationReport::new();
    report.push("column_orthonormality", orthonormality, tol);
    report.push("cross_cell_orthogonality", cross, tol);
    report.push("rank_sum", rank_sum.abs_diff(n) as f64, 0.0);
    report.push("completeness", completeness, tol);
    report.push("weight_positivity", nonpositive as f64, 0.0);
    report
}

/// `E_V v = sum_{k in V} P_k v`.
pub fn apply_spectral_projection(
    om: &OperatorManifold,
    region: &Region,
    v: &CVector,
) -> Result<CVector> {
    region.check(om.space())?;
    om.check_vector(v, "vector")?;
    let mut out = CVector::zeros(om.hilbert_dim());
    for k in region.iter() {
        out += om.measure().project(k, v);
    }
    Ok(out)
}

/// `(int f dE) v = sum_k f(x_k) P_k v` for a cell function given in canonical
/// cell order.
pub fn apply_functional_calculus(om: &OperatorManifold, f: &[C64], v: &CVector) -> Result<CVector> {
    if f.len() != om.cell_count() {
        return Err(Error::Invalid(format!(
            "cell function has {} values for {} cells",
            f.len(),
            om.cell_count()
        )));
    }
    om.check_vector(v, "vector")?;
    let mut out = CVector::zeros(om.hilbert_dim());
    for (k, &fk) in f.iter().enumerate() {
        if fk != linalg::ZERO {
            out.axpy(fk, &om.measure().project(k, v), linalg::ONE);
        }
    }
    Ok(out)
}

/// `X^i = sum_k x_k^i P_k`. Axes are zero-based.
pub fn position_operator(om: &OperatorManifold, axis: usize) -> Result<CMatrix> {
    let dim = om.space().dim();
    if axis >= dim {
        return Err(Error::Invalid(format!(
            "axis {axis} out of range for manifold dimension {dim}"
        )));
    }
    let n = om.hilbert_dim();
    let mut x = CMatrix::zeros(n, n);
    for (k, cell) in om.cells().iter().enumerate() {
        let coord = cell.coords[axis];
        if coord != 0.0 {
            x += om.measure().projector(k) * C64::new(coord, 0.0);
        }
    }
    Ok(x)
}

/// `<A psi, psi> / <psi, psi>` for Hermitian `A`.
pub fn observable_expectation(a: &CMatrix, psi: &CVector) -> Result<f64> {
    if !a.is_square() || a.nrows() != psi.len() {
        return Err(Error::Shape(format!(
            "observable is {}x{}, state has length {}",
            a.nrows(),
            a.ncols(),
            psi.len()
        )));
    }
    let scale = linalg::max_abs(a.iter()).max(1.0);
    let residual = linalg::hermitian_residual(a);
    if residual > EPS_VALID * scale {
        return Err(Error::Tolerance {
            what: "observable is not Hermitian".into(),
            residual,
            threshold: EPS_VALID * scale,
        });
    }
    let norm_sq = linalg::norm_sq(psi);
    if norm_sq == 0.0 {
        return Err(Error::Invalid("state vector is zero".into()));
    }
    Ok(linalg::quadratic_form(a, psi).re / norm_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::random::{generate_random_manifold, random_region, random_vector, SplitMix64};
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn vector(entries: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(entries.len(), entries.iter().map(|&(re, im)| c(re, im)))
    }

    fn single_cell_identity() -> OperatorManifold {
        examples::spinor(1)
    }

    #[test]
    fn one_dimensional_identity_validates() {
        let space = MeasureSpace::new(0, vec![Cell::new("c0", vec![], 1.0).unwrap()]).unwrap();
        let measure = SpectralMeasure::new(1, vec![CMatrix::identity(1, 1)]).unwrap();
        let om = OperatorManifold::new(space, measure).unwrap();
        let report = validate_operator_manifold(&om, 1e-10);
        assert!(report.passed());
        assert_eq!(report.max_residual(), 0.0);
    }

    #[test]
    fn scalar_example_validates() {
        assert!(validate_operator_manifold(&examples::scalar(2), 1e-10).passed());
    }

    #[test]
    fn duplicated_frame_fails_cross_orthogonality() {
        let e1 = CMatrix::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let space = MeasureSpace::new(
            1,
            vec![
                Cell::new("c0", vec![0.0], 1.0).unwrap(),
                Cell::new("c1", vec![1.0], 1.0).unwrap(),
            ],
        )
        .unwrap();
        let om = OperatorManifold::new(
            space,
            SpectralMeasure::new(2, vec![e1.clone(), e1]).unwrap(),
        )
        .unwrap();
        let report = validate_operator_manifold(&om, 1e-10);
        assert!(!report.passed());
        assert_eq!(
            report.get("cross_cell_orthogonality").unwrap().residual,
            1.0
        );
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            Cell::new("c0", vec![], 0.0),
            Err(Error::NonPositiveWeight("c0".into()))
        );
        assert!(matches!(
            Cell::new("c0", vec![f64::NAN], 1.0),
            Err(Error::NonFinite(_))
        ));
        let cells = vec![
            Cell::new("a", vec![0.0], 1.0).unwrap(),
            Cell::new("a", vec![1.0], 1.0).unwrap(),
        ];
        assert_eq!(
            MeasureSpace::new(1, cells),
            Err(Error::DuplicateCell("a".into()))
        );
        assert!(matches!(
            MeasureSpace::new(2, vec![Cell::new("a", vec![0.0], 1.0).unwrap()]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            SpectralMeasure::new(2, vec![CMatrix::identity(3, 3)]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn projection_on_scalar_example() {
        let om = examples::scalar(2);
        let v = vector(&[(1.0, 0.0), (1.0, 0.0)]);
        let region = om.region(&["c0"]).unwrap();
        let out = apply_spectral_projection(&om, &region, &v).unwrap();
        assert_eq!(out, vector(&[(1.0, 0.0), (0.0, 0.0)]));

        let zero = apply_spectral_projection(&om, &Region::empty(), &v).unwrap();
        assert_eq!(zero, CVector::zeros(2));

        assert_eq!(om.region(&["nope"]), Err(Error::UnknownCell("nope".into())));
        let bad: Region = [5].into_iter().collect();
        assert!(matches!(
            apply_spectral_projection(&om, &bad, &v),
            Err(Error::UnknownCell(_))
        ));
    }

    #[test]
    fn projection_is_multiplicative_against_dense_oracle() {
        let om = generate_random_manifold(4, 8, &[3, 0, 2, 3], 11).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..10 {
            let v = random_vector(8, &mut rng);
            let a = random_region(4, &mut rng);
            let b = random_region(4, &mut rng);
            let ea = om.spectral_projector(&a).unwrap();
            let eb = om.spectral_projector(&b).unwrap();
            let oracle = &ea * (&eb * &v);
            let both = apply_spectral_projection(
                &om,
                &a,
                &apply_spectral_projection(&om, &b, &v).unwrap(),
            )
            .unwrap();
            let meet = apply_spectral_projection(&om, &a.intersection(&b), &v).unwrap();
            assert!(linalg::max_abs_diff_vec(&both, &oracle) < 1e-10);
            assert!(linalg::max_abs_diff_vec(&meet, &oracle) < 1e-10);
        }
        let v = random_vector(8, &mut rng);
        let all = apply_spectral_projection(&om, &Region::all(4), &v).unwrap();
        assert!(linalg::max_abs_diff_vec(&all, &v) < 1e-12);
    }

    #[test]
    fn functional_calculus_examples() {
        let om = examples::scalar(2);
        let v = vector(&[(1.0, 0.0), (1.0, 0.0)]);
        let f = [c(2.0, 0.0), c(3.0, 0.0)];
        assert_eq!(
            apply_functional_calculus(&om, &f, &v).unwrap(),
            vector(&[(2.0, 0.0), (3.0, 0.0)])
        );
        let ones = [c(1.0, 0.0); 2];
        assert_eq!(apply_functional_calculus(&om, &ones, &v).unwrap(), v);
        assert!(matches!(
            apply_functional_calculus(&om, &f[..1], &v),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn functional_calculus_is_multiplicative_against_dense_oracle() {
        let om = generate_random_manifold(5, 10, &[2, 2, 0, 5, 1], 3).unwrap();
        let mut rng = SplitMix64::new(9);
        let f: Vec<C64> = (0..5).map(|_| rng.complex_gaussian()).collect();
        let g: Vec<C64> = (0..5).map(|_| rng.complex_gaussian()).collect();
        let fg: Vec<C64> = f.iter().zip(&g).map(|(a, b)| a * b).collect();
        let v = random_vector(10, &mut rng);

        let dense = |h: &[C64]| {
            let mut m = CMatrix::zeros(10, 10);
            for (k, hk) in h.iter().enumerate() {
                m += om.measure().projector(k) * *hk;
            }
            m
        };
        let composite =
            apply_functional_calculus(&om, &f, &apply_functional_calculus(&om, &g, &v).unwrap())
                .unwrap();
        let single = apply_functional_calculus(&om, &fg, &v).unwrap();
        let oracle = dense(&f) * dense(&g) * &v;
        assert!(linalg::max_abs_diff_vec(&composite, &single) < 1e-10);
        assert!(linalg::max_abs_diff_vec(&single, &oracle) < 1e-10);
    }

    #[test]
    fn position_operator_examples() {
        let x = position_operator(&examples::scalar(2), 0).unwrap();
        let mut expected = CMatrix::zeros(2, 2);
        expected[(1, 1)] = c(1.0, 0.0);
        assert_eq!(x, expected);

        let space = MeasureSpace::new(1, vec![Cell::new("c0", vec![5.0], 1.0).unwrap()]).unwrap();
        let om = OperatorManifold::new(
            space,
            SpectralMeasure::new(2, vec![CMatrix::identity(2, 2)]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            position_operator(&om, 0).unwrap(),
            CMatrix::identity(2, 2) * c(5.0, 0.0)
        );
        assert!(matches!(position_operator(&om, 1), Err(Error::Invalid(_))));
        assert!(position_operator(&single_cell_identity(), 0).is_ok());
    }

    #[test]
    fn position_operators_commute() {
        let om = generate_random_manifold(6, 12, &[1, 3, 0, 4, 2, 2], 21).unwrap();
        let xs: Vec<CMatrix> = (0..om.space().dim())
            .map(|i| position_operator(&om, i).unwrap())
            .collect();
        for a in &xs {
            assert!(linalg::hermitian_residual(a) < 1e-12);
            for k in 0..om.cell_count() {
                let p = om.measure().projector(k);
                assert!(linalg::max_abs_diff(&(a * &p), &(&p * a)) < 1e-10);
            }
            for b in &xs {
                assert!(linalg::max_abs_diff(&(a * b), &(b * a)) < 1e-10);
            }
        }
    }

    #[test]
    fn expectation_examples() {
        let mut a = CMatrix::zeros(2, 2);
        a[(1, 1)] = c(1.0, 0.0);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let psi = vector(&[(s, 0.0), (s, 0.0)]);
        assert!((observable_expectation(&a, &psi).unwrap() - 0.5).abs() < 1e-15);
        let unit = vector(&[(0.6, 0.0), (0.0, 0.8)]);
        assert!(
            (observable_expectation(&CMatrix::identity(2, 2), &unit).unwrap() - 1.0).abs() < 1e-15
        );
        assert!(matches!(
            observable_expectation(&a, &CVector::zeros(2)),
            Err(Error::Invalid(_))
        ));
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            observable_expectation(&a, &psi),
            Err(Error::Tolerance { .. })
        ));
    }

    #[test]
    fn expectation_matches_explicit_double_sum() {
        let mut rng = SplitMix64::new(77);
        let n = 7;
        let g = CMatrix::from_fn(n, n, |_, _| rng.complex_gaussian());
        let a = &g + g.adjoint();
        let psi = random_vector(n, &mut rng);
        let mut num = c(0.0, 0.0);
        let mut den = 0.0;
        for i in 0..n {
            den += psi[i].norm_sqr();
            for j in 0..n {
                num += psi[i].conj() * a[(i, j)] * psi[j];
            }
        }
        let expected = num.re / den;
        let got = observable_expectation(&a, &psi).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }
}
