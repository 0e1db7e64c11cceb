//! Seeded, platform-independent random instances.
//!
//! The generator is SplitMix64 used as a counter-based stream: the `i`-th
//! output (starting at `i = 1`) is `mix(seed + i * 0x9E3779B97F4A7C15)` with
//! wrapping arithmetic and the standard SplitMix64 finalizer. Everything else
//! is derived from that stream in a fixed order:
//!
//! * `uniform()` takes the top 53 bits of one output: `(x >> 11) * 2^-53`,
//!   a value in `[0, 1)`.
//! * `gaussian_pair()` draws `u1` then `u2` and returns the Box-Muller pair
//!   `r cos(2 pi u2), r sin(2 pi u2)` with `r = sqrt(-2 ln(1 - u1))`.
//! * `complex_gaussian()` is one Box-Muller pair read as `re + i im`.
//!
//! All transcendental functions go through `libm`, so the bits of every
//! generated instance are the same on every platform.

use alloc::format;
use alloc::vec::Vec;

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::manifold::{Cell, MeasureSpace, OperatorManifold, Region, SpectralMeasure};
use crate::{Error, Result, EPS_RANK};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Manifold dimension of generated instances.
pub const RANDOM_MANIFOLD_DIM: usize = 3;

/// Counter-based SplitMix64 stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Two independent standard normal draws (Box-Muller).
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        (r * libm::cos(theta), r * libm::sin(theta))
    }

    pub fn complex_gaussian(&mut self) -> C64 {
        let (re, im) = self.gaussian_pair();
        C64::new(re, im)
    }

    /// Uniform integer in `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        (self.uniform() * bound as f64) as usize % bound
    }
}

/// Complex Gaussian matrix filled row by row.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut SplitMix64) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = rng.complex_gaussian();
        }
    }
    m
}

/// Haar-distributed `n x n` unitary: Gram-Schmidt (with one
/// re-orthogonalization pass) on the columns of a complex Gaussian matrix.
/// This is the `Q` of the QR factorization with positive diagonal `R`.
pub fn haar_unitary(n: usize, rng: &mut SplitMix64) -> CMatrix {
    loop {
        let g = gaussian_matrix(n, n, rng);
        // A rank-deficient Gaussian draw has probability zero; redraw anyway.
        if let Some(q) = linalg::orthonormalize_columns(&g, EPS_RANK) {
            return q;
        }
    }
}

/// Complex Gaussian vector.
pub fn random_vector(n: usize, rng: &mut SplitMix64) -> CVector {
    CVector::from_iterator(n, (0..n).map(|_| rng.complex_gaussian()))
}

/// Each cell joins the region independently with probability one half.
pub fn random_region(cell_count: usize, rng: &mut SplitMix64) -> Region {
    (0..cell_count).filter(|_| rng.uniform() < 0.5).collect()
}

/// Builds a random operator manifold with the given frame ranks.
///
/// Draw order: one Haar unitary `U` of size `N`, then `K` weights uniform in
/// `[0.5, 2.0)`, then the coordinates (three per cell, uniform in
/// `[-1, 1)`, cell by cell). Cell `k` is named `c{k}` and its frame is the
/// next `ranks[k]` columns of `U`.
pub fn generate_random_manifold(
    cells: usize,
    hilbert_dim: usize,
    ranks: &[usize],
    seed: u64,
) -> Result<OperatorManifold> {
    if cells == 0 {
        return Err(Error::Invalid("at least one cell is required".into()));
    }
    if hilbert_dim == 0 {
        return Err(Error::Invalid("Hilbert dimension must be positive".into()));
    }
    if ranks.len() != cells {
        return Err(Error::Invalid(format!(
            "{} ranks given for {cells} cells",
            ranks.len()
        )));
    }
    let total: usize = ranks.iter().sum();
    if total != hilbert_dim {
        return Err(Error::Invalid(format!(
            "ranks sum to {total}, Hilbert dimension is {hilbert_dim}"
        )));
    }

    let mut rng = SplitMix64::new(seed);
    let u = haar_unitary(hilbert_dim, &mut rng);
    let weights: Vec<f64> = (0..cells).map(|_| rng.uniform_in(0.5, 2.0)).collect();
    let mut frames = Vec::with_capacity(cells);
    let mut offset = 0;
    for &r in ranks {
        frames.push(u.columns(offset, r).into_owned());
        offset += r;
    }
    let cell_list = weights
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let coords = (0..RANDOM_MANIFOLD_DIM)
                .map(|_| rng.uniform_in(-1.0, 1.0))
                .collect();
            Cell::new(format!("c{k}"), coords, w)
        })
        .collect::<Result<Vec<_>>>()?;
    let space = MeasureSpace::new(RANDOM_MANIFOLD_DIM, cell_list)?;
    OperatorManifold::new(space, SpectralMeasure::new(hilbert_dim, frames)?)
}

/// Random ranks for `cells` cells summing to `hilbert_dim`, zeros allowed.
pub fn random_ranks(cells: usize, hilbert_dim: usize, rng: &mut SplitMix64) -> Vec<usize> {
    let mut ranks = alloc::vec![0; cells];
    for _ in 0..hilbert_dim {
        ranks[rng.below(cells)] += 1;
    }
    ranks
}
