//! The complex vector measure `mu_uv(V) = <E_V u, v>` and its density with
//! respect to the cell weights, the spin scalar product `h_uv`.

use alloc::vec::Vec;
use core::ops::Index;

use crate::linalg::{CVector, C64, ZERO};
use crate::manifold::{OperatorManifold, Region};
use crate::{Error, Result};

/// Cell-wise values of a spin scalar product, in canonical cell order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinDensity {
    values: Vec<C64>,
}

impl SpinDensity {
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_k h(x_k) mu_k` over `region`.
    pub fn integrate(&self, om: &OperatorManifold, region: &Region) -> C64 {
        region.iter().map(|k| self.values[k] * om.weight(k)).sum()
    }
}

impl Index<usize> for SpinDensity {
    type Output = C64;

    fn index(&self, k: usize) -> &C64 {
        &self.values[k]
    }
}

/// `<P_k u, v>` computed in frame coordinates as `(B_k* v)* (B_k* u)`.
pub(crate) fn cell_product(om: &OperatorManifold, k: usize, u: &CVector, v: &CVector) -> C64 {
    let frame = om.measure().frame(k);
    if frame.ncols() == 0 {
        return ZERO;
    }
    let cu = frame.ad_mul(u);
    let cv = frame.ad_mul(v);
    cv.dotc(&cu)
}

/// `mu_uv(V) = sum_{k in V} <P_k u, v>`.
pub fn vector_measure(
    om: &OperatorManifold,
    u: &CVector,
    v: &CVector,
    region: &Region,
) -> Result<C64> {
    om.check_vector(u, "u")?;
    om.check_vector(v, "v")?;
    if let Some(k) = region.iter().find(|&k| k >= om.cell_count()) {
        return Err(Error::UnknownCell(alloc::format!("#{k}")));
    }
    Ok(region.iter().map(|k| cell_product(om, k, u, v)).sum())
}

/// `h_uv(x_k) = <P_k u, v> / mu_k` for every cell.
pub fn spin_scalar_product(om: &OperatorManifold, u: &CVector, v: &CVector) -> Result<SpinDensity> {
    om.check_vector(u, "u")?;
    om.check_vector(v, "v")?;
    let values = (0..om.cell_count())
        .map(|k| cell_product(om, k, u, v) / om.weight(k))
        .collect();
    Ok(SpinDensity { values })
}

/// `h_uu(x_k)` as a nonnegative real, i.e. `|P_k u|^2 / mu_k`.
pub fn spin_norm_density(om: &OperatorManifold, u: &CVector) -> Result<Vec<f64>> {
    om.check_vector(u, "u")?;
    Ok((0..om.cell_count())
        .map(|k| {
            let frame = om.measure().frame(k);
            let cu = frame.ad_mul(u);
            cu.iter().map(|z| z.norm_sqr()).sum::<f64>() / om.weight(k)
        })
        .collect())
}
