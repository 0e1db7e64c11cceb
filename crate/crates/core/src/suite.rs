//! The full invariant suite run by `opman verify`.
//!
//! Every module's properties are evaluated on one instance plus a handful of
//! seeded random vectors, regions, seed bases and gauge fields. Floating
//! point checks use the caller's tolerance; integer checks (ranks, counts,
//! profile agreement) must be exact.

use alloc::vec::Vec;

use crate::decomposition::{
    canonical_gauge, construct_local_onb, pointwise_completeness_residual,
    reconstruct_from_components, representation_map, spin_dimension_profile, verify_gauge,
    verify_local_onb,
};
use crate::gauge::{
    apply_gauge, apply_gauge_field, check_isomorphism, extract_gauge_transformation,
    gauge_from_field, gauge_invariant_density, invert_gauge, random_gauge_field,
    realize_gauge_as_local_onb, GaugeField, Isomorphism,
};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::manifold::{
    apply_functional_calculus, apply_spectral_projection, observable_expectation,
    position_operator, validate_operator_manifold, OperatorManifold, Region, ValidationReport,
};
use crate::random::{haar_unitary, random_region, random_vector, SplitMix64};
use crate::spin::{spin_scalar_product, vector_measure};
use crate::Result;

/// Random vectors, regions and fields drawn per property.
const TRIALS: usize = 4;

fn worst(acc: &mut f64, x: f64) {
    if x.is_nan() || x > *acc {
        *acc = x;
    }
}

/// Runs every invariant on `om`.
///
/// Fails early only if a construction itself errors (for example an
/// instance whose frames are so far from orthonormal that no local ONB can be
/// built); every measured property otherwise ends up as a row of the report.
pub fn verify_suite(om: &OperatorManifold, tol: f64, seed: u64) -> Result<ValidationReport> {
    let n = om.hilbert_dim();
    let cells = om.cell_count();
    let weights = om.weights();
    let mut rng = SplitMix64::new(seed);
    let mut report = ValidationReport::new();

    report.extend_prefixed("manifold", validate_operator_manifold(om, tol));

    // Spectral measure: additivity, multiplicativity, E(M) = 1.
    let mut pvm: f64 = 0.0;
    for _ in 0..TRIALS {
        let v = random_vector(n, &mut rng);
        let a = random_region(cells, &mut rng);
        let b = random_region(cells, &mut rng);
        let ab = apply_spectral_projection(om, &a, &apply_spectral_projection(om, &b, &v)?)?;
        let meet = apply_spectral_projection(om, &a.intersection(&b), &v)?;
        worst(&mut pvm, linalg::max_abs_diff_vec(&ab, &meet));
        let b_only: Region = b.iter().filter(|&k| !a.contains(k)).collect();
        let sum =
            apply_spectral_projection(om, &a, &v)? + apply_spectral_projection(om, &b_only, &v)?;
        let union = apply_spectral_projection(om, &a.union(&b_only), &v)?;
        worst(&mut pvm, linalg::max_abs_diff_vec(&sum, &union));
        let all = apply_spectral_projection(om, &Region::all(cells), &v)?;
        worst(&mut pvm, linalg::max_abs_diff_vec(&all, &v));
    }
    report.push("measure.additive_multiplicative", pvm, tol);

    // Functional calculus as a *-homomorphism.
    let mut calculus: f64 = 0.0;
    for _ in 0..TRIALS {
        let f: Vec<C64> = (0..cells).map(|_| rng.complex_gaussian()).collect();
        let g: Vec<C64> = (0..cells).map(|_| rng.complex_gaussian()).collect();
        let v = random_vector(n, &mut rng);
        let w = random_vector(n, &mut rng);
        let fg: Vec<C64> = f.iter().zip(&g).map(|(a, b)| a * b).collect();
        let f_plus_g: Vec<C64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let f_bar: Vec<C64> = f.iter().map(|a| a.conj()).collect();
        let apply = |h: &[C64], x: &CVector| apply_functional_calculus(om, h, x);
        worst(
            &mut calculus,
            linalg::max_abs_diff_vec(&apply(&f, &apply(&g, &v)?)?, &apply(&fg, &v)?),
        );
        worst(
            &mut calculus,
            linalg::max_abs_diff_vec(&(apply(&f, &v)? + apply(&g, &v)?), &apply(&f_plus_g, &v)?),
        );
        // <f(E) v, w> = <v, conj(f)(E) w>
        let lhs = linalg::inner(&apply(&f, &v)?, &w);
        let rhs = linalg::inner(&v, &apply(&f_bar, &w)?);
        worst(&mut calculus, (lhs - rhs).norm());
    }
    report.push("calculus.homomorphism", calculus, tol);

    // Position operators.
    let xs = (0..om.space().dim())
        .map(|i| position_operator(om, i))
        .collect::<Result<Vec<CMatrix>>>()?;
    let mut commutator: f64 = 0.0;
    let mut hermitian: f64 = 0.0;
    for a in &xs {
        worst(&mut hermitian, linalg::hermitian_residual(a));
        for b in &xs {
            worst(&mut commutator, linalg::max_abs_diff(&(a * b), &(b * a)));
        }
        for k in 0..cells {
            let p = om.measure().projector(k);
            worst(&mut commutator, linalg::max_abs_diff(&(a * &p), &(&p * a)));
        }
    }
    report.push("position.hermitian", hermitian, tol);
    report.push("position.commuting", commutator, tol);

    // Spin scalar product.
    let mut spin_total: f64 = 0.0;
    let mut spin_symmetry: f64 = 0.0;
    let mut cauchy_schwarz: f64 = 0.0;
    let mut positivity: f64 = 0.0;
    for _ in 0..TRIALS {
        let u = random_vector(n, &mut rng);
        let v = random_vector(n, &mut rng);
        let huv = spin_scalar_product(om, &u, &v)?;
        let hvu = spin_scalar_product(om, &v, &u)?;
        let huu = spin_scalar_product(om, &u, &u)?;
        let hvv = spin_scalar_product(om, &v, &v)?;
        let total = huv.integrate(om, &Region::all(cells));
        worst(&mut spin_total, (total - linalg::inner(&u, &v)).norm());
        let region = random_region(cells, &mut rng);
        worst(
            &mut spin_total,
            (huv.integrate(om, &region) - vector_measure(om, &u, &v, &region)?).norm(),
        );
        for k in 0..cells {
            worst(&mut spin_symmetry, (huv[k] - hvu[k].conj()).norm());
            worst(
                &mut cauchy_schwarz,
                huv[k].norm_sqr() - huu[k].re * hvv[k].re,
            );
            worst(&mut positivity, (-huu[k].re).max(huu[k].im.abs()));
        }
    }
    report.push("spin.integrates_to_inner_product", spin_total, tol);
    report.push("spin.hermitian_symmetry", spin_symmetry, tol);
    report.push("spin.cauchy_schwarz", cauchy_schwarz, tol);
    report.push("spin.positivity", positivity, tol);

    // Local ONBs from the standard seed and from a random seed.
    let onb = construct_local_onb(om, None)?;
    report.extend_prefixed("onb", verify_local_onb(om, &onb, tol)?);
    let seeded = construct_local_onb(om, Some(&haar_unitary(n, &mut rng)))?;
    report.extend_prefixed("onb_random_seed", verify_local_onb(om, &seeded, tol)?);

    let by_rank = spin_dimension_profile(om, None);
    let mismatches = [
        spin_dimension_profile(om, Some(&onb)),
        spin_dimension_profile(om, Some(&seeded)),
    ]
    .iter()
    .map(|p| {
        p.multiplicities()
            .iter()
            .zip(by_rank.multiplicities())
            .filter(|(a, b)| a != b)
            .count()
    })
    .sum::<usize>();
    report.push("profile.agreement", mismatches as f64, 0.0);
    report.push("profile.total", by_rank.total().abs_diff(n) as f64, 0.0);

    // Representation map, reconstruction and local completeness.
    let mut unitarity: f64 = 0.0;
    let mut intertwining: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    let mut completeness: f64 = 0.0;
    for _ in 0..TRIALS {
        let v = random_vector(n, &mut rng);
        let w = random_vector(n, &mut rng);
        let comps = representation_map(om, &onb, &v)?;
        worst(
            &mut unitarity,
            (comps.weighted_norm_sq(&weights) - linalg::norm_sq(&v)).abs(),
        );
        let region = random_region(cells, &mut rng);
        let restricted =
            representation_map(om, &onb, &apply_spectral_projection(om, &region, &v)?)?;
        worst(
            &mut intertwining,
            restricted.max_abs_diff(&comps.restrict(&region)),
        );
        let back = reconstruct_from_components(om, &onb, &comps)?;
        worst(&mut round_trip, linalg::max_abs_diff_vec(&back, &v));
        worst(
            &mut completeness,
            pointwise_completeness_residual(om, &onb, &v, &w)?,
        );
    }
    report.push("representation.unitarity", unitarity, tol);
    report.push("representation.intertwining", intertwining, tol);
    report.push("reconstruction.round_trip", round_trip, tol);
    report.push("reconstruction.pointwise_completeness", completeness, tol);

    // Gauges.
    let gauge = canonical_gauge(om)?;
    report.extend_prefixed("gauge", verify_gauge(om, &gauge, tol)?);
    let profile = gauge.profile();
    report.push(
        "gauge.profile",
        profile.first_difference(&by_rank).map_or(0.0, |_| 1.0),
        0.0,
    );

    let mut gauges = alloc::vec![gauge.clone()];
    let mut planted = Vec::new();
    for _ in 0..TRIALS {
        let field = random_gauge_field(&profile, &mut rng);
        gauges.push(gauge_from_field(&gauge, &field)?);
        planted.push(field);
    }

    let mut recovery: f64 = 0.0;
    let mut field_unitarity: f64 = 0.0;
    let mut intertwines: f64 = 0.0;
    let mut group_law: f64 = 0.0;
    let mut section_norm: f64 = 0.0;
    let mut inversion: f64 = 0.0;
    let v = random_vector(n, &mut rng);
    for (g, field) in gauges[1..].iter().zip(&planted) {
        let w = extract_gauge_transformation(&gauge, g)?;
        worst(&mut recovery, w.max_abs_diff(field));
        worst(&mut field_unitarity, w.unitarity_residual());
        let lhs = apply_gauge(&gauge, &v)?;
        let rhs = apply_gauge_field(&w, &apply_gauge(g, &v)?)?;
        worst(&mut intertwines, lhs.max_abs_diff(&rhs));
        let psi = apply_gauge(g, &v)?;
        worst(
            &mut section_norm,
            (psi.weighted_norm_sq(&weights) - linalg::norm_sq(&v)).abs(),
        );
        worst(
            &mut inversion,
            linalg::max_abs_diff_vec(&invert_gauge(g, &psi)?, &v),
        );
    }
    for i in 0..gauges.len() {
        let identity = extract_gauge_transformation(&gauges[i], &gauges[i])?;
        worst(
            &mut group_law,
            identity.max_abs_diff(&GaugeField::identity(&profile)),
        );
        for j in 0..gauges.len() {
            let wij = extract_gauge_transformation(&gauges[i], &gauges[j])?;
            for g3 in &gauges {
                let wj3 = extract_gauge_transformation(&gauges[j], g3)?;
                let wi3 = extract_gauge_transformation(&gauges[i], g3)?;
                worst(&mut group_law, wij.compose(&wj3)?.max_abs_diff(&wi3));
            }
        }
    }
    report.push("gauge_field.recovery", recovery, tol);
    report.push("gauge_field.unitarity", field_unitarity, tol);
    report.push("gauge_field.intertwining", intertwines, tol);
    report.push("gauge_field.group_law", group_law, tol);
    report.push("section.norm", section_norm, tol);
    report.push("section.inversion", inversion, tol);

    // Realization of each gauge as a local ONB.
    let mut realized_ok = 0.0;
    let mut realized_action: f64 = 0.0;
    for g in &gauges {
        let realized = realize_gauge_as_local_onb(om, g)?;
        let check = verify_local_onb(om, &realized, tol)?;
        worst(&mut realized_ok, check.max_residual());
        // Entries run over strata by ascending m, then alpha.
        let comps = representation_map(om, &realized, &v)?;
        let psi = apply_gauge(g, &v)?;
        let mut l = 0;
        for (m, stratum) in profile.strata() {
            for alpha in 0..m {
                for k in stratum.iter() {
                    worst(
                        &mut realized_action,
                        (comps.component(l)[k] - psi.at(k)[alpha]).norm(),
                    );
                }
                l += 1;
            }
        }
    }
    report.push("realization.local_onb", realized_ok, tol);
    report.push("realization.action", realized_action, tol);

    // Gauge-invariant observables.
    let mut density: f64 = 0.0;
    let mut expectation: f64 = 0.0;
    let reference_psi = apply_gauge(&gauge, &v)?;
    let reference = gauge_invariant_density(&reference_psi, &profile)?;
    let norm_sq = linalg::norm_sq(&v);
    let direct: Vec<f64> = xs
        .iter()
        .map(|x| observable_expectation(x, &v))
        .collect::<Result<_>>()?;
    for g in &gauges {
        let psi = apply_gauge(g, &v)?;
        let rho = gauge_invariant_density(&psi, &profile)?;
        for (a, b) in rho.iter().zip(&reference) {
            worst(&mut density, (a - b).abs());
        }
        let back = invert_gauge(g, &psi)?;
        for (i, x) in xs.iter().enumerate() {
            // Multiplication by the coordinate in the section picture.
            let local: f64 = (0..cells)
                .map(|k| om.cells()[k].coords()[i] * weights[k] * rho[k])
                .sum::<f64>()
                / norm_sq;
            worst(&mut expectation, (local - direct[i]).abs());
            worst(
                &mut expectation,
                (observable_expectation(x, &back)? - direct[i]).abs(),
            );
        }
    }
    report.push("observable.density_invariance", density, tol);
    report.push("observable.position_expectation", expectation, tol);

    // Isomorphism with itself and with a conjugated copy.
    let mut iso: f64 = 0.0;
    let rotation = haar_unitary(n, &mut rng);
    let frames = om
        .measure()
        .frames()
        .iter()
        .map(|b| &rotation * b)
        .collect();
    let conj = OperatorManifold::new(
        om.space().clone(),
        crate::manifold::SpectralMeasure::new(n, frames)?,
    )?;
    for other in [om, &conj] {
        match check_isomorphism(om, other)? {
            Isomorphism::Unitary(u) => {
                worst(&mut iso, linalg::unitarity_residual(&u));
                for k in 0..cells {
                    let lhs = &u * om.measure().projector(k) * u.adjoint();
                    worst(
                        &mut iso,
                        linalg::max_abs_diff(&lhs, &other.measure().projector(k)),
                    );
                }
            }
            Isomorphism::Obstructed { .. } => iso = f64::INFINITY,
        }
    }
    report.push("isomorphism.intertwining", iso, tol);

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::random::generate_random_manifold;

    #[test]
    fn golden_examples_pass_at_tight_tolerance() {
        for om in [
            examples::scalar(2),
            examples::scalar(5),
            examples::spinor(1),
            examples::spinor(3),
        ] {
            let report = verify_suite(&om, 1e-12, 7).unwrap();
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn random_instance_passes() {
        let om = generate_random_manifold(5, 13, &[3, 0, 4, 5, 1], 3).unwrap();
        let report = verify_suite(&om, 1e-9, 1).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.checks.len() > 30);
    }

    #[test]
    fn suite_is_deterministic() {
        let om = generate_random_manifold(3, 5, &[2, 1, 2], 3).unwrap();
        assert_eq!(
            verify_suite(&om, 1e-9, 5).unwrap(),
            verify_suite(&om, 1e-9, 5).unwrap()
        );
    }
}
