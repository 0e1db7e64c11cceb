use opman_core::gauge::random_gauge_field;
use opman_core::linalg::{inner, max_abs_diff, max_abs_diff_vec, norm, norm_sq};
use opman_core::random::{haar_unitary, random_ranks, random_region, random_vector};
use opman_core::*;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
struct Setup {
    cells: usize,
    dim: usize,
    ranks: Vec<usize>,
    seed: u64,
}

fn setup() -> impl Strategy<Value = Setup> {
    (1usize..=8, 1usize..=16, any::<u64>()).prop_map(|(cells, dim, seed)| {
        let ranks = random_ranks(cells, dim, &mut SplitMix64::new(seed ^ 0x5eed));
        Setup {
            cells,
            dim,
            ranks,
            seed,
        }
    })
}

fn build(s: &Setup) -> OperatorManifold {
    generate_random_manifold(s.cells, s.dim, &s.ranks, s.seed).unwrap()
}

fn unit(n: usize, rng: &mut SplitMix64) -> CVector {
    let v = random_vector(n, rng);
    let r = norm(&v);
    v.unscale(r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_manifolds_validate(s in setup()) {
        let om = build(&s);
        let report = validate_operator_manifold(&om, EPS_VALID);
        prop_assert!(report.passed(), "{}", report);
        prop_assert_eq!(spin_dimension_profile(&om, None).multiplicities().to_vec(), s.ranks.clone());
        prop_assert_eq!(build(&s), om);
    }

    #[test]
    fn spin_product_is_hermitian_positive_and_integrates(s in setup()) {
        let om = build(&s);
        let mut rng = SplitMix64::new(s.seed.wrapping_add(1));
        let u = random_vector(s.dim, &mut rng);
        let v = random_vector(s.dim, &mut rng);
        let region = random_region(s.cells, &mut rng);
        let huv = spin_scalar_product(&om, &u, &v).unwrap();
        let hvu = spin_scalar_product(&om, &v, &u).unwrap();
        let huu = spin_scalar_product(&om, &u, &u).unwrap();
        for k in 0..s.cells {
            prop_assert!((huv[k] - hvu[k].conj()).norm() <= TOL);
            prop_assert!(huu[k].re >= -TOL && huu[k].im.abs() <= TOL);
        }
        let total = huv.integrate(&om, &Region::all(s.cells));
        prop_assert!((total - inner(&u, &v)).norm() <= TOL * (1.0 + norm(&u) * norm(&v)));
        let partial = huv.integrate(&om, &region);
        let measured = vector_measure(&om, &u, &v, &region).unwrap();
        prop_assert!((partial - measured).norm() <= TOL * (1.0 + norm(&u) * norm(&v)));
    }

    #[test]
    fn local_onb_profile_is_seed_independent(s in setup(), seed in any::<u64>()) {
        let om = build(&s);
        let standard = construct_local_onb(&om, None).unwrap();
        let haar = construct_local_onb(&om, Some(&haar_unitary(s.dim, &mut SplitMix64::new(seed)))).unwrap();
        for onb in [&standard, &haar] {
            let report = verify_local_onb(&om, onb, TOL).unwrap();
            prop_assert!(report.passed(), "{}", report);
            prop_assert_eq!(spin_dimension_profile(&om, Some(onb)).multiplicities().to_vec(), s.ranks.clone());
        }
    }

    #[test]
    fn representation_is_unitary_and_invertible(s in setup()) {
        let om = build(&s);
        let onb = construct_local_onb(&om, None).unwrap();
        let mut rng = SplitMix64::new(s.seed.wrapping_mul(3));
        let u = unit(s.dim, &mut rng);
        let v = unit(s.dim, &mut rng);
        let comps = representation_map(&om, &onb, &u).unwrap();
        prop_assert!((comps.weighted_norm_sq(&om.weights()) - 1.0).abs() <= TOL);
        let back = reconstruct_from_components(&om, &onb, &comps).unwrap();
        prop_assert!(max_abs_diff_vec(&back, &u) <= TOL);
        prop_assert!(pointwise_completeness_residual(&om, &onb, &u, &v).unwrap() <= TOL);
    }

    #[test]
    fn planted_fields_are_recovered(s in setup()) {
        let om = build(&s);
        let mut rng = SplitMix64::new(s.seed.rotate_left(7));
        let g = canonical_gauge(&om).unwrap();
        prop_assert!(verify_gauge(&om, &g, TOL).unwrap().passed());
        let f = random_gauge_field(&g.profile(), &mut rng);
        let h = gauge_from_field(&g, &f).unwrap();
        prop_assert!(verify_gauge(&om, &h, TOL).unwrap().passed());
        let w = extract_gauge_transformation(&g, &h).unwrap();
        prop_assert!(w.max_abs_diff(&f) <= TOL);
        prop_assert!(w.unitarity_residual() <= TOL);

        let identity = GaugeField::identity(&g.profile());
        prop_assert!(extract_gauge_transformation(&g, &g).unwrap().max_abs_diff(&identity) <= TOL);
        let back = extract_gauge_transformation(&h, &g).unwrap();
        prop_assert!(back.max_abs_diff(&w.inverse()) <= TOL);

        let v = unit(s.dim, &mut rng);
        let psi_g = apply_gauge(&g, &v).unwrap();
        let psi_h = apply_gauge(&h, &v).unwrap();
        prop_assert!(apply_gauge_field(&w, &psi_h).unwrap().max_abs_diff(&psi_g) <= TOL);
        let rho_g = gauge_invariant_density(&psi_g, &g.profile()).unwrap();
        let rho_h = gauge_invariant_density(&psi_h, &h.profile()).unwrap();
        for (a, b) in rho_g.iter().zip(&rho_h) {
            prop_assert!((a - b).abs() <= TOL);
        }
        prop_assert!(max_abs_diff_vec(&invert_gauge(&h, &psi_h).unwrap(), &v) <= TOL);
        prop_assert!((psi_h.weighted_norm_sq(&om.weights()) - norm_sq(&v)).abs() <= TOL);
    }

    #[test]
    fn realized_gauges_reproduce_themselves(s in setup()) {
        let om = build(&s);
        let mut rng = SplitMix64::new(!s.seed);
        let g = canonical_gauge(&om).unwrap();
        let h = gauge_from_field(&g, &random_gauge_field(&g.profile(), &mut rng)).unwrap();
        let onb = realize_gauge_as_local_onb(&om, &h).unwrap();
        prop_assert!(verify_local_onb(&om, &onb, TOL).unwrap().passed());
        let induced = gauge_from_local_onb(&om, &onb).unwrap();
        for (a, b) in induced.blocks().iter().zip(h.blocks()) {
            prop_assert!(max_abs_diff(a, b) <= TOL);
        }
    }

    #[test]
    fn rotated_copies_are_isomorphic(s in setup()) {
        let om = build(&s);
        let u = haar_unitary(s.dim, &mut SplitMix64::new(s.seed ^ 0xfeed));
        let frames = om.measure().frames().iter().map(|b| &u * b).collect();
        let rotated = OperatorManifold::new(
            om.space().clone(),
            SpectralMeasure::new(s.dim, frames).unwrap(),
        )
        .unwrap();
        let iso = check_isomorphism(&om, &rotated).unwrap();
        let w = iso.unitary().expect("same profile");
        let id = CMatrix::identity(s.dim, s.dim);
        prop_assert!(max_abs_diff(&(w.adjoint() * w), &id) <= TOL);
        for k in 0..s.cells {
            let lhs = w * om.measure().projector(k) * w.adjoint();
            prop_assert!(max_abs_diff(&lhs, &rotated.measure().projector(k)) <= TOL);
        }
    }

    #[test]
    fn position_operators_commute_and_are_hermitian(s in setup()) {
        let om = build(&s);
        let xs: Vec<CMatrix> = (0..om.space().dim()).map(|a| position_operator(&om, a).unwrap()).collect();
        for a in &xs {
            prop_assert!(max_abs_diff(a, &a.adjoint()) <= 1e-12);
            for b in &xs {
                prop_assert!(max_abs_diff(&(a * b), &(b * a)) <= 1e-10);
            }
        }
    }
}
