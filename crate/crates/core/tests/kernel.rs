mod common;

use proptest::prelude::*;
use qst_core::kernel::registry::KernelRegistry;
use qst_core::kernel::{beta_pair, lambda_closed, lambda_quadrature, lambda_split, MomentumConfig, SphereQuadrature};

use common::*;

fn config(n: usize) -> impl Strategy<Value = MomentumConfig> {
    prop::collection::vec(-3.0f64..3.0, 4 * n).prop_map(|v| MomentumConfig::from_flat(&v).unwrap())
}

fn any_config() -> impl Strategy<Value = MomentumConfig> {
    (2usize..=4).prop_flat_map(config)
}

proptest! {
    #[test]
    fn bounded_even_and_parity_invariant(c in any_config(), l in 0.0f64..2.0) {
        let v = lambda_closed(&c, l);
        prop_assert!(v.abs() <= 1.0);
        prop_assert_eq!(lambda_closed(&c.neg(), l), v);
        prop_assert!((lambda_closed(&c.map_spatial(&PARITY), l) - v).abs() < 1e-14);
    }

    #[test]
    fn rotation_invariant(c in any_config(), seed in any::<u64>(), l in 0.1f64..2.0) {
        let r = random_rotation(&mut rng(seed));
        prop_assert!((lambda_closed(&c.map_spatial(&r), l) - lambda_closed(&c, l)).abs() < 1e-12);
    }

    #[test]
    fn scaling_momenta_is_scaling_length(c in any_config(), s in 0.1f64..3.0, l in 0.1f64..2.0) {
        let a = lambda_closed(&c.scale(s), l);
        let b = lambda_closed(&c, s * l);
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn split_parts_sum_exactly(c in any_config(), l in 0.0f64..3.0) {
        let s = lambda_split(&c, l);
        prop_assert!((s.total - s.delta_part - s.continuous_part).abs() <= 4.0 * f64::EPSILON);
        prop_assert!(s.delta_part > 0.0 || beta_pair(&c, l).beta_plus > 10.0 || beta_pair(&c, l).beta_minus > 10.0);
    }

    #[test]
    fn limit_bound_holds(c in any_config(), l in 0.0f64..1.5) {
        prop_assert!((lambda_closed(&c, l) - 1.0).abs() <= beta_pair(&c, l).limit_bound() + 1e-16);
    }
}

#[test]
fn quadrature_matches_closed_form() {
    let q = SphereQuadrature::new(48).unwrap();
    let mut r = rng(17);
    for n in 2..=4 {
        for _ in 0..10 {
            let c = bounded_config(&mut r, n, 8.0);
            let quad = lambda_quadrature(&c, 1.0, &q);
            assert!((quad.re - lambda_closed(&c, 1.0)).abs() < 1e-9);
            assert!(quad.im.abs() < 1e-12);
        }
    }
}

#[test]
fn quadrature_converges_with_order() {
    let c = cfg(&[1.5, -0.5, 2.0, 0.3, -1.0, 1.2, 0.4, -2.2, 0.5, 1.0, -1.3, 0.8]);
    let exact = lambda_closed(&c, 1.4);
    let errs: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&o| (lambda_quadrature(&c, 1.4, &SphereQuadrature::new(o).unwrap()).re - exact).abs())
        .collect();
    assert!(errs[2] < errs[0], "{errs:?}");
    assert!(errs[2] < 1e-6, "{errs:?}");
}

#[test]
fn registry_routes_to_matching_evaluators() {
    let reg = KernelRegistry::with_defaults(32).unwrap();
    let c = cfg(&[0.3, 1.0, 0.0, -0.5, 1.0, 0.0, 0.7, 0.2]);
    let closed = reg.get("closed").unwrap().evaluate(&c, 1.1);
    let quad = reg.get("quadrature").unwrap().evaluate(&c, 1.1);
    assert!((closed - quad).abs() < 1e-10);
    assert_eq!(reg.get("unity").unwrap().evaluate(&c, 1.1), 1.0);
    for name in reg.names() {
        assert!(!reg.get(name).unwrap().description().is_empty());
    }
}
