//! Property tests for the steering/lens invariants.

use lensfb_core::beamspace::{build_lens, lens_response};
use lensfb_core::channel::steering_vector;
use lensfb_core::numerics::{vec_inner, vec_norm};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn steering_columns_are_unit_norm(psi in -0.5f64..0.5, m in 1usize..256) {
        let v = steering_vector(psi, m).unwrap();
        prop_assert!((vec_norm(&v) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn steering_conjugate_symmetry(psi in -0.5f64..0.5, m in 1usize..128) {
        let plus = steering_vector(psi, m).unwrap();
        let minus = steering_vector(-psi, m).unwrap();
        for (a, b) in plus.iter().zip(&minus) {
            prop_assert!((a.conj() - b).norm() <= 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn on_grid_steering_vectors_orthogonal(m in 2usize..200, a in 0usize..199, b in 0usize..199) {
        let a = a % m;
        let b = b % m;
        prop_assume!(a != b);
        let delta = 1.0 / m as f64;
        let va = steering_vector(a as f64 * delta, m).unwrap();
        let vb = steering_vector(b as f64 * delta, m).unwrap();
        prop_assert!(vec_inner(&va, &vb).norm() <= 1e-12);
    }

    #[test]
    fn lens_response_agrees_with_matrix(psi in -0.5f64..0.5, m in 2usize..96) {
        let lens = build_lens(m).unwrap();
        let a = steering_vector(psi, m).unwrap();
        let slow = lens.u.mul_vec(&a).unwrap();
        let fast = lens_response(psi, m).unwrap();
        for (x, y) in slow.iter().zip(&fast) {
            prop_assert!((x - y).norm() <= 1e-10);
        }
    }
}
