use inls_core::grid::snapshot;
use inls_core::interaction::{charge_identity_residual, gauge_residual};
use inls_core::{charge, linear_half_step, nonlinear_step, presets, Field, RadialGrid};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn radial_field(l: usize) -> impl Strategy<Value = Field> {
    (prop::collection::vec(complex(), l), 0.5..3.0f64, -0.5..0.5f64).prop_map(move |(amps, width, chirp)| {
        let grid = RadialGrid::new(2, 256, 16.0).unwrap();
        Field::from_radial_fn(grid, amps.len(), |k, r| {
            amps[k] * Complex64::from_polar((-(r / width).powi(2)).exp(), chirp * r * r)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauge_invariance_of_presets(z in prop::collection::vec(complex(), 3), theta in -6.3..6.3f64) {
        for spec in [
            presets::three_wave_a(3, 0.5, 1.0, 1.0).unwrap(),
            presets::three_wave_b(3, 0.5, 1.0, 1.0).unwrap(),
        ] {
            prop_assert!(gauge_residual(&spec, &z, theta) < 1e-12);
            prop_assert!(charge_identity_residual(&spec, &z) < 1e-12);
        }
        let two = presets::two_wave(3, 0.5, 1.0, 0.0).unwrap();
        prop_assert!(gauge_residual(&two, &z[..2], theta) < 1e-12);
    }

    #[test]
    fn nonlinear_flow_keeps_charge(u in radial_field(2), dt in 1e-5..1e-3f64) {
        // RK4 is not symplectic; the local charge error is fifth order in dt.
        let spec = presets::two_wave(2, 0.5, 1.0, 0.5).unwrap();
        let before = charge(&spec, &u).unwrap();
        let after = charge(&spec, &nonlinear_step(&spec, &u, dt, 1).unwrap()).unwrap();
        prop_assert!((after - before).abs() <= 1e-9 * before.max(1.0));
    }

    #[test]
    fn linear_flow_is_unitary(u in radial_field(3), dt in 1e-4..1e-1f64) {
        let spec = presets::three_wave_b(2, 0.5, 1.0, 1.0).unwrap();
        let v = linear_half_step(&spec, &u, dt).unwrap();
        for k in 0..3 {
            let grid = u.grid();
            let a = grid.l2_norm_sq(u.component(k));
            let b = grid.l2_norm_sq(v.component(k));
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn snapshot_round_trip(u in radial_field(2)) {
        let mut bytes = Vec::new();
        snapshot::encode(&u, &mut bytes).unwrap();
        let back = snapshot::decode(&mut bytes.as_slice()).unwrap();
        prop_assert_eq!(back.grid(), u.grid());
        prop_assert_eq!(back.components(), u.components());
    }
}
