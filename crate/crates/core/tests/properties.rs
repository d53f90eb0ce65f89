use bec_core::affine::{canonical_map, AdaptiveState};
use bec_core::linalg::{Matrix, Vector};
use bec_core::trap::{omega_squared_rotating, Ramp, RotationSchedule, TrapConfig};
use bec_core::{GpeParams, Grid2D, Propagator};
use num_complex::Complex;
use proptest::prelude::*;

fn spd2() -> impl Strategy<Value = Matrix<f64>> {
    (0.3f64..3.0, 0.3f64..3.0, -1.5f64..1.5).prop_map(|(a, b, th)| {
        let r = Matrix::rotation_2d(th);
        r * Matrix::from_diag(&[a, b]) * r.transpose()
    })
}

fn well_conditioned_lambda() -> impl Strategy<Value = Matrix<f64>> {
    (0.6f64..1.8, 0.6f64..1.8, -1.5f64..1.5, -1.5f64..1.5)
        .prop_map(|(a, b, t1, t2)| Matrix::rotation_2d(t1) * Matrix::from_diag(&[a, b]) * Matrix::rotation_2d(t2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_map_round_trip(w in spd2(), lam in well_conditioned_lambda(), ld in well_conditioned_lambda()) {
        let s = AdaptiveState { lam, lam_dot: ld * 0.3, t: 0.0, beta: 0.0 };
        let cs = canonical_map(&s, &w).unwrap();
        let (l, d) = cs.to_original();
        prop_assert!((l - lam).max_abs() < 1e-12);
        prop_assert!((d - ld * 0.3).max_abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_trap_spectrum(eps in 1.0f64..2.5, rate in 0.0f64..0.7, tau in 0.0f64..200.0) {
        let cfg = TrapConfig::anisotropic_2d(eps, 1.0, 100.0).unwrap();
        let sched = RotationSchedule { rate_end: rate, t_end: 50.0, t_off: None, ramp: Ramp::Smoothstep };
        let w = omega_squared_rotating(&cfg, &sched, tau).unwrap();
        let (ev, _) = w.sym_eigen();
        prop_assert!((ev[0] - 1.0).abs() < 1e-12);
        prop_assert!((ev[1] - eps * eps).abs() < 1e-12 * eps * eps);
    }

    #[test]
    fn inverse_is_two_sided(lam in well_conditioned_lambda()) {
        let inv = lam.inverse().unwrap();
        prop_assert!((inv * lam - Matrix::identity(2)).max_abs() < 1e-13);
        prop_assert!((lam * inv - Matrix::identity(2)).max_abs() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn warped_laplacian_of_gaussian(lam in well_conditioned_lambda()) {
        let grid = Grid2D::new(128, 20.0).unwrap();
        let params = GpeParams { omega_sq_0: Matrix::identity(2), g: 0.0, mass: 1.0, mu: 0.0 };
        let mut p = Propagator::new(grid, params).unwrap();
        let amps: Vec<Complex<f64>> = (0..grid.len())
            .map(|k| {
                let (x, y) = (grid.x(k / grid.ny), grid.y(k % grid.ny));
                Complex::new((-(x * x + y * y) / 2.0).exp(), 0.0)
            })
            .collect();
        let lap = p.warped_laplacian(&amps, &lam).unwrap();
        let inv = lam.inverse().unwrap();
        let m = inv * inv.transpose();
        for k in 0..grid.len() {
            let r = Vector::from_slice(&[grid.x(k / grid.ny), grid.y(k % grid.ny)]);
            let expect = (m.quad(&r) - m.trace()) * (-r.dot(&r) / 2.0).exp();
            prop_assert!((lap[k].re - expect).abs() < 1e-8 && lap[k].im.abs() < 1e-8);
        }
    }
}
