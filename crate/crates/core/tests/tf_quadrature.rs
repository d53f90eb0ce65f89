use bec_core::affine::{integrate_lambda_observed, AdaptiveState};
use bec_core::com::ComState;
use bec_core::linalg::{Matrix, Vector};
use bec_core::thomas_fermi::{
    chemical_potential_tf, integrated_density, tf_density, tf_phase, tf_second_moment, TFModel, TFSnapshot,
};
use bec_core::trap::{RotatingTrap, RotationSchedule, TrapConfig};

/// Gauss-Legendre nodes and weights on [−1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// ∫ f over the interval where the quadratic `q` is positive, with the
/// substitution t = c + w sin θ to smooth the endpoint behavior.
fn over_positive_part(q: impl Fn(f64) -> f64, f: impl Fn(f64) -> f64) -> f64 {
    // q(t) = a t² + b t + c from three samples
    let (q0, q1, qm) = (q(0.0), q(1.0), q(-1.0));
    let a = 0.5 * (q1 + qm) - q0;
    let b = 0.5 * (q1 - qm);
    let disc = b * b - 4.0 * a * q0;
    if a >= 0.0 || disc <= 0.0 {
        return 0.0;
    }
    let center = -b / (2.0 * a);
    let half = disc.sqrt() / (2.0 * a.abs());
    let h = std::f64::consts::FRAC_PI_2;
    gauss_legendre(64)
        .iter()
        .map(|&(x, w)| {
            let th = h * x;
            w * h * half * th.cos() * f(center + half * th.sin())
        })
        .sum()
}

fn rotated_model_and_snapshot() -> (TFModel<f64>, TFSnapshot<f64>) {
    let cfg = TrapConfig::new(&[1.0, 1.5, 0.8], 1.0, 500.0, 1.0).unwrap();
    let r0 = Vector::from_slice(&[0.3, -0.2, 0.1]);
    let model = TFModel::new(&cfg, r0, Vector::zeros(3)).unwrap();
    let a = AdaptiveState {
        lam: Matrix::from_row_slice(3, &[1.2, 0.3, 0.0, -0.2, 0.9, 0.1, 0.1, 0.0, 1.1]),
        lam_dot: Matrix::zeros(3),
        t: 0.0,
        beta: 0.0,
    };
    let snap = TFSnapshot::from_states(&model, &a, &ComState::new(r0, Vector::zeros(3))).unwrap();
    (model, snap)
}

#[test]
fn one_axis_integrated_out_matches_closed_form() {
    let (model, snap) = rotated_model_and_snapshot();
    let inner =
        |p: [f64; 3]| model.mu_tf - 0.5 * model.mass * snap.sigma_inv.quad(&(Vector::from_slice(&p) - snap.r_com));
    for k in 0..10 {
        let (x, y) = (0.3 + 0.5 * (k as f64 * 1.3).sin(), -0.2 + 0.7 * (k as f64 * 0.7).cos());
        let num =
            over_positive_part(|z| inner([x, y, z]), |z| tf_density(&model, &snap, &Vector::from_slice(&[x, y, z])));
        let exact = integrated_density(&model, &snap, &[0, 1], &Vector::from_slice(&[x, y])).unwrap();
        assert!((num - exact).abs() < 1e-6 * exact, "{num} vs {exact}");
    }
}

#[test]
fn two_axes_integrated_out_matches_closed_form() {
    let (model, snap) = rotated_model_and_snapshot();
    let inner =
        |p: [f64; 3]| model.mu_tf - 0.5 * model.mass * snap.sigma_inv.quad(&(Vector::from_slice(&p) - snap.r_com));
    for k in 0..10 {
        let x = 0.3 + 0.8 * (k as f64 * 2.1).sin();
        // the (y, z) region is an ellipse; its extent in y comes from the
        // maximum over z, itself a quadratic in y
        let max_over_z = |y: f64| {
            let (a0, a1, am) = (inner([x, y, 0.0]), inner([x, y, 1.0]), inner([x, y, -1.0]));
            let a = 0.5 * (a1 + am) - a0;
            let b = 0.5 * (a1 - am);
            a0 - b * b / (4.0 * a)
        };
        let num = over_positive_part(max_over_z, |y| {
            over_positive_part(|z| inner([x, y, z]), |z| tf_density(&model, &snap, &Vector::from_slice(&[x, y, z])))
        });
        let exact = integrated_density(&model, &snap, &[0], &Vector::from_slice(&[x])).unwrap();
        assert!((num - exact).abs() < 1e-6 * exact, "{num} vs {exact}");
    }
}

fn plane_integral(model: &TFModel<f64>, snap: &TFSnapshot<f64>, weight: impl Fn(f64, f64) -> f64) -> f64 {
    let inner = |x: f64, y: f64| {
        model.mu_tf - 0.5 * model.mass * snap.sigma_inv.quad(&(Vector::from_slice(&[x, y]) - snap.r_com))
    };
    let max_over_y = |x: f64| {
        let (a0, a1, am) = (inner(x, 0.0), inner(x, 1.0), inner(x, -1.0));
        let a = 0.5 * (a1 + am) - a0;
        let b = 0.5 * (a1 - am);
        a0 - b * b / (4.0 * a)
    };
    over_positive_part(max_over_y, |x| {
        over_positive_part(|y| inner(x, y), |y| tf_density(model, snap, &Vector::from_slice(&[x, y])) * weight(x, y))
    })
}

#[test]
fn normalization_is_time_independent_on_a_rotating_run() {
    let cfg = TrapConfig::anisotropic_2d(1.5, 1.0, 100.0).unwrap();
    let t_end = 30.0 * std::f64::consts::PI;
    let trap = RotatingTrap::new(cfg.clone(), RotationSchedule::smoothstep(0.4, t_end)).unwrap();
    let model = TFModel::new(&cfg, Vector::zeros(2), Vector::zeros(2)).unwrap();
    let com = ComState::at_rest(2);
    let mut checked = 0;
    let stride = (t_end / 4.0 / 1e-3).round() as usize;
    let mut k = 0;
    integrate_lambda_observed(
        &AdaptiveState::initial(2),
        &trap,
        &cfg.omega_sq_0(),
        1e-3,
        4 * stride,
        model.mu_tf,
        |s| {
            k += 1;
            if k % stride == 0 || k == 1 {
                let snap = TFSnapshot::from_states(&model, s, &com).unwrap();
                let n = plane_integral(&model, &snap, |_, _| 1.0);
                assert!((n - 100.0).abs() < 1e-5 * 100.0, "t={} N={n}", s.t);
                checked += 1;
            }
        },
    )
    .unwrap();
    assert_eq!(checked, 5);
}

#[test]
fn second_moment_matches_quadrature() {
    let w0 = Matrix::from_row_slice(2, &[1.4, 0.5, 0.5, 2.0]);
    let model = TFModel::with_trap_matrix(w0, 0.7, 150.0, 1.0).unwrap();
    let snap = model.initial_snapshot();
    let n = plane_integral(&model, &snap, |_, _| 1.0);
    assert!((n - 150.0).abs() < 1e-9 * 150.0);
    let m = tf_second_moment(&model);
    let xx = plane_integral(&model, &snap, |x, _| x * x) / n;
    let xy = plane_integral(&model, &snap, |x, y| x * y) / n;
    let yy = plane_integral(&model, &snap, |_, y| y * y) / n;
    assert!((xx - m[(0, 0)]).abs() < 1e-6 * m[(0, 0)]);
    assert!((xy - m[(0, 1)]).abs() < 1e-6 * m[(0, 0)]);
    assert!((yy - m[(1, 1)]).abs() < 1e-6 * m[(1, 1)]);
}

#[test]
fn chemical_potential_normalizes_the_profile() {
    // d = 2: area quadrature over the ellipse
    let cfg = TrapConfig::anisotropic_2d(1.5, 1.0, 100.0).unwrap();
    let mu = chemical_potential_tf(&cfg).unwrap();
    assert!((mu - 0.5 * (4.0 / std::f64::consts::PI * 150.0f64).sqrt()).abs() < 1e-12);
    // d = 3 isotropic: radial quadrature 4π∫ r² (μ − r²/2)/g dr
    let cfg3 = TrapConfig::isotropic(3, 1.0, 0.1, 1000.0).unwrap();
    let mu3: f64 = chemical_potential_tf(&cfg3).unwrap();
    let rmax = (2.0 * mu3).sqrt();
    let n: f64 = gauss_legendre(32)
        .iter()
        .map(|&(x, w)| {
            let r = 0.5 * rmax * (x + 1.0);
            w * 0.5 * rmax * 4.0 * std::f64::consts::PI * r * r * (mu3 - 0.5 * r * r) / 0.1
        })
        .sum();
    assert!((n - 1000.0).abs() < 1e-9 * 1000.0);
    // doubling N scales μ by 2^(2/(d+2))
    let doubled = chemical_potential_tf(&TrapConfig::isotropic(3, 1.0, 0.1, 2000.0).unwrap()).unwrap();
    assert!((doubled / mu3 - 2f64.powf(0.4)).abs() < 1e-12);
}

#[test]
fn phase_gradient_is_the_local_momentum() {
    let (model, mut snap) = rotated_model_and_snapshot();
    snap.c_mat = Matrix::from_row_slice(3, &[0.2, 0.05, 0.0, 0.05, -0.1, 0.02, 0.0, 0.02, 0.3]);
    snap.p_com = Vector::from_slice(&[0.4, -0.1, 0.2]);
    snap.s2 = 0.7;
    snap.beta = 0.2;
    let r = Vector::from_slice(&[0.5, 0.1, -0.4]);
    let expect = snap.c_mat * (r - snap.r_com) * model.mass + snap.p_com;
    let h = 1e-5;
    for i in 0..3 {
        let e = Vector::unit(3, i) * h;
        let fd = (tf_phase(&model, &snap, &(r + e), false).unwrap()
            - tf_phase(&model, &snap, &(r - e), false).unwrap())
            / (2.0 * h);
        assert!((fd - expect[i]).abs() < 1e-6);
    }
    let model0 = TFModel { r0: Vector::zeros(3), ..model.clone() };
    let snap0 = TFSnapshot { p_com: Vector::from_slice(&[0.4, -0.1, 0.2]), ..model0.initial_snapshot() };
    let phi = tf_phase(&model0, &snap0, &r, false).unwrap();
    assert!((phi - snap0.p_com.dot(&r)).abs() < 1e-14);
}
