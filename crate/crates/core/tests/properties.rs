use motorcargo_core::averaging::one_motor_bracket;
use motorcargo_core::nondim::{nondimensionalize_trajectory, DimensionlessPath};
use motorcargo_core::*;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = PhysicalParams> {
    (1e-6f64..1e-2, 100.0f64..1000.0, 0.05f64..2.0, 2.0f64..10.0, 1000.0f64..10000.0, -5.0f64..5.0).prop_map(
        |(gamma, v, kappa, fstar, sigma2, theta)| {
            let mut p = PhysicalParams::kinesin_invitro().with_friction(gamma).with_trap_force(theta);
            p.free_velocity = v;
            p.v_max = 1.2 * v;
            p.v_min = -0.1 * v;
            p.spring_kappa = kappa;
            p.stall_force = fstar;
            p.motor_diffusion_sigma2 = sigma2;
            p
        },
    )
}

/// `(v_max, v_min, v)` satisfying the sigmoid constraints.
fn sigmoid_velocities() -> impl Strategy<Value = (f64, f64, f64)> {
    (100.0f64..1000.0, 0.01f64..0.9, 0.01f64..0.99).prop_map(|(v_max, neg, frac)| {
        let v_min = -neg * v_max;
        let lo = 0.5 * (v_max + v_min);
        (v_max, v_min, lo + frac * (v_max - lo))
    })
}

proptest! {
    #[test]
    fn groups_identities(p in params()) {
        let law = SpringLaw::linear(p.spring_kappa);
        let g = compute_groups(&p, &law).unwrap();
        prop_assert!((g.epsilon * g.rho - g.sigma_mc2()).abs() <= 1e-12 * g.sigma_mc2());
        let gamma = p.friction();
        let g2 = compute_groups(&p.with_friction(2.0 * gamma), &law).unwrap();
        prop_assert!((g2.epsilon / g.epsilon - 2.0).abs() < 1e-12);
        prop_assert!((g2.stallibility - g.stallibility).abs() <= 1e-14 * g.stallibility);
        let mut pv = p;
        pv.free_velocity *= 1.5;
        pv.v_max *= 1.5;
        pv.v_min *= 1.5;
        let gv = compute_groups(&pv, &law).unwrap();
        prop_assert!((gv.epsilon / g.epsilon - 1.5).abs() < 1e-12);
        prop_assert!((gv.stallibility - g.stallibility).abs() <= 1e-14 * g.stallibility);
    }

    #[test]
    fn linear_spring_is_odd(kappa in 1e-3f64..10.0, r in -1e3f64..1e3) {
        let law = SpringLaw::linear(kappa);
        prop_assert_eq!(spring_force(&law, -r).unwrap(), -spring_force(&law, r).unwrap());
    }

    #[test]
    fn wlc_spring_is_odd(kappa in 1e-2f64..2.0, lc in 10.0f64..200.0, frac in -0.999f64..0.999) {
        let law = SpringLaw::wormlike_chain(kappa, lc).unwrap();
        let r = frac * lc;
        let (a, b) = (spring_force(&law, r).unwrap(), spring_force(&law, -r).unwrap());
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1e-300));
        prop_assert!(a * r >= 0.0);
    }

    #[test]
    fn sigmoid_normalized_and_decreasing((v_max, v_min, v) in sigmoid_velocities(), f in -50.0f64..50.0) {
        let c = ForceVelocityCurve::sigmoid(v_max, v_min, v).unwrap();
        prop_assert!((c.value(0.0) - 1.0).abs() < 1e-9);
        prop_assert!(c.value(1.0).abs() < 1e-9);
        prop_assert!(c.derivative(f) <= 0.0);
        let (hi, lo) = c.asymptotes();
        prop_assert!(c.value(f) >= lo - 1e-12 && c.value(f) <= hi + 1e-12);
    }

    #[test]
    fn gaussian_average_exact_for_linear(m in -20.0f64..20.0, var in 0.0f64..10.0) {
        let avg = gaussian_average(&ForceVelocityCurve::Linear, m, var).unwrap();
        prop_assert!((avg.value - (1.0 - m)).abs() <= 1e-10 * (1.0 + m.abs()));
        prop_assert!(!avg.flagged);
    }

    #[test]
    fn rescale_round_trip(
        x in prop::collection::vec(-1e3f64..1e3, 1..40),
        slow in any::<bool>(),
        p in params(),
    ) {
        let g = compute_groups(&p, &SpringLaw::linear(p.spring_kappa)).unwrap();
        let base = if slow { TimeBase::Slow } else { TimeBase::Fast };
        let times: Vec<f64> = (0..x.len()).map(|k| 0.37 * k as f64).collect();
        let path = DimensionlessPath { time_base: base, times, positions: x, width: 1 };
        let back = nondimensionalize_trajectory(&rescale_trajectory(&path, &g).unwrap(), base, &g).unwrap();
        for (a, b) in path.times.iter().zip(&back.times).chain(path.positions.iter().zip(&back.positions)) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pi_r_even_at_zero_load(s in 0.05f64..1.0, rho in 0.5f64..4.0, fluct in any::<bool>()) {
        let c = ForceVelocityCurve::sigmoid(600.0, -50.0, 500.0).unwrap();
        let fixed = FixedCargo { curve: &c, s };
        let fl = FluctuatingCargo::new(&c, s);
        let drift: &dyn PairDrift = if fluct { &fl } else { &fixed };
        let pi = pi_r_density(drift, rho, 0.0).unwrap();
        let p = pi.pdf();
        let n = p.len();
        for k in 0..n {
            prop_assert!((p[k] - p[n - 1 - k]).abs() <= 1e-10);
        }
        prop_assert!((pi.integrate(|_| 1.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pi_y_normalized(eps in 1e-4f64..5.0, s in 0.05f64..1.0, rho in 0.5f64..4.0, th in -3.0f64..6.0) {
        let c = ForceVelocityCurve::sigmoid(600.0, -50.0, 500.0).unwrap();
        let g = DimensionlessGroups::from_values(eps, s, rho, th).unwrap();
        let pi = pi_y_density(&c, &g).unwrap();
        prop_assert!((pi.integrate(|_| 1.0) - 1.0).abs() < 1e-8);
        prop_assert!(pi.pdf().iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn stall_force_scales_with_curve_argument(s in 0.05f64..1.0, k in 0.25f64..4.0) {
        // Stretching the load axis by k shrinks the rescaled stall by k.
        let c = ForceVelocityCurve::sigmoid(600.0, -50.0, 500.0).unwrap();
        let var = s * s / 2.0;
        let a = stall_force(|th| Ok(gaussian_average(&c, s * th, var)?.value), one_motor_bracket(s)).unwrap();
        let b = stall_force(|th| Ok(gaussian_average(&c, k * s * th, var)?.value), one_motor_bracket(k * s)).unwrap();
        prop_assert!((a.theta - k * b.theta).abs() < 1e-3 * (1.0 + k), "{} vs {}", a.theta, k * b.theta);
    }
}
