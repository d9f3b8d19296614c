use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tfqd::gamma::gamma_fn;
use tfqd::spectral::{
    grad_mode, kappa, norm_envelope_check, propagate_mode, sobolev_interp_check, FractionalIndices, InitialDatum,
    Propagator,
};

fn catalog() -> Vec<InitialDatum> {
    vec![
        InitialDatum::gaussian(1).unwrap(),
        InitialDatum::gaussian(3).unwrap(),
        InitialDatum::annulus(1.0, 2.0, 1).unwrap(),
        InitialDatum::annulus(1.0, 2.0, 3).unwrap(),
        InitialDatum::annulus(1.0, 1.1, 2).unwrap(),
    ]
}

fn solution_norm(idx: FractionalIndices, datum: &InitialDatum, t: f64) -> f64 {
    let p = Propagator::new(idx);
    datum
        .radial_integral(|rho| p.mode(datum, rho, t).unwrap().u_hat.norm_sqr(), 1e-12, 0.0)
        .unwrap()
        .sqrt()
}

#[test]
fn unitary_when_both_orders_are_one() {
    let idx = FractionalIndices::new(1.0, 1.0).unwrap();
    for datum in catalog() {
        let n0 = datum.norm_squared().unwrap().sqrt();
        for &t in &[0.1, 1.0, 10.0] {
            let n = solution_norm(idx, &datum, t);
            assert!((n / n0 - 1.0).abs() < 1e-8, "{} t={t}", datum.id());
        }
    }
}

#[test]
fn algebraic_decay_of_a_mode() {
    // leading term −κ^{-1}/Γ(1−α); the κ^{-2} term vanishes since 1/Γ(0) = 0
    let idx = FractionalIndices::new(0.5, 1.0).unwrap();
    let d = InitialDatum::gaussian(1).unwrap();
    let u = propagate_mode(idx, &d, 1.0, 1e4).unwrap();
    let expected = d.profile(1.0) / (PI.sqrt() * 100.0);
    assert!((expected / d.profile(1.0) - 5.6419e-3).abs() < 1e-7);
    assert!((u.norm() / expected - 1.0).abs() < 1e-3);
}

#[test]
fn gradient_leading_term_at_late_time() {
    // ∂_ρû ≈ −(−i)^{−β} t^{−α} ρ^{−2} (f′/Γ(1−α) + 2f/(αρΓ(−α)))
    let alpha = 0.5;
    let idx = FractionalIndices::new(alpha, 1.0).unwrap();
    let d = InitialDatum::annulus(1.0, 2.0, 1).unwrap();
    let t: f64 = 1e6;
    for &rho in &[1.2, 1.5, 1.8] {
        let g = grad_mode(idx, &d, rho, t).unwrap();
        let bracket = d.profile_deriv(rho) / gamma_fn(1.0 - alpha).unwrap()
            + 2.0 * d.profile(rho) / (alpha * rho * gamma_fn(-alpha).unwrap());
        let leading = t.powf(-alpha) * bracket.abs() / (rho * rho);
        assert!(
            (g.norm() / leading - 1.0).abs() < 1e-3,
            "ρ={rho}: {} vs {leading}",
            g.norm()
        );
    }
}

#[test]
fn interpolation_inequality_examples() {
    let g = InitialDatum::gaussian(1).unwrap();
    assert!(sobolev_interp_check(&g, 0.5).unwrap().ok);
    let a = InitialDatum::annulus(1.0, 2.0, 3).unwrap();
    let c = sobolev_interp_check(&a, 0.7).unwrap();
    assert!(c.ok && c.lhs < c.rhs);
}

#[test]
fn interpolation_inequality_against_closed_form() {
    // Gaussian in d = 1: ‖ρ^s f‖² = 2∫ρ^{2s}e^{−ρ²} = Γ(s + 1/2)
    let g = InitialDatum::gaussian(1).unwrap();
    let alpha = 0.5;
    let c = sobolev_interp_check(&g, alpha).unwrap();
    let norm = |s: f64| gamma_fn(s + 0.5).unwrap().sqrt();
    assert!((c.lhs - norm(2.0)).abs() < 1e-10);
    let rhs = alpha * norm(2.0 / alpha) + (1.0 - alpha) * norm(0.0);
    assert!((c.rhs - rhs).abs() < 1e-10 * rhs);
}

#[test]
fn norm_envelope_unitary() {
    let idx = FractionalIndices::new(1.0, 1.0).unwrap();
    let d = InitialDatum::annulus(1.0, 2.0, 2).unwrap();
    let r = norm_envelope_check(idx, &d, 10.0, 10).unwrap();
    for g in &r.norms {
        assert!((g / r.initial_norm - 1.0).abs() < 1e-8);
    }
    assert!((r.sup_ratio.unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn norm_envelope_decays_when_alpha_below_beta() {
    let idx = FractionalIndices::new(0.5, 1.0).unwrap();
    let d = InitialDatum::annulus(1.0, 2.0, 1).unwrap();
    let r = norm_envelope_check(idx, &d, 20.0, 40).unwrap();
    assert!(r.sup_ratio.unwrap() < 10.0);
    let late: Vec<f64> = r
        .times
        .iter()
        .zip(&r.norms)
        .filter(|(&t, _)| t >= 1.0)
        .map(|(_, &g)| g)
        .collect();
    assert!(late.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn norm_envelope_rate_when_alpha_above_beta() {
    let idx = FractionalIndices::new(0.8, 0.4).unwrap();
    let d = InitialDatum::annulus(1.0, 1.1, 1).unwrap();
    let r = norm_envelope_check(idx, &d, 15.0, 150).unwrap();
    let c = (PI / 4.0).cos();
    let slope = r.log_slope(5.0, 15.0).unwrap();
    assert!(
        slope >= 0.95 * c && slope <= 1.05 * c * 1.1f64.powf(2.5),
        "slope {slope}"
    );
    assert!(r.damped_non_increasing.unwrap());
}

#[test]
fn gaussian_rejected_for_exponential_envelope() {
    let idx = FractionalIndices::new(0.8, 0.4).unwrap();
    assert!(norm_envelope_check(idx, &InitialDatum::gaussian(1).unwrap(), 1.0, 10).is_err());
}

fn indices() -> impl Strategy<Value = FractionalIndices> {
    (0.2f64..=1.0, 0.2f64..=1.0).prop_map(|(a, b)| FractionalIndices::new(a, b).unwrap())
}

fn datum() -> impl Strategy<Value = InitialDatum> {
    prop_oneof![
        (1u32..=3).prop_map(|d| InitialDatum::gaussian(d).unwrap()),
        (0.2f64..2.0, 0.05f64..1.5, 1u32..=3).prop_map(|(lo, w, d)| InitialDatum::annulus(lo, lo + w, d).unwrap()),
    ]
}

/// Data whose profile varies slowly enough for a 10⁻⁵ρ difference step.
fn smooth_datum() -> impl Strategy<Value = InitialDatum> {
    prop_oneof![
        (1u32..=3).prop_map(|d| InitialDatum::gaussian(d).unwrap()),
        (0.2f64..2.0, 0.5f64..1.5, 1u32..=3).prop_map(|(lo, w, d)| InitialDatum::annulus(lo, lo + w, d).unwrap()),
    ]
}

proptest! {
    #[test]
    fn initial_condition_recovery(idx in indices(), d in datum(), rho in 0.0f64..6.0) {
        let u = propagate_mode(idx, &d, rho, 0.0).unwrap();
        prop_assert!((u - d.profile(rho)).norm() < 1e-12);
        let g = grad_mode(idx, &d, rho, 0.0).unwrap();
        prop_assert!((g - d.profile_deriv(rho)).norm() < 1e-12);
    }

    #[test]
    fn kappa_scaling(idx in indices(), rho in 0.01f64..5.0, t in 0.01f64..50.0, lambda in 0.1f64..10.0) {
        let a = kappa(idx, rho * lambda.sqrt(), t);
        let b = kappa(idx, rho, lambda.powf(1.0 / idx.alpha) * t);
        prop_assert!((a - b).norm() <= 1e-14 * a.norm());
    }

    #[test]
    fn gradient_matches_finite_differences(
        idx in indices(),
        d in smooth_datum(),
        s in 0.1f64..0.9,
        u in 0.0f64..1.0,
    ) {
        // Gaussian data belong to the β ≥ α class only
        let idx = if d.lambda_minus == 0.0 && idx.beta < idx.alpha {
            FractionalIndices::new(idx.beta, idx.alpha).unwrap()
        } else {
            idx
        };
        let (lo, hi) = d.support();
        let hi = hi.min(5.0);
        let rho = lo + s * (hi - lo);
        // the fixed step must resolve the mode's phase and growth, whose
        // ρ-derivative is (2/α)ρ^{2/α−1}t
        let t = u * (100.0 / (2.0 / idx.alpha * rho.powf(2.0 / idx.alpha))).min(5.0);
        let h = 1e-5 * rho;
        let p = Propagator::new(idx);
        let u = |r: f64| p.mode(&d, r, t).unwrap().u_hat;
        let fd: Complex64 = (u(rho + h) - u(rho - h)) / (2.0 * h);
        let g = p.mode(&d, rho, t).unwrap().du_hat_drho;
        prop_assert!((fd - g).norm() <= 1e-6 * (1.0 + g.norm()), "ρ={} t={}: fd {} exact {}", rho, t, fd, g);
    }

    #[test]
    fn interpolation_inequality_holds(d in datum(), alpha in 0.2f64..=1.0) {
        prop_assert!(sobolev_interp_check(&d, alpha).unwrap().ok);
    }
}
