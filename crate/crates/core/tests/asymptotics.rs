use std::f64::consts::PI;

use proptest::prelude::*;
use tfqd::asymptotics::{default_grid, fit_exponential_rate, fit_power_law, verify};
use tfqd::msd::{coeff_regime2, log_time_grid, Msd, MsdSeries, QuadratureSpec};
use tfqd::spectral::{FractionalIndices, InitialDatum, Regime};
use tfqd::Error;

fn idx(a: f64, b: f64) -> FractionalIndices {
    FractionalIndices::new(a, b).unwrap()
}

fn sample(i: FractionalIndices, d: InitialDatum, lo: f64, hi: f64, ppd: usize) -> MsdSeries {
    let grid = log_time_grid(lo, hi, ppd).unwrap();
    Msd::new(i, d, QuadratureSpec::default())
        .unwrap()
        .series(&grid)
        .unwrap()
}

#[test]
fn decay_exponent_from_simulation() {
    let s = sample(idx(0.5, 1.0), InitialDatum::annulus(1.0, 2.0, 1).unwrap(), 1e3, 1e5, 20);
    let fit = fit_power_law(&s).unwrap();
    assert!((fit.exponent + 1.0).abs() < 0.05, "{}", fit.exponent);
}

#[test]
fn ballistic_exponent_from_simulation() {
    let s = sample(idx(0.5, 0.5), InitialDatum::gaussian(1).unwrap(), 1e2, 1e4, 10);
    let fit = fit_power_law(&s).unwrap();
    assert!((fit.exponent - 2.0).abs() < 0.02, "{}", fit.exponent);
}

#[test]
fn verify_classical_ballistic() {
    let i = idx(1.0, 1.0);
    let d = InitialDatum::gaussian(1).unwrap();
    let r = verify(i, &d, &default_grid(i, &d).unwrap(), &QuadratureSpec::default()).unwrap();
    assert_eq!(r.regime, Regime::Ballistic);
    assert!((r.fitted_exponent.unwrap() - 2.0).abs() < 0.01);
    assert!((r.fitted_coefficient / (2.0 * PI.sqrt()) - 1.0).abs() < 0.01);
    assert!(r.deviations.coefficient.unwrap().abs() < 0.01);
    assert!(r.fitted_rate.is_none() && r.theory_rate_bracket.is_none());
}

#[test]
fn verify_decay_regime() {
    let i = idx(0.4, 0.8);
    let d = InitialDatum::annulus(1.0, 2.0, 3).unwrap();
    let r = verify(i, &d, &log_time_grid(1e2, 1e5, 10).unwrap(), &QuadratureSpec::default()).unwrap();
    assert_eq!(r.regime, Regime::SubordinateDecay);
    assert!(r.deviations.exponent.unwrap().abs() < 0.05);
    assert!(r.deviations.coefficient.unwrap().abs() < 0.05);
    assert!(r.deviations.endpoint_coefficient.unwrap().abs() < 0.05);
    assert_eq!(r.theory_exponent, Some(-0.8));
}

#[test]
fn verify_growth_regime() {
    let i = idx(0.9, 0.3);
    let d = InitialDatum::annulus(1.0, 1.1, 1).unwrap();
    let r = verify(i, &d, &default_grid(i, &d).unwrap(), &QuadratureSpec::default()).unwrap();
    assert_eq!(r.regime, Regime::ExponentialGrowth);
    assert_eq!(r.deviations.rate_in_bracket, Some(true));
    assert!(r.fitted_exponent.is_none() && r.theory_coefficient.is_none());
}

#[test]
fn growth_rate_bracket_and_narrow_annulus() {
    let i = idx(0.8, 0.4);
    let wide = InitialDatum::annulus(1.0, 1.1, 1).unwrap();
    let r = verify(i, &wide, &default_grid(i, &wide).unwrap(), &QuadratureSpec::default()).unwrap();
    let (lo, hi) = r.theory_rate_bracket.unwrap();
    assert!((lo - 2f64.sqrt()).abs() < 1e-14);
    assert!(lo <= r.fitted_rate.unwrap() && r.fitted_rate.unwrap() <= hi);

    let narrow = InitialDatum::annulus(1.0, 1.01, 1).unwrap();
    let r = verify(
        i,
        &narrow,
        &default_grid(i, &narrow).unwrap(),
        &QuadratureSpec::default(),
    )
    .unwrap();
    let centre = 2.0 * (PI * 0.4 / 1.6).cos() * 1.005f64.powf(2.5);
    assert!((r.fitted_rate.unwrap() / centre - 1.0).abs() < 0.03);
}

#[test]
fn growth_rate_falls_toward_regime_boundary() {
    let alpha = 0.8;
    let d = InitialDatum::annulus(1.0, 1.1, 1).unwrap();
    let rates: Vec<f64> = [0.5, 0.7, 0.9]
        .iter()
        .map(|f| {
            let i = idx(alpha, f * alpha);
            let r = verify(i, &d, &default_grid(i, &d).unwrap(), &QuadratureSpec::default()).unwrap();
            r.fitted_rate.unwrap()
        })
        .collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "{rates:?}");
}

#[test]
fn ballistic_coefficient_converges() {
    let i = idx(0.5, 0.5);
    let d = InitialDatum::gaussian(1).unwrap();
    let s = sample(i, d, 1e3, 1e4, 10);
    let fit = fit_power_law(&s).unwrap();
    assert!((fit.coefficient / coeff_regime2(&d, 0.5).unwrap() - 1.0).abs() < 0.01);
}

#[test]
fn gaussian_rejected_for_growth_and_decay_constants() {
    let d = InitialDatum::gaussian(1).unwrap();
    let grid = log_time_grid(1.0, 10.0, 10).unwrap();
    assert!(matches!(
        verify(idx(0.8, 0.4), &d, &grid, &QuadratureSpec::default()),
        Err(Error::UnsupportedDatum(_))
    ));
    assert!(matches!(
        verify(idx(0.4, 0.8), &d, &grid, &QuadratureSpec::default()),
        Err(Error::Divergent(_))
    ));
}

fn series(times: Vec<f64>, values: Vec<f64>) -> MsdSeries {
    MsdSeries::from_samples(times, values, idx(1.0, 1.0))
}

proptest! {
    #[test]
    fn power_law_fit_is_exact(p in -3.0f64..3.0, c in 1e-3f64..1e3, lo in 0.01f64..10.0, n in 10usize..60) {
        let times: Vec<f64> = (0..n).map(|k| lo * 1.3f64.powi(k as i32)).collect();
        let values = times.iter().map(|t| c * t.powf(p)).collect();
        let fit = fit_power_law(&series(times, values)).unwrap();
        prop_assert!((fit.exponent - p).abs() < 1e-10);
        prop_assert!((fit.coefficient / c - 1.0).abs() < 1e-9);
        prop_assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_fit_is_exact(r in 0.01f64..3.0, a in 1e-3f64..1e3, n in 10usize..60) {
        let times: Vec<f64> = (1..=n).map(|k| 0.5 * k as f64).collect();
        let values = times.iter().map(|t| a * t * (r * t).exp()).collect();
        let fit = fit_exponential_rate(&series(times, values)).unwrap();
        prop_assert!((fit.rate - r).abs() < 1e-10);
        prop_assert!((fit.log_prefactor - a.ln()).abs() < 1e-9);
        prop_assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_invariant_under_rescaling(
        values in prop::collection::vec(1e-3f64..1e3, 10..40),
        scale in 1e-6f64..1e6,
    ) {
        let times: Vec<f64> = (1..=values.len()).map(|k| k as f64).collect();
        let scaled = values.iter().map(|v| v * scale).collect();
        let a = fit_power_law(&series(times.clone(), values)).unwrap();
        let b = fit_power_law(&series(times, scaled)).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() < 1e-12 * (1.0 + a.exponent.abs()));
        prop_assert!((b.coefficient / a.coefficient / scale - 1.0).abs() < 1e-9);
    }
}
