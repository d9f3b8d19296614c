//! Large-t fits of sampled MSD series and comparison with the leading-order
//! predictions of each regime.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::msd::{
    coeff_regime1, coeff_regime2, log_time_grid, overflow_horizon, rate_bounds_regime3, Msd, MsdSeries, QuadratureSpec,
    DEFAULT_POINTS_PER_DECADE,
};
use crate::spectral::{FractionalIndices, InitialDatum, Regime};

/// Minimum number of samples accepted by the fits.
pub const MIN_FIT_SAMPLES: usize = 10;

pub fn classify_regime(idx: FractionalIndices) -> Regime {
    idx.regime()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub rate: f64,
    pub log_prefactor: f64,
    pub r_squared: f64,
}

pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub(crate) fn least_squares(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&u, &v)| (u - mx) * (v - my)).sum();
    let syy: f64 = y.iter().map(|&v| (v - my) * (v - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&u, &v)| (v - intercept - slope * u).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

fn check_series(series: &MsdSeries) -> Result<()> {
    if series.times.len() != series.values.len() {
        return Err(Error::DegenerateFit("times and values differ in length".into()));
    }
    if series.len() < MIN_FIT_SAMPLES {
        return Err(Error::DegenerateFit(format!(
            "need at least {MIN_FIT_SAMPLES} samples, got {}",
            series.len()
        )));
    }
    if let Some(v) = series.values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit(format!(
            "sample value {v} is not positive and finite"
        )));
    }
    if let Some(t) = series.times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::DegenerateFit(format!(
            "sample time {t} is not positive and finite"
        )));
    }
    Ok(())
}

/// Ordinary least squares of log D₂ on log t.
pub fn fit_power_law(series: &MsdSeries) -> Result<PowerLawFit> {
    check_series(series)?;
    let x: Vec<f64> = series.times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = series.values.iter().map(|v| v.ln()).collect();
    let fit = least_squares(&x, &y)?;
    Ok(PowerLawFit {
        exponent: fit.slope,
        coefficient: fit.intercept.exp(),
        r_squared: fit.r_squared,
    })
}

/// Ordinary least squares of log D₂ − log t on t, matching the shape
/// D₂ ≈ A·t·e^{rt}.
pub fn fit_exponential_rate(series: &MsdSeries) -> Result<ExponentialFit> {
    check_series(series)?;
    let y: Vec<f64> = series
        .times
        .iter()
        .zip(&series.values)
        .map(|(t, v)| v.ln() - t.ln())
        .collect();
    let fit = least_squares(&series.times, &y)?;
    Ok(ExponentialFit {
        rate: fit.slope,
        log_prefactor: fit.intercept,
        r_squared: fit.r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Deviations {
    /// fitted exponent − theory exponent.
    pub exponent: Option<f64>,
    /// fitted coefficient / theory coefficient − 1.
    pub coefficient: Option<f64>,
    /// D₂(t)·t^{−p}/C − 1 at the last sample, p the theory exponent.
    pub endpoint_coefficient: Option<f64>,
    pub rate_in_bracket: Option<bool>,
    /// fitted rate / bracket midpoint − 1.
    pub rate_vs_midpoint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub fitted_exponent: Option<f64>,
    pub fitted_rate: Option<f64>,
    pub fitted_coefficient: f64,
    pub theory_exponent: Option<f64>,
    pub theory_coefficient: Option<f64>,
    pub theory_rate_bracket: Option<(f64, f64)>,
    pub r_squared: f64,
    pub deviations: Deviations,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Fitting window per regime: [10², 10⁵] for α < β, [10³, 10⁴] for α = β and
/// [max(5, 10/r), T_max] for α > β with r the bracket midpoint.
pub fn default_window(idx: FractionalIndices, datum: &InitialDatum) -> Result<(f64, f64)> {
    match idx.regime() {
        Regime::SubordinateDecay => Ok((1e2, 1e5)),
        Regime::Ballistic => Ok((1e3, 1e4)),
        Regime::ExponentialGrowth => {
            let (lo, hi) = rate_bounds_regime3(idx, datum)?;
            let horizon = overflow_horizon(idx, datum).expect("regime checked");
            let start = (10.0 / (0.5 * (lo + hi))).max(5.0);
            if start >= horizon {
                return Err(Error::InvalidParameter(format!(
                    "fitting window start {start} is past the overflow horizon {horizon}"
                )));
            }
            Ok((start, horizon))
        }
    }
}

pub fn default_grid(idx: FractionalIndices, datum: &InitialDatum) -> Result<Vec<f64>> {
    let (lo, hi) = default_window(idx, datum)?;
    log_time_grid(lo, hi, DEFAULT_POINTS_PER_DECADE)
}

/// Leading-order term of D₂ at time t, if the regime has a closed form.
pub fn theory_leading(idx: FractionalIndices, datum: &InitialDatum, t: f64) -> Result<Option<f64>> {
    Ok(match idx.regime() {
        Regime::SubordinateDecay => Some(coeff_regime1(datum, idx.alpha)? * t.powf(-2.0 * idx.alpha)),
        Regime::Ballistic => Some(coeff_regime2(datum, idx.alpha)? * t * t),
        Regime::ExponentialGrowth => None,
    })
}

/// Rate written with πβ/α in place of πβ/(2α); reported next to the fitted
/// rate so the two formulas can be told apart.
pub fn alternative_rate(idx: FractionalIndices, lambda: f64) -> f64 {
    2.0 * (PI * idx.beta / idx.alpha).cos() * lambda.powf(2.0 / idx.alpha)
}

/// Samples D₂ on `t_grid`, fits the regime's law and compares with theory.
pub fn verify(
    idx: FractionalIndices,
    datum: &InitialDatum,
    t_grid: &[f64],
    quad: &QuadratureSpec,
) -> Result<RegimeReport> {
    let series = Msd::new(idx, *datum, *quad)?.series(t_grid)?;
    report_from_series(&series, datum)
}

/// Fit and comparison for an already sampled series.
pub fn report_from_series(series: &MsdSeries, datum: &InitialDatum) -> Result<RegimeReport> {
    let idx = series.idx;
    let regime = idx.regime();
    let window = (
        *series.times.first().unwrap_or(&0.0),
        *series.times.last().unwrap_or(&0.0),
    );
    let mut report = RegimeReport {
        regime,
        fitted_exponent: None,
        fitted_rate: None,
        fitted_coefficient: 0.0,
        theory_exponent: None,
        theory_coefficient: None,
        theory_rate_bracket: None,
        r_squared: 0.0,
        deviations: Deviations::default(),
        window,
        samples: series.len(),
    };
    match regime {
        Regime::SubordinateDecay | Regime::Ballistic => {
            let fit = fit_power_law(series)?;
            let (p, c) = if regime == Regime::Ballistic {
                (2.0, coeff_regime2(datum, idx.alpha)?)
            } else {
                (-2.0 * idx.alpha, coeff_regime1(datum, idx.alpha)?)
            };
            report.fitted_exponent = Some(fit.exponent);
            report.fitted_coefficient = fit.coefficient;
            report.r_squared = fit.r_squared;
            report.theory_exponent = Some(p);
            report.theory_coefficient = Some(c);
            let (t_last, d_last) = (window.1, *series.values.last().expect("fit checked length"));
            report.deviations = Deviations {
                exponent: Some(fit.exponent - p),
                coefficient: Some(fit.coefficient / c - 1.0),
                endpoint_coefficient: Some(d_last * t_last.powf(-p) / c - 1.0),
                ..Deviations::default()
            };
        }
        Regime::ExponentialGrowth => {
            let fit = fit_exponential_rate(series)?;
            let (lo, hi) = rate_bounds_regime3(idx, datum)?;
            report.fitted_rate = Some(fit.rate);
            report.fitted_coefficient = fit.log_prefactor.exp();
            report.r_squared = fit.r_squared;
            report.theory_rate_bracket = Some((lo, hi));
            report.deviations = Deviations {
                rate_in_bracket: Some(lo <= fit.rate && fit.rate <= hi),
                rate_vs_midpoint: Some(fit.rate / (0.5 * (lo + hi)) - 1.0),
                ..Deviations::default()
            };
        }
    }
    Ok(report)
}
