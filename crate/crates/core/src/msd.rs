//! Mean-square displacement D₂(t) = ‖∇û(·,t)‖² and its leading asymptotic
//! constants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::gamma_fn;
use crate::quadrature::{integrate_gk, integrate_gl, QuadResult, DEFAULT_MAX_INTERVALS};
use crate::spectral::{DatumClass, FractionalIndices, InitialDatum, Propagator, Regime};

/// Largest r₊·t accepted by [`msd_at`]; e^{690} is close to the top of the
/// double range.
pub const OVERFLOW_EXPONENT: f64 = 690.0;

/// r₊·T_max for the default regime-3 horizon.
pub const HORIZON_EXPONENT: f64 = 600.0;

pub const DEFAULT_POINTS_PER_DECADE: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureScheme {
    AdaptiveGK,
    CompositeGL,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Overrides the datum's truncation radius when set.
    pub rho_max: Option<f64>,
    /// Interval cap for GK, panel cap for GL.
    pub max_intervals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            scheme: QuadratureScheme::AdaptiveGK,
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            rho_max: None,
            max_intervals: DEFAULT_MAX_INTERVALS,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadratureSpec { rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("rel_tol and abs_tol must be positive".into()));
        }
        if let Some(r) = self.rho_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!("rho_max must be positive, got {r}")));
            }
        }
        if self.max_intervals < 8 {
            return Err(Error::InvalidParameter("max_intervals must be at least 8".into()));
        }
        Ok(())
    }

    /// Integration limits for a datum.
    pub fn limits(&self, datum: &InitialDatum) -> (f64, f64) {
        let (lo, hi) = datum.support();
        (lo, self.rho_max.map_or(hi, |r| r.min(hi).max(lo)))
    }

    /// Integrates a fallible integrand over [lo, hi] with this spec; the
    /// first integrand error aborts the result.
    pub fn integrate<F>(&self, mut g: F, lo: f64, hi: f64) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        self.validate()?;
        let mut failure = None;
        let wrapped = |x: f64| match g(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let r = match self.scheme {
            QuadratureScheme::AdaptiveGK => {
                integrate_gk(wrapped, lo, hi, self.abs_tol, self.rel_tol, self.max_intervals)
            }
            QuadratureScheme::CompositeGL => {
                integrate_gl(wrapped, lo, hi, self.abs_tol, self.rel_tol, self.max_intervals)
            }
        };
        match failure {
            Some(e) => Err(e),
            None => r,
        }
    }
}

/// Exponential rates r∓ = 2cos(πβ/(2α))Λ∓^{2/α} bounding D₂ in the α > β regime.
pub fn rate_bounds_regime3(idx: FractionalIndices, datum: &InitialDatum) -> Result<(f64, f64)> {
    if idx.regime() != Regime::ExponentialGrowth {
        return Err(Error::WrongRegime(format!(
            "exponential rates need alpha > beta, got alpha={} beta={}",
            idx.alpha, idx.beta
        )));
    }
    if datum.class != DatumClass::AnnulusBump {
        return Err(Error::UnsupportedDatum(
            "exponential rates need an annulus datum".into(),
        ));
    }
    let c = 2.0 * (PI * idx.beta / (2.0 * idx.alpha)).cos();
    let p = 2.0 / idx.alpha;
    Ok((c * datum.lambda_minus.powf(p), c * datum.lambda_plus.powf(p)))
}

/// Largest time T_max = 600/r₊ for which regime-3 MSD values stay well inside
/// the double range. `None` outside the α > β regime.
pub fn overflow_horizon(idx: FractionalIndices, datum: &InitialDatum) -> Option<f64> {
    match idx.regime() {
        Regime::ExponentialGrowth => match datum.class {
            DatumClass::AnnulusBump => {
                let (_, r_plus) = rate_bounds_regime3(idx, datum).ok()?;
                Some(HORIZON_EXPONENT / r_plus)
            }
            DatumClass::GaussianSchwartz => Some(0.0),
        },
        _ => None,
    }
}

fn check_time(idx: FractionalIndices, datum: &InitialDatum, t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t must be finite and nonnegative, got {t}"
        )));
    }
    if idx.regime() == Regime::ExponentialGrowth {
        if datum.class == DatumClass::GaussianSchwartz {
            return Err(Error::UnsupportedDatum(
                "the Gaussian datum grows without bound when alpha > beta; use an annulus".into(),
            ));
        }
        let (_, r_plus) = rate_bounds_regime3(idx, datum)?;
        if r_plus * t > OVERFLOW_EXPONENT {
            return Err(Error::Overflow(format!(
                "r+ * t = {:.1} exceeds {OVERFLOW_EXPONENT}; shrink the horizon below t = {:.6}",
                r_plus * t,
                HORIZON_EXPONENT / r_plus
            )));
        }
    }
    Ok(())
}

/// D₂ evaluator with a fixed propagator, datum and quadrature.
#[derive(Debug, Clone)]
pub struct Msd {
    propagator: Propagator,
    datum: InitialDatum,
    quad: QuadratureSpec,
}

impl Msd {
    pub fn new(idx: FractionalIndices, datum: InitialDatum, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        Ok(Msd {
            propagator: Propagator::new(idx),
            datum,
            quad,
        })
    }

    pub fn indices(&self) -> FractionalIndices {
        self.propagator.indices()
    }

    pub fn datum(&self) -> &InitialDatum {
        &self.datum
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// |∂_ρ û(ρ, t)|² ρ^{d−1}, without the sphere area.
    pub fn integrand(&self, rho: f64, t: f64) -> Result<f64> {
        let m = self.propagator.mode(&self.datum, rho, t)?;
        Ok(m.du_hat_drho.norm_sqr() * rho.powi(self.datum.dimension as i32 - 1))
    }

    /// D₂(t) with the quadrature's error estimate.
    pub fn at_with_error(&self, t: f64) -> Result<QuadResult> {
        check_time(self.indices(), &self.datum, t)?;
        let (lo, hi) = self.quad.limits(&self.datum);
        let area = self.datum.sphere_area();
        let r = self.quad.integrate(|rho| self.integrand(rho, t), lo, hi)?;
        Ok(QuadResult {
            value: area * r.value,
            error: area * r.error,
            ..r
        })
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        self.at_with_error(t).map(|r| r.value)
    }

    pub fn series(&self, times: &[f64]) -> Result<MsdSeries> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        let values = times.iter().map(|&t| self.at(t)).collect::<Result<Vec<_>>>()?;
        Ok(MsdSeries {
            times: times.to_vec(),
            values,
            idx: self.indices(),
            datum_id: self.datum.id(),
            dimension: self.datum.dimension,
            quad: self.quad,
        })
    }
}

/// D₂(t) = σ_{d−1}∫|∂_ρ û(ρ, t)|² ρ^{d−1} dρ.
pub fn msd_at(idx: FractionalIndices, datum: &InitialDatum, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    Msd::new(idx, *datum, *quad)?.at(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsdSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub idx: FractionalIndices,
    pub datum_id: String,
    pub dimension: u32,
    pub quad: QuadratureSpec,
}

impl MsdSeries {
    /// Bare series for fitting synthetic data.
    pub fn from_samples(times: Vec<f64>, values: Vec<f64>, idx: FractionalIndices) -> Self {
        MsdSeries {
            times,
            values,
            idx,
            datum_id: "synthetic".into(),
            dimension: 1,
            quad: QuadratureSpec::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Log-spaced grid from t_min to t_max with the given density per decade.
/// Both ends are included.
pub fn log_time_grid(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "time grid needs 0 < t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if points_per_decade == 0 {
        return Err(Error::InvalidParameter("points_per_decade must be positive".into()));
    }
    let decades = (t_max / t_min).log10();
    let intervals = ((decades * points_per_decade as f64) - 1e-9).ceil().max(1.0) as usize;
    let ratio = (t_max / t_min).ln() / intervals as f64;
    let mut grid: Vec<f64> = (0..=intervals).map(|i| t_min * (ratio * i as f64).exp()).collect();
    grid[0] = t_min;
    grid[intervals] = t_max;
    Ok(grid)
}

/// ‖∇û₀‖² = σ_{d−1}∫ f′² ρ^{d−1} dρ.
pub fn initial_msd(datum: &InitialDatum) -> Result<f64> {
    datum.radial_integral(|rho| datum.profile_deriv(rho).powi(2), 1e-12, 0.0)
}

/// Leading constant of D₂ ~ C t^{−2α} for α < β:
/// σ_{d−1}∫ρ^{−4}|f′/Γ(1−α) + 2f/(ραΓ(−α))|² ρ^{d−1} dρ.
pub fn coeff_regime1(datum: &InitialDatum, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(
            "the decay constant needs alpha in (0,1)".into(),
        ));
    }
    if datum.lambda_minus <= 0.0 {
        return Err(Error::Divergent(
            "the decay constant has rho^-4 and rho^-6 weights at the origin; it needs a datum vanishing near 0 (annulus)".into(),
        ));
    }
    let g1 = 1.0 / gamma_fn(1.0 - alpha)?;
    let g2 = 2.0 / (alpha * gamma_fn(-alpha)?);
    datum.radial_integral(
        |rho| {
            let bracket = datum.profile_deriv(rho) * g1 + datum.profile(rho) * g2 / rho;
            (bracket / (rho * rho)).powi(2)
        },
        1e-12,
        1e-300,
    )
}

/// Leading constant of D₂ ~ C t² for α = β:
/// (4/α⁴)σ_{d−1}∫ρ^{2(2−α)/α} f² ρ^{d−1} dρ.
pub fn coeff_regime2(datum: &InitialDatum, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0,1]".into()));
    }
    let power = 2.0 * (2.0 - alpha) / alpha;
    let moment = datum.radial_integral(|rho| rho.powf(power) * datum.profile(rho).powi(2), 1e-12, 1e-300)?;
    Ok(4.0 / alpha.powi(4) * moment)
}
