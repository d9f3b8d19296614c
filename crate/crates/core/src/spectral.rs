//! Fourier-side solution of i^β ∂_t^α u = −Δu for radial initial data.
//!
//! A radial datum is described by its profile f(ρ) = û₀(ξ) on |ξ| = ρ. Each
//! mode evolves independently as û(ρ, t) = E_{α,1}(κ) f(ρ) with
//! κ = (−i)^β ρ² t^α.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::least_squares;
use crate::error::{Error, Result};
use crate::gamma::gamma_fn;
use crate::mittag_leffler::{ComplexValue, MLParams, MittagLeffler, SectorInfo};
use crate::quadrature::{integrate_gk, DEFAULT_MAX_INTERVALS};

/// Truncation radius for the Gaussian profile: e^{−ρ²}ρ^{12} < 10⁻²⁴ beyond it.
pub const GAUSSIAN_RHO_MAX: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// α < β: D₂ decays like t^{−2α}.
    SubordinateDecay,
    /// α = β: D₂ grows like t².
    Ballistic,
    /// α > β: D₂ grows exponentially.
    ExponentialGrowth,
}

/// Regime map treating |α − β| ≤ `tolerance` as α = β. Production code uses
/// a zero tolerance; a positive one exists only for fault injection.
pub fn regime_with_tolerance(alpha: f64, beta: f64, tolerance: f64) -> Regime {
    if (alpha - beta).abs() <= tolerance {
        Regime::Ballistic
    } else if alpha < beta {
        Regime::SubordinateDecay
    } else {
        Regime::ExponentialGrowth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalIndices {
    pub alpha: f64,
    pub beta: f64,
}

impl FractionalIndices {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter("alpha must lie in (0,1]".into()));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter("beta must lie in (0,1]".into()));
        }
        Ok(FractionalIndices { alpha, beta })
    }

    /// Regime by exact comparison of the stored values.
    pub fn regime(&self) -> Regime {
        regime_with_tolerance(self.alpha, self.beta, 0.0)
    }

    pub fn sector(&self) -> SectorInfo {
        SectorInfo::new(self.alpha, self.beta)
    }

    /// (−i)^β = exp(−iπβ/2).
    pub fn minus_i_pow_beta(&self) -> ComplexValue {
        Complex64::from_polar(1.0, -PI * self.beta / 2.0)
    }

    /// i^β = exp(iπβ/2).
    pub fn i_pow_beta(&self) -> ComplexValue {
        Complex64::from_polar(1.0, PI * self.beta / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DatumClass {
    /// f(ρ) = e^{−ρ²/2}.
    GaussianSchwartz,
    /// f(ρ) = exp(−1/(1 − s²)) on Λ− < ρ < Λ+, s the affine map onto (−1, 1).
    AnnulusBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialDatum {
    pub class: DatumClass,
    pub lambda_minus: f64,
    /// `f64::INFINITY` for the Gaussian.
    pub lambda_plus: f64,
    pub dimension: u32,
}

/// Surface area σ_{d−1} = 2π^{d/2}/Γ(d/2) of the unit sphere in ℝ^d.
pub fn sphere_area(dimension: u32) -> f64 {
    let half = dimension as f64 / 2.0;
    2.0 * PI.powf(half) / gamma_fn(half).expect("d/2 > 0 is never a pole")
}

impl InitialDatum {
    pub fn gaussian(dimension: u32) -> Result<Self> {
        check_dimension(dimension)?;
        Ok(InitialDatum {
            class: DatumClass::GaussianSchwartz,
            lambda_minus: 0.0,
            lambda_plus: f64::INFINITY,
            dimension,
        })
    }

    pub fn annulus(lambda_minus: f64, lambda_plus: f64, dimension: u32) -> Result<Self> {
        check_dimension(dimension)?;
        if !(lambda_minus > 0.0 && lambda_plus > lambda_minus && lambda_plus.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "annulus needs 0 < lambda_minus < lambda_plus < inf, got [{lambda_minus}, {lambda_plus}]"
            )));
        }
        Ok(InitialDatum {
            class: DatumClass::AnnulusBump,
            lambda_minus,
            lambda_plus,
            dimension,
        })
    }

    /// Short label used in reports.
    pub fn id(&self) -> String {
        match self.class {
            DatumClass::GaussianSchwartz => format!("gaussian/d{}", self.dimension),
            DatumClass::AnnulusBump => {
                format!(
                    "annulus[{},{}]/d{}",
                    self.lambda_minus, self.lambda_plus, self.dimension
                )
            }
        }
    }

    /// Radial interval carrying the datum, truncated for the Gaussian.
    pub fn support(&self) -> (f64, f64) {
        match self.class {
            DatumClass::GaussianSchwartz => (0.0, GAUSSIAN_RHO_MAX),
            DatumClass::AnnulusBump => (self.lambda_minus, self.lambda_plus),
        }
    }

    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dimension)
    }

    fn bump_coordinate(&self, rho: f64) -> Option<f64> {
        let width = self.lambda_plus - self.lambda_minus;
        let s = (2.0 * rho - self.lambda_plus - self.lambda_minus) / width;
        (s.abs() < 1.0).then_some(s)
    }

    pub fn profile(&self, rho: f64) -> f64 {
        match self.class {
            DatumClass::GaussianSchwartz => (-0.5 * rho * rho).exp(),
            DatumClass::AnnulusBump => match self.bump_coordinate(rho) {
                Some(s) => (-1.0 / (1.0 - s * s)).exp(),
                None => 0.0,
            },
        }
    }

    pub fn profile_deriv(&self, rho: f64) -> f64 {
        match self.class {
            DatumClass::GaussianSchwartz => -rho * (-0.5 * rho * rho).exp(),
            DatumClass::AnnulusBump => match self.bump_coordinate(rho) {
                Some(s) => {
                    let q = 1.0 - s * s;
                    let f = (-1.0 / q).exp();
                    if f == 0.0 {
                        return 0.0;
                    }
                    let ds = 2.0 / (self.lambda_plus - self.lambda_minus);
                    -2.0 * s / (q * q) * f * ds
                }
                None => 0.0,
            },
        }
    }

    /// σ_{d−1}∫ g(ρ) ρ^{d−1} dρ over the support.
    pub fn radial_integral<F: FnMut(f64) -> f64>(&self, mut g: F, rel_tol: f64, abs_tol: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        let power = self.dimension as i32 - 1;
        let r = integrate_gk(
            |rho| g(rho) * rho.powi(power),
            lo,
            hi,
            abs_tol,
            rel_tol,
            DEFAULT_MAX_INTERVALS,
        )
        .map_err(|e| match e {
            Error::Quadrature { value, error, .. } => Error::Divergent(format!(
                "radial integral did not converge (estimate {value:e}, error {error:e})"
            )),
            other => other,
        })?;
        Ok(self.sphere_area() * r.value)
    }

    /// ‖û₀‖² = σ_{d−1}∫ f² ρ^{d−1} dρ.
    pub fn norm_squared(&self) -> Result<f64> {
        self.radial_integral(|rho| self.profile(rho).powi(2), 1e-12, 0.0)
    }
}

fn check_dimension(dimension: u32) -> Result<()> {
    if dimension == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    Ok(())
}

/// κ = (−i)^β ρ² t^α.
pub fn kappa(idx: FractionalIndices, rho: f64, t: f64) -> ComplexValue {
    idx.minus_i_pow_beta() * (rho * rho * t.powf(idx.alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub rho: f64,
    pub t: f64,
    pub u_hat: ComplexValue,
    pub du_hat_drho: ComplexValue,
}

/// Per-mode evolution operator for fixed indices, holding the
/// Mittag-Leffler evaluators for E_{α,1} and E_{α,α}.
#[derive(Debug, Clone)]
pub struct Propagator {
    idx: FractionalIndices,
    e1: MittagLeffler,
    ea: MittagLeffler,
}

impl Propagator {
    pub fn new(idx: FractionalIndices) -> Self {
        let e1 = MittagLeffler::new(MLParams::new(idx.alpha, 1.0).expect("alpha validated"));
        let ea = MittagLeffler::new(MLParams::new(idx.alpha, idx.alpha).expect("alpha validated"));
        Propagator { idx, e1, ea }
    }

    pub fn indices(&self) -> FractionalIndices {
        self.idx
    }

    /// E_{α,1}(κ(ρ, t)).
    pub fn kernel(&self, rho: f64, t: f64) -> Result<ComplexValue> {
        check_mode(rho, t)?;
        self.e1.eval(kappa(self.idx, rho, t))
    }

    pub fn mode(&self, datum: &InitialDatum, rho: f64, t: f64) -> Result<ModeState> {
        check_mode(rho, t)?;
        let f = datum.profile(rho);
        let df = datum.profile_deriv(rho);
        if t == 0.0 {
            return Ok(ModeState {
                rho,
                t,
                u_hat: Complex64::new(f, 0.0),
                du_hat_drho: Complex64::new(df, 0.0),
            });
        }
        let k = kappa(self.idx, rho, t);
        let e1 = self.e1.eval(k)?;
        let ea = if f == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.ea.eval(k)?
        };
        let alpha = self.idx.alpha;
        // ∂_ρ û = 2α⁻¹(−i)^β t^α ρ E_{α,α}(κ) f + E_{α,1}(κ) f′
        let drift = self.idx.minus_i_pow_beta() * (2.0 / alpha * t.powf(alpha) * rho * f);
        Ok(ModeState {
            rho,
            t,
            u_hat: e1 * f,
            du_hat_drho: drift * ea + e1 * df,
        })
    }
}

fn check_mode(rho: f64, t: f64) -> Result<()> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "rho must be finite and nonnegative, got {rho}"
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

/// û(ρ, t) = E_{α,1}(κ) f(ρ).
pub fn propagate_mode(idx: FractionalIndices, datum: &InitialDatum, rho: f64, t: f64) -> Result<ComplexValue> {
    Ok(Propagator::new(idx).mode(datum, rho, t)?.u_hat)
}

/// ∂_ρ û(ρ, t).
pub fn grad_mode(idx: FractionalIndices, datum: &InitialDatum, rho: f64, t: f64) -> Result<ComplexValue> {
    Ok(Propagator::new(idx).mode(datum, rho, t)?.du_hat_drho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// ‖ρ²f‖ ≤ α‖ρ^{2/α}f‖ + (1 − α)‖f‖.
pub fn sobolev_interp_check(datum: &InitialDatum, alpha: f64) -> Result<InterpolationCheck> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0,1]".into()));
    }
    let weighted_norm = |power: f64| -> Result<f64> {
        datum
            .radial_integral(|rho| rho.powf(2.0 * power) * datum.profile(rho).powi(2), 1e-12, 0.0)
            .map(f64::sqrt)
    };
    let lhs = weighted_norm(2.0)?;
    let rhs = if alpha == 1.0 {
        lhs
    } else {
        alpha * weighted_norm(2.0 / alpha)? + (1.0 - alpha) * weighted_norm(0.0)?
    };
    Ok(InterpolationCheck {
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + 1e-10),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub times: Vec<f64>,
    /// ‖û(·,t)‖ in the graph norm of the Laplacian at each time.
    pub norms: Vec<f64>,
    pub initial_norm: f64,
    /// sup_t g(t)/g(0) (α ≤ β).
    pub sup_ratio: Option<f64>,
    /// sup_t g(t)e^{−ct} with c = cos(πβ/(2α))Λ₊^{2/α} (α > β).
    pub sup_damped: Option<f64>,
    /// g(t)e^{−ct} does not increase by more than 5% past the first tenth
    /// of the horizon (α > β).
    pub damped_non_increasing: Option<bool>,
}

impl EnvelopeReport {
    /// Least-squares slope of log g(t) over samples with t in [t_lo, t_hi].
    pub fn log_slope(&self, t_lo: f64, t_hi: f64) -> Result<f64> {
        let (t, g): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.norms)
            .filter(|(&t, _)| t_lo <= t && t <= t_hi)
            .map(|(&t, &g)| (t, g.ln()))
            .unzip();
        if t.len() < 2 {
            return Err(Error::DegenerateFit(format!(
                "fewer than two samples in [{t_lo}, {t_hi}]"
            )));
        }
        Ok(least_squares(&t, &g)?.slope)
    }
}

/// ‖v‖ in the graph norm: sqrt(‖v‖² + ‖ρ²v‖²).
pub fn graph_norm(propagator: &Propagator, datum: &InitialDatum, t: f64) -> Result<f64> {
    let mut failure = None;
    let value = datum.radial_integral(
        |rho| match propagator.mode(datum, rho, t) {
            Ok(m) => (1.0 + rho.powi(4)) * m.u_hat.norm_sqr(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        1e-12,
        0.0,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value.sqrt()),
    }
}

/// Samples the graph norm of the solution on a uniform grid over (0, T].
pub fn norm_envelope_check(
    idx: FractionalIndices,
    datum: &InitialDatum,
    horizon: f64,
    n_samples: usize,
) -> Result<EnvelopeReport> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter("T must be positive".into()));
    }
    if n_samples < 10 {
        return Err(Error::InvalidParameter("n_samples must be at least 10".into()));
    }
    let propagator = Propagator::new(idx);
    let initial_norm = graph_norm(&propagator, datum, 0.0)?;
    let times: Vec<f64> = (1..=n_samples).map(|i| horizon * i as f64 / n_samples as f64).collect();
    let norms = times
        .iter()
        .map(|&t| graph_norm(&propagator, datum, t))
        .collect::<Result<Vec<_>>>()?;
    let mut report = EnvelopeReport {
        times,
        norms,
        initial_norm,
        sup_ratio: None,
        sup_damped: None,
        damped_non_increasing: None,
    };
    if idx.regime() == Regime::ExponentialGrowth {
        if datum.class != DatumClass::AnnulusBump {
            return Err(Error::UnsupportedDatum(
                "exponential envelope needs a compactly supported datum".into(),
            ));
        }
        let c = (PI * idx.beta / (2.0 * idx.alpha)).cos() * datum.lambda_plus.powf(2.0 / idx.alpha);
        let damped: Vec<f64> = report
            .times
            .iter()
            .zip(&report.norms)
            .map(|(&t, &g)| g * (-c * t).exp())
            .collect();
        report.sup_damped = Some(damped.iter().copied().fold(0.0, f64::max));
        let start = n_samples / 10;
        let non_increasing = damped[start..].windows(2).all(|w| w[1] <= 1.05 * w[0]);
        report.damped_non_increasing = Some(non_increasing);
    } else {
        let sup = report.norms.iter().copied().fold(0.0, f64::max);
        report.sup_ratio = Some(sup / initial_norm);
    }
    Ok(report)
}
