//! Two-parameter Mittag-Leffler function E_{α,γ}(z) = Σ z^n / Γ(αn + γ).
//!
//! Evaluation is tuned for arguments on the rays arg z = −πβ/2 with
//! α, β ∈ (0, 1], which is where the spectral propagator lives. Three
//! methods are combined:
//!
//! * the Taylor series for |z| ≤ R(α), accumulated in double-double
//!   arithmetic whenever cancellation would cost more than a few digits;
//! * the algebraic expansion −Σ z^{−k}/Γ(γ − αk) for |arg z| > πα;
//! * the exponential expansion (1/α) z^{(1−γ)/α} exp(z^{1/α}) plus the same
//!   algebraic tail for |arg z| ≤ πα.
//!
//! The crossover radius is R(α) = S^α with S = [`CROSSOVER_SCALE`], i.e. the
//! switch happens where |z^{1/α}| = S. At that point the optimally truncated
//! asymptotic series has relative error of order e^{−S}, and the series
//! terms peak near e^{S}, which double-double accumulation absorbs.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::gamma::{recip_gamma, recip_gamma_dd};

pub type ComplexValue = Complex64;

/// |z^{1/α}| at the series/asymptotic switch.
pub const CROSSOVER_SCALE: f64 = 30.0;

/// Default number of algebraic terms for the standalone expansion routines.
pub const DEFAULT_ASYMPTOTIC_TERMS: usize = 6;

/// Term cap for the Taylor series.
pub const SERIES_TERM_CAP: usize = 2000;

/// Upper bound on algebraic-tail terms used by the dispatcher.
const TAIL_TERM_CAP: usize = 400;

/// Upper bound of 1/Γ(x) over x > 0 (attained near x = 1.4616).
const RECIP_GAMMA_MAX: f64 = 1.13;

/// Natural log of the largest finite `f64`.
const LN_F64_MAX: f64 = 709.782_712_893_384;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    pub alpha: f64,
    pub gamma: f64,
}

impl MLParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Mittag-Leffler alpha must lie in (0,1], got {alpha}"
            )));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Mittag-Leffler gamma must be finite, got {gamma}"
            )));
        }
        Ok(MLParams { alpha, gamma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectorKind {
    /// Only the algebraic expansion contributes (α < β).
    Algebraic,
    /// The exponential term is present (α ≥ β).
    Exponential,
}

/// Where the ray arg κ = −πβ/2 sits relative to the sectors of the
/// Mittag-Leffler asymptotics for a given α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorInfo {
    pub arg_kappa: f64,
    pub regime: SectorKind,
    /// A sector opening inside the admissible interval, kept for reporting.
    pub mu: f64,
}

impl SectorInfo {
    pub fn new(alpha: f64, beta: f64) -> Self {
        let arg_kappa = -PI * beta / 2.0;
        let lower = PI * alpha / 2.0;
        if PI * beta / 2.0 > PI * alpha / 2.0 {
            let upper = (PI * alpha).min(PI * beta / 2.0);
            SectorInfo {
                arg_kappa,
                regime: SectorKind::Algebraic,
                mu: 0.5 * (lower + upper),
            }
        } else {
            SectorInfo {
                arg_kappa,
                regime: SectorKind::Exponential,
                mu: 0.5 * (lower + PI * alpha),
            }
        }
    }
}

/// z^w on the principal branch, arg z ∈ (−π, π].
pub fn principal_pow(z: ComplexValue, w: f64) -> ComplexValue {
    if z == Complex64::new(0.0, 0.0) {
        return if w == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    (z.ln() * w).exp()
}

/// R(α) = S^α.
pub fn crossover_radius(alpha: f64) -> f64 {
    CROSSOVER_SCALE.powf(alpha)
}

/// Partial sums of the defining series, stopped once the geometric-ratio
/// tail bound drops below `tol·|sum|`.
pub fn ml_series(p: MLParams, z: ComplexValue, tol: f64) -> Result<ComplexValue> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let ln_z = if z.norm() > 0.0 { Some(z.ln()) } else { None };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev_mag = f64::NAN;
    for n in 0..SERIES_TERM_CAP {
        let a = p.alpha * n as f64 + p.gamma;
        let term = if n == 0 {
            Complex64::new(recip_gamma(a), 0.0)
        } else {
            match ln_z {
                None => break,
                Some(lz) if a > 0.0 => (lz * n as f64 - Dd::from_f64(a).ln_gamma().to_f64()).exp(),
                Some(_) => z.powi(n as i32) * recip_gamma(a),
            }
        };
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(Error::NonConvergence {
                terms: n,
                modulus: z.norm(),
            });
        }
        sum += term;
        let mag = term.norm();
        if mag == 0.0 && a > 0.0 {
            break;
        }
        if prev_mag > 0.0 && mag > 0.0 {
            let q = mag / prev_mag;
            if q < 1.0 && mag * q / (1.0 - q) < tol * sum.norm() {
                return Ok(sum);
            }
        }
        if mag > 0.0 {
            prev_mag = mag;
        }
    }
    if ln_z.is_none() {
        return Ok(sum);
    }
    Err(Error::NonConvergence {
        terms: SERIES_TERM_CAP,
        modulus: z.norm(),
    })
}

/// −Σ_{k=1}^{n_terms} z^{−k}/Γ(γ − αk). Terms at poles of Γ vanish.
pub fn ml_asymptotic_algebraic(p: MLParams, z: ComplexValue, n_terms: usize) -> ComplexValue {
    let z_inv = z.inv();
    let mut pow = z_inv;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=n_terms {
        let c = recip_gamma(p.gamma - p.alpha * k as f64);
        if c != 0.0 {
            sum -= pow * c;
        }
        pow *= z_inv;
    }
    sum
}

/// ln of the leading exponential term (1/α) z^{(1−γ)/α} exp(z^{1/α}).
fn exponential_log_term(p: MLParams, z: ComplexValue) -> ComplexValue {
    let ln_z = z.ln();
    let root = (ln_z / p.alpha).exp();
    ln_z * ((1.0 - p.gamma) / p.alpha) + root - p.alpha.ln()
}

fn exponential_term(p: MLParams, z: ComplexValue) -> Result<ComplexValue> {
    let log_term = exponential_log_term(p, z);
    if log_term.re > LN_F64_MAX {
        return Err(Error::Overflow(format!(
            "exp(z^(1/alpha)) exceeds double range: ln|term| = {:.1} at |z| = {:.3e}",
            log_term.re,
            z.norm()
        )));
    }
    Ok(log_term.exp())
}

/// (1/α) z^{(1−γ)/α} exp(z^{1/α}) − Σ_{k=1}^{n_terms} z^{−k}/Γ(γ − αk).
pub fn ml_asymptotic_exponential(p: MLParams, z: ComplexValue, n_terms: usize) -> Result<ComplexValue> {
    Ok(exponential_term(p, z)? + ml_asymptotic_algebraic(p, z, n_terms))
}

/// Precomputed evaluator for a fixed (α, γ).
///
/// Holds double-double Taylor coefficients up to the order needed at the
/// crossover radius and the coefficients of the algebraic tail, so repeated
/// evaluation (quadrature over modes, time grids) costs one short loop.
#[derive(Debug, Clone)]
pub struct MittagLeffler {
    params: MLParams,
    crossover: f64,
    series_dd: Vec<Dd>,
    series: Vec<f64>,
    tail: Vec<f64>,
    /// Upper envelope of |1/Γ(γ − αk)| without the oscillating sin factor;
    /// used to locate the smallest term of the expansion. May be infinite.
    tail_envelope: Vec<f64>,
}

impl MittagLeffler {
    pub fn new(params: MLParams) -> Self {
        Self::with_crossover(params, crossover_radius(params.alpha))
    }

    /// Evaluator with a non-default series/asymptotic switch radius.
    pub fn with_crossover(params: MLParams, crossover: f64) -> Self {
        let MLParams { alpha, gamma } = params;
        // Keep Taylor terms until c_n·R^n falls ~e^{−92} below the peak.
        let r_max = crossover.max(1e-3) * 1.25;
        let ln_r = r_max.ln();
        let mut series_dd = Vec::new();
        let mut series = Vec::new();
        let mut peak = f64::NEG_INFINITY;
        for n in 0..SERIES_TERM_CAP {
            // αn + γ exactly, since c_n is sensitive to the rounding of its argument
            let a = Dd::from_f64(alpha).mul_f64(n as f64).add_f64(gamma);
            let c = if a.hi > 0.0 {
                recip_gamma_dd(a)
            } else {
                Dd::from_f64(recip_gamma(a.hi))
            };
            series_dd.push(c);
            series.push(c.to_f64());
            if a.hi > 0.0 {
                let log_mag = n as f64 * ln_r - a.ln_gamma().hi;
                peak = peak.max(log_mag);
                if log_mag < peak - 92.0 && n > 2 {
                    break;
                }
            }
        }
        let mut tail = Vec::new();
        let mut tail_envelope = Vec::new();
        for k in 1..=TAIL_TERM_CAP {
            let x = gamma - alpha * k as f64;
            let c = recip_gamma(x);
            if !c.is_finite() {
                break;
            }
            tail.push(c);
            let env = if x > 0.0 {
                RECIP_GAMMA_MAX
            } else {
                // |1/Γ(x)| = |sin πx| Γ(1 − x)/π
                (Dd::from_f64(1.0 - x).ln_gamma().hi - PI.ln()).exp()
            };
            tail_envelope.push(env);
        }
        MittagLeffler {
            params,
            crossover,
            series_dd,
            series,
            tail,
            tail_envelope,
        }
    }

    pub fn params(&self) -> MLParams {
        self.params
    }

    pub fn crossover(&self) -> f64 {
        self.crossover
    }

    pub fn eval(&self, z: ComplexValue) -> Result<ComplexValue> {
        let r = z.norm();
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite argument {z}")));
        }
        if r <= self.crossover {
            return self.series(z);
        }
        let tail = self.algebraic_tail(z);
        if z.arg().abs() <= PI * self.params.alpha {
            Ok(exponential_term(self.params, z)? + tail)
        } else {
            Ok(tail)
        }
    }

    fn series(&self, z: ComplexValue) -> Result<ComplexValue> {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut pow = Complex64::new(1.0, 0.0);
        let mut prev_mag2 = f64::INFINITY;
        let mut terms = None;
        for (n, &c) in self.series.iter().enumerate() {
            let term = pow * c;
            let mag2 = term.norm_sqr();
            sum += term;
            abs_sum += term.l1_norm();
            if mag2 < 1e-34 * sum.norm_sqr() && mag2 <= prev_mag2 {
                terms = Some(n + 1);
                break;
            }
            prev_mag2 = mag2;
            pow *= z;
        }
        let Some(terms) = terms else {
            if z.norm() == 0.0 {
                return Ok(sum);
            }
            return Err(Error::NonConvergence {
                terms: self.series.len(),
                modulus: z.norm(),
            });
        };
        if z.norm() > 0.5 * self.crossover || abs_sum > 1e4 * sum.l1_norm() {
            return Ok(self.series_compensated(z, terms, sum.norm_sqr()));
        }
        Ok(sum)
    }

    /// Horner evaluation in double-double. `terms` and `sum_mag2` come from
    /// the plain pass; the sum is extended until terms drop below 1e-20 of it.
    fn series_compensated(&self, z: ComplexValue, terms: usize, sum_mag2: f64) -> ComplexValue {
        let r2 = z.norm_sqr();
        let mut last = terms;
        let mut mag2 = self.series[terms - 1].powi(2) * r2.powi(terms as i32 - 1);
        while last < self.series_dd.len() {
            let next = mag2 * r2 * (self.series[last] / self.series[last - 1]).powi(2);
            if !(next >= 1e-40 * sum_mag2) && next <= mag2 {
                break;
            }
            mag2 = next;
            last += 1;
        }
        let mut acc = DdComplex {
            re: self.series_dd[last - 1],
            im: Dd::ZERO,
        };
        for &c in self.series_dd[..last - 1].iter().rev() {
            acc = acc.mul_c64(z.re, z.im);
            acc.re = acc.re + c;
        }
        Complex64::new(acc.re.to_f64(), acc.im.to_f64())
    }

    /// Algebraic expansion truncated where its term envelope is smallest.
    fn algebraic_tail(&self, z: ComplexValue) -> ComplexValue {
        let z_inv = z.inv();
        let r_inv = z_inv.norm();
        let mut pow = z_inv;
        let mut r_pow = r_inv;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut prev_bound = f64::INFINITY;
        for (&c, &env) in self.tail.iter().zip(&self.tail_envelope) {
            // NaN (∞·0 once r_pow underflows) also stops the loop
            let bound = env * r_pow;
            if !(bound <= prev_bound) {
                break;
            }
            sum -= pow * c;
            if bound * bound < 1e-34 * sum.norm_sqr() {
                break;
            }
            prev_bound = bound;
            pow *= z_inv;
            r_pow *= r_inv;
        }
        sum
    }
}

/// Dispatching evaluator: series inside R(α), sector-appropriate expansion
/// outside.
pub fn ml_eval(p: MLParams, z: ComplexValue) -> Result<ComplexValue> {
    MittagLeffler::new(p).eval(z)
}

/// d/dz E_{α,1}(z) = α⁻¹ E_{α,α}(z).
pub fn ml_derivative(alpha: f64, z: ComplexValue) -> Result<ComplexValue> {
    let p = MLParams::new(alpha, alpha)?;
    Ok(ml_eval(p, z)? / alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        Complex64::new(re, im)
    }

    fn on_ray(modulus: f64, beta: f64) -> ComplexValue {
        Complex64::from_polar(modulus, -PI * beta / 2.0)
    }

    fn rel(a: ComplexValue, b: ComplexValue) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn params_validation() {
        assert!(MLParams::new(0.0, 1.0).is_err());
        assert!(MLParams::new(1.2, 1.0).is_err());
        assert!(MLParams::new(1.0, f64::NAN).is_err());
        assert!(MLParams::new(1.0, -2.5).is_ok());
    }

    #[test]
    fn branch_convention() {
        for &beta in &[0.1, 0.5, 0.999, 1.0] {
            let minus = principal_pow(c(0.0, -1.0), beta);
            let plus = principal_pow(c(0.0, 1.0), beta);
            assert!(rel(minus, Complex64::from_polar(1.0, -PI * beta / 2.0)) < 1e-15);
            assert!(rel(plus, Complex64::from_polar(1.0, PI * beta / 2.0)) < 1e-15);
            assert!(rel(minus * plus, c(1.0, 0.0)) < 1e-15);
        }
    }

    #[test]
    fn sector_selection() {
        let s = SectorInfo::new(0.5, 1.0);
        assert_eq!(s.regime, SectorKind::Algebraic);
        assert!(s.mu > PI * 0.25 && s.mu < PI * 0.5);
        let s = SectorInfo::new(0.6, 0.6);
        assert_eq!(s.regime, SectorKind::Exponential);
        assert!(s.mu > PI * 0.3 && s.mu < PI * 0.6);
        assert_eq!(SectorInfo::new(0.9, 0.3).regime, SectorKind::Exponential);
    }

    #[test]
    fn series_examples() {
        let v = ml_series(MLParams::new(0.7, 1.0).unwrap(), c(0.0, 0.0), 1e-16).unwrap();
        assert_eq!(v, c(1.0, 0.0));
        let v = ml_series(MLParams::new(1.0, 1.0).unwrap(), c(1.0, 0.0), 1e-16).unwrap();
        assert!((v.re - std::f64::consts::E).abs() < 1e-15);
        // E_{1/2,1}(1) = e·erfc(−1) = e·(1 + erf 1)
        let v = ml_series(MLParams::new(0.5, 1.0).unwrap(), c(1.0, 0.0), 1e-16).unwrap();
        assert!((v.re - 5.008_980_080_762_283).abs() < 1e-14, "{v}");
        assert!(v.im.abs() < 1e-16);
    }

    #[test]
    fn series_rejects_bad_tolerance() {
        assert!(ml_series(MLParams::new(0.5, 1.0).unwrap(), c(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn series_cap_reports_non_convergence() {
        let p = MLParams::new(0.1, 1.0).unwrap();
        let err = ml_series(p, c(40.0, 0.0), 1e-15).unwrap_err();
        assert!(
            matches!(err, Error::NonConvergence { .. } | Error::Overflow(_)),
            "{err:?}"
        );
    }

    #[test]
    fn algebraic_leading_terms() {
        let kappa = on_ray(1e4, 1.0);
        let p = MLParams::new(0.5, 1.0).unwrap();
        let one = ml_asymptotic_algebraic(p, kappa, 1);
        let expected = -kappa.inv() / 1.772_453_850_905_516;
        assert!(rel(one, expected) < 1e-15);

        let p = MLParams::new(0.5, 0.5).unwrap();
        let one = ml_asymptotic_algebraic(p, kappa, 1);
        assert_eq!(one, c(0.0, 0.0));
        let two = ml_asymptotic_algebraic(p, kappa, 2);
        let expected = -(kappa * kappa).inv() / -3.544_907_701_811_032;
        assert!(rel(two, expected) < 1e-14);
    }

    #[test]
    fn exponential_examples() {
        let p = MLParams::new(1.0, 1.0).unwrap();
        let v = ml_asymptotic_exponential(p, c(3.0, 0.0), 6).unwrap();
        assert!((v.re - 20.085_536_923_187_668).abs() < 1e-13);

        // α = β: κ^{1/α} is purely imaginary so the leading term has modulus 1/α
        let p = MLParams::new(0.6, 1.0).unwrap();
        for &m in &[1e2, 1e3, 1e4] {
            let lead = exponential_term(p, on_ray(m, 0.6)).unwrap();
            assert!((lead.norm() - 1.0 / 0.6).abs() < 1e-9, "{m}: {}", lead.norm());
        }
    }

    #[test]
    fn exponential_overflow_is_reported() {
        let p = MLParams::new(0.5, 1.0).unwrap();
        let err = ml_asymptotic_exponential(p, c(40.0, 0.0), 4).unwrap_err();
        assert!(matches!(err, Error::Overflow(_)));
        assert!(ml_eval(p, c(40.0, 0.0)).is_err());
    }

    #[test]
    fn dispatcher_examples() {
        let p = MLParams::new(0.5, 1.0).unwrap();
        assert_eq!(ml_eval(p, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let p = MLParams::new(1.0, 1.0).unwrap();
        let v = ml_eval(p, c(0.0, -2.0)).unwrap();
        assert!(rel(v, c((2.0f64).cos(), -(2.0f64).sin())) < 1e-14);
    }

    #[test]
    fn derivative_examples() {
        assert!(rel(ml_derivative(1.0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-15);
        let v = ml_derivative(0.5, c(0.0, 0.0)).unwrap();
        // E_{1/2,1/2}(0)/α = 2/Γ(1/2)
        assert!((v.re - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let alpha = 0.6;
        let z = c(1.0, 0.3);
        let h = 1e-5;
        let p = MLParams::new(alpha, 1.0).unwrap();
        let fd = (ml_eval(p, z + h).unwrap() - ml_eval(p, z - h).unwrap()) / (2.0 * h);
        let d = ml_derivative(alpha, z).unwrap();
        assert!((fd - d).norm() < 1e-7, "{fd} vs {d}");
    }

    #[test]
    fn value_at_origin_is_recip_gamma() {
        for &alpha in &[0.1, 0.3, 0.5, 0.77, 1.0] {
            for &gamma in &[0.3, 0.5, 1.0, alpha] {
                let p = MLParams::new(alpha, gamma).unwrap();
                let v = ml_eval(p, c(0.0, 0.0)).unwrap();
                assert!((v - recip_gamma(gamma)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn series_and_asymptotics_agree_near_crossover() {
        // Both branches evaluated at the same point just outside R(α).
        for &alpha in &[0.3, 0.5, 0.8, 1.0] {
            for &beta in &[0.2, 0.5, 0.8, 1.0] {
                let p = MLParams::new(alpha, 1.0).unwrap();
                let ml = MittagLeffler::new(p);
                let z = on_ray(1.05 * ml.crossover(), beta);
                let asym = ml.eval(z).unwrap();
                let series = ml.series(z).unwrap();
                assert!(rel(asym, series) < 1e-9, "α={alpha} β={beta}: {asym} vs {series}");
            }
        }
    }
}
