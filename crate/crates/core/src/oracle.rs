//! Extended-precision Mittag-Leffler reference values.
//!
//! The Taylor series is summed in MPFR arithmetic at a working precision
//! large enough that cancellation between terms of size up to
//! exp(|z|^{1/α}) still leaves the requested number of digits.

use std::f64::consts::{LOG10_E, LOG2_10};

use num_complex::Complex64;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::mittag_leffler::ComplexValue;

/// Default cap on the working precision in bits.
pub const DEFAULT_PRECISION_BUDGET: u32 = 1 << 15;

const TERM_CAP: usize = 2_000_000;

const MAX_DENOMINATOR: u32 = 1000;

/// Precision for the exact integers p·n + q·γ.
const INDEX_PREC: u32 = 128;

#[derive(Clone)]
struct BigComplex {
    re: Float,
    im: Float,
}

impl BigComplex {
    fn from_c64(prec: u32, z: ComplexValue) -> Self {
        BigComplex {
            re: Float::with_val(prec, z.re),
            im: Float::with_val(prec, z.im),
        }
    }

    fn mul_assign(&mut self, other: &BigComplex, scratch: &mut Float) {
        scratch.assign(&self.re * &other.re);
        *scratch -= Float::with_val(self.re.prec(), &self.im * &other.im);
        self.im *= &other.re;
        self.im += Float::with_val(self.re.prec(), &self.re * &other.im);
        std::mem::swap(&mut self.re, scratch);
    }

    fn scale(&self, c: &Float) -> BigComplex {
        let prec = self.re.prec();
        BigComplex {
            re: Float::with_val(prec, &self.re * c),
            im: Float::with_val(prec, &self.im * c),
        }
    }

    fn div_assign(&mut self, d: &Float) {
        self.re /= d;
        self.im /= d;
    }

    fn mul_u32(&mut self, k: u32) {
        self.re *= k;
        self.im *= k;
    }

    fn add_assign(&mut self, other: &BigComplex) {
        self.re += &other.re;
        self.im += &other.im;
    }

    /// Binary exponent of max(|re|, |im|); `i32::MIN` for zero.
    fn exponent(&self) -> i32 {
        let e = |x: &Float| x.get_exp().unwrap_or(i32::MIN);
        e(&self.re).max(e(&self.im))
    }

    fn to_c64(&self) -> ComplexValue {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// 1/Γ(a): exact factorial at integers, otherwise Π(a + j)·exp(−lnΓ(a + k))
/// with a + k ≥ 3, carried with guard bits. MPFR's direct Γ occasionally takes tens of seconds at tens of
/// thousands of bits; its log-gamma does not.
fn recip_gamma_big(a: &Float) -> Float {
    let prec = a.prec();
    if *a <= 0 && a.is_integer() {
        return Float::with_val(prec, 0);
    }
    if a.is_integer() {
        // 1/(a−1)!
        let mut factorial = Float::with_val(prec, 1);
        let mut k = Float::with_val(prec, 2);
        while k < *a {
            factorial *= &k;
            k += 1;
        }
        return factorial.recip();
    }
    let work = prec + 64;
    let mut shifted = Float::with_val(work, a);
    let mut rising = Float::with_val(work, 1);
    while shifted < 3 {
        rising *= &shifted;
        shifted += 1;
    }
    let ln_gamma = Float::with_val(work, shifted.ln_gamma_ref());
    Float::with_val(prec, rising * (-ln_gamma).exp())
}

/// α = p/q with q ≤ [`MAX_DENOMINATOR`], if α is that fraction to within
/// rounding.
fn rational_alpha(alpha: f64) -> Option<(u32, u32)> {
    (1..=MAX_DENOMINATOR).find_map(|den| {
        let scaled = alpha * den as f64;
        let num = scaled.round();
        let close = (scaled - num).abs() <= 4.0 * f64::EPSILON * scaled;
        (num >= 1.0 && close).then_some((num as u32, den))
    })
}

/// Successive Taylor terms z^n/Γ(αn + γ).
///
/// For α = p/q the Γ argument advances by the integer p every q steps, so
/// t_n = t_{n−q}·z^q / ((a)(a+1)···(a+p−1)) with a = α(n−q) + γ. Only the
/// first q terms (and terms following a pole) need a full Γ evaluation,
/// and the recurrence itself uses short operands.
struct Terms {
    prec: u32,
    alpha: Float,
    gamma: Float,
    z: BigComplex,
    pow: BigComplex,
    scratch: Float,
    rational: Option<Rational>,
}

struct Rational {
    p: u32,
    q: u32,
    z_q: BigComplex,
    /// q·a_n = p·n + q·γ for the last q indices, exact.
    scaled_args: Vec<Float>,
    recent: Vec<BigComplex>,
}

impl Terms {
    fn new(alpha: f64, gamma: f64, z: ComplexValue, prec: u32) -> Self {
        let big_z = BigComplex::from_c64(prec, z);
        let ratio = rational_alpha(alpha);
        let big_alpha = match ratio {
            Some((p, q)) => Float::with_val(prec, p) / q,
            None => Float::with_val(prec, alpha),
        };
        let rational = ratio.map(|(p, q)| {
            let mut z_q = BigComplex::from_c64(prec, Complex64::new(1.0, 0.0));
            let mut scratch = Float::new(prec);
            for _ in 0..q {
                z_q.mul_assign(&big_z, &mut scratch);
            }
            Rational {
                p,
                q,
                z_q,
                scaled_args: Vec::with_capacity(q as usize),
                recent: Vec::with_capacity(q as usize),
            }
        });
        Terms {
            prec,
            alpha: big_alpha,
            gamma: Float::with_val(prec, gamma),
            pow: BigComplex::from_c64(prec, Complex64::new(1.0, 0.0)),
            z: big_z,
            scratch: Float::new(prec),
            rational,
        }
    }

    /// Term n (called with n = 0, 1, 2, …) and its Γ argument rounded to f64.
    fn next(&mut self, n: usize) -> (f64, BigComplex) {
        let prec = self.prec;
        let (arg, term) = match &mut self.rational {
            Some(r) => {
                let slot = n % r.q as usize;
                let scaled =
                    Float::with_val(INDEX_PREC, r.p as u64 * n as u64) + Float::with_val(INDEX_PREC, &self.gamma * r.q);
                let arg = scaled.to_f64() / r.q as f64;
                let term = if n >= r.q as usize && r.scaled_args[slot] > 0 {
                    // a + j = (q·a + j·q)/q
                    let mut t = r.recent[slot].clone();
                    t.mul_assign(&r.z_q, &mut self.scratch);
                    let base = &r.scaled_args[slot];
                    for j in 0..r.p {
                        t.mul_u32(r.q);
                        t.div_assign(&Float::with_val(INDEX_PREC, base + j * r.q));
                    }
                    t
                } else {
                    let a = Float::with_val(prec, &scaled) / r.q;
                    self.pow.scale(&recip_gamma_big(&a))
                };
                if slot < r.recent.len() {
                    r.recent[slot] = term.clone();
                    r.scaled_args[slot] = scaled;
                } else {
                    r.recent.push(term.clone());
                    r.scaled_args.push(scaled);
                }
                (arg, term)
            }
            None => {
                let a = Float::with_val(prec, &self.alpha * n as u32) + &self.gamma;
                (a.to_f64(), self.pow.scale(&recip_gamma_big(&a)))
            }
        };
        self.pow.mul_assign(&self.z, &mut self.scratch);
        (arg, term)
    }
}

/// Bits needed for `digits` correct digits at argument `z`.
pub fn oracle_precision(alpha: f64, z: ComplexValue, digits: u32) -> f64 {
    let r = z.norm();
    let peak = if r > 0.0 { r.powf(1.0 / alpha) } else { 0.0 };
    let guard = peak * LOG10_E + 10.0;
    (digits as f64 + guard) * LOG2_10 + 64.0
}

/// E_{α,γ}(z) to `digits` significant digits, rounded to double precision.
///
/// When α is a fraction p/q with small q (as 0.4 or 0.7 are, up to their
/// binary rounding) the series is summed for that exact fraction.
///
/// Accepts any α > 0 (not only the (0,1] range of the fast evaluator), so
/// closed forms such as E_{2,1}(z²) = cosh z can serve as checks.
pub fn ml_oracle(alpha: f64, gamma: f64, z: ComplexValue, digits: u32) -> Result<ComplexValue> {
    ml_oracle_with_budget(alpha, gamma, z, digits, DEFAULT_PRECISION_BUDGET)
}

pub fn ml_oracle_with_budget(
    alpha: f64,
    gamma: f64,
    z: ComplexValue,
    digits: u32,
    budget: u32,
) -> Result<ComplexValue> {
    if !(alpha > 0.0) || !alpha.is_finite() || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "oracle needs alpha > 0 and finite gamma, got ({alpha}, {gamma})"
        )));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite argument {z}")));
    }
    let needed = oracle_precision(alpha, z, digits);
    if needed > budget as f64 {
        return Err(Error::PrecisionBudgetExceeded {
            required: needed.min(u32::MAX as f64) as u32,
            budget,
        });
    }
    let prec = needed.ceil() as u32;
    let target_bits = ((digits as f64 + 3.0) * LOG2_10).ceil() as i32;

    let mut terms = Terms::new(alpha, gamma, z, prec);
    let mut sum = BigComplex::from_c64(prec, Complex64::new(0.0, 0.0));
    let mut prev_exp = i32::MAX;
    for n in 0..TERM_CAP {
        let (arg, term) = terms.next(n);
        sum.add_assign(&term);
        if z.norm() == 0.0 {
            return Ok(sum.to_c64());
        }
        let e = term.exponent();
        if arg > 1.0 && e < prev_exp && e < sum.exponent().saturating_sub(target_bits) {
            return Ok(sum.to_c64());
        }
        if arg > 0.0 {
            prev_exp = e;
        }
    }
    Err(Error::NonConvergence {
        terms: TERM_CAP,
        modulus: z.norm(),
    })
}
