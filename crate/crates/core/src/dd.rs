//! Double-double arithmetic.
//!
//! A [`Dd`] carries an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits of significand. Only the operations needed by the
//! Mittag-Leffler series are provided: ring operations, division, `exp`,
//! `ln` and the log-gamma function for positive arguments.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_558e-17,
};

/// ln(2π) / 2
const HALF_LN_TWO_PI: Dd = Dd {
    hi: 0.918_938_533_204_672_8,
    lo: -3.878_294_158_067_241_4e-17,
};

/// Even Bernoulli numbers B_2 .. B_30 as exact (numerator, denominator) pairs.
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174_611.0, 330.0),
    (854_513.0, 138.0),
    (-236_364_091.0, 2730.0),
    (8_553_103.0, 6.0),
    (-23_749_461_029.0, 870.0),
    (8_615_841_276_005.0, 14322.0),
];

/// Arguments below this are shifted upward before applying Stirling's series.
const STIRLING_MIN: f64 = 32.0;

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    /// Multiply by an exact power of two.
    #[inline]
    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.78 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        // x = k ln2 + r, then exp(r) = (exp(r / 2^10))^(2^10)
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-10);

        // s = exp(r) - 1 by Taylor series, |r| < 3.4e-4
        let mut s = r;
        let mut term = r;
        let mut n = 2.0;
        loop {
            term = (term * r) / Dd::from_f64(n);
            s = s + term;
            if term.hi.abs() < 1e-34 * s.hi.abs().max(1e-300) || n > 30.0 {
                break;
            }
            n += 1.0;
        }
        for _ in 0..10 {
            // (1 + s)^2 - 1 = 2s + s^2
            s = s.mul_f64(2.0) + s * s;
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        debug_assert!(self.hi > 0.0);
        // a = m·2^e with m near 1 keeps exp(−x) away from the subnormal range
        let e = self.hi.log2().round() as i32;
        let m = self.ldexp(-e);
        let mut x = Dd::from_f64(m.hi.ln());
        for _ in 0..2 {
            x = x + m * (-x).exp() - Dd::ONE;
        }
        x + LN2.mul_f64(e as f64)
    }

    /// ln Γ(x) for x > 0.
    pub fn ln_gamma(self) -> Self {
        debug_assert!(self.hi > 0.0, "ln_gamma requires a positive argument");
        let mut y = self;
        let mut shift = Dd::ONE;
        while y.hi < STIRLING_MIN {
            shift = shift * y;
            y = y.add_f64(1.0);
        }
        let ln_y = y.ln();
        let mut acc = (y - Dd::from_f64(0.5)) * ln_y - y + HALF_LN_TWO_PI;
        let y_inv = y.recip();
        let y_inv2 = y_inv * y_inv;
        let mut y_pow = y_inv;
        for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
            let two_k = 2.0 * (k as f64 + 1.0);
            let coeff = Dd::from_f64(num) / Dd::from_f64(den * two_k * (two_k - 1.0));
            let term = coeff * y_pow;
            acc = acc + term;
            if term.hi.abs() < 1e-34 * acc.hi.abs() {
                break;
            }
            y_pow = y_pow * y_inv2;
        }
        if shift.hi != 1.0 || shift.lo != 0.0 {
            acc = acc - shift.ln();
        }
        acc
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    pub fn from_parts(re: f64, im: f64) -> Self {
        DdComplex {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    #[inline]
    pub fn scale(self, s: Dd) -> Self {
        DdComplex {
            re: self.re * s,
            im: self.im * s,
        }
    }

    /// Multiply by a complex number with `f64` parts.
    #[inline]
    pub fn mul_c64(self, re: f64, im: f64) -> Self {
        DdComplex {
            re: self.re.mul_f64(re) - self.im.mul_f64(im),
            im: self.re.mul_f64(im) + self.im.mul_f64(re),
        }
    }

    #[inline]
    pub fn norm_hi(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn add(self, b: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}
