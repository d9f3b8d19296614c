//! Real gamma function in double precision.

use std::f64::consts::PI;

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Largest argument for which Γ(x) is finite in `f64`.
const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// sin(πx) with the argument reduced exactly before scaling by π.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round(); // r in [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

/// Γ(x). Negative arguments use Γ(x)Γ(1−x) = π / sin(πx).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidParameter("gamma of NaN".into()));
    }
    if is_pole(x) {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        if x > GAMMA_MAX_ARG {
            return Ok(f64::INFINITY);
        }
        return Ok(Dd::from_f64(x).ln_gamma().exp().to_f64());
    }
    let reflected = gamma_fn(1.0 - x)?;
    Ok(PI / (sin_pi(x) * reflected))
}

/// 1/Γ(x), which is entire: zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    if x > 0.0 {
        return (-Dd::from_f64(x).ln_gamma()).exp().to_f64();
    }
    // 1/Γ(x) = sin(πx) Γ(1−x) / π
    let ln_g = Dd::from_f64(1.0 - x).ln_gamma().to_f64();
    sin_pi(x) * (ln_g - PI.ln()).exp()
}

/// 1/Γ(x) in double-double precision for x > 0.
pub(crate) fn recip_gamma_dd(x: Dd) -> Dd {
    debug_assert!(x.hi > 0.0);
    (-x.ln_gamma()).exp()
}
