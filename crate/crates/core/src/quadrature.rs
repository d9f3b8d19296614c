//! One-dimensional quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

pub const DEFAULT_MAX_INTERVALS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

// Max-heap order on the error estimate.
impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// QUADPACK-style rescaling of the raw |K15 − G7| difference.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_g = f_center * WG[3];
    let mut res_k = f_center * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    if !value.is_finite() {
        return Err(Error::Quadrature {
            value,
            error: f64::INFINITY,
            intervals: 1,
        });
    }
    let error = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    Ok(Segment { a, b, value, error })
}

/// Globally adaptive Gauss–Kronrod (7, 15) integration of `f` over [a, b].
///
/// The interval with the largest error estimate is bisected until the total
/// estimated error is at most max(abs_tol, rel_tol·|I|).
pub fn integrate_gk<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integration limits [{a}, {b}] must be finite"
        )));
    }
    if !(abs_tol > 0.0 || rel_tol > 0.0) || abs_tol < 0.0 || rel_tol < 0.0 {
        return Err(Error::InvalidParameter(
            "quadrature tolerances must be nonnegative and not both zero".into(),
        ));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 1,
            evaluations: 0,
        });
    }
    let first = gk15(&mut f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::from([first]);
    let mut evaluations = 15;
    loop {
        if error <= abs_tol.max(rel_tol * value.abs()) {
            // running sums drift; confirm against a fresh summation
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
            if error <= abs_tol.max(rel_tol * value.abs()) {
                return Ok(QuadResult {
                    value,
                    error,
                    intervals: heap.len(),
                    evaluations,
                });
            }
        }
        let seg = *heap.peek().expect("at least one segment");
        let mid = 0.5 * (seg.a + seg.b);
        if heap.len() >= max_intervals || mid <= seg.a || mid >= seg.b {
            return Err(Error::Quadrature {
                value: heap.iter().map(|s| s.value).sum(),
                error: heap.iter().map(|s| s.error).sum(),
                intervals: heap.len(),
            });
        }
        heap.pop();
        let left = gk15(&mut f, seg.a, mid)?;
        let right = gk15(&mut f, mid, seg.b)?;
        evaluations += 30;
        value += left.value + right.value - seg.value;
        error += left.error + right.error - seg.error;
        heap.push(left);
        heap.push(right);
    }
}

/// Gauss–Legendre 7-point rule applied on `panels` equal sub-intervals.
pub fn composite_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let center = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = WG[3] * f(center);
        for j in 0..3 {
            let x = half * XGK[2 * j + 1];
            s += WG[j] * (f(center - x) + f(center + x));
        }
        total += s * half;
    }
    total
}

/// Composite Gauss–Legendre with panel doubling until two successive
/// estimates agree to max(abs_tol, rel_tol·|I|).
pub fn integrate_gl<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    let mut panels = 4;
    let mut previous = composite_gl(&mut f, a, b, panels);
    let mut evaluations = 7 * panels;
    loop {
        panels *= 2;
        let current = composite_gl(&mut f, a, b, panels);
        evaluations += 7 * panels;
        let error = (current - previous).abs();
        if !current.is_finite() {
            return Err(Error::Quadrature {
                value: current,
                error,
                intervals: panels,
            });
        }
        if error <= abs_tol.max(rel_tol * current.abs()) {
            return Ok(QuadResult {
                value: current,
                error,
                intervals: panels,
                evaluations,
            });
        }
        if panels >= max_panels {
            return Err(Error::Quadrature {
                value: current,
                error,
                intervals: panels,
            });
        }
        previous = current;
    }
}

/// Trapezoid rule with `points` equally spaced nodes including both ends.
pub fn trapezoid<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, points: usize) -> f64 {
    assert!(points >= 2, "trapezoid needs at least two nodes");
    let n = points - 1;
    let h = (b - a) / n as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    for i in 1..n {
        sum += f(a + i as f64 * h);
    }
    sum * h
}
