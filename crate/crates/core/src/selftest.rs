//! Quick invariant suite behind `tfqd selftest`.
//!
//! Two knobs allow deliberate faults so that the suite can be shown to catch
//! them: a Mittag-Leffler crossover radius override and a nonzero tolerance
//! in the α = β test of the regime map.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::caputo::mode_residual;
use crate::gamma::recip_gamma;
use crate::mittag_leffler::{crossover_radius, MLParams, MittagLeffler};
use crate::msd::{initial_msd, msd_at, QuadratureSpec};
use crate::oracle::ml_oracle;
use crate::quadrature::trapezoid;
use crate::spectral::{
    regime_with_tolerance, sobolev_interp_check, FractionalIndices, InitialDatum, Propagator, Regime,
};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Faults {
    /// Replaces the series/asymptotic crossover radius of the evaluator.
    pub crossover: Option<f64>,
    /// |α − β| at or below this counts as α = β.
    pub ballistic_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, worst: f64, limit: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: worst.is_finite() && worst <= limit,
        detail: format!("worst {worst:.3e} (limit {limit:.0e})"),
    }
}

fn failure(name: &'static str, err: impl std::fmt::Display) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: false,
        detail: err.to_string(),
    }
}

fn evaluator(alpha: f64, gamma: f64, faults: &Faults) -> MittagLeffler {
    let p = MLParams::new(alpha, gamma).expect("fixed parameters are valid");
    match faults.crossover {
        Some(r) => MittagLeffler::with_crossover(p, r),
        None => MittagLeffler::new(p),
    }
}

fn exponential_identity(faults: &Faults) -> CheckOutcome {
    let ml = evaluator(1.0, 1.0, faults);
    let mut worst = 0.0f64;
    for k in 0..=20 {
        let beta = k as f64 / 20.0;
        for m in [0.1, 1.0, 4.0, 9.5] {
            let z = Complex64::from_polar(m, -PI * beta / 2.0);
            match ml.eval(z) {
                Ok(v) => worst = worst.max((v - z.exp()).norm() / z.exp().norm()),
                Err(e) => return failure("E(1,1)(z) = exp(z)", e),
            }
        }
    }
    outcome("E(1,1)(z) = exp(z)", worst, 1e-10)
}

fn value_at_origin(faults: &Faults) -> CheckOutcome {
    let mut worst = 0.0f64;
    for alpha in [0.1, 0.5, 0.9, 1.0] {
        for gamma in [0.5, 1.0, alpha, 2.5] {
            match evaluator(alpha, gamma, faults).eval(Complex64::new(0.0, 0.0)) {
                Ok(v) => worst = worst.max((v - recip_gamma(gamma)).norm()),
                Err(e) => return failure("E(a,g)(0) = 1/Gamma(g)", e),
            }
        }
    }
    outcome("E(a,g)(0) = 1/Gamma(g)", worst, 1e-12)
}

fn dispatcher_against_oracle(faults: &Faults) -> CheckOutcome {
    const NAME: &str = "evaluator vs oracle near crossover";
    let mut worst = 0.0f64;
    for alpha in [0.5, 0.75] {
        let ml = evaluator(alpha, 1.0, faults);
        let r = crossover_radius(alpha);
        for beta in [0.3, 0.7, 1.0] {
            for scale in [0.5, 0.8, 0.95, 1.05, 1.2] {
                let z = Complex64::from_polar(scale * r, -PI * beta / 2.0);
                let truth = match ml_oracle(alpha, 1.0, z, 20) {
                    Ok(v) => v,
                    Err(e) => return failure(NAME, e),
                };
                match ml.eval(z) {
                    Ok(v) => worst = worst.max((v - truth).norm() / truth.norm()),
                    Err(e) => return failure(NAME, e),
                }
            }
        }
    }
    outcome(NAME, worst, 1e-7)
}

fn regime_classifier(faults: &Faults) -> CheckOutcome {
    let cases = [
        (0.3, 0.9, Regime::SubordinateDecay),
        (0.6, 0.6, Regime::Ballistic),
        (0.9, 0.3, Regime::ExponentialGrowth),
        (0.6, 0.6 + 1e-9, Regime::SubordinateDecay),
        (0.6 + 1e-9, 0.6, Regime::ExponentialGrowth),
    ];
    let wrong: Vec<String> = cases
        .iter()
        .filter(|(a, b, want)| regime_with_tolerance(*a, *b, faults.ballistic_tolerance) != *want)
        .map(|(a, b, want)| format!("({a}, {b}) should be {want:?}"))
        .collect();
    CheckOutcome {
        name: "regime classifier",
        passed: wrong.is_empty(),
        detail: if wrong.is_empty() {
            "5/5 cases".into()
        } else {
            wrong.join("; ")
        },
    }
}

fn residuals(_: &Faults) -> CheckOutcome {
    const NAME: &str = "mode residual shrinks under refinement";
    let mut worst = 0.0f64;
    for (a, b) in [(0.5, 1.0), (0.7, 0.7), (0.9, 0.4)] {
        let idx = FractionalIndices::new(a, b).expect("fixed indices");
        let coarse = mode_residual(idx, 1.0, 1.0, 256);
        let fine = mode_residual(idx, 1.0, 1.0, 1024);
        match (coarse, fine) {
            (Ok(c), Ok(f)) if f < c => worst = worst.max(f),
            (Ok(c), Ok(f)) => {
                return CheckOutcome {
                    name: NAME,
                    passed: false,
                    detail: format!("α={a} β={b}: {c:.2e} → {f:.2e}"),
                }
            }
            (Err(e), _) | (_, Err(e)) => return failure(NAME, e),
        }
    }
    outcome(NAME, worst, 1e-2)
}

fn adaptive_against_trapezoid(_: &Faults) -> CheckOutcome {
    const NAME: &str = "adaptive MSD vs dense trapezoid";
    let cases = [
        (0.5, 1.0, InitialDatum::annulus(1.0, 2.0, 3), 100.0),
        (0.5, 0.5, InitialDatum::gaussian(1), 2.0),
        (0.8, 0.4, InitialDatum::annulus(1.0, 1.1, 1), 50.0),
    ];
    let mut worst = 0.0f64;
    for (a, b, d, t) in cases {
        let idx = FractionalIndices::new(a, b).expect("fixed indices");
        let d = d.expect("fixed datum");
        let p = Propagator::new(idx);
        let (lo, hi) = d.support();
        let power = d.dimension as i32 - 1;
        let mut bad = None;
        let dense = d.sphere_area()
            * trapezoid(
                |rho| match p.mode(&d, rho, t) {
                    Ok(m) => m.du_hat_drho.norm_sqr() * rho.powi(power),
                    Err(e) => {
                        bad.get_or_insert(e);
                        0.0
                    }
                },
                lo,
                hi,
                100_001,
            );
        if let Some(e) = bad {
            return failure(NAME, e);
        }
        match msd_at(idx, &d, t, &QuadratureSpec::default()) {
            Ok(v) => worst = worst.max((v - dense).abs() / dense),
            Err(e) => return failure(NAME, e),
        }
    }
    outcome(NAME, worst, 1e-7)
}

fn free_particle(_: &Faults) -> CheckOutcome {
    const NAME: &str = "free particle D2 = 4t^2|rho f|^2 + |grad u0|^2";
    let idx = FractionalIndices::new(1.0, 1.0).expect("fixed indices");
    let d = InitialDatum::gaussian(1).expect("fixed datum");
    let grad0 = match initial_msd(&d) {
        Ok(v) => v,
        Err(e) => return failure(NAME, e),
    };
    let mut worst = 0.0f64;
    for t in [1.0, 10.0, 100.0] {
        let exact = 4.0 * t * t * PI.sqrt() / 2.0 + grad0;
        match msd_at(idx, &d, t, &QuadratureSpec::default()) {
            Ok(v) => worst = worst.max((v - exact).abs() / exact),
            Err(e) => return failure(NAME, e),
        }
    }
    outcome(NAME, worst, 1e-9)
}

fn interpolation(_: &Faults) -> CheckOutcome {
    const NAME: &str = "interpolation inequality";
    for d in [InitialDatum::gaussian(1), InitialDatum::annulus(1.0, 2.0, 3)] {
        let d = d.expect("fixed datum");
        for alpha in [0.3, 0.5, 0.7, 1.0] {
            match sobolev_interp_check(&d, alpha) {
                Ok(c) if c.ok => {}
                Ok(c) => {
                    return CheckOutcome {
                        name: NAME,
                        passed: false,
                        detail: format!("{} α={alpha}: {} > {}", d.id(), c.lhs, c.rhs),
                    }
                }
                Err(e) => return failure(NAME, e),
            }
        }
    }
    CheckOutcome {
        name: NAME,
        passed: true,
        detail: "8/8 cases".into(),
    }
}

/// Runs every check and returns one outcome per check, in a fixed order.
pub fn run(faults: &Faults) -> Vec<CheckOutcome> {
    let checks: [fn(&Faults) -> CheckOutcome; 8] = [
        exponential_identity,
        value_at_origin,
        dispatcher_against_oracle,
        regime_classifier,
        residuals,
        adaptive_against_trapezoid,
        free_particle,
        interpolation,
    ];
    checks.iter().map(|c| c(faults)).collect()
}
