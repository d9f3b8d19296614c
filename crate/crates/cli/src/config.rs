use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use tfqd::asymptotics::default_window;
use tfqd::msd::{log_time_grid, overflow_horizon, QuadratureSpec, DEFAULT_POINTS_PER_DECADE};
use tfqd::spectral::{FractionalIndices, InitialDatum, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DatumKind {
    Gaussian,
    Annulus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumConfig {
    pub class: DatumKind,
    #[serde(default)]
    pub lambda_minus: Option<f64>,
    #[serde(default)]
    pub lambda_plus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    /// Defaults to the regime's fitting window when absent.
    #[serde(default)]
    pub t_min: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_ppd")]
    pub points_per_decade: usize,
}

fn default_ppd() -> usize {
    DEFAULT_POINTS_PER_DECADE
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            t_min: None,
            t_max: None,
            points_per_decade: DEFAULT_POINTS_PER_DECADE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        QuadratureConfig {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub csv_path: Option<PathBuf>,
    #[serde(default)]
    pub json_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "default_dimension")]
    pub dimension: u32,
    pub datum: DatumConfig,
    #[serde(default)]
    pub time_grid: TimeGrid,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_dimension() -> u32 {
    1
}

/// Everything a run needs, checked.
#[derive(Debug)]
pub struct Experiment {
    pub idx: FractionalIndices,
    pub datum: InitialDatum,
    pub quad: QuadratureSpec,
    pub grid: Vec<f64>,
    /// The input config with the time window filled in.
    pub resolved: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn problem(&self) -> Result<(FractionalIndices, InitialDatum), String> {
        let idx = FractionalIndices::new(self.alpha, self.beta).map_err(|e| e.to_string())?;
        let datum = match self.datum.class {
            DatumKind::Gaussian => InitialDatum::gaussian(self.dimension),
            DatumKind::Annulus => {
                let lo = self.datum.lambda_minus.ok_or("annulus datum needs lambda_minus")?;
                let hi = self.datum.lambda_plus.ok_or("annulus datum needs lambda_plus")?;
                InitialDatum::annulus(lo, hi, self.dimension)
            }
        }
        .map_err(|e| e.to_string())?;
        Ok((idx, datum))
    }

    pub fn validate(&self) -> Result<Experiment, String> {
        let (idx, datum) = self.problem()?;
        if self.datum.class == DatumKind::Gaussian {
            match idx.regime() {
                Regime::SubordinateDecay => {
                    return Err("the decay constant diverges for the gaussian datum; use --datum annulus".into())
                }
                Regime::ExponentialGrowth => {
                    return Err("alpha > beta needs a compactly supported datum; use --datum annulus".into())
                }
                Regime::Ballistic => {}
            }
        }
        let quad = QuadratureSpec {
            rel_tol: self.quadrature.rel_tol,
            abs_tol: self.quadrature.abs_tol,
            ..QuadratureSpec::default()
        };
        quad.validate().map_err(|e| e.to_string())?;
        if self.time_grid.points_per_decade == 0 {
            return Err("points_per_decade must be positive".into());
        }

        let mut resolved = self.clone();
        let window = match (self.time_grid.t_min, self.time_grid.t_max) {
            (Some(lo), Some(hi)) => (lo, hi),
            (lo, hi) => {
                let (a, b) = default_window(idx, &datum).map_err(|e| e.to_string())?;
                (lo.unwrap_or(a), hi.unwrap_or(b))
            }
        };
        if !(window.0 > 0.0 && window.0 < window.1 && window.1.is_finite()) {
            return Err(format!(
                "time window must satisfy 0 < t_min < t_max, got [{}, {}]",
                window.0, window.1
            ));
        }
        if let Some(horizon) = overflow_horizon(idx, &datum) {
            if window.1 > horizon {
                return Err(format!(
                    "t_max = {} is past the overflow horizon T_max = {horizon}",
                    window.1
                ));
            }
        }
        resolved.time_grid.t_min = Some(window.0);
        resolved.time_grid.t_max = Some(window.1);

        let grid = log_time_grid(window.0, window.1, self.time_grid.points_per_decade).map_err(|e| e.to_string())?;
        if grid.len() < tfqd::asymptotics::MIN_FIT_SAMPLES {
            return Err(format!(
                "time grid has {} points, the fit needs at least {}; widen the window or raise --ppd",
                grid.len(),
                tfqd::asymptotics::MIN_FIT_SAMPLES
            ));
        }
        Ok(Experiment {
            idx,
            datum,
            quad,
            grid,
            resolved,
        })
    }
}
