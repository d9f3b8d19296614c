//! L1 discretisation of the Caputo derivative on graded meshes, used to check
//! the Mittag-Leffler modes against the equation itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::gamma_fn;
use crate::mittag_leffler::{ComplexValue, MLParams, MittagLeffler};
use crate::spectral::{kappa, FractionalIndices};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradedMesh {
    pub t_end: f64,
    pub n: usize,
    pub grading: f64,
}

impl GradedMesh {
    pub fn new(t_end: f64, n: usize, grading: f64) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mesh end must be positive, got {t_end}"
            )));
        }
        if n < 8 {
            return Err(Error::InvalidParameter(format!("mesh needs at least 8 steps, got {n}")));
        }
        if !(grading >= 1.0 && grading.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grading must be at least 1, got {grading}"
            )));
        }
        Ok(GradedMesh { t_end, n, grading })
    }

    pub fn uniform(t_end: f64, n: usize) -> Result<Self> {
        Self::new(t_end, n, 1.0)
    }

    /// Mesh graded with exponent (2 − α)/α.
    pub fn for_alpha(t_end: f64, n: usize, alpha: f64) -> Result<Self> {
        Self::new(t_end, n, (2.0 - alpha) / alpha)
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.n {
            self.t_end
        } else {
            self.t_end * (j as f64 / self.n as f64).powf(self.grading)
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|j| self.node(j)).collect()
    }
}

/// Quadrature weights w_j with ∂_t^α u(T) ≈ Σ_j w_j (u_{j+1} − u_j)/(t_{j+1} − t_j).
fn l1_weights(nodes: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let t_end = *nodes.last().expect("mesh has nodes");
    let n = nodes.len() - 1;
    if alpha == 1.0 {
        let mut w = vec![0.0; n];
        w[n - 1] = 1.0;
        return Ok(w);
    }
    let e = 1.0 - alpha;
    let scale = 1.0 / gamma_fn(2.0 - alpha)?;
    Ok((0..n)
        .map(|j| {
            let a = t_end - nodes[j];
            let b = t_end - nodes[j + 1];
            // a^e − b^e, written to stay accurate when e is tiny
            let diff = if b > 0.0 {
                b.powf(e) * (e * (a / b).ln()).exp_m1()
            } else {
                a.powf(e)
            };
            scale * diff
        })
        .collect())
}

/// L1 approximation of the Caputo derivative of order α at the last node.
/// At α = 1 this is the backward difference.
pub fn caputo_l1(samples: &[ComplexValue], mesh: &GradedMesh, alpha: f64) -> Result<ComplexValue> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0,1]".into()));
    }
    if samples.len() != mesh.n + 1 {
        return Err(Error::InvalidParameter(format!(
            "mesh has {} nodes but {} samples were given",
            mesh.n + 1,
            samples.len()
        )));
    }
    let nodes = mesh.nodes();
    let weights = l1_weights(&nodes, alpha)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, w) in weights.iter().enumerate() {
        let slope = (samples[j + 1] - samples[j]) / (nodes[j + 1] - nodes[j]);
        sum += slope * *w;
    }
    Ok(sum)
}

/// Caputo derivative of `u` at T from samples on `mesh`.
pub fn caputo_of<F: FnMut(f64) -> ComplexValue>(mut u: F, mesh: &GradedMesh, alpha: f64) -> Result<ComplexValue> {
    let samples: Vec<_> = mesh.nodes().into_iter().map(&mut u).collect();
    caputo_l1(&samples, mesh, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementCheck {
    pub fine: ComplexValue,
    pub coarse: ComplexValue,
    pub relative_change: f64,
    /// Halving the mesh moved the result by more than 10%.
    pub too_coarse: bool,
}

/// Compares the L1 value on `mesh` against the same mesh with half the steps.
pub fn refinement_check<F: FnMut(f64) -> ComplexValue>(
    mut u: F,
    mesh: &GradedMesh,
    alpha: f64,
) -> Result<RefinementCheck> {
    let coarse_mesh = GradedMesh::new(mesh.t_end, (mesh.n / 2).max(8), mesh.grading)?;
    let fine = caputo_of(&mut u, mesh, alpha)?;
    let coarse = caputo_of(&mut u, &coarse_mesh, alpha)?;
    let relative_change = (fine - coarse).norm() / fine.norm().max(f64::MIN_POSITIVE);
    Ok(RefinementCheck {
        fine,
        coarse,
        relative_change,
        too_coarse: relative_change > 0.1,
    })
}

/// |i^β ∂_t^α ĥ(T) − ρ²ĥ(T)| / (ρ²|ĥ(T)|) for ĥ(t) = E_{α,1}(κ(ρ, t)), with
/// the Caputo derivative from the L1 scheme on `mesh`.
pub fn mode_residual_on(idx: FractionalIndices, rho: f64, mesh: &GradedMesh) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    let ml = MittagLeffler::new(MLParams::new(idx.alpha, 1.0)?);
    let samples = mesh
        .nodes()
        .into_iter()
        .map(|t| ml.eval(kappa(idx, rho, t)))
        .collect::<Result<Vec<_>>>()?;
    let d = caputo_l1(&samples, mesh, idx.alpha)?;
    let h_end = *samples.last().expect("mesh has nodes");
    let rho2 = rho * rho;
    Ok((idx.i_pow_beta() * d - h_end * rho2).norm() / (rho2 * h_end.norm()))
}

/// Mode residual on the graded mesh with exponent (2 − α)/α.
pub fn mode_residual(idx: FractionalIndices, rho: f64, t_end: f64, n: usize) -> Result<f64> {
    mode_residual_on(idx, rho, &GradedMesh::for_alpha(t_end, n, idx.alpha)?)
}
