//! Radial channels of the linearized p-Laplacian about the extremal and the quantities built on them.

mod analysis;
mod channel;
pub mod eigen;
mod poincare;
mod polar;
mod variation;

pub use analysis::{
    alpha3, alpha3_scaled, coefficient_exponents, count_zeros, decay_fit, weighted_correlation, Alpha3, CoefficientExponents,
};
pub use channel::{FormKind, MeshSpec, SLChannel};
pub use poincare::{poincare_min_rayleigh, PoincareBound};
pub use polar::{polar_apply, polar_fd_check, PolarCheck};
pub use variation::{
    eigen_field, expansion_consistency, mode_projections, second_variation, taylor_coefficient, weighted_mass, ExpansionFit,
    ModeProjections,
};
pub use crate::zonal::spherical_eigenvalue;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::zonal::TabulatedProfile;

/// Default far-field window for decay fits.
pub const DECAY_WINDOW: (f64, f64) = (100.0, 2000.0);
/// Sign changes are counted only between samples above this fraction of max|f|.
pub const ZERO_TOL: f64 = 1e-8;

/// One eigenpair of a channel: nodal values on the s-mesh, normalized by ∫w f² dr = 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub alpha: f64,
    pub degree: usize,
    pub index: usize,
    #[serde(skip)]
    pub f: Vec<f64>,
    pub zeros: usize,
    /// Fitted far-field decay exponent; NaN if the default window holds a sign change.
    pub decay_beta: f64,
    pub s0: f64,
    pub ds: f64,
    /// Exponent used to continue the profile beyond the mesh.
    pub tail: f64,
}

impl EigenPair {
    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.f.len()).map(move |i| (self.s0 + self.ds * i as f64).exp())
    }

    /// Interpolating profile of the eigenfunction at scale 1.
    pub fn profile(&self) -> Result<Arc<TabulatedProfile>> {
        Ok(Arc::new(TabulatedProfile::new(self.s0, self.ds, self.f.clone(), self.tail)?))
    }
}

fn pairs_on(channel: &SLChannel, count: usize) -> Result<Vec<EigenPair>> {
    let (k, m) = channel.assemble();
    let mut out = Vec::with_capacity(count);
    for index in 1..=count {
        let alpha = eigen::kth_eigenvalue(&k, &m, index)?;
        let mut f = eigen::eigenvector(&k, &m, alpha)?;
        let peak = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let lead = f.iter().find(|v| v.abs() > ZERO_TOL * peak).copied().unwrap_or(1.0);
        if lead < 0.0 {
            f.iter_mut().for_each(|v| *v = -*v);
        }
        let zeros = count_zeros(&f, ZERO_TOL);
        let mut pair = EigenPair {
            alpha,
            degree: channel.degree,
            index,
            f,
            zeros,
            decay_beta: f64::NAN,
            s0: channel.mesh.s0(),
            ds: channel.mesh.ds(),
            tail: channel.far_field_exponent(),
        };
        pair.decay_beta = decay_fit(&pair, DECAY_WINDOW).unwrap_or(f64::NAN);
        out.push(pair);
    }
    Ok(out)
}

/// First `count` eigenpairs, checked against the same channel on a mesh twice as fine.
pub fn solve_channel(channel: &SLChannel, count: usize) -> Result<Vec<EigenPair>> {
    if count == 0 {
        return Err(Error::Domain("need at least one eigenpair".into()));
    }
    let coarse = pairs_on(channel, count)?;
    let fine_channel = SLChannel { mesh: channel.mesh.refined(), ..*channel };
    let (k, m) = fine_channel.assemble();
    for pair in &coarse {
        let fine = eigen::kth_eigenvalue(&k, &m, pair.index)?;
        let diff = (fine - pair.alpha).abs() / fine;
        if diff > 10.0 * channel.mesh.tol {
            return Err(Error::MeshInadequate(format!(
                "degree {} eigenvalue {}: {} vs {} on the refined mesh",
                channel.degree, pair.index, pair.alpha, fine
            )));
        }
    }
    Ok(coarse)
}

/// Eigenvalues only, without the refinement check.
pub fn channel_eigenvalues(channel: &SLChannel, count: usize) -> Result<Vec<f64>> {
    let (k, m) = channel.assemble();
    (1..=count).map(|i| eigen::kth_eigenvalue(&k, &m, i)).collect()
}

/// Error shrink factor of the first two radial eigenvalues when the mesh is refined; the smaller of the two.
pub fn richardson_ratio(params: &Params, mesh: &MeshSpec) -> Result<f64> {
    let coarse = channel_eigenvalues(&SLChannel::new(params, 0, FormKind::Linearized, *mesh)?, 2)?;
    let fine = channel_eigenvalues(&SLChannel::new(params, 0, FormKind::Linearized, mesh.refined())?, 2)?;
    let exact = [params.alpha1, params.alpha2];
    Ok((0..2)
        .map(|i| (coarse[i] - exact[i]).abs() / (fine[i] - exact[i]).abs())
        .fold(f64::INFINITY, f64::min))
}

/// (p−1)S^p and (p*−1)S^p.
pub fn known_eigenvalues(params: &Params) -> (f64, f64) {
    (params.alpha1, params.alpha2)
}
