//! Perturbations of the unit extremal used for stability sweeps.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{energies, interpolation_deficit_check, stability_report, ReportConfig, StabilityReport};
use crate::integrate::QuadratureRule;
use crate::params::Params;
use crate::spectrum::{alpha3, eigen_field, solve_channel, FormKind, MeshSpec, SLChannel};
use crate::zonal::{AlgebraicProfile, CutoffProfile, RadialProfile, ScaleModeProfile, SlopeProfile, ZonalField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// ∂_λ of the extremal, tangent to the manifold.
    ScaleMode,
    /// −v′ Y₁, tangent to the manifold along the axis.
    TranslationMode,
    /// Eigenfunction of the third eigenvalue of the linearized operator.
    ThirdMode,
    CompactBump,
    /// Smooth radial profile with a power-law tail r^{−n/p−1/4}.
    HeavyTailBump,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::ScaleMode, Family::TranslationMode, Family::ThirdMode, Family::CompactBump, Family::HeavyTailBump];

    pub fn name(&self) -> &'static str {
        match self {
            Family::ScaleMode => "scale-mode",
            Family::TranslationMode => "translation-mode",
            Family::ThirdMode => "third-mode",
            Family::CompactBump => "compact-bump",
            Family::HeavyTailBump => "heavy-tail-bump",
        }
    }
}

pub const AMPLITUDES: [f64; 4] = [1e-1, 3e-2, 1e-2, 3e-3];
pub const INTERPOLATION_TS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Unnormalized direction of a family.
fn raw_direction(family: Family, params: &Params, mesh: &MeshSpec) -> Result<ZonalField> {
    let n = params.n;
    let term = |profile: Arc<dyn RadialProfile>, degree: usize| ZonalField::empty(n).with_term(1.0, profile, degree, 0.0);
    Ok(match family {
        Family::ScaleMode => term(Arc::new(ScaleModeProfile::new(params, 1.0)), 0),
        Family::TranslationMode => term(Arc::new(SlopeProfile::new(params, 1.0)), 1),
        Family::ThirdMode => {
            let a3 = alpha3(params, mesh)?;
            let k = a3
                .candidates
                .iter()
                .find(|c| c.0 == a3.degree)
                .map(|c| c.1)
                .ok_or_else(|| Error::Eigen("α₃ channel missing".into()))?;
            let ch = SLChannel::new(params, a3.degree, FormKind::Linearized, *mesh)?;
            let pair = solve_channel(&ch, k)?.swap_remove(k - 1);
            eigen_field(&pair, params, 1.0, 0.0)?
        }
        Family::CompactBump => term(Arc::new(CutoffProfile { radius: 2.0, order: 8 }), 0),
        Family::HeavyTailBump => term(Arc::new(AlgebraicProfile { decay: params.nf() / params.p + 0.25 }), 0),
    })
}

/// Direction φ of a family scaled to ∫|∇φ|^p = 1 on `rule`.
pub fn direction(family: Family, params: &Params, rule: &QuadratureRule, mesh: &MeshSpec) -> Result<ZonalField> {
    let phi = raw_direction(family, params, mesh)?;
    let (grad, _) = energies(&phi, params, rule)?;
    Ok(phi.scaled(grad.powf(-1.0 / params.p)))
}

/// v₁ + εφ.
pub fn member(phi: &ZonalField, eps: f64, params: &Params) -> ZonalField {
    ZonalField::bubble(params, 1.0, 1.0, 0.0).plus(eps, phi)
}

/// One sweep entry: the report and the interpolation check at its minimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCase {
    pub family: Family,
    pub eps: f64,
    pub report: StabilityReport,
    /// (t, δ(tu + (1−t)v̂), bound)
    pub interpolation: Vec<(f64, f64, f64)>,
}

/// Every family at every amplitude, in (family, amplitude) order.
pub fn sweep(params: &Params, rule: &QuadratureRule, mesh: &MeshSpec, cfg: &ReportConfig) -> Result<Vec<SweepCase>> {
    let dirs = Family::ALL
        .iter()
        .map(|&f| direction(f, params, rule, mesh).map(|d| (f, d)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(Family, &ZonalField, f64)> = dirs
        .iter()
        .flat_map(|(f, d)| AMPLITUDES.iter().map(move |&e| (*f, d, e)))
        .collect();
    jobs.par_iter()
        .map(|&(family, phi, eps)| {
            let u = member(phi, eps, params);
            let report = stability_report(&u, params, rule, cfg)?;
            let interpolation = INTERPOLATION_TS
                .iter()
                .map(|&t| interpolation_deficit_check(&u, &report.minimizer, t, params, rule).map(|(l, r)| (t, l, r)))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepCase { family, eps, report, interpolation })
        })
        .collect()
}
