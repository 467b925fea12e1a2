use crate::error::{Error, Result};
use crate::extremal::Extremal;
use crate::integrate::QuadratureRule;
use crate::params::Params;
use crate::zonal::ZonalField;

use super::{axial_center, critical_norm, deficit, DistanceProblem};

/// δ(tu + (1−t)v) against t·δ(u) + S^p·p·‖v‖_{p*}^{p−1}·‖u − v‖_{p*}.
pub fn interpolation_deficit_check(
    u: &ZonalField,
    v: &Extremal,
    t: f64,
    params: &Params,
    rule: &QuadratureRule,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t={t} outside [0, 1]")));
    }
    let y0 = axial_center(v)?;
    let vf = ZonalField::bubble(params, v.c, v.lambda, y0);
    let nu = critical_norm(u, params, rule)?;
    let nv = critical_norm(&vf, params, rule)?;
    if (nu - nv).abs() > 1e-6 * nu.max(nv) {
        return Err(Error::NormMismatch(format!("‖u‖ = {nu}, ‖v‖ = {nv}")));
    }
    let mixed = u.scaled(t).plus(1.0 - t, &vf);
    let lhs = deficit(&mixed, params, rule)?;
    let du = deficit(u, params, rule)?;
    let prob = DistanceProblem::new(u, params, rule)?;
    let dist = prob.parts_with(v.c, v.lambda, y0).lpstar_pow.powf(1.0 / params.pstar);
    let rhs = t * du + params.sp * params.p * nv.powf(params.p - 1.0) * dist;
    Ok((lhs, rhs))
}
