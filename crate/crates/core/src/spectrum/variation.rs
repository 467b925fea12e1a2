use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::Extremal;
use crate::functionals::{a_form, axial_center, deficit, sample_field};
use crate::integrate::QuadratureRule;
use crate::params::Params;
use crate::zonal::ZonalField;

use super::{solve_channel, Alpha3, EigenPair, FormKind, MeshSpec, SLChannel};

/// Eigenfunction of the unit-scale problem moved to scale λ and axial offset `center`.
///
/// The amplitude λ^{n/p*} keeps ∫v_λ^{p*−2}φ² = 1.
pub fn eigen_field(pair: &EigenPair, params: &Params, lambda: f64, center: f64) -> Result<ZonalField> {
    let shifted = EigenPair { s0: pair.s0 - lambda.ln(), ..pair.clone() };
    let amp = lambda.powf(params.nf() / params.pstar);
    Ok(ZonalField::empty(params.n).with_term(amp, shifted.profile()?, pair.degree, center))
}

/// (∫|v|^{p*−2}φ², ∫|v|^{p*−2}vφ).
fn mass_terms(phi: &ZonalField, v: &Extremal, params: &Params, rule: &QuadratureRule) -> Result<(f64, f64)> {
    let y0 = axial_center(v)?;
    let nodes = rule.zonal_nodes();
    let s = sample_field(phi, &nodes, y0);
    let (mut quad, mut lin) = (0.0, 0.0);
    for (nd, sm) in nodes.iter().zip(&s) {
        let vv = v.radial(params, nd.r)[0];
        let w = vv.abs().powf(params.pstar - 2.0);
        quad += nd.weight * w * sm.value * sm.value;
        lin += nd.weight * w * vv * sm.value;
    }
    Ok((quad, lin))
}

/// ∫|v|^{p*−2}φ², the weighted inner product of φ with itself.
pub fn weighted_mass(phi: &ZonalField, v: &Extremal, params: &Params, rule: &QuadratureRule) -> Result<f64> {
    Ok(mass_terms(phi, v, params, rule)?.0)
}

fn check_unit(v: &Extremal) -> Result<()> {
    if (v.c.abs() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("extremal amplitude {} must have unit norm", v.c)));
    }
    Ok(())
}

/// p·∫A_v[∇φ, ∇φ] − S^p·p·(p*−1)∫|v|^{p*−2}φ² for ‖v‖_{p*} = 1.
pub fn second_variation(phi: &ZonalField, v: &Extremal, params: &Params, rule: &QuadratureRule) -> Result<f64> {
    check_unit(v)?;
    let a = a_form(params, v, phi, phi, rule)?;
    let (quad, _) = mass_terms(phi, v, params, rule)?;
    Ok(params.p * a - params.sp * params.p * (params.pstar - 1.0) * quad)
}

/// Q(φ) with δ(v + εφ) = ε²Q(φ) + o(ε²): half the second derivative of the deficit.
pub fn taylor_coefficient(phi: &ZonalField, v: &Extremal, params: &Params, rule: &QuadratureRule) -> Result<f64> {
    let sv = second_variation(phi, v, params, rule)?;
    let (_, lin) = mass_terms(phi, v, params, rule)?;
    Ok(0.5 * sv + 0.5 * params.sp * params.p * (params.pstar - params.p) * lin * lin)
}

/// Remainders |δ(v+εφ) − δ(v) − ε²Q(φ)| and their fitted order in ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionFit {
    pub order: f64,
    pub coefficient: f64,
    /// (ε, remainder)
    pub remainders: Vec<(f64, f64)>,
}

/// Fits the order of the Taylor remainder of the deficit about the unit extremal.
///
/// Subtracting the quadrature value of δ(v) removes the rule's bias at ε = 0.
pub fn expansion_consistency(
    phi: &ZonalField,
    params: &Params,
    rule: &QuadratureRule,
    eps_list: &[f64],
) -> Result<ExpansionFit> {
    if eps_list.len() < 3 || eps_list.iter().any(|&e| !(e > 0.0 && e <= 0.1)) {
        return Err(Error::Domain("need at least 3 values of ε in (0, 0.1]".into()));
    }
    let v = Extremal::unit(params.n);
    let vf = ZonalField::bubble(params, 1.0, 1.0, 0.0);
    let q = taylor_coefficient(phi, &v, params, rule)?;
    let d0 = deficit(&vf, params, rule)?;
    let mut remainders = Vec::with_capacity(eps_list.len());
    for &e in eps_list {
        let d = deficit(&vf.plus(e, phi), params, rule)?;
        remainders.push((e, (d - d0 - e * e * q).abs()));
    }
    let xs: Vec<f64> = remainders.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = remainders.iter().map(|r| r.1.max(f64::MIN_POSITIVE).ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ExpansionFit { order: sxy / sxx, coefficient: q, remainders })
}

/// Projections of u − v̂ onto the numerically computed first and second eigenspaces at v̂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeProjections {
    /// Squared component along the first eigenfunction in ∫|v̂|^{p*−2}·· .
    pub beta1sq: f64,
    /// Squared component in the span of the scale and axial-translation modes.
    pub beta2sq: f64,
    /// ∫A_{v̂}[∇(u−v̂), ∇(u−v̂)].
    pub a_energy: f64,
    /// ∫|v̂|^{p*−2}(u−v̂)².
    pub mass: f64,
    /// (1+2κ)·a_energy/α₃ at κ = 0.1, with α₃ rescaled to the amplitude of v̂.
    pub spectral_bound: f64,
}

/// κ in the spectral estimate of the mass by the energy.
pub const SPECTRAL_KAPPA: f64 = 0.1;

pub fn mode_projections(
    u: &ZonalField,
    minimizer: &Extremal,
    params: &Params,
    mesh: &MeshSpec,
    rule: &QuadratureRule,
    alpha3: &Alpha3,
) -> Result<ModeProjections> {
    let y0 = axial_center(minimizer)?;
    let (c, lam) = (minimizer.c, minimizer.lambda);
    let vf = ZonalField::bubble(params, c, lam, y0);
    let diff = u.plus(-1.0, &vf);
    let radial = solve_channel(&SLChannel::new(params, 0, FormKind::Linearized, *mesh)?, 2)?;
    let axial = solve_channel(&SLChannel::new(params, 1, FormKind::Linearized, *mesh)?, 1)?;
    let proj = |pair: &EigenPair| -> Result<f64> {
        let e = eigen_field(pair, params, lam, y0)?;
        let (ee, _) = mass_terms(&e, minimizer, params, rule)?;
        let nodes = rule.zonal_nodes();
        let se = sample_field(&e, &nodes, y0);
        let sd = sample_field(&diff, &nodes, y0);
        let mut dot = 0.0;
        for ((nd, a), b) in nodes.iter().zip(&se).zip(&sd) {
            let vv = minimizer.radial(params, nd.r)[0];
            dot += nd.weight * vv.abs().powf(params.pstar - 2.0) * a.value * b.value;
        }
        Ok(dot * dot / ee)
    };
    let beta1sq = proj(&radial[0])?;
    let beta2sq = proj(&radial[1])? + proj(&axial[0])?;
    let a_energy = a_form(params, minimizer, &diff, &diff, rule)?;
    let (mass, _) = mass_terms(&diff, minimizer, params, rule)?;
    let a3 = alpha3.alpha3 * c.abs().powf(params.p - params.pstar);
    Ok(ModeProjections {
        beta1sq,
        beta2sq,
        a_energy,
        mass,
        spectral_bound: (1.0 + 2.0 * SPECTRAL_KAPPA) * a_energy / a3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::build_rule_with_angular;
    use crate::spectrum::alpha3;
    use crate::zonal::ScaleModeProfile;
    use std::sync::Arc;

    fn third_mode(q: &Params, a3: &Alpha3) -> ZonalField {
        let ch = SLChannel::new(q, a3.degree, FormKind::Linearized, MeshSpec::default()).unwrap();
        let k = a3.candidates.iter().find(|c| c.0 == a3.degree).unwrap().1;
        let pair = solve_channel(&ch, k).unwrap()[k - 1].clone();
        eigen_field(&pair, q, 1.0, 0.0).unwrap()
    }

    #[test]
    fn tangent_and_radial_directions() {
        for (n, p) in [(4, 2.5), (5, 3.0)] {
            let q = Params::new(n, p).unwrap();
            let rule = build_rule_with_angular(&q, 256, 1e4, 16).unwrap();
            let v = Extremal::unit(n);
            let dl = ZonalField::radial(n, Arc::new(ScaleModeProfile::new(&q, 1.0)), 0.0);
            let scale = q.p * a_form(&q, &v, &dl, &dl, &rule).unwrap();
            assert!(second_variation(&dl, &v, &q, &rule).unwrap().abs() <= 1e-4 * scale);
            // φ = v: p(α₁ − α₂)∫v^{p*} with ∫v^{p*} = 1
            let vf = ZonalField::bubble(&q, 1.0, 1.0, 0.0);
            let sv = second_variation(&vf, &v, &q, &rule).unwrap();
            let want = q.p * (q.alpha1 - q.alpha2);
            assert!((sv - want).abs() < 1e-8 * want.abs(), "{sv} {want}");
        }
    }

    #[test]
    fn third_mode_matches_the_eigenvalue() {
        let q = Params::new(4, 2.5).unwrap();
        let a3 = alpha3(&q, &MeshSpec::default()).unwrap();
        let phi = third_mode(&q, &a3);
        let rule = build_rule_with_angular(&q, 256, 1e4, 32).unwrap();
        let v = Extremal::unit(4);
        let sv = second_variation(&phi, &v, &q, &rule).unwrap();
        let (norm, _) = mass_terms(&phi, &v, &q, &rule).unwrap();
        let want = q.p * (a3.alpha3 - q.alpha2) * norm;
        assert!(sv > 0.0 && (sv / want - 1.0).abs() < 1e-2, "{sv} {want}");
    }

    #[test]
    fn taylor_remainder_is_higher_order() {
        let q = Params::new(5, 3.0).unwrap();
        let a3 = alpha3(&q, &MeshSpec::default()).unwrap();
        let phi = third_mode(&q, &a3);
        let rule = build_rule_with_angular(&q, 256, 1e4, 32).unwrap();
        let fit = expansion_consistency(&phi, &q, &rule, &[1e-1, 3e-2, 1e-2, 3e-3]).unwrap();
        assert!(fit.order >= 2.8, "{fit:?}");
        // δ(v+εφ)/ε² → Q(φ)
        let vf = ZonalField::bubble(&q, 1.0, 1.0, 0.0);
        let d0 = deficit(&vf, &q, &rule).unwrap();
        let e = 1e-3;
        let ratio = (deficit(&vf.plus(e, &phi), &q, &rule).unwrap() - d0) / (e * e);
        assert!((ratio / fit.coefficient - 1.0).abs() < 1e-2);
        assert!(expansion_consistency(&phi, &q, &rule, &[0.2, 0.1, 0.05]).is_err());
    }

    #[test]
    fn projections_of_a_third_mode_perturbation() {
        let q = Params::new(4, 2.5).unwrap();
        let mesh = MeshSpec::default();
        let a3 = alpha3(&q, &mesh).unwrap();
        let phi = third_mode(&q, &a3);
        let rule = build_rule_with_angular(&q, 256, 1e4, 32).unwrap();
        let v = Extremal::unit(4);
        let eps = 1e-2;
        let u = ZonalField::bubble(&q, 1.0, 1.0, 0.0).plus(eps, &phi);
        let m = mode_projections(&u, &v, &q, &mesh, &rule, &a3).unwrap();
        assert!(m.beta1sq <= 1e-4 * m.a_energy && m.beta2sq <= 1e-4 * m.a_energy, "{m:?}");
        assert!(m.beta1sq + m.beta2sq <= m.mass);
        assert!(m.mass <= m.spectral_bound, "{m:?}");

        let dl = ZonalField::radial(4, Arc::new(ScaleModeProfile::new(&q, 1.0)), 0.0);
        let u = ZonalField::bubble(&q, 1.0, 1.0, 0.0).plus(eps, &dl);
        let m = mode_projections(&u, &v, &q, &mesh, &rule, &a3).unwrap();
        assert!((m.beta2sq / m.mass - 1.0).abs() < 1e-4, "{m:?}");
        assert!(m.beta1sq < 1e-4 * m.mass);
    }
}
