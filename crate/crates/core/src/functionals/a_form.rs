use crate::error::Result;
use crate::extremal::Extremal;
use crate::integrate::QuadratureRule;
use crate::params::Params;
use crate::zonal::ZonalField;

use super::{axial_center, check_finite, sample_field};

/// (∫|∇v|^{p−2} ∇f₁·∇f₂, ∫|∇v|^{p−2} ∂_r f₁ ∂_r f₂) with r measured from the center of v.
pub fn a_form_split(
    params: &Params,
    v: &Extremal,
    f1: &ZonalField,
    f2: &ZonalField,
    rule: &QuadratureRule,
) -> Result<(f64, f64)> {
    let y0 = axial_center(v)?;
    let nodes = rule.zonal_nodes();
    let s1 = sample_field(f1, &nodes, y0);
    let s2 = sample_field(f2, &nodes, y0);
    let (mut full, mut radial) = (0.0, 0.0);
    for ((nd, a), b) in nodes.iter().zip(&s1).zip(&s2) {
        let dv = v.radial(params, nd.r)[1];
        let w = if params.p == 2.0 { 1.0 } else { dv.abs().powf(params.p - 2.0) };
        let dot = a.g_axial * b.g_axial + a.g_perp * b.g_perp;
        let ra = a.g_axial * nd.mu + a.g_perp * nd.sin;
        let rb = b.g_axial * nd.mu + b.g_perp * nd.sin;
        full += nd.weight * check_finite(w * dot, nd)?;
        radial += nd.weight * check_finite(w * ra * rb, nd)?;
    }
    Ok((full, radial))
}

/// ∫ A_v[∇f₁, ∇f₂] = ∫|∇v|^{p−2}(∇f₁·∇f₂ + (p−2) ∂_r f₁ ∂_r f₂).
pub fn a_form(
    params: &Params,
    v: &Extremal,
    f1: &ZonalField,
    f2: &ZonalField,
    rule: &QuadratureRule,
) -> Result<f64> {
    let (full, radial) = a_form_split(params, v, f1, f2, rule)?;
    Ok(full + (params.p - 2.0) * radial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::integrate::build_rule;
    use crate::zonal::{AlgebraicProfile, BumpProfile};
    use std::sync::Arc;

    fn fields(n: usize) -> (ZonalField, ZonalField) {
        let a = ZonalField::empty(n).with_term(1.0, Arc::new(BumpProfile { radius: 2.0, power: 2 }), 2, 0.0);
        let b = ZonalField::empty(n)
            .with_term(0.5, Arc::new(AlgebraicProfile { decay: 2.0 }), 0, 0.0)
            .with_term(1.0, Arc::new(BumpProfile { radius: 1.0, power: 1 }), 1, 0.0);
        (a, b)
    }

    #[test]
    fn p2_is_plain_dirichlet_form() {
        let q = Params::new(4, 2.0).unwrap();
        let rule = build_rule(&q, 256, 1e4).unwrap();
        let (a, b) = fields(4);
        let v = Extremal::unit(4);
        let (full, _) = a_form_split(&q, &v, &a, &b, &rule).unwrap();
        assert_eq!(a_form(&q, &v, &a, &b, &rule).unwrap(), full);
    }

    #[test]
    fn symmetric() {
        let q = Params::new(5, 3.0).unwrap();
        let rule = build_rule(&q, 256, 1e4).unwrap();
        let (a, b) = fields(5);
        let v = Extremal::new(1.0, 1.3, vec![0.2, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let ab = a_form(&q, &v, &a, &b, &rule).unwrap();
        let ba = a_form(&q, &v, &b, &a, &rule).unwrap();
        assert!((ab - ba).abs() < 1e-12 * ab.abs().max(1e-12));
    }

    #[test]
    fn bubble_against_itself() {
        for (n, p) in [(4, 2.5), (5, 3.0), (3, 2.0)] {
            let q = Params::new(n, p).unwrap();
            let rule = build_rule(&q, 512, 1e4).unwrap();
            let v = Extremal::unit(n);
            let f = ZonalField::bubble(&q, 1.0, 1.0, 0.0);
            let got = a_form(&q, &v, &f, &f, &rule).unwrap();
            assert!((got - (p - 1.0) * q.sp).abs() < 1e-8 * q.sp, "n={n} p={p}");
        }
    }

    #[test]
    fn off_axis_center_is_rejected() {
        let q = Params::new(3, 2.0).unwrap();
        let rule = build_rule(&q, 256, 1e4).unwrap();
        let (a, b) = fields(3);
        let v = Extremal::new(1.0, 1.0, vec![0.0, 0.5, 0.0]).unwrap();
        assert!(matches!(a_form(&q, &v, &a, &b, &rule), Err(Error::Configuration(_))));
    }
}
