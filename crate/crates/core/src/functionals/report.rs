use serde::Serialize;

use crate::error::Result;
use crate::extremal::Extremal;
use crate::integrate::QuadratureRule;
use crate::params::Params;
use crate::zonal::ZonalField;

use super::{deficit, DistanceProblem, SearchOptions};

/// Thresholds used to classify and bound a report.
///
/// The defaults were fitted on the bundled perturbation family; they are not sharp constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportConfig {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Ratio at or below which a report is labelled distance-dominated.
    pub c_star_low: f64,
    /// Ratio at or above which a report is labelled gradient-dominated.
    pub c_star_high: f64,
    pub c_report: f64,
    pub multistarts: usize,
    pub tol: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        let (c1, c2, c3) = (0.2, 1.0, 1.0);
        ReportConfig {
            c1,
            c2,
            c3,
            c_star_low: 1.0 / (8.0 * c3),
            c_star_high: 2.0 * c2 / c1,
            c_report: 2.0,
            multistarts: 8,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    GradientDominated,
    DistanceDominated,
    Middle,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::GradientDominated => "gradient-dominated",
            Regime::DistanceDominated => "distance-dominated",
            Regime::Middle => "middle",
        }
    }

    pub fn classify(ratio: f64, cfg: &ReportConfig) -> Regime {
        if ratio >= cfg.c_star_high {
            Regime::GradientDominated
        } else if ratio <= cfg.c_star_low {
            Regime::DistanceDominated
        } else {
            Regime::Middle
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub deficit: f64,
    pub dist2: f64,
    /// ∫|∇v̂|^{p−2}|∇u−∇v̂|², the lower end of the sandwich around dist2.
    pub plain_dist2: f64,
    pub grad_p_dist: f64,
    pub lpstar_dist: f64,
    pub regime_ratio: f64,
    pub regime: Regime,
    pub minimizer: Extremal,
    pub bound2_residual: f64,
    pub bound_p_residual: f64,
    pub main_ratio: f64,
    pub u_norm: f64,
}

impl StabilityReport {
    pub fn lambda_hat(&self) -> f64 {
        self.minimizer.lambda
    }

    pub fn y_hat(&self) -> f64 {
        self.minimizer.y[0]
    }

    /// plain ≤ dist2 ≤ (p−1)·plain up to a relative slack.
    pub fn sandwich_holds(&self, p: f64, slack: f64) -> bool {
        let tol = slack * self.plain_dist2.abs() + 1e-300;
        self.plain_dist2 <= self.dist2 + tol && self.dist2 <= (p - 1.0) * self.plain_dist2 + tol
    }
}

pub fn stability_report(
    u: &ZonalField,
    params: &Params,
    rule: &QuadratureRule,
    cfg: &ReportConfig,
) -> Result<StabilityReport> {
    let delta = deficit(u, params, rule)?;
    let prob = DistanceProblem::new(u, params, rule)?;
    let fit = prob.minimize(SearchOptions { multistarts: cfg.multistarts, tol: cfg.tol })?;
    let parts = prob.parts(fit.minimizer.lambda, fit.y_axial);
    let lpstar = parts.lpstar_pow.max(0.0).powf(1.0 / params.pstar);
    let ratio = if parts.grad_p > 0.0 { parts.a_energy / parts.grad_p } else { 0.0 };
    let denom = delta + prob.c.powf(params.p - 1.0) * lpstar;
    let main_ratio = if parts.grad_p > 0.0 && denom > 0.0 { parts.grad_p / denom } else { 0.0 };
    Ok(StabilityReport {
        deficit: delta,
        dist2: parts.a_energy,
        plain_dist2: parts.plain,
        grad_p_dist: parts.grad_p,
        lpstar_dist: lpstar,
        regime_ratio: ratio,
        regime: Regime::classify(ratio, cfg),
        minimizer: fit.minimizer,
        bound2_residual: delta - cfg.c1 * parts.a_energy + cfg.c2 * parts.grad_p,
        bound_p_residual: delta + cfg.c3 * parts.a_energy - 0.25 * parts.grad_p,
        main_ratio,
        u_norm: prob.c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::build_rule_with_angular;
    use crate::zonal::{CutoffProfile, ZonalField};
    use std::sync::Arc;

    fn setup(n: usize, p: f64) -> (Params, QuadratureRule) {
        let q = Params::new(n, p).unwrap();
        let rule = build_rule_with_angular(&q, 256, 1e4, 16).unwrap();
        (q, rule)
    }

    fn bumped(q: &Params, eps: f64) -> ZonalField {
        let bump = ZonalField::empty(q.n).with_term(1.0, Arc::new(CutoffProfile { radius: 2.0, order: 8 }), 2, 0.0);
        ZonalField::bubble(q, 1.0, 1.0, 0.0).plus(eps, &bump)
    }

    #[test]
    fn extremal_reports_zero() {
        let (q, rule) = setup(4, 2.5);
        let v = ZonalField::bubble(&q, 1.0, 1.0, 0.0);
        let r = stability_report(&v, &q, &rule, &ReportConfig::default()).unwrap();
        assert!(r.dist2 < 1e-10 && r.grad_p_dist < 1e-10 && r.lpstar_dist < 1e-10, "{r:?}");
        assert!(r.deficit.abs() < 1e-10);
        assert!(r.main_ratio < 1e-10);
    }

    #[test]
    fn ratio_is_invariant_under_scaling() {
        let (q, rule) = setup(4, 2.5);
        let u = bumped(&q, 0.05);
        let cfg = ReportConfig::default();
        let a = stability_report(&u, &q, &rule, &cfg).unwrap();
        let b = stability_report(&u.scaled(2.0), &q, &rule, &cfg).unwrap();
        assert!((a.regime_ratio - b.regime_ratio).abs() < 1e-5 * a.regime_ratio);
        assert_eq!(a.regime, b.regime);
        // every distance piece is p-homogeneous
        let k = 2f64.powf(q.p);
        assert!((b.dist2 - k * a.dist2).abs() < 1e-5 * b.dist2);
        assert!((b.grad_p_dist - k * a.grad_p_dist).abs() < 1e-5 * b.grad_p_dist);
        assert!((b.deficit - k * a.deficit).abs() < 1e-6 * b.deficit);
    }

    #[test]
    fn small_bump_satisfies_the_default_bounds() {
        let (q, rule) = setup(5, 3.0);
        let cfg = ReportConfig::default();
        let r = stability_report(&bumped(&q, 0.02), &q, &rule, &cfg).unwrap();
        assert!(r.deficit > 0.0);
        assert!(r.bound2_residual >= 0.0 && r.bound_p_residual >= 0.0);
        assert!(r.main_ratio <= cfg.c_report);
        assert!(r.sandwich_holds(q.p, 1e-9));
        assert!((r.lambda_hat() - 1.0).abs() < 0.05 && r.y_hat().abs() < 1e-6);
    }

    #[test]
    fn p_two_ratio_is_one() {
        let (q, rule) = setup(4, 2.0);
        let r = stability_report(&bumped(&q, 0.05), &q, &rule, &ReportConfig::default()).unwrap();
        assert!((r.regime_ratio - 1.0).abs() < 1e-12);
        assert_eq!(r.regime, Regime::Middle);
    }

    #[test]
    fn regimes_follow_the_thresholds() {
        let cfg = ReportConfig::default();
        assert_eq!(Regime::classify(cfg.c_star_high, &cfg), Regime::GradientDominated);
        assert_eq!(Regime::classify(cfg.c_star_low, &cfg), Regime::DistanceDominated);
        assert_eq!(Regime::classify(1.0, &cfg), Regime::Middle);
    }
}
