use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{bubble_derivs, bubble_value_slope, Extremal};
use crate::inequalities::{required_constant, GridSpec, InequalityId, InequalitySpec};
use crate::integrate::{QuadratureRule, ZonalNode};
use crate::params::Params;
use crate::zonal::{ZonalField, ZonalSample};

use super::nelder_mead::{fd_derivatives, nelder_mead, newton_polish};
use super::{axial_center, sample_field};

const MAX_EVALS: usize = 4000;

/// Integrals of u − c·v_{λ,y} at one point of the search space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceParts {
    /// ∫ A_v[∇u−∇v, ∇u−∇v].
    pub a_energy: f64,
    /// ∫ |∇v|^{p−2} |∇u−∇v|².
    pub plain: f64,
    /// ∫ |∇u−∇v|^p.
    pub grad_p: f64,
    /// ∫ |u−v|^{p*}.
    pub lpstar_pow: f64,
}

/// A fixed u sampled once on a rule centered at the origin, against which bubbles are compared.
#[derive(Debug, Clone)]
pub struct DistanceProblem {
    params: Params,
    nodes: Vec<ZonalNode>,
    u: Vec<ZonalSample>,
    /// Amplitude ‖u‖_{p*} shared by every competitor.
    pub c: f64,
    /// ∫|u|^{p*}.
    pub mass: f64,
}

impl DistanceProblem {
    pub fn new(u: &ZonalField, params: &Params, rule: &QuadratureRule) -> Result<Self> {
        let nodes = rule.zonal_nodes();
        let samples = sample_field(u, &nodes, 0.0);
        let mut mass = 0.0;
        for (nd, s) in nodes.iter().zip(&samples) {
            let a = s.value.abs().powf(params.pstar);
            if !a.is_finite() || !s.g_axial.is_finite() || !s.g_perp.is_finite() {
                return Err(Error::Evaluation(format!("r={:e}, mu={}", nd.r, nd.mu)));
            }
            mass += nd.weight * a;
        }
        if !(mass > 0.0) {
            return Err(Error::Domain("u vanishes identically".into()));
        }
        let c = mass.powf(1.0 / params.pstar);
        Ok(DistanceProblem { params: *params, nodes, u: samples, c, mass })
    }

    /// Sign of ∫|u|^{p*−2}u, used to sign-match competitors in the asymmetry search.
    pub fn dominant_sign(&self) -> f64 {
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.u)
            .map(|(nd, s)| nd.weight * s.value.abs().powf(self.params.pstar - 1.0) * s.value.signum())
            .sum();
        if s < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn extremal(&self, lambda: f64, y: f64) -> Extremal {
        let mut c = vec![0.0; self.params.n];
        c[0] = y;
        Extremal { c: self.c, lambda, y: c }
    }

    /// c·λ^{n/p*}·(v₁, v₁′)(λρ).
    fn bubble_at(&self, amp: f64, lambda: f64, rho: f64) -> (f64, f64) {
        let (v, d) = bubble_value_slope(&self.params, lambda * rho);
        let a = amp * lambda.powf(self.params.nf() / self.params.pstar);
        (a * v, a * lambda * d)
    }

    /// ∫ A_v[∇u−∇v, ∇u−∇v] for v = c·v_{λ,y e₁}.
    pub fn energy(&self, lambda: f64, y: f64) -> f64 {
        let p = self.params.p;
        let mut acc = 0.0;
        for (nd, s) in self.nodes.iter().zip(&self.u) {
            let (z, rho) = (nd.r * nd.mu, nd.r * nd.sin);
            let dz = z - y;
            let rv = (dz * dz + rho * rho).sqrt();
            let (_, dv) = self.bubble_at(self.c, lambda, rv);
            let (ez, ep) = (dz / rv, rho / rv);
            let gz = s.g_axial - dv * ez;
            let gp = s.g_perp - dv * ep;
            let gr = gz * ez + gp * ep;
            let w = if p == 2.0 { 1.0 } else { dv.abs().powf(p - 2.0) };
            acc += nd.weight * w * (gz * gz + gp * gp + (p - 2.0) * gr * gr);
        }
        acc
    }

    /// Every integral of u − c·v_{λ,y e₁} needed by the report, for amplitude `amp`.
    pub fn parts_with(&self, amp: f64, lambda: f64, y: f64) -> DistanceParts {
        let p = self.params.p;
        let ps = self.params.pstar;
        let mut out = DistanceParts { a_energy: 0.0, plain: 0.0, grad_p: 0.0, lpstar_pow: 0.0 };
        for (nd, s) in self.nodes.iter().zip(&self.u) {
            let (z, rho) = (nd.r * nd.mu, nd.r * nd.sin);
            let dz = z - y;
            let rv = (dz * dz + rho * rho).sqrt();
            let (v, dv) = self.bubble_at(amp, lambda, rv);
            let (ez, ep) = (dz / rv, rho / rv);
            let gz = s.g_axial - dv * ez;
            let gp = s.g_perp - dv * ep;
            let gr = gz * ez + gp * ep;
            let g2 = gz * gz + gp * gp;
            let w = if p == 2.0 { 1.0 } else { dv.abs().powf(p - 2.0) };
            out.a_energy += nd.weight * w * (g2 + (p - 2.0) * gr * gr);
            out.plain += nd.weight * w * g2;
            out.grad_p += nd.weight * g2.powf(0.5 * p);
            out.lpstar_pow += nd.weight * (s.value - v).abs().powf(ps);
        }
        out
    }

    pub fn parts(&self, lambda: f64, y: f64) -> DistanceParts {
        self.parts_with(self.c, lambda, y)
    }

    /// ∫|u − s·c·v_{λ,y}|^{p*} / ∫|u|^{p*}.
    pub fn asymmetry_quotient(&self, sign: f64, lambda: f64, y: f64) -> f64 {
        let ps = self.params.pstar;
        let mut acc = 0.0;
        for (nd, s) in self.nodes.iter().zip(&self.u) {
            let (z, rho) = (nd.r * nd.mu, nd.r * nd.sin);
            let dz = z - y;
            let rv = (dz * dz + rho * rho).sqrt();
            let (v, _) = self.bubble_at(sign * self.c, lambda, rv);
            acc += nd.weight * (s.value - v).abs().powf(ps);
        }
        acc / self.mass
    }
}

/// Options for the multistart simplex search over (log λ, y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub multistarts: usize,
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { multistarts: 8, tol: 1e-8 }
    }
}

/// Result of the distance minimization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceFit {
    pub d2: f64,
    pub minimizer: Extremal,
    pub log_lambda: f64,
    pub y_axial: f64,
    pub evaluations: usize,
}

/// Deterministic starting points in [−2, 2]²; the first is the origin.
pub(crate) fn start_points(count: usize) -> Vec<[f64; 2]> {
    let (a1, a2) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_3);
    (0..count)
        .map(|k| {
            if k == 0 {
                [0.0, 0.0]
            } else {
                let kf = k as f64;
                [-2.0 + 4.0 * (0.5 + kf * a1).fract(), -2.0 + 4.0 * (0.5 + kf * a2).fract()]
            }
        })
        .collect()
}

/// Multistart simplex search plus Newton polish; returns (x, f(x), evaluations).
pub(crate) fn multistart<F>(f: F, opts: SearchOptions) -> Result<([f64; 2], f64, usize)>
where
    F: Fn([f64; 2]) -> f64 + Sync,
{
    let starts = start_points(opts.multistarts.max(1));
    let runs: Vec<_> = starts
        .par_iter()
        .map(|&x0| nelder_mead(&f, x0, 0.25, opts.tol, MAX_EVALS))
        .collect();
    let evals: usize = runs.iter().map(|o| o.evaluations).sum();
    let (_, run) = runs
        .iter()
        .enumerate()
        .filter(|(_, o)| o.fx.is_finite())
        .min_by(|a, b| a.1.fx.total_cmp(&b.1.fx).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::Evaluation("objective non-finite at every start".into()))?;
    if !run.converged {
        return Err(Error::NonConvergence {
            iterations: run.evaluations,
            energy: run.fx,
            log_lambda: run.x[0],
            y_axial: run.x[1],
        });
    }
    let (x, fx) = newton_polish(&f, run.x, run.fx, 1e-4, 4);
    Ok((x, fx, evals + 40))
}

/// ∫ A_{cv}[∇u − ∇(cv_{λ,y}), ·] with c = ‖u‖_{p*} and y on the axis.
pub fn distance_energy(u: &ZonalField, lambda: f64, y_axial: f64, params: &Params, rule: &QuadratureRule) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda={lambda} must be positive")));
    }
    Ok(DistanceProblem::new(u, params, rule)?.energy(lambda, y_axial))
}

impl DistanceProblem {
    pub fn minimize(&self, opts: SearchOptions) -> Result<DistanceFit> {
        let f = |x: [f64; 2]| self.energy(x[0].exp(), x[1]);
        let (x, fx, evaluations) = multistart(f, opts)?;
        Ok(DistanceFit {
            d2: fx,
            minimizer: self.extremal(x[0].exp(), x[1]),
            log_lambda: x[0],
            y_axial: x[1],
            evaluations,
        })
    }

    /// Brute-force minimum over a points × points grid of (log λ, y); returns (energy, log λ, y).
    pub fn grid_scan(&self, log_lambda: (f64, f64), y: (f64, f64), points: usize) -> (f64, f64, f64) {
        let at = |(a, b): (f64, f64), k: usize| a + (b - a) * k as f64 / (points.max(2) - 1) as f64;
        (0..points * points)
            .into_par_iter()
            .map(|k| {
                let (ll, yy) = (at(log_lambda, k / points), at(y, k % points));
                (self.energy(ll.exp(), yy), ll, yy)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap_or((f64::NAN, 0.0, 0.0))
    }

    /// Central-difference partials of the energy in (log λ, y).
    pub fn energy_gradient(&self, log_lambda: f64, y: f64, h: f64) -> [f64; 2] {
        let f = |x: [f64; 2]| self.energy(x[0].exp(), x[1]);
        fd_derivatives(&f, [log_lambda, y], h).0
    }
}

/// d(u, M)² and the minimizing extremal.
pub fn minimize_distance(
    u: &ZonalField,
    params: &Params,
    rule: &QuadratureRule,
    multistarts: usize,
    tol: f64,
) -> Result<(f64, Extremal)> {
    let fit = DistanceProblem::new(u, params, rule)?.minimize(SearchOptions { multistarts, tol })?;
    Ok((fit.d2, fit.minimizer))
}

/// Inf of ‖u − v‖_{p*}^{p*}/‖u‖_{p*}^{p*} over sign-matched extremals with the same critical norm.
pub fn asymmetry_lambda(u: &ZonalField, params: &Params, rule: &QuadratureRule, multistarts: usize) -> Result<f64> {
    let prob = DistanceProblem::new(u, params, rule)?;
    let sign = prob.dominant_sign();
    let f = |x: [f64; 2]| prob.asymmetry_quotient(sign, x[0].exp(), x[1]);
    let (_, fx, _) = multistart(f, SearchOptions { multistarts, tol: 1e-8 })?;
    Ok(fx.max(0.0))
}

/// Residuals of the first-order conditions at a minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Orthogonality {
    pub r_lambda: f64,
    pub r_y: f64,
    pub r_volume_lhs: f64,
    pub r_volume_rhs: f64,
    /// Left-hand sides ε∫|v|^{p*−2}∂v φ of the scale and translation conditions.
    pub lambda_lhs: f64,
    pub y_lhs: f64,
}

/// κ used in the volume bound.
pub const VOLUME_KAPPA: f64 = 0.1;

/// Constant C in the volume bound at κ, from the two-sided critical-power inequality.
pub fn volume_constant(params: &Params, kappa: f64) -> Result<f64> {
    let ka = params.pstar * kappa / 2.0;
    let grid = GridSpec::default();
    let fwd = required_constant(&InequalitySpec::new(InequalityId::Num4, params.p, params.n, Some(ka))?, &grid)?;
    let rev = required_constant(&InequalitySpec::new(InequalityId::Num4Reverse, params.p, params.n, Some(ka))?, &grid)?;
    Ok(fwd.max(rev) / params.pstar)
}

pub fn orthogonality_residuals(
    u: &ZonalField,
    minimizer: &Extremal,
    params: &Params,
    rule: &QuadratureRule,
) -> Result<Orthogonality> {
    let y0 = axial_center(minimizer)?;
    let nodes = rule.zonal_nodes();
    let us = sample_field(u, &nodes, 0.0);
    let p = params.p;
    let ps = params.pstar;
    let c = minimizer.c;
    let lam = minimizer.lambda;
    let a = params.nf() / ps;
    let la = lam.powf(a);

    let mut grad_p = 0.0;
    let mut lam_lhs = 0.0;
    let mut y_lhs = 0.0;
    let mut lam_br = 0.0;
    let mut y_br = 0.0;
    let mut vol = 0.0;
    let mut mass2 = 0.0;
    let mut crit = 0.0;
    for (nd, s) in nodes.iter().zip(&us) {
        let (z, rho) = (nd.r * nd.mu, nd.r * nd.sin);
        let dz = z - y0;
        let rv = (dz * dz + rho * rho).sqrt();
        let (ez, ep) = (dz / rv, rho / rv);
        let b = bubble_derivs(params, lam * rv);
        let v = c * la * b[0];
        let dv = c * la * lam * b[1];
        let d2v = c * la * lam * lam * b[2];
        // ∂_λ of the field and its radial derivative
        let vl = c * (a * la / lam * b[0] + la * rv * b[1]);
        let dvl = c * ((a + 1.0) * la * b[1] + la * lam * rv * b[2]);
        // axial translation mode ∂_y v = −∂_z v and its gradient −Hess(v)e_z
        let vy = -dv * ez;
        let hz = [d2v * ez * ez + dv / rv * (1.0 - ez * ez), d2v * ez * ep - dv / rv * ez * ep];
        let gvy = [-hz[0], -hz[1]];

        let diff = s.value - v;
        let gz = s.g_axial - dv * ez;
        let gp = s.g_perp - dv * ep;
        let g2 = gz * gz + gp * gp;
        let gr = gz * ez + gp * ep;
        let wv = v.abs().powf(ps - 2.0);
        grad_p += nd.weight * g2.powf(0.5 * p);
        lam_lhs += nd.weight * wv * vl * diff;
        y_lhs += nd.weight * wv * vy * diff;
        vol += nd.weight * wv * v * diff;
        mass2 += nd.weight * wv * diff * diff;
        crit += nd.weight * diff.abs().powf(ps);

        if p != 2.0 {
            let w4 = dv.abs().powf(p - 4.0);
            let w2 = dv.abs().powf(p - 2.0);
            let quad = g2 + (p - 2.0) * gr * gr;
            lam_br += nd.weight * w4 * (dv * dvl) * quad;
            let dot_y = dv * (gvy[0] * ez + gvy[1] * ep);
            // ∂_y r̂ = −(e_z − (e_z·r̂) r̂)/ρ
            let dr = [-(1.0 - ez * ez) / rv, ez * ep / rv];
            y_br += nd.weight * (w4 * dot_y * quad + 2.0 * w2 * gr * (gz * dr[0] + gp * dr[1]));
        }
    }
    if grad_p == 0.0 {
        return Ok(Orthogonality::default());
    }
    let c1 = (p - 2.0) / (2.0 * (ps - 1.0) * params.sp);
    let scale = c.abs().powf(ps - p);
    let kappa = VOLUME_KAPPA;
    let big_c = volume_constant(params, kappa)?;
    Ok(Orthogonality {
        r_lambda: lam_lhs - c1 * scale * lam_br,
        r_y: y_lhs - c1 * scale * y_br,
        r_volume_lhs: vol.abs(),
        r_volume_rhs: 0.5 * (ps - 1.0 + kappa) * mass2 + big_c * crit,
        lambda_lhs: lam_lhs,
        y_lhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::build_rule_with_angular;
    use crate::zonal::BumpProfile;
    use std::sync::Arc;

    #[test]
    fn recovers_a_bubble() {
        let q = Params::new(4, 2.5).unwrap();
        let rule = build_rule_with_angular(&q, 256, 1e4, 24).unwrap();
        let u = ZonalField::bubble(&q, 1.3, 1.6, 0.4);
        let prob = DistanceProblem::new(&u, &q, &rule).unwrap();
        let fit = prob.minimize(SearchOptions::default()).unwrap();
        assert!(fit.d2 < 1e-9, "{}", fit.d2);
        assert!((fit.minimizer.lambda - 1.6).abs() < 1e-4, "{:?}", fit.minimizer);
        assert!((fit.y_axial - 0.4).abs() < 1e-4);
        assert!((prob.c - 1.3).abs() < 1e-8);
    }

    #[test]
    fn minimizer_is_stationary() {
        let q = Params::new(3, 2.0).unwrap();
        let rule = build_rule_with_angular(&q, 256, 1e4, 24).unwrap();
        let bump = ZonalField::empty(3).with_term(1.0, Arc::new(BumpProfile { radius: 2.0, power: 1 }), 1, 0.0);
        let u = ZonalField::bubble(&q, 1.0, 1.0, 0.0).plus(0.05, &bump);
        let prob = DistanceProblem::new(&u, &q, &rule).unwrap();
        let fit = prob.minimize(SearchOptions::default()).unwrap();
        let g = prob.energy_gradient(fit.log_lambda, fit.y_axial, 1e-4);
        assert!(g[0].abs() < 1e-7 && g[1].abs() < 1e-7, "{g:?}");
        assert!(fit.d2 > 0.0);
        let (e, ll, y) = prob.grid_scan((-0.2, 0.2), (-0.2, 0.2), 21);
        assert!(fit.d2 <= e * (1.0 + 1e-9));
        assert!((ll - fit.log_lambda).abs() <= 0.02 && (y - fit.y_axial).abs() <= 0.02);
    }

    #[test]
    fn residuals_vanish_at_the_minimizer() {
        let q = Params::new(4, 2.5).unwrap();
        let rule = build_rule_with_angular(&q, 256, 1e4, 24).unwrap();
        let bump = ZonalField::empty(4).with_term(1.0, Arc::new(BumpProfile { radius: 1.5, power: 1 }), 1, 0.0);
        let u = ZonalField::bubble(&q, 1.0, 1.0, 0.0).plus(0.03, &bump);
        let prob = DistanceProblem::new(&u, &q, &rule).unwrap();
        let fit = prob.minimize(SearchOptions::default()).unwrap();
        let o = orthogonality_residuals(&u, &fit.minimizer, &q, &rule).unwrap();
        assert!(o.r_lambda.abs() < 1e-6 * (1.0 + o.lambda_lhs.abs()), "{o:?}");
        assert!(o.r_y.abs() < 1e-6 * (1.0 + o.y_lhs.abs()), "{o:?}");
        assert!(o.r_volume_lhs <= o.r_volume_rhs, "{o:?}");
    }

    #[test]
    fn start_points_are_spread() {
        let s = start_points(8);
        assert_eq!(s[0], [0.0, 0.0]);
        assert!(s.iter().all(|x| x[0].abs() <= 2.0 && x[1].abs() <= 2.0));
    }
}
