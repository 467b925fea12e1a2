use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{beta_radial_integral, sphere_area, Params};

const PANEL: usize = 8;
/// Start of the logarithmic panels; (0, INNER) is covered by one graded panel.
const INNER: f64 = 1e-3;
/// Relative size allowed for the neglected tail of the slowest-decaying weight.
const TAIL_TOL: f64 = 1e-15;
/// Width ratio of tail panels to core panels.
const TAIL_STRETCH: f64 = 3.0;
pub const DEFAULT_ANGULAR: usize = 32;
pub const DEFAULT_GRADING: f64 = 3.0;

/// One node of the tensor rule in the meridian half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZonalNode {
    pub r: f64,
    pub mu: f64,
    pub sin: f64,
    /// Full weight including r^{n−1} and the angular measure.
    pub weight: f64,
}

/// Composite Gauss rule on (0, rmax) for radial integrals ∫ f(r) dr, plus an angular rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Effective truncation radius; at least the requested one.
    pub rmax: f64,
    pub grading: f64,
    pub count: usize,
    /// (μ, sin θ, weight) with weights summing to the area of S^{n−1}.
    pub angular: Vec<(f64, f64, f64)>,
}

fn gl(k: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(k.try_into().expect("positive order"))
        .as_node_weight_pairs()
        .to_vec()
}

/// Truncation radius making r^{−β} tails negligible.
fn effective_rmax(params: &Params, rmax: f64) -> f64 {
    let beta = params.decay_rate();
    rmax.max(TAIL_TOL.powf(-1.0 / beta))
}

/// Builds the rule without the self-check; used for convergence studies at small counts.
pub fn build_rule_unchecked(params: &Params, count: usize, rmax: f64) -> Result<QuadratureRule> {
    build_with(params, count, rmax, DEFAULT_ANGULAR, DEFAULT_GRADING)
}

fn build_with(params: &Params, count: usize, rmax: f64, angular: usize, grading: f64) -> Result<QuadratureRule> {
    if count < 64 {
        return Err(Error::Domain(format!("node count {count} below the minimum 64")));
    }
    if !(rmax > INNER) {
        return Err(Error::Domain(format!("rmax={rmax} must exceed {INNER}")));
    }
    let r_end = effective_rmax(params, rmax);
    let log_panels = count / PANEL - 1;
    let inner_nodes = PANEL + count % PANEL;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);

    // r = INNER·t^grading on t ∈ (0, 1)
    let mut inner: Vec<(f64, f64)> = gl(inner_nodes)
        .into_iter()
        .map(|(x, w)| {
            let t = 0.5 * (x + 1.0);
            (INNER * t.powf(grading), 0.5 * w * INNER * grading * t.powf(grading - 1.0))
        })
        .collect();
    inner.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (r, w) in inner {
        nodes.push(r);
        weights.push(w);
    }

    // panels beyond the requested rmax only carry the power-law tail, so they are made wider
    let s0 = INNER.ln();
    let s_core = rmax.min(r_end).ln();
    let (l_core, l_tail) = (s_core - s0, r_end.ln() - s_core);
    let n_tail = if l_tail > 1e-12 && log_panels > 1 {
        let share = l_tail / TAIL_STRETCH / (l_core + l_tail / TAIL_STRETCH);
        ((log_panels as f64 * share).round() as usize).clamp(1, log_panels - 1)
    } else {
        0
    };
    let n_core = log_panels - n_tail;
    let mut edges: Vec<f64> = (0..=n_core).map(|k| s0 + l_core * k as f64 / n_core as f64).collect();
    edges.extend((1..=n_tail).map(|k| s_core + l_tail * k as f64 / n_tail as f64));
    let base = gl(PANEL);
    for win in edges.windows(2) {
        let (a, ds) = (win[0], win[1] - win[0]);
        let mut panel: Vec<(f64, f64)> = base
            .iter()
            .map(|&(x, w)| {
                let s = a + 0.5 * ds * (x + 1.0);
                let r = s.exp();
                (r, 0.5 * ds * w * r)
            })
            .collect();
        panel.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (r, w) in panel {
            nodes.push(r);
            weights.push(w);
        }
    }

    let n = params.n;
    let omega_perp = sphere_area(n - 1);
    let mut ang: Vec<(f64, f64, f64)> = gl(angular)
        .into_iter()
        .map(|(x, w)| {
            let th = 0.5 * std::f64::consts::PI * (x + 1.0);
            let sn = th.sin();
            (th.cos(), sn, omega_perp * 0.5 * std::f64::consts::PI * w * sn.powi(n as i32 - 2))
        })
        .collect();
    ang.sort_by(|a, b| b.0.total_cmp(&a.0));

    Ok(QuadratureRule { n, nodes, weights, rmax: r_end, grading, count, angular: ang })
}

/// Composite rule graded toward 0 and logarithmically stretched to the truncation radius.
///
/// Fails if the rule does not reproduce ∫ r^{n−1}(1+r^{p'})^{−n} dr to 1e−10.
pub fn build_rule(params: &Params, count: usize, rmax: f64) -> Result<QuadratureRule> {
    let rule = build_rule_unchecked(params, count, rmax)?;
    let err = rule.beta_check_error(params);
    if !(err < 1e-10) {
        return Err(Error::Construction(format!(
            "reference integral off by {err:e} (relative) at count {count}"
        )));
    }
    Ok(rule)
}

/// Rule with a custom number of angular nodes.
pub fn build_rule_with_angular(params: &Params, count: usize, rmax: f64, angular: usize) -> Result<QuadratureRule> {
    let rule = build_with(params, count, rmax, angular, DEFAULT_GRADING)?;
    let err = rule.beta_check_error(params);
    if !(err < 1e-10) {
        return Err(Error::Construction(format!(
            "reference integral off by {err:e} (relative) at count {count}"
        )));
    }
    Ok(rule)
}

impl QuadratureRule {
    /// ∫₀^∞ f(r) dr.
    pub fn radial<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }

    /// ∫_{R^n} g(|x|) dx for a radial function g.
    pub fn radial_nd<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let nm1 = self.n as i32 - 1;
        sphere_area(self.n) * self.radial(|r| g(r) * r.powi(nm1))
    }

    pub fn beta_check_error(&self, params: &Params) -> f64 {
        let n = params.n;
        let q = params.pprime;
        let exact = beta_radial_integral(n, params.p);
        let approx = self.radial(|r| r.powi(n as i32 - 1) * (1.0 + r.powf(q)).powf(-(n as f64)));
        ((approx - exact) / exact).abs()
    }

    /// All tensor nodes, radial-major.
    pub fn zonal_nodes(&self) -> Vec<ZonalNode> {
        let nm1 = self.n as i32 - 1;
        let mut out = Vec::with_capacity(self.nodes.len() * self.angular.len());
        for (&r, &w) in self.nodes.iter().zip(&self.weights) {
            let wr = w * r.powi(nm1);
            for &(mu, sin, wa) in &self.angular {
                out.push(ZonalNode { r, mu, sin, weight: wr * wa });
            }
        }
        out
    }
}

/// ∫_{R^n} F(|x|, cos θ) dx for an integrand depending on the radius and the polar angle.
pub fn integrate_zonal<F>(rule: &QuadratureRule, integrand: F) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let nm1 = rule.n as i32 - 1;
    let rows: Vec<Result<f64>> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&r, &w)| {
            let mut acc = 0.0;
            for &(mu, _, wa) in &rule.angular {
                let f = integrand(r, mu);
                if !f.is_finite() {
                    return Err(Error::Evaluation(format!("r={r:e}, mu={mu}")));
                }
                acc += wa * f;
            }
            Ok(acc * w * r.powi(nm1))
        })
        .collect();
    let mut total = 0.0;
    for row in rows {
        total += row?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::bubble_derivs;

    #[test]
    fn nodes_are_increasing_and_positive() {
        let q = Params::new(4, 2.0).unwrap();
        let r = build_rule(&q, 512, 1e4).unwrap();
        assert_eq!(r.nodes.len(), 512);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.nodes[0] > 0.0 && *r.nodes.last().unwrap() < r.rmax);
        assert!(r.weights.iter().all(|w| *w > 0.0));
        let sum: f64 = r.angular.iter().map(|a| a.2).sum();
        assert!((sum - sphere_area(4)).abs() < 1e-12);
    }

    #[test]
    fn odd_count_keeps_exact_count() {
        let q = Params::new(3, 2.0).unwrap();
        let r = build_rule(&q, 515, 1e4).unwrap();
        assert_eq!(r.nodes.len(), 515);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn beta_invariant_holds() {
        for (n, p) in [(3, 2.0), (4, 2.0), (4, 2.5), (5, 3.0), (5, 2.0)] {
            let q = Params::new(n, p).unwrap();
            let r = build_rule(&q, 512, 1e4).unwrap();
            assert!(r.beta_check_error(&q) < 1e-10, "n={n} p={p}");
        }
    }

    #[test]
    fn rejects_small_count() {
        let q = Params::new(3, 2.0).unwrap();
        assert!(build_rule(&q, 32, 1e4).is_err());
    }

    #[test]
    fn normalization_and_gradient_energy() {
        for (n, p) in [(3, 2.0), (4, 2.5), (5, 3.0)] {
            let q = Params::new(n, p).unwrap();
            let rule = build_rule(&q, 512, 1e4).unwrap();
            let mass = integrate_zonal(&rule, |r, _| bubble_derivs(&q, r)[0].powf(q.pstar)).unwrap();
            assert!((mass - 1.0).abs() < 1e-10);
            let grad = rule.radial_nd(|r| bubble_derivs(&q, r)[1].abs().powf(p));
            assert!((grad - q.sp).abs() < 1e-9 * q.sp);
        }
    }

    #[test]
    fn odd_integrand_vanishes() {
        let q = Params::new(4, 2.5).unwrap();
        let rule = build_rule(&q, 256, 1e4).unwrap();
        let v = integrate_zonal(&rule, |r, mu| mu * mu * mu * (-r).exp()).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let q = Params::new(3, 2.0).unwrap();
        let rule = build_rule(&q, 64 * 4, 1e4).unwrap();
        let e = integrate_zonal(&rule, |r, _| if r > 1.0 { f64::NAN } else { 0.0 });
        assert!(matches!(e, Err(Error::Evaluation(_))));
    }

    #[test]
    fn doubling_count_converges() {
        for (n, p) in [(4, 2.0), (5, 3.0), (4, 2.5)] {
            let q = Params::new(n, p).unwrap();
            let err = |count| {
                let rule = build_rule_unchecked(&q, count, 1e4).unwrap();
                (rule.radial_nd(|r| bubble_derivs(&q, r)[1].abs().powf(p)) - q.sp).abs()
            };
            let (a, b) = (err(64), err(128));
            assert!(b * 4.0 <= a || b < 1e-13, "n={n} p={p}: {a:e} -> {b:e}");
        }
    }

    #[test]
    fn refinement_is_monotone() {
        let q = Params::new(4, 2.5).unwrap();
        let counts = [64, 96, 128, 192, 256, 384, 512];
        let errs: Vec<f64> = counts
            .iter()
            .map(|&c| build_rule_unchecked(&q, c, 1e4).unwrap().beta_check_error(&q))
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] + 1e-14, "{errs:?}");
        }
    }
}
