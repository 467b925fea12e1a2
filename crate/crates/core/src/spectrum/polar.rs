use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{bubble_derivs, Extremal};
use crate::params::Params;
use crate::zonal::{spherical_eigenvalue, BumpProfile, RadialProfile, ZonalHarmonic};

/// Radial factor of div(A_v∇(f·Y_l)) about the unit extremal, where Y_l has degree l.
pub fn polar_apply(profile: &dyn RadialProfile, degree: usize, r: f64, params: &Params) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r={r} must be positive")));
    }
    let p = params.p;
    let (mu, _) = spherical_eigenvalue(degree, params.n);
    let b = bubble_derivs(params, r);
    let (d1, d2) = (b[1], b[2]);
    let g = d1.abs().powf(p - 2.0);
    let [f, f1, f2] = profile.eval(r);
    let mut out = (p - 1.0) * g * f2 + (p - 1.0) * (params.nf() - 1.0) * g * f1 / r - mu * g * f / (r * r);
    if p != 2.0 {
        out += (p - 1.0) * (p - 2.0) * d1.abs().powf(p - 4.0) * d1 * d2 * f1;
    }
    Ok(out)
}

/// div(A_v∇F) for F = f(r)·Y(x₀/r) by nested central differences with step h.
fn cartesian_div(params: &Params, profile: &dyn RadialProfile, harmonic: &ZonalHarmonic, x: &[f64], h: f64) -> f64 {
    let n = x.len();
    let v = Extremal::unit(n);
    let field = |x: &[f64]| {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        profile.eval(r)[0] * harmonic.eval(x[0] / r).0
    };
    let shifted = |x: &[f64], i: usize, d: f64| {
        let mut y = x.to_vec();
        y[i] += d;
        y
    };
    let flux_component = |x: &[f64], i: usize| {
        let g: Vec<f64> = (0..n).map(|j| (field(&shifted(x, j, h)) - field(&shifted(x, j, -h))) / (2.0 * h)).collect();
        let (_, gv) = v.evaluate(params, x);
        let nv = gv.iter().map(|c| c * c).sum::<f64>().sqrt();
        let dot: f64 = g.iter().zip(&gv).map(|(a, b)| a * b / nv).sum();
        nv.powf(params.p - 2.0) * (g[i] + (params.p - 2.0) * dot * gv[i] / nv)
    };
    (0..n)
        .map(|i| (flux_component(&shifted(x, i, h), i) - flux_component(&shifted(x, i, -h), i)) / (2.0 * h))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarCheck {
    pub points: usize,
    /// Largest error at the finer step, relative to max(|exact|, 1e−2).
    pub max_rel_error: f64,
    /// Median of log₂(e(2h)/e(h)) over points whose coarse error is above roundoff.
    pub median_order: f64,
}

/// Compares [`polar_apply`] with Cartesian differences at random points, random bump profiles and degrees 0–2.
pub fn polar_fd_check(params: &Params, points: usize, seed: u64, h: f64) -> Result<PolarCheck> {
    if points == 0 || !(h > 0.0) {
        return Err(Error::Domain("need at least one point and a positive step".into()));
    }
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orders = Vec::new();
    let mut worst = 0.0f64;
    for k in 0..points {
        let prof = BumpProfile { radius: rng.random_range(2.0..3.0), power: rng.random_range(0..3) };
        let l = k % 3;
        let y = ZonalHarmonic::new(l, n);
        let r = rng.random_range(0.3..1.5);
        let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nd = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        let x: Vec<f64> = dir.iter().map(|d| r * d / nd).collect();
        let exact = polar_apply(&prof, l, r, params)? * y.eval(x[0] / r).0;
        let e1 = (cartesian_div(params, &prof, &y, &x, 2.0 * h) - exact).abs();
        let e2 = (cartesian_div(params, &prof, &y, &x, h) - exact).abs();
        let scale = exact.abs().max(1e-2);
        worst = worst.max(e2 / scale);
        if e1 > 1e-9 * scale {
            orders.push((e1 / e2).log2());
        }
    }
    orders.sort_by(|a, b| a.total_cmp(b));
    let median_order = orders.get(orders.len() / 2).copied().unwrap_or(f64::NAN);
    Ok(PolarCheck { points, max_rel_error: worst, median_order })
}
