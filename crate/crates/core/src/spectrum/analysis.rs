use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::Params;

use super::{channel_eigenvalues, solve_channel, EigenPair, FormKind, MeshSpec, SLChannel};

/// Sign changes between consecutive samples whose magnitudes both exceed `tol_frac`·max|f|.
pub fn count_zeros(f: &[f64], tol_frac: f64) -> usize {
    let peak = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = tol_frac * peak;
    let mut last = 0.0;
    let mut changes = 0;
    for &v in f {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            changes += 1;
        }
        last = v.signum();
    }
    changes
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Least-squares decay exponent β of |f| ~ r^{−β} over the window.
pub fn decay_fit(pair: &EigenPair, window: (f64, f64)) -> Result<f64> {
    let (a, b) = window;
    if !(a >= 10.0 && b > a) {
        return Err(Error::Fit(format!("window {window:?} must lie in r ≥ 10")));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut sign = 0.0;
    for (r, &v) in pair.radii().zip(&pair.f) {
        if r < a || r > b {
            continue;
        }
        if sign != 0.0 && v.signum() != sign {
            return Err(Error::Fit(format!("sign change near r={r:e}; choose a later window")));
        }
        sign = v.signum();
        if v == 0.0 {
            return Err(Error::Fit(format!("zero sample at r={r:e}")));
        }
        xs.push(r.ln());
        ys.push(v.abs().ln());
    }
    if xs.len() < 3 {
        return Err(Error::Fit("fewer than 3 samples in the window".into()));
    }
    Ok(-slope(&xs, &ys))
}

/// ⟨f, g⟩_w / (‖f‖_w‖g‖_w) with g sampled at the mesh nodes.
pub fn weighted_correlation(channel: &SLChannel, f: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let (_, m) = channel.assemble();
    let gv: Vec<f64> = channel.mesh.radii().into_iter().map(g).collect();
    m.form(f, &gv) / (m.form(f, f) * m.form(&gv, &gv)).sqrt()
}

/// Fitted power laws of the stiffness coefficient P near r_min and near r_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientExponents {
    pub near: f64,
    pub near_expected: f64,
    pub far: f64,
    pub far_expected: f64,
}

pub fn coefficient_exponents(channel: &SLChannel) -> CoefficientExponents {
    let q = &channel.params;
    let fit = |a: f64, b: f64| {
        let xs: Vec<f64> = (0..50).map(|i| a.ln() + (b.ln() - a.ln()) * i as f64 / 49.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&s| channel.coefficients(s.exp()).0.ln()).collect();
        slope(&xs, &ys)
    };
    let (r0, r1) = (channel.mesh.r_min, channel.mesh.r_max);
    CoefficientExponents {
        near: fit(r0, 100.0 * r0),
        near_expected: (q.p - 2.0) / (q.p - 1.0) + q.nf() - 1.0,
        far: fit(r1 / 100.0, r1),
        far_expected: (q.nf() - 1.0) / (q.p - 1.0),
    }
}

/// Third eigenvalue of the linearized operator and the spectral gap above (p*−1)S^p.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Alpha3 {
    pub alpha3: f64,
    /// Harmonic degree of the channel attaining α₃.
    pub degree: usize,
    pub gap: f64,
    pub alpha2: f64,
    /// (degree, index within channel, eigenvalue) of the candidates.
    pub candidates: Vec<(usize, usize, f64)>,
    /// First eigenvalue of the degree-3 channel, which must exceed α₃.
    pub degree3_first: f64,
}

pub fn alpha3(params: &Params, mesh: &MeshSpec) -> Result<Alpha3> {
    alpha3_scaled(params, mesh, 1.0)
}

/// α₃ computed from the coefficients of λ^{n/p*}v₁(λ·).
pub fn alpha3_scaled(params: &Params, mesh: &MeshSpec, lambda: f64) -> Result<Alpha3> {
    let wanted = [(0usize, 3usize), (1, 2), (2, 1)];
    let solved: Vec<Result<(usize, usize, f64)>> = wanted
        .par_iter()
        .map(|&(l, k)| {
            let ch = SLChannel::scaled(params, l, FormKind::Linearized, *mesh, lambda)?;
            let pairs = solve_channel(&ch, k)?;
            Ok((l, k, pairs[k - 1].alpha))
        })
        .collect();
    let candidates = solved.into_iter().collect::<Result<Vec<_>>>()?;
    let d3 = channel_eigenvalues(&SLChannel::scaled(params, 3, FormKind::Linearized, *mesh, lambda)?, 1)?[0];
    let (degree, _, a3) = candidates
        .iter()
        .copied()
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
        .expect("three candidates");
    Ok(Alpha3 {
        alpha3: a3,
        degree,
        gap: a3 / params.alpha2 - 1.0,
        alpha2: params.alpha2,
        candidates,
        degree3_first: d3,
    })
}
