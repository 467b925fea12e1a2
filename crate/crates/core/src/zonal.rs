//! Zonal harmonics, radial profiles and separable test functions about a fixed axis.

use std::fmt::Debug;
use std::sync::Arc;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::extremal::bubble_derivs;
use crate::params::{sphere_area, Params};

/// Eigenvalue l(l+n−2) of the sphere Laplacian on degree-l harmonics and its multiplicity.
pub fn spherical_eigenvalue(l: usize, n: usize) -> (f64, usize) {
    let mu = (l * (l + n - 2)) as f64;
    let mult = binom(n + l - 1, l) - if l >= 2 { binom(n + l - 3, l - 2) } else { 0 };
    (mu, mult)
}

fn binom(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
}

/// Gegenbauer polynomials C_0..C_l at x for index alpha.
fn gegenbauer_all(l: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(l + 1);
    c.push(1.0);
    if l >= 1 {
        c.push(2.0 * alpha * x);
    }
    for k in 2..=l {
        let kf = k as f64;
        let next = (2.0 * x * (kf + alpha - 1.0) * c[k - 1] - (kf + 2.0 * alpha - 2.0) * c[k - 2]) / kf;
        c.push(next);
    }
    c
}

/// L²(S^{n−1})-normalized zonal harmonic of degree l, as a function of μ = cos θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZonalHarmonic {
    pub l: usize,
    pub n: usize,
    alpha: f64,
    inv_norm: f64,
}

impl ZonalHarmonic {
    pub fn new(l: usize, n: usize) -> Self {
        assert!(n >= 3, "zonal harmonics need n >= 3");
        let alpha = (n as f64 - 2.0) / 2.0;
        let lf = l as f64;
        let ln_sq = (sphere_area(n - 1)).ln()
            + std::f64::consts::PI.ln()
            + (1.0 - 2.0 * alpha) * std::f64::consts::LN_2
            + ln_gamma(lf + 2.0 * alpha)
            - ln_gamma(lf + 1.0)
            - (lf + alpha).ln()
            - 2.0 * ln_gamma(alpha);
        ZonalHarmonic { l, n, alpha, inv_norm: (-0.5 * ln_sq).exp() }
    }

    /// Value and μ-derivative.
    pub fn eval(&self, mu: f64) -> (f64, f64) {
        let c = gegenbauer_all(self.l, self.alpha, mu);
        let y = c[self.l] * self.inv_norm;
        let dy = if self.l == 0 {
            0.0
        } else {
            let d = gegenbauer_all(self.l - 1, self.alpha + 1.0, mu);
            2.0 * self.alpha * d[self.l - 1] * self.inv_norm
        };
        (y, dy)
    }
}

/// A radial function with its first two derivatives.
pub trait RadialProfile: Send + Sync + Debug {
    /// Returns [f(r), f'(r), f''(r)].
    fn eval(&self, r: f64) -> [f64; 3];
}

/// The bubble profile at scale lambda (unit amplitude).
#[derive(Debug, Clone)]
pub struct BubbleProfile {
    params: Params,
    lambda: f64,
}

impl BubbleProfile {
    pub fn new(params: &Params, lambda: f64) -> Self {
        BubbleProfile { params: *params, lambda }
    }
}

impl RadialProfile for BubbleProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let l = self.lambda;
        let a = l.powf(self.params.nf() / self.params.pstar);
        let b = bubble_derivs(&self.params, l * r);
        [a * b[0], a * l * b[1], a * l * l * b[2]]
    }
}

/// Radial profile of ∂_λ of the bubble at scale lambda.
#[derive(Debug, Clone)]
pub struct ScaleModeProfile {
    params: Params,
    lambda: f64,
}

impl ScaleModeProfile {
    pub fn new(params: &Params, lambda: f64) -> Self {
        ScaleModeProfile { params: *params, lambda }
    }
}

impl RadialProfile for ScaleModeProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let l = self.lambda;
        let a = self.params.nf() / self.params.pstar;
        let la = l.powf(a);
        let b = bubble_derivs(&self.params, l * r);
        [
            a * la / l * b[0] + la * r * b[1],
            (a + 1.0) * la * b[1] + la * l * r * b[2],
            (a + 2.0) * la * l * b[2] + la * l * l * r * b[3],
        ]
    }
}

/// Radial profile −v′ of the bubble at scale lambda; paired with degree 1 it gives a translation mode.
#[derive(Debug, Clone)]
pub struct SlopeProfile {
    params: Params,
    lambda: f64,
}

impl SlopeProfile {
    pub fn new(params: &Params, lambda: f64) -> Self {
        SlopeProfile { params: *params, lambda }
    }
}

impl RadialProfile for SlopeProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let l = self.lambda;
        let a = l.powf(self.params.nf() / self.params.pstar);
        let b = bubble_derivs(&self.params, l * r);
        [-a * l * b[1], -a * l * l * b[2], -a * l * l * l * b[3]]
    }
}

/// (r/R)^k exp(−1/(1−(r/R)²)) on r < R, zero outside.
#[derive(Debug, Clone)]
pub struct BumpProfile {
    pub radius: f64,
    pub power: u32,
}

impl RadialProfile for BumpProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let s = r / self.radius;
        if s >= 1.0 {
            return [0.0; 3];
        }
        let one = 1.0 - s * s;
        let e = (-1.0 / one).exp();
        let g1 = -2.0 * s / (one * one);
        let g2 = -2.0 / (one * one) - 8.0 * s * s / (one * one * one);
        let k = self.power as f64;
        let h = s.powi(self.power as i32);
        let h1 = if self.power >= 1 { k * s.powi(self.power as i32 - 1) } else { 0.0 };
        let h2 = if self.power >= 2 { k * (k - 1.0) * s.powi(self.power as i32 - 2) } else { 0.0 };
        let rr = self.radius;
        [
            h * e,
            (h1 + h * g1) * e / rr,
            (h2 + 2.0 * h1 * g1 + h * g2 + h * g1 * g1) * e / (rr * rr),
        ]
    }
}

/// (1 − (r/R)²)^k on r < R, zero outside; C^{k−1} across the edge.
///
/// Panel Gauss rules straddling the edge converge much faster on this than on [`BumpProfile`].
#[derive(Debug, Clone)]
pub struct CutoffProfile {
    pub radius: f64,
    pub order: u32,
}

impl RadialProfile for CutoffProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let rr = self.radius;
        let s = r / rr;
        if s >= 1.0 {
            return [0.0; 3];
        }
        let k = self.order as i32;
        let kf = k as f64;
        let one = 1.0 - s * s;
        let d1 = -2.0 * kf * s * one.powi(k - 1);
        let d2 = -2.0 * kf * one.powi(k - 1) + 4.0 * kf * (kf - 1.0) * s * s * one.powi(k - 2);
        [one.powi(k), d1 / rr, d2 / (rr * rr)]
    }
}

/// (1 + r²)^{−a/2}: a smooth radial profile with power-law tail r^{−a}.
#[derive(Debug, Clone)]
pub struct AlgebraicProfile {
    pub decay: f64,
}

impl RadialProfile for AlgebraicProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let a = self.decay;
        let h = 1.0 + r * r;
        let base = h.powf(-0.5 * a);
        [
            base,
            -a * r * base / h,
            -a * base / h + a * (a + 2.0) * r * r * base / (h * h),
        ]
    }
}

const STENCIL: usize = 8;

/// Samples on a uniform grid in s = log r, interpolated by local degree-7 polynomials in s.
///
/// Constant below the grid; continued above it by the power law r^{−tail_decay}.
#[derive(Debug, Clone)]
pub struct TabulatedProfile {
    s0: f64,
    ds: f64,
    values: Vec<f64>,
    tail_decay: f64,
}

impl TabulatedProfile {
    pub fn new(s0: f64, ds: f64, values: Vec<f64>, tail_decay: f64) -> Result<Self> {
        if values.len() < STENCIL || !(ds > 0.0) {
            return Err(Error::Domain("tabulated profile needs at least 8 samples and ds > 0".into()));
        }
        Ok(TabulatedProfile { s0, ds, values, tail_decay })
    }

    pub fn r_min(&self) -> f64 {
        self.s0.exp()
    }

    pub fn r_max(&self) -> f64 {
        (self.s0 + self.ds * (self.values.len() - 1) as f64).exp()
    }

    /// Value and first two s-derivatives of the local interpolant.
    fn eval_s(&self, s: f64) -> [f64; 3] {
        let m = self.values.len();
        let x = (s - self.s0) / self.ds;
        let start = ((x.floor() as isize) - (STENCIL as isize / 2 - 1)).clamp(0, (m - STENCIL) as isize) as usize;
        let t = x - start as f64;
        // Lagrange basis and derivatives on nodes 0..8 in units of ds
        let mut out = [0.0; 3];
        for j in 0..STENCIL {
            let (mut b0, mut b1, mut b2) = (1.0, 0.0, 0.0);
            for k in 0..STENCIL {
                if k == j {
                    continue;
                }
                let d = j as f64 - k as f64;
                let a = (t - k as f64) / d;
                let ad = 1.0 / d;
                b2 = b2 * a + 2.0 * b1 * ad;
                b1 = b1 * a + b0 * ad;
                b0 *= a;
            }
            let y = self.values[start + j];
            out[0] += y * b0;
            out[1] += y * b1;
            out[2] += y * b2;
        }
        [out[0], out[1] / self.ds, out[2] / (self.ds * self.ds)]
    }
}

impl RadialProfile for TabulatedProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let s = r.ln();
        let s_end = self.s0 + self.ds * (self.values.len() - 1) as f64;
        if s <= self.s0 {
            return [self.values[0], 0.0, 0.0];
        }
        if s >= s_end {
            let fr = self.values[self.values.len() - 1];
            let b = self.tail_decay;
            let f = fr * (-b * (s - s_end)).exp();
            return [f, -b * f / r, b * (b + 1.0) * f / (r * r)];
        }
        let [f, fs, fss] = self.eval_s(s);
        [f, fs / r, (fss - fs) / (r * r)]
    }
}

/// One separable term amp·f(|x−o e|)·Y_l(cos θ) centered at axial offset o.
#[derive(Debug, Clone)]
pub struct ZonalTerm {
    pub amplitude: f64,
    pub profile: Arc<dyn RadialProfile>,
    pub harmonic: ZonalHarmonic,
    pub offset: f64,
}

/// Sum of separable terms, all axisymmetric about the first coordinate axis.
#[derive(Debug, Clone)]
pub struct ZonalField {
    pub n: usize,
    pub terms: Vec<ZonalTerm>,
}

/// Value and gradient components (along the axis, away from the axis) at a meridian point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZonalSample {
    pub value: f64,
    pub g_axial: f64,
    pub g_perp: f64,
}

impl ZonalField {
    pub fn empty(n: usize) -> Self {
        ZonalField { n, terms: Vec::new() }
    }

    pub fn with_term(
        mut self,
        amplitude: f64,
        profile: Arc<dyn RadialProfile>,
        l: usize,
        offset: f64,
    ) -> Self {
        self.terms.push(ZonalTerm { amplitude, profile, harmonic: ZonalHarmonic::new(l, self.n), offset });
        self
    }

    /// Single radial term with a degree-0 harmonic normalized away, so the field equals the profile.
    pub fn radial(n: usize, profile: Arc<dyn RadialProfile>, offset: f64) -> Self {
        let y0 = ZonalHarmonic::new(0, n).eval(0.0).0;
        ZonalField::empty(n).with_term(1.0 / y0, profile, 0, offset)
    }

    /// The bubble c·v_{λ,y} with y = offset·e₁.
    pub fn bubble(params: &Params, c: f64, lambda: f64, offset: f64) -> Self {
        let mut f = ZonalField::radial(params.n, Arc::new(BubbleProfile::new(params, lambda)), offset);
        f.terms[0].amplitude *= c;
        f
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut f = self.clone();
        for t in &mut f.terms {
            t.amplitude *= c;
        }
        f
    }

    /// Sum of `self` and `c·other`.
    pub fn plus(&self, c: f64, other: &ZonalField) -> Self {
        let mut f = self.clone();
        f.terms.extend(other.scaled(c).terms);
        f
    }

    /// Evaluate at axial coordinate z and distance ρ ≥ 0 from the axis.
    pub fn sample(&self, z: f64, rho: f64) -> ZonalSample {
        let mut out = ZonalSample::default();
        for t in &self.terms {
            let zz = z - t.offset;
            let r = (zz * zz + rho * rho).sqrt();
            let [f, df, _] = t.profile.eval(r);
            if r == 0.0 {
                let (y, _) = t.harmonic.eval(1.0);
                out.value += t.amplitude * f * y;
                continue;
            }
            let mu = zz / r;
            let sn = rho / r;
            let (y, dy) = t.harmonic.eval(mu);
            let a = t.amplitude;
            out.value += a * f * y;
            let gr = a * df * y;
            let gt = -a * f / r * sn * dy;
            out.g_axial += gr * mu - gt * sn;
            out.g_perp += gr * sn + gt * mu;
        }
        out
    }

    /// Evaluate at a point of R^n; returns value and full gradient.
    pub fn evaluate(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let z = x[0];
        let rho = x[1..].iter().map(|t| t * t).sum::<f64>().sqrt();
        let s = self.sample(z, rho);
        let mut g = vec![0.0; x.len()];
        g[0] = s.g_axial;
        if rho > 0.0 {
            for i in 1..x.len() {
                g[i] = s.g_perp * x[i] / rho;
            }
        }
        (s.value, g)
    }

    /// Largest harmonic degree among the terms.
    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.harmonic.l).max().unwrap_or(0)
    }
}
