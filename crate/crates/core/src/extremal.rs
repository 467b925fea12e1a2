//! The bubble family c·λ^{n/p*}·v₁(λ(x−y)) and its derivatives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::Params;

/// Unit bubble profile v₁(r) and its first three radial derivatives.
pub fn bubble_derivs(params: &Params, r: f64) -> [f64; 4] {
    let q = params.pprime;
    let m = params.profile_exponent();
    let k = params.kappa0;
    if r == 0.0 {
        // only the value is well defined for every p; derivatives are taken as limits along r > 0
        return [k, 0.0, if q == 2.0 { -k * m * 2.0 } else { f64::NEG_INFINITY }, 0.0];
    }
    let rq = r.powf(q);
    let h = 1.0 + rq;
    let lh = h.ln();
    let hm = (-m * lh).exp();
    let h1 = hm / h;
    let h2 = h1 / h;
    let h3 = h2 / h;
    let v = k * hm;
    // r^{q-1}, r^{q-2}, r^{q-3} written via rq / r to stay finite for small r
    let rq1 = rq / r;
    let rq2 = rq1 / r;
    let rq3 = rq2 / r;
    let a = -k * m * q;
    let d1 = a * rq1 * h1;
    let d2 = a * ((q - 1.0) * rq2 * h1 - (m + 1.0) * q * rq * rq2 * h2);
    let d3 = a
        * ((q - 1.0) * (q - 2.0) * rq3 * h1
            - (q - 1.0) * (m + 1.0) * q * rq * rq3 * h2
            - (m + 1.0) * q * (2.0 * q - 2.0) * rq * rq3 * h2
            + (m + 1.0) * (m + 2.0) * q * q * rq * rq * rq3 * h3);
    [v, d1, d2, d3]
}

/// Unit bubble value and slope only.
pub fn bubble_value_slope(params: &Params, r: f64) -> (f64, f64) {
    let q = params.pprime;
    let m = params.profile_exponent();
    if r == 0.0 {
        return (params.kappa0, 0.0);
    }
    let rq = r.powf(q);
    let h = 1.0 + rq;
    let v = params.kappa0 * h.powf(-m);
    (v, -m * q * v * rq / (r * h))
}

/// A point (c, λ, y) on the manifold of extremals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extremal {
    pub c: f64,
    pub lambda: f64,
    pub y: Vec<f64>,
}

impl Extremal {
    pub fn new(c: f64, lambda: f64, y: Vec<f64>) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("scale lambda={lambda} must be positive")));
        }
        if !c.is_finite() || y.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("non-finite extremal parameters".into()));
        }
        Ok(Extremal { c, lambda, y })
    }

    /// The unit bubble centered at the origin in dimension n.
    pub fn unit(n: usize) -> Self {
        Extremal { c: 1.0, lambda: 1.0, y: vec![0.0; n] }
    }

    fn amp(&self, params: &Params) -> f64 {
        self.c * self.lambda.powf(params.nf() / params.pstar)
    }

    /// Value and radial derivatives up to third order as functions of ρ = |x − y|.
    pub fn radial(&self, params: &Params, rho: f64) -> [f64; 4] {
        let b = bubble_derivs(params, self.lambda * rho);
        let a = self.amp(params);
        let l = self.lambda;
        [a * b[0], a * l * b[1], a * l * l * b[2], a * l * l * l * b[3]]
    }

    fn offset(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let d: Vec<f64> = x.iter().zip(&self.y).map(|(a, b)| a - b).collect();
        let rho = d.iter().map(|t| t * t).sum::<f64>().sqrt();
        (d, rho)
    }

    /// Value and gradient at a point x of R^n.
    pub fn evaluate(&self, params: &Params, x: &[f64]) -> (f64, Vec<f64>) {
        let (d, rho) = self.offset(x);
        let [v, dv, ..] = self.radial(params, rho);
        let grad = if rho == 0.0 {
            vec![0.0; d.len()]
        } else {
            d.iter().map(|t| dv * t / rho).collect()
        };
        (v, grad)
    }

    /// Derivatives in λ and in each component of y, plus the value itself.
    pub fn tangent_fields(&self, params: &Params, x: &[f64]) -> (f64, Vec<f64>, f64) {
        let (v, grad) = self.evaluate(params, x);
        let (_, rho) = self.offset(x);
        let d_lambda = self.d_lambda_radial(params, rho);
        let d_y = grad.iter().map(|g| -g).collect();
        (d_lambda, d_y, v)
    }

    /// ∂_λ of the field as a function of ρ.
    pub fn d_lambda_radial(&self, params: &Params, rho: f64) -> f64 {
        let a = params.nf() / params.pstar;
        let l = self.lambda;
        let b = bubble_derivs(params, l * rho);
        self.c * (a * l.powf(a - 1.0) * b[0] + l.powf(a) * rho * b[1])
    }

    /// −Δ_p(cv) − S^p |c|^{p−p*} |cv|^{p*−2} cv on the radial profile.
    ///
    /// At c = 1 this is the plain Euler–Lagrange residual; the c-scaling keeps it
    /// zero on the whole family.
    pub fn p_laplace_residual(&self, params: &Params, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius r={r} must be positive")));
        }
        Ok(self.p_laplace_parts(params, r)?.0)
    }

    /// Residual together with the size S^p |c|^{p-p*} |cv|^{p*-1} of the reaction term.
    pub fn p_laplace_parts(&self, params: &Params, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius r={r} must be positive")));
        }
        let p = params.p;
        let [v, d1, d2, _] = self.radial(params, r);
        if self.c == 0.0 {
            return Ok((0.0, 0.0));
        }
        let w = d1.abs().powf(p - 2.0);
        let neg_lap = -(params.nf() - 1.0) / r * w * d1 - (p - 1.0) * w * d2;
        let reaction = params.sp
            * self.c.abs().powf(p - params.pstar)
            * v.abs().powf(params.pstar - 2.0)
            * v;
        Ok((neg_lap - reaction, reaction.abs()))
    }
}
