use gauss_quad::legendre::GaussLegendre;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::bubble_derivs;
use crate::params::Params;
use crate::zonal::spherical_eigenvalue;

use super::eigen::Tridiagonal;

/// Which quadratic form the channel discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    /// |∇v|^{p−2}(|∇φ|² + (p−2)(∂_rφ)²): radial stiffness carries the factor p−1.
    Linearized,
    /// |∇v|^{p−2}|∇φ|².
    Plain,
}

/// Uniform mesh in s = log r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshSpec {
    pub elements: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Relative eigenvalue tolerance advertised for this mesh.
    pub tol: f64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec { elements: 3000, r_min: 1e-6, r_max: 1e4, tol: 1e-3 }
    }
}

impl MeshSpec {
    pub fn validate(&self) -> Result<()> {
        if self.elements < 16 || !(self.r_min > 0.0) || !(self.r_max > self.r_min) || !(self.tol > 0.0) {
            return Err(Error::Domain(format!("bad mesh {self:?}")));
        }
        Ok(())
    }

    pub fn refined(&self) -> Self {
        MeshSpec { elements: 2 * self.elements, ..*self }
    }

    pub fn s0(&self) -> f64 {
        self.r_min.ln()
    }

    pub fn ds(&self) -> f64 {
        (self.r_max.ln() - self.r_min.ln()) / self.elements as f64
    }

    pub fn radii(&self) -> Vec<f64> {
        let (s0, ds) = (self.s0(), self.ds());
        (0..=self.elements).map(|i| (s0 + ds * i as f64).exp()).collect()
    }
}

/// One spherical-harmonic channel of the linearized operator about c·v_λ with ‖v‖_{p*} = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SLChannel {
    pub params: Params,
    pub degree: usize,
    pub mu: f64,
    pub form: FormKind,
    pub lambda: f64,
    pub mesh: MeshSpec,
}

impl SLChannel {
    pub fn new(params: &Params, degree: usize, form: FormKind, mesh: MeshSpec) -> Result<Self> {
        Self::scaled(params, degree, form, mesh, 1.0)
    }

    /// Channel for the extremal λ^{n/p*}v₁(λ·).
    pub fn scaled(params: &Params, degree: usize, form: FormKind, mesh: MeshSpec, lambda: f64) -> Result<Self> {
        mesh.validate()?;
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("lambda={lambda} must be positive")));
        }
        let (mu, _) = spherical_eigenvalue(degree, params.n);
        Ok(SLChannel { params: *params, degree, mu, form, lambda, mesh })
    }

    fn radial_weight(&self) -> f64 {
        match self.form {
            FormKind::Linearized => self.params.p - 1.0,
            FormKind::Plain => 1.0,
        }
    }

    /// (v, |v′|) of the scaled extremal.
    fn profile(&self, r: f64) -> (f64, f64) {
        let q = &self.params;
        let a = self.lambda.powf(q.nf() / q.pstar);
        let b = bubble_derivs(q, self.lambda * r);
        (a * b[0], (a * self.lambda * b[1]).abs())
    }

    /// Coefficients (P, Q, w) at r.
    pub fn coefficients(&self, r: f64) -> (f64, f64, f64) {
        let q = &self.params;
        let n1 = q.nf() - 1.0;
        let (v, dv) = self.profile(r);
        let g = if q.p == 2.0 { 1.0 } else { dv.powf(q.p - 2.0) };
        let rn = r.powf(n1);
        (self.radial_weight() * g * rn, self.mu * g * rn / (r * r), v.powf(q.pstar - 2.0) * rn)
    }

    /// Power b with r^{−b} the decaying far-field solution of the channel without the mass term.
    pub fn far_field_exponent(&self) -> f64 {
        let beta = self.params.decay_rate();
        let gamma = self.radial_weight();
        0.5 * (beta + (beta * beta + 4.0 * self.mu / gamma).sqrt())
    }

    /// Stiffness and mass matrices of the P1 discretization in s.
    pub fn assemble(&self) -> (Tridiagonal, Tridiagonal) {
        let ne = self.mesh.elements;
        let (s0, ds) = (self.mesh.s0(), self.mesh.ds());
        let gl = GaussLegendre::new(4.try_into().expect("nonzero")).as_node_weight_pairs().to_vec();
        let mut k = Tridiagonal::zeros(ne + 1);
        let mut m = Tridiagonal::zeros(ne + 1);
        for e in 0..ne {
            let a = s0 + ds * e as f64;
            let (mut kp, mut kq) = ([0.0; 3], 0.0);
            let mut mw = [0.0; 3];
            for &(x, wq) in &gl {
                let t = 0.5 * (x + 1.0);
                let r = (a + ds * t).exp();
                let (p, q, w) = self.coefficients(r);
                let jw = 0.5 * ds * wq;
                let (b0, b1) = (1.0 - t, t);
                // ∫P̃ (φ′)² with P̃ = P/r, derivative ±1/ds
                let pt = p / r * jw / (ds * ds);
                kp[0] += pt;
                // Q̃ = Q·r, w̃ = w·r
                let qt = q * r * jw;
                let wt = w * r * jw;
                kp[1] += qt * b0 * b0;
                kp[2] += qt * b1 * b1;
                kq += qt * b0 * b1;
                mw[0] += wt * b0 * b0;
                mw[1] += wt * b1 * b1;
                mw[2] += wt * b0 * b1;
            }
            k.diag[e] += kp[0] + kp[1];
            k.diag[e + 1] += kp[0] + kp[2];
            k.off[e] += -kp[0] + kq;
            m.diag[e] += mw[0];
            m.diag[e + 1] += mw[1];
            m.off[e] += mw[2];
        }
        // flux condition matching the decaying tail at r_max
        let rm = self.mesh.r_max;
        let (p, _, _) = self.coefficients(rm);
        k.diag[ne] += self.far_field_exponent() * p / rm;
        (k, m)
    }
}
