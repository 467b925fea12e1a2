//! Problem parameters and closed-form constants.

use serde::Serialize;
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Dimension, exponent and every constant derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub n: usize,
    pub p: f64,
    /// Critical exponent np/(n-p).
    pub pstar: f64,
    /// Hölder conjugate p/(p-1).
    pub pprime: f64,
    /// Sharp Sobolev constant.
    pub s: f64,
    /// `s` raised to the power p.
    pub sp: f64,
    /// Amplitude making the unit-scale bubble have unit critical norm.
    pub kappa0: f64,
    /// First radial eigenvalue (p-1) S^p.
    pub alpha1: f64,
    /// Tangent-space eigenvalue (p*-1) S^p.
    pub alpha2: f64,
}

pub(crate) fn check_domain(n: usize, p: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension n={n} must be at least 2")));
    }
    if !p.is_finite() || p < 2.0 || p >= n as f64 {
        return Err(Error::Domain(format!(
            "exponent p={p} must satisfy 2 <= p < n={n}"
        )));
    }
    Ok(())
}

/// Sharp constant in S‖u‖_{p*} ≤ ‖∇u‖_p.
pub fn sharp_constant(n: usize, p: f64) -> Result<f64> {
    check_domain(n, p)?;
    let nf = n as f64;
    let log_gamma_ratio = ln_gamma(nf / p) + ln_gamma(1.0 + nf - nf / p)
        - ln_gamma(1.0 + nf / 2.0)
        - ln_gamma(nf);
    Ok(PI.sqrt()
        * nf.powf(1.0 / p)
        * ((nf - p) / (p - 1.0)).powf((p - 1.0) / p)
        * (log_gamma_ratio / nf).exp())
}

/// Surface area of the unit sphere in R^dim, i.e. of S^{dim-1}.
pub fn sphere_area(dim: usize) -> f64 {
    let d = dim as f64;
    2.0 * (0.5 * d * PI.ln() - ln_gamma(0.5 * d)).exp()
}

/// ∫₀^∞ r^{n-1} (1 + r^{p'})^{-n} dr in closed form.
pub fn beta_radial_integral(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let q = p / (p - 1.0);
    ln_beta(nf / q, nf - nf / q).exp() / q
}

pub fn normalization_kappa0(n: usize, p: f64) -> Result<f64> {
    check_domain(n, p)?;
    let pstar = n as f64 * p / (n as f64 - p);
    let mass = sphere_area(n) * beta_radial_integral(n, p);
    Ok(mass.powf(-1.0 / pstar))
}

impl Params {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_domain(n, p)?;
        let nf = n as f64;
        let pstar = nf * p / (nf - p);
        let pprime = p / (p - 1.0);
        let s = sharp_constant(n, p)?;
        let sp = s.powf(p);
        let kappa0 = normalization_kappa0(n, p)?;
        Ok(Params {
            n,
            p,
            pstar,
            pprime,
            s,
            sp,
            kappa0,
            alpha1: (p - 1.0) * sp,
            alpha2: (pstar - 1.0) * sp,
        })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Exponent m = (n-p)/p in the bubble profile.
    pub fn profile_exponent(&self) -> f64 {
        (self.nf() - self.p) / self.p
    }

    /// Far-field decay rate (n-p)/(p-1) of the bubble.
    pub fn decay_rate(&self) -> f64 {
        (self.nf() - self.p) / (self.p - 1.0)
    }

    pub fn omega(&self) -> f64 {
        sphere_area(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    #[test]
    fn n4_p2_reduces_to_exact_gammas() {
        let s = sharp_constant(4, 2.0).unwrap();
        let exact = 2.0 * (2.0 * PI).sqrt() * 6f64.powf(-0.25);
        assert!((s - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn n3_p2_matches_gamma_form() {
        let s = sharp_constant(3, 2.0).unwrap();
        let exact = (3.0 * PI).sqrt() * (gamma(1.5) / 2.0).powf(1.0 / 3.0);
        assert!((s - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(Params::new(1, 2.0), Err(Error::Domain(_))));
        assert!(matches!(Params::new(4, 1.5), Err(Error::Domain(_))));
        assert!(matches!(Params::new(4, 4.0), Err(Error::Domain(_))));
        assert!(matches!(Params::new(3, f64::NAN), Err(Error::Domain(_))));
        assert!(Params::new(3, 2.0).is_ok());
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn frozen_constants() {
        // (n, p, S, kappa0) from a 30-digit mpmath evaluation
        let cases = [
            (3, 2.0, 2.340_492_275_042_011_7, 0.860_254_013_828_099_6),
            (4, 2.0, 3.203_185_701_968_418_9, 0.883_004_417_448_563_0),
            (4, 2.5, 2.118_249_623_705_029_4, 0.889_013_007_112_574_0),
            (5, 3.0, 1.930_401_501_262_044_1, 0.922_348_197_110_866_4),
            (5, 2.0, 3.848_624_653_042_426_0, 1.009_508_797_633_682_1),
        ];
        for (n, p, s, k0) in cases {
            let q = Params::new(n, p).unwrap();
            assert!((q.s - s).abs() < 1e-12 * s, "S({n},{p})");
            assert!((q.kappa0 - k0).abs() < 1e-12 * k0, "kappa0({n},{p})");
            assert!(q.alpha1 < q.alpha2);
            assert!(((1.0 / q.p + 1.0 / q.pprime) - 1.0).abs() < 1e-15);
            let ratio = q.alpha2 / q.alpha1;
            assert!((ratio - (q.pstar - 1.0) / (q.p - 1.0)).abs() < 1e-14 * ratio);
        }
    }
}
