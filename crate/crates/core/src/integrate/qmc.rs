use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::params::{sphere_area, Params};

const REPLICATES: usize = 8;

/// Radial shape of the importance density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    /// Tails like v₁^{p*}.
    Critical,
    /// Tails like |∇v₁|^p.
    Gradient,
}

/// Importance density with radial law F(r) = (r^k/(1+r^k))^m about `center`.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub n: usize,
    pub center: Vec<f64>,
    k: f64,
    m: f64,
}

impl Sampler {
    pub fn new(params: &Params, density: Density, center: Vec<f64>) -> Result<Self> {
        let n = params.n;
        if n > 6 {
            return Err(Error::Domain(format!("quasi-Monte Carlo is limited to n <= 6 (got {n})")));
        }
        if center.len() != n {
            return Err(Error::Domain("center has the wrong dimension".into()));
        }
        let k = match density {
            Density::Critical => n as f64 / (params.p - 1.0),
            Density::Gradient => params.decay_rate(),
        };
        Ok(Sampler { n, center, k, m: n as f64 / k })
    }

    fn radius(&self, u: f64) -> f64 {
        let w = u.powf(1.0 / self.m);
        (w / (1.0 - w)).powf(1.0 / self.k)
    }

    fn density(&self, r: f64) -> f64 {
        // F'(r) / (|S^{n-1}| r^{n-1}) with km = n
        let n = self.n as f64;
        n * (1.0 + r.powf(self.k)).powf(-self.m - 1.0) / sphere_area(self.n)
    }
}

/// Additive recurrence with generalized golden-ratio increments in `dim` dimensions.
fn kronecker_alphas(dim: usize) -> Vec<f64> {
    // root of x^{dim+1} = x + 1
    let mut g = 2.0f64;
    for _ in 0..100 {
        g = (1.0 + g).powf(1.0 / (dim as f64 + 1.0));
    }
    (1..=dim).map(|j| (1.0 / g).powi(j as i32).fract()).collect()
}

/// Randomly shifted lattice-sequence estimate of ∫_{R^n} f, with the spread over 8 shifts as stderr.
pub fn qmc_integrate<F>(integrand: F, sampler: &Sampler, samples: usize, seed: u64) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if samples < 1 << 12 {
        return Err(Error::Domain(format!("need at least 4096 samples, got {samples}")));
    }
    let n = sampler.n;
    let dim = n + 1;
    let alphas = kronecker_alphas(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<Vec<f64>> = (0..REPLICATES)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    let per = samples / REPLICATES;
    let normal = Normal::standard();

    let means: Vec<Result<f64>> = shifts
        .par_iter()
        .map(|shift| {
            let mut acc = 0.0;
            let mut x = vec![0.0; n];
            for i in 1..=per {
                let mut u = [0.0f64; 8];
                for j in 0..dim {
                    let t = (shift[j] + i as f64 * alphas[j]).fract();
                    u[j] = t.clamp(1e-15, 1.0 - 1e-15);
                }
                let r = sampler.radius(u[0]);
                let mut norm = 0.0;
                for j in 0..n {
                    x[j] = normal.inverse_cdf(u[j + 1]);
                    norm += x[j] * x[j];
                }
                let norm = norm.sqrt();
                for j in 0..n {
                    x[j] = sampler.center[j] + r * x[j] / norm;
                }
                let f = integrand(&x);
                if !f.is_finite() {
                    return Err(Error::Evaluation(format!("{x:?}")));
                }
                acc += f / sampler.density(r);
            }
            Ok(acc / per as f64)
        })
        .collect();
    let means: Vec<f64> = means.into_iter().collect::<Result<_>>()?;
    let rf = REPLICATES as f64;
    let mean = means.iter().sum::<f64>() / rf;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (rf - 1.0);
    Ok((mean, (var / rf).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::Extremal;

    #[test]
    fn alphas_are_irrational_looking() {
        let a = kronecker_alphas(1);
        assert!((a[0] - 0.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn critical_mass_is_one() {
        let q = Params::new(4, 2.5).unwrap();
        let e = Extremal::unit(4);
        let s = Sampler::new(&q, Density::Critical, vec![0.0; 4]).unwrap();
        let (v, se) = qmc_integrate(|x| e.evaluate(&q, x).0.powf(q.pstar), &s, 1 << 15, 7).unwrap();
        assert!((v - 1.0).abs() < 3.0 * se + 1e-12, "{v} ± {se}");
    }

    #[test]
    fn gradient_energy_is_sharp_constant() {
        let q = Params::new(3, 2.0).unwrap();
        let e = Extremal::unit(3);
        let s = Sampler::new(&q, Density::Gradient, vec![0.0; 3]).unwrap();
        let f = |x: &[f64]| {
            let g = e.evaluate(&q, x).1;
            g.iter().map(|t| t * t).sum::<f64>().powf(q.p / 2.0)
        };
        let (v, se) = qmc_integrate(f, &s, 1 << 15, 3).unwrap();
        assert!((v - q.sp).abs() < 3.0 * se, "{v} ± {se} vs {}", q.sp);
    }

    #[test]
    fn translated_bubble_keeps_unit_mass() {
        let q = Params::new(5, 3.0).unwrap();
        let y = vec![0.6, 0.0, -0.8, 0.0, 0.0];
        let e = Extremal::new(1.0, 1.0, y.clone()).unwrap();
        let s = Sampler::new(&q, Density::Critical, y).unwrap();
        let (v, se) = qmc_integrate(|x| e.evaluate(&q, x).0.powf(q.pstar), &s, 1 << 14, 99).unwrap();
        assert!((v - 1.0).abs() < 3.0 * se + 1e-12);
    }

    #[test]
    fn deterministic_given_seed() {
        let q = Params::new(3, 2.0).unwrap();
        let s = Sampler::new(&q, Density::Critical, vec![0.0; 3]).unwrap();
        let f = |x: &[f64]| (-x.iter().map(|t| t * t).sum::<f64>()).exp();
        let a = qmc_integrate(f, &s, 1 << 12, 5).unwrap();
        let b = qmc_integrate(f, &s, 1 << 12, 5).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }

    #[test]
    fn rejects_large_dimension() {
        let q = Params::new(8, 2.0).unwrap();
        assert!(Sampler::new(&q, Density::Critical, vec![0.0; 8]).is_err());
    }
}
