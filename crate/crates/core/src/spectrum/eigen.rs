//! Bottom eigenpairs of a symmetric tridiagonal pencil K − αM.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[i]`, and `off[i]` couples i and i+1.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(size: usize) -> Self {
        Tridiagonal { diag: vec![0.0; size], off: vec![0.0; size.saturating_sub(1)] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let m = self.len();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..m - 1 {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y
    }

    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul(x).iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// self − σ·other
    pub fn shifted(&self, sigma: f64, other: &Tridiagonal) -> Tridiagonal {
        Tridiagonal {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a - sigma * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a - sigma * b).collect(),
        }
    }
}

/// Number of eigenvalues of the pencil below σ, from the inertia of K − σM.
pub fn count_below(k: &Tridiagonal, m: &Tridiagonal, sigma: f64) -> usize {
    let mut count = 0;
    let mut d = 0.0;
    for i in 0..k.len() {
        let a = k.diag[i] - sigma * m.diag[i];
        d = if i == 0 {
            a
        } else {
            let b = k.off[i - 1] - sigma * m.off[i - 1];
            let prev = if d == 0.0 { f64::EPSILON * b.abs().max(1e-300) } else { d };
            a - b * b / prev
        };
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves T x = b for a tridiagonal T with partial pivoting.
pub fn solve(t: &Tridiagonal, b: &[f64]) -> Result<Vec<f64>> {
    let m = t.len();
    // rows stored as (sub, diag, sup, sup2) after elimination
    let mut dl: Vec<f64> = t.off.clone();
    let mut d = t.diag.clone();
    let mut du = t.off.clone();
    let mut du2 = vec![0.0; m.saturating_sub(2)];
    let mut x = b.to_vec();
    for i in 0..m.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                return Err(Error::Eigen("singular tridiagonal system".into()));
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            x[i + 1] -= f * x[i];
            dl[i] = 0.0;
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if i + 1 < m - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            du[i] = tmp;
            x.swap(i, i + 1);
            x[i + 1] -= f * x[i];
        }
    }
    if d[m - 1] == 0.0 {
        return Err(Error::Eigen("singular tridiagonal system".into()));
    }
    x[m - 1] /= d[m - 1];
    if m > 1 {
        x[m - 2] = (x[m - 2] - du[m - 2] * x[m - 1]) / d[m - 2];
    }
    for i in (0..m.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

/// k-th smallest eigenvalue (1-based) by bisection on the Sturm count.
pub fn kth_eigenvalue(k: &Tridiagonal, m: &Tridiagonal, index: usize) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    if count_below(k, m, lo) >= index {
        return Err(Error::Eigen("pencil is not positive definite".into()));
    }
    let mut guard = 0;
    while count_below(k, m, hi) < index {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Eigen(format!("no eigenvalue {index} found below {hi:e}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(k, m, mid) >= index {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Eigenvector for a converged eigenvalue, M-normalized.
///
/// The shifted system is scaled symmetrically by diag(M)^{−1/2}; without it rows near the
/// origin, whose entries are many orders below the rest, are swamped by roundoff.
pub fn eigenvector(k: &Tridiagonal, m: &Tridiagonal, alpha: f64) -> Result<Vec<f64>> {
    let size = k.len();
    let scale: Vec<f64> = m
        .diag
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 1.0 })
        .collect();
    let mut shift = k.shifted(alpha * (1.0 + 1e-10), m);
    for i in 0..size {
        shift.diag[i] *= scale[i] * scale[i];
        if i + 1 < size {
            shift.off[i] *= scale[i] * scale[i + 1];
        }
    }
    let mut x: Vec<f64> = (0..size).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..4 {
        let rhs: Vec<f64> = m.mul(&x).iter().zip(&scale).map(|(b, s)| b * s).collect();
        x = solve(&shift, &rhs)?.iter().zip(&scale).map(|(y, s)| y * s).collect();
        let norm = m.form(&x, &x).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Eigen("inverse iteration broke down".into()));
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(size: usize) -> (Tridiagonal, Tridiagonal) {
        let k = Tridiagonal { diag: vec![2.0; size], off: vec![-1.0; size - 1] };
        let m = Tridiagonal { diag: vec![1.0; size], off: vec![0.0; size - 1] };
        (k, m)
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let size = 50;
        let (k, m) = laplacian(size);
        for j in 1..=5 {
            let exact = 2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (size + 1) as f64).cos();
            let got = kth_eigenvalue(&k, &m, j).unwrap();
            assert!((got - exact).abs() < 1e-13, "{j}: {got} {exact}");
            let v = eigenvector(&k, &m, got).unwrap();
            let kv = k.mul(&v);
            let res: f64 = kv.iter().zip(&v).map(|(a, b)| (a - got * b).powi(2)).sum::<f64>().sqrt();
            assert!(res < 1e-10, "{res}");
        }
    }

    #[test]
    fn pivoting_solver_matches_product() {
        let t = Tridiagonal { diag: vec![0.0, 1.0, -3.0, 2.0, 0.5], off: vec![2.0, -1.0, 4.0, 1.0] };
        let b = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let x = solve(&t, &b).unwrap();
        let back = t.mul(&x);
        for (a, c) in back.iter().zip(&b) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn count_is_monotone() {
        let (k, m) = laplacian(30);
        let mut last = 0;
        for s in 0..=41 {
            let c = count_below(&k, &m, 0.1 * s as f64);
            assert!(c >= last);
            last = c;
        }
        assert_eq!(last, 30);
    }
}
