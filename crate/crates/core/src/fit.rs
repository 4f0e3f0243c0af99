//! Small least-squares helpers: straight-line fits for decay slopes and a
//! complex linear least-squares solve for structural expansions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the residuals, in the units of `y`.
    pub rms_residual: f64,
    pub max_residual: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("a line fit needs at least two points".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in line fit".into()));
    }
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - slope * a - intercept).collect();
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: (res.iter().map(|r| r * r).sum::<f64>() / m).sqrt(),
        max_residual: res.iter().map(|r| r.abs()).fold(0.0, f64::max),
    })
}

/// Solution of `min ‖Σ_i c_i columns[i] − target‖₂` by modified Gram–Schmidt.
#[derive(Clone, Debug, PartialEq)]
pub struct LstsqFit<T> {
    pub coeffs: Vec<Cx<T>>,
    pub residual_norm: T,
    pub target_norm: T,
}

impl<T: Real> LstsqFit<T> {
    /// `‖residual‖/‖target‖`, or the absolute residual for a zero target.
    pub fn relative_residual(&self) -> T {
        if self.target_norm > T::zero() {
            self.residual_norm / self.target_norm
        } else {
            self.residual_norm
        }
    }
}

fn dot<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    a.iter().zip(b).map(|(u, v)| u.conj() * v).sum()
}

fn norm<T: Real>(a: &[Cx<T>]) -> T {
    a.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
}

pub fn complex_lstsq<T: Real>(columns: &[Vec<Cx<T>>], target: &[Cx<T>]) -> Result<LstsqFit<T>> {
    let rows = target.len();
    if let Some(c) = columns.iter().find(|c| c.len() != rows) {
        return Err(Error::LengthMismatch { expected: rows, got: c.len() });
    }
    let p = columns.len();
    let mut q: Vec<Vec<Cx<T>>> = Vec::with_capacity(p);
    let mut r = vec![vec![cx(T::zero(), T::zero()); p]; p];
    let mut active = vec![false; p];
    let scale = columns.iter().map(|c| norm(c)).fold(T::zero(), T::max);
    for (j, col) in columns.iter().enumerate() {
        let mut v = col.clone();
        // two passes of MGS keep the basis orthogonal to working precision
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                if !active[i] {
                    continue;
                }
                let h = dot(qi, &v);
                r[i][j] += h;
                v.iter_mut().zip(qi).for_each(|(a, b)| *a -= *b * h);
            }
        }
        let nv = norm(&v);
        if nv > scale * T::epsilon() * T::lit(1e3) && nv > T::zero() {
            r[j][j] = cx(nv, T::zero());
            v.iter_mut().for_each(|a| *a = *a / nv);
            active[j] = true;
        }
        q.push(v);
    }
    // project the target and back-substitute on the active columns
    let mut resid = target.to_vec();
    let mut qt = vec![cx(T::zero(), T::zero()); p];
    for _ in 0..2 {
        for i in 0..p {
            if !active[i] {
                continue;
            }
            let h = dot(&q[i], &resid);
            qt[i] += h;
            resid.iter_mut().zip(&q[i]).for_each(|(a, b)| *a -= *b * h);
        }
    }
    let mut coeffs = vec![cx(T::zero(), T::zero()); p];
    for i in (0..p).rev() {
        if !active[i] {
            continue;
        }
        let s: Cx<T> = (i + 1..p).filter(|&j| active[j]).map(|j| r[i][j] * coeffs[j]).sum();
        coeffs[i] = (qt[i] - s) / r[i][i];
    }
    Ok(LstsqFit { coeffs, residual_norm: norm(&resid), target_norm: norm(target) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert_relative_eq!(f.slope, 2.0, epsilon = 1e-14);
        assert_relative_eq!(f.intercept, -1.0, epsilon = 1e-14);
        assert!(f.rms_residual < 1e-14);
    }

    #[test]
    fn degenerate_line_inputs() {
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0], &[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn recovers_complex_combination() {
        let rows = 40;
        let c1: Vec<Cx<f64>> = (0..rows).map(|i| Cx::new((i as f64).sin(), 0.1 * i as f64)).collect();
        let c2: Vec<Cx<f64>> = (0..rows).map(|i| Cx::new(1.0, (i as f64 * 0.3).cos())).collect();
        let a = Cx::new(0.5, -1.25);
        let b = Cx::new(-2.0, 0.75);
        let t: Vec<Cx<f64>> = c1.iter().zip(&c2).map(|(u, v)| u * a + v * b).collect();
        let fit = complex_lstsq(&[c1, c2], &t).unwrap();
        assert!((fit.coeffs[0] - a).norm() < 1e-12);
        assert!((fit.coeffs[1] - b).norm() < 1e-12);
        assert!(fit.relative_residual() < 1e-13);
    }

    #[test]
    fn dependent_columns_are_skipped() {
        let c1: Vec<Cx<f64>> = (0..10).map(|i| Cx::new(i as f64, 0.0)).collect();
        let c2: Vec<Cx<f64>> = c1.iter().map(|v| v * 2.0).collect();
        let fit = complex_lstsq(&[c1.clone(), c2], &c1).unwrap();
        assert!(fit.relative_residual() < 1e-13);
        assert!(fit.coeffs.iter().all(|c| c.re.is_finite()));
    }
}
