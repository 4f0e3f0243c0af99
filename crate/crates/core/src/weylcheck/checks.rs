use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{laguerre_phi_all, weyl_transform_matrix, WeylQuadrature};
use crate::error::{Error, Result};
use crate::opcalc::{matrix_of_symbol, OperatorMatrix};
use crate::scalar::{cx, Cx};
use crate::symbol::Symbol;

/// Radial phase-space symbol `(x, |w|) ↦ a(x, |w|)`.
pub type RadialSymbol<T> = dyn Fn(T, T) -> Cx<T> + Send + Sync;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub k: usize,
    pub kmax: usize,
    /// Diagonal entry `(k, k)` of `∫φ_k(w)π(w)dw`.
    pub constant: f64,
    /// Largest other entry relative to the constant.
    pub leakage: f64,
    pub boundary: f64,
    pub truncated: bool,
    /// `(2π)^{−1}`, the value printed alongside the identity.
    pub printed_constant: f64,
    pub ratio_to_printed: f64,
}

/// `∫φ_k(w)π(w)dw` on shells `0..=kmax`, compared with a multiple of `P_k`.
pub fn special_hermite_projection(k: usize, kmax: usize, quad: &WeylQuadrature) -> Result<ProjectionReport> {
    if k > kmax {
        return Err(Error::InvalidArgument(format!("shell {k} lies above the truncation {kmax}")));
    }
    let a = move |_x: f64, u: f64, v: f64| cx(laguerre_phi_all(k, u * u + v * v)[k], 0.0);
    let w = weyl_transform_matrix(&a, kmax, quad)?;
    let constant = w.matrix.get(k, k).re;
    let mut off = 0.0f64;
    for r in 0..=kmax {
        for c in 0..=kmax {
            if (r, c) != (k, k) {
                off = off.max(w.matrix.get(r, c).norm());
            }
        }
    }
    let off = off.max(w.matrix.get(k, k).im.abs());
    let printed = 1.0 / (2.0 * std::f64::consts::PI);
    Ok(ProjectionReport {
        k,
        kmax,
        constant,
        leakage: off / constant.abs(),
        boundary: w.boundary,
        truncated: w.truncated(),
        printed_constant: printed,
        ratio_to_printed: constant / printed,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundTrip {
    /// `max_k |m̃_k − m_k| / max_k |m_k|`.
    pub residual: f64,
    /// Coefficients recovered with the normalization `(2π)^{−1}∫ a φ_k`.
    pub recovered: Vec<Cx<f64>>,
    /// `⟨∫aφ_k, m⟩ / ⟨m, m⟩`: the factor the bare integral carries.
    pub bare_scale: f64,
}

/// Builds `a = Σ m_k φ_k` and recovers the coefficients by quadrature.
///
/// `∫_{ℂ} φ_j φ_k dw = 2π δ_{jk}`, so the coefficient is `(2π)^{−1}∫ a φ_k`.
pub fn laguerre_coeff_roundtrip(m: &[Cx<f64>], quad: &WeylQuadrature) -> Result<RoundTrip> {
    if m.is_empty() || m.len() > 17 {
        return Err(Error::InvalidArgument(format!("need 1 to 17 coefficients, got {}", m.len())));
    }
    let kmax = m.len() - 1;
    let (us, wu) = quad.nodes::<f64>();
    let bare = us
        .par_iter()
        .zip(&wu)
        .map(|(&u, &wu_)| {
            let mut acc = vec![cx(0.0, 0.0); m.len()];
            for (&v, &wv) in us.iter().zip(&wu) {
                let phi = laguerre_phi_all(kmax, u * u + v * v);
                let a: Cx<f64> = m.iter().zip(&phi).map(|(c, p)| c * p).sum();
                for (slot, p) in acc.iter_mut().zip(&phi) {
                    *slot += a * (p * wu_ * wv);
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        // summed in node order so the result does not depend on the thread split
        .into_iter()
        .fold(vec![cx(0.0, 0.0); m.len()], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        });
    let two_pi = 2.0 * std::f64::consts::PI;
    let recovered: Vec<Cx<f64>> = bare.iter().map(|b| b / two_pi).collect();
    let scale = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let residual = if scale > 0.0 {
        recovered.iter().zip(m).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale
    } else {
        recovered.iter().map(|a| a.norm()).fold(0.0, f64::max)
    };
    let mm: f64 = m.iter().map(|c| c.norm_sqr()).sum();
    let bare_scale = if mm > 0.0 { bare.iter().zip(m).map(|(b, c)| b * c.conj()).sum::<Cx<f64>>().re / mm } else { 0.0 };
    Ok(RoundTrip { residual, recovered, bare_scale })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdjointReport {
    /// `T*` against the transform of `conj a(x+v, |w|)`.
    pub residual: f64,
    /// `T*` against the transform of `conj a(x−v, |w|)`.
    pub minus_residual: f64,
    pub boundary: f64,
}

fn relative_max(a: &OperatorMatrix<f64>, b: &OperatorMatrix<f64>) -> Result<f64> {
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(a.sub(b)?.max_abs() / scale)
}

/// Compares the adjoint of the transform of `a` with transforms of the
/// conjugated symbol displaced by `±v` in `x`.
pub fn adjoint_check(a: Arc<RadialSymbol<f64>>, kmax: usize, quad: &WeylQuadrature) -> Result<AdjointReport> {
    let direct = {
        let a = a.clone();
        move |x: f64, u: f64, v: f64| a(x, u.hypot(v))
    };
    let plus = {
        let a = a.clone();
        move |x: f64, u: f64, v: f64| a(x + v, u.hypot(v)).conj()
    };
    let minus = move |x: f64, u: f64, v: f64| a(x - v, u.hypot(v)).conj();
    let left = weyl_transform_matrix(&direct, kmax, quad)?;
    let right = weyl_transform_matrix(&plus, kmax, quad)?;
    let literal = weyl_transform_matrix(&minus, kmax, quad)?;
    let adj = left.matrix.adjoint();
    Ok(AdjointReport {
        residual: relative_max(&adj, &right.matrix)?,
        minus_residual: relative_max(&adj, &literal.matrix)?,
        boundary: left.boundary.max(right.boundary),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormBound {
    /// Spectral norm of the truncated transform.
    pub norm: f64,
    /// `∫ sup_x |a(x, |w|)| dw` with the sup over the scan points.
    pub bound: f64,
}

/// `‖T‖ ≤ ∫ sup_x |a(x, w)| dw`, both sides measured.
pub fn weyl_norm_bound(a: Arc<RadialSymbol<f64>>, kmax: usize, quad: &WeylQuadrature, x_scan: &[f64]) -> Result<NormBound> {
    if x_scan.is_empty() {
        return Err(Error::InvalidArgument("empty x scan".into()));
    }
    let f = {
        let a = a.clone();
        move |x: f64, u: f64, v: f64| a(x, u.hypot(v))
    };
    let w = weyl_transform_matrix(&f, kmax, quad)?;
    let (us, wu) = quad.nodes::<f64>();
    let bound: f64 = us
        .par_iter()
        .zip(&wu)
        .map(|(&u, &wu_)| {
            us.iter()
                .zip(&wu)
                .map(|(&v, &wv)| {
                    let r = u.hypot(v);
                    wu_ * wv * x_scan.iter().map(|&x| a(x, r).norm()).fold(0.0, f64::max)
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(NormBound { norm: w.matrix.spectral_norm(), bound })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub kmax: usize,
    pub scale: f64,
    /// `max |W(a) − scale·M| / max |W(a)|`.
    pub residual: f64,
    /// Least-squares multiple of `M` closest to `W(a)`.
    pub fitted_scale: f64,
}

/// Transform of `a = Σ_{k≤K} m(x,k) φ_k(w)` against `scale` times the matrix
/// of the pseudo-multiplier `m(x, H)`.
pub fn t_equivalence(
    m: Arc<dyn Fn(f64, usize) -> Cx<f64> + Send + Sync>,
    kmax: usize,
    scale: f64,
    quad: &WeylQuadrature,
) -> Result<EquivalenceReport> {
    let mm = m.clone();
    let a = move |x: f64, u: f64, v: f64| -> Cx<f64> {
        laguerre_phi_all(kmax, u * u + v * v).iter().enumerate().map(|(k, &p)| mm(x, k) * p).sum()
    };
    let w = weyl_transform_matrix(&a, kmax, quad)?;
    let sym = Symbol::from_fn(1, "laguerre-coefficients", move |x: &[f64], k| m(x[0], k))?;
    // non-polynomial x-dependence needs far more nodes than the default rule
    let target = matrix_of_symbol(&sym, kmax, Some(256.max(4 * (kmax + 1))))?;
    let num: Cx<f64> = w.matrix.data().iter().zip(target.data()).map(|(a, b)| a * b.conj()).sum();
    let den: f64 = target.data().iter().map(|b| b.norm_sqr()).sum();
    let fitted_scale = if den > 0.0 { num.re / den } else { 0.0 };
    let scaled = target.scale(cx(scale, 0.0));
    let top = w.matrix.max_abs();
    let residual = if top > 0.0 { w.matrix.sub(&scaled)?.max_abs() / top } else { scaled.max_abs() };
    Ok(EquivalenceReport { kmax, scale, residual, fitted_scale })
}
