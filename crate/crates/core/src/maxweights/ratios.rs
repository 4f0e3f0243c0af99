use serde::{Deserialize, Serialize};

use super::{dyadic_maximal, hl_maximal, lambda2, sharp_maximal, weighted_lp_norm, CubeFamily, Weight};
use crate::basis::GridFunction;
use crate::error::{Error, Result};
use crate::opcalc::OperatorMatrix;
use crate::scalar::{Cx, Real};
use crate::spectral::{synthesize, DiagonalMultiplier, SpectralField};
use crate::symbol::{apply_pseudo_multiplier_at, Symbol};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm31Report {
    pub big_n: u32,
    /// `max_x Λ^♯(T_N f)(x) / (Λ₂f(x) + Λ(Λ₂f)(x))`.
    pub ratio: f64,
    /// Grid point attaining the maximum.
    pub argmax: usize,
    /// `max_x Λ^♯(T_N f)(x)`.
    pub sharp_max: f64,
}

/// Sharp-maximal ratio for `T_N = M Σ_{j≤N} S_j` applied to `f`.
pub fn thm31_ratio<T: Real>(
    m: &OperatorMatrix<T>,
    f: &SpectralField<T>,
    big_n: u32,
    cubes: &CubeFamily<T>,
) -> Result<Thm31Report> {
    if f.coeffs().iter().all(|c| c.norm() == T::zero()) {
        return Err(Error::Domain("ratio is undefined for f ≡ 0".into()));
    }
    let tn = m.mul_diagonal_right(&DiagonalMultiplier::partial_sum(m.n(), m.kmax(), big_n)?)?;
    let grid = cubes.grid().clone();
    let tf = synthesize(&tn.apply(f)?, grid.clone())?;
    let fg = synthesize(f, grid)?;
    let sharp = sharp_maximal(&tf, cubes)?;
    let l2 = lambda2(&fg, cubes)?;
    let ll2 = hl_maximal(&l2, cubes)?;
    let mut best = (T::zero(), 0usize);
    let mut sharp_max = T::zero();
    for (i, ((s, a), b)) in sharp.values().iter().zip(l2.values()).zip(ll2.values()).enumerate() {
        let den = a.re + b.re;
        sharp_max = sharp_max.max(s.re);
        if den > T::zero() && s.re / den > best.0 {
            best = (s.re / den, i);
        }
    }
    Ok(Thm31Report { big_n, ratio: best.0.as_f64(), argmax: best.1, sharp_max: sharp_max.as_f64() })
}

/// `∫(Λ_d f)^p w / ∫(Λ^♯f)^p w`.
pub fn fs_ratio<T: Real>(f: &GridFunction<T>, w: &Weight<T>, p: T, cubes: &CubeFamily<T>) -> Result<T> {
    let num = weighted_lp_norm(&dyadic_maximal(f, cubes)?, w, p)?;
    let den = weighted_lp_norm(&sharp_maximal(f, cubes)?, w, p)?;
    if !(den > T::zero()) {
        return Err(Error::Domain("sharp maximal function vanishes; f is constant on the grid".into()));
    }
    Ok((num / den).powf(p))
}

/// `‖m(x,H)f‖_{L^p(w)} / ‖f‖_{L^p(w)}` with both sides sampled on the
/// weight's grid.
pub fn weighted_operator_ratio<T: Real>(m: &Symbol<T>, f: &SpectralField<T>, w: &Weight<T>, p: T) -> Result<T> {
    let points = w.grid().points();
    let mf: Vec<Cx<T>> = apply_pseudo_multiplier_at(m, f, &points)?;
    let mf = GridFunction::new(w.grid().clone(), mf)?;
    let fg = synthesize(f, w.grid().clone())?;
    let den = weighted_lp_norm(&fg, w, p)?;
    if !(den > T::zero()) {
        return Err(Error::Domain("f vanishes on the grid".into()));
    }
    Ok(weighted_lp_norm(&mf, w, p)? / den)
}
