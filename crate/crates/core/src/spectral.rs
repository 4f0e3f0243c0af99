//! Hermite analysis and synthesis, and the diagonal functional calculus
//! `m(H) = Σ_k m(2k+n) P_k`.
//!
//! Everything here lives in the truncated model: coefficients above `K_max`
//! are zero and operators act as 0 there.

use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::{Grid, GridFunction, MultiIndex, QuadratureGrid, ShellBasis};
use crate::error::{Error, Result};
use crate::scalar::{cis, cx, eigenvalue, re, Cx, Real};

/// Truncated Hermite coefficient vector over `{α : |α| ≤ K_max}` in shell order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T> {
    basis: Arc<ShellBasis>,
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn new(n: usize, kmax: usize, coeffs: Vec<Cx<T>>) -> Result<Self> {
        let basis = ShellBasis::shared(n, kmax)?;
        if coeffs.len() != basis.len() {
            return Err(Error::LengthMismatch { expected: basis.len(), got: coeffs.len() });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("non-finite Hermite coefficient".into()));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(n: usize, kmax: usize) -> Result<Self> {
        let basis = ShellBasis::shared(n, kmax)?;
        let coeffs = vec![Cx::new(T::zero(), T::zero()); basis.len()];
        Ok(Self { basis, coeffs })
    }

    /// Coefficients `c_α = f(α)`.
    pub fn from_fn(n: usize, kmax: usize, f: impl FnMut(&MultiIndex) -> Cx<T>) -> Result<Self> {
        let basis = ShellBasis::shared(n, kmax)?;
        let coeffs = basis.indices().iter().map(f).collect();
        Self::new(n, kmax, coeffs)
    }

    /// The field of the single basis function `Φ_α`.
    pub fn unit(kmax: usize, alpha: &MultiIndex) -> Result<Self> {
        let mut out = Self::zeros(alpha.dim(), kmax)?;
        let i = out
            .basis
            .position(alpha)
            .ok_or_else(|| Error::InvalidArgument(format!("{alpha} lies above truncation {kmax}")))?;
        out.coeffs[i] = re(T::one());
        Ok(out)
    }

    pub(crate) fn from_parts(basis: Arc<ShellBasis>, coeffs: Vec<Cx<T>>) -> Self {
        debug_assert_eq!(basis.len(), coeffs.len());
        Self { basis, coeffs }
    }

    pub fn basis(&self) -> &Arc<ShellBasis> {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn kmax(&self) -> usize {
        self.basis.kmax()
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cx<T>> {
        self.coeffs
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<Cx<T>> {
        self.basis.position(alpha).map(|i| self.coeffs[i])
    }

    /// `(Σ|c_α|²)^{1/2}`.
    pub fn norm(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    /// Coefficients restricted to shell `k`.
    pub fn shell(&self, k: usize) -> &[Cx<T>] {
        &self.coeffs[self.basis.shell_range(k)]
    }

    /// `P_k` applied in coefficient space.
    pub fn project(&self, k: usize) -> Self {
        let range = self.basis.shell_range(k);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if range.contains(&i) { c } else { cx(T::zero(), T::zero()) })
            .collect();
        Self { basis: self.basis.clone(), coeffs }
    }

    /// Re-embeds into a different truncation, dropping or zero-padding shells.
    pub fn retruncate(&self, kmax: usize) -> Result<Self> {
        let basis = ShellBasis::shared(self.n(), kmax)?;
        let coeffs = basis
            .indices()
            .iter()
            .map(|a| self.get(a).unwrap_or_else(|| cx(T::zero(), T::zero())))
            .collect();
        Ok(Self { basis, coeffs })
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { basis: self.basis.clone(), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { basis: self.basis.clone(), coeffs })
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: other.n() });
        }
        if self.kmax() != other.kmax() {
            return Err(Error::LengthMismatch { expected: self.coeffs.len(), got: other.coeffs.len() });
        }
        Ok(())
    }
}

/// Per-axis Hermite tables `h_c(x_axis)` for one point, `c ≤ top`.
fn axis_tables<T: Real>(p: &[T], top: usize) -> Result<Vec<Vec<T>>> {
    p.iter().map(|&t| crate::basis::hermite_all(top, t)).collect()
}

#[inline]
fn phi_from_tables<T: Real>(tables: &[Vec<T>], alpha: &MultiIndex) -> T {
    alpha.components().iter().enumerate().fold(T::one(), |acc, (axis, &c)| acc * tables[axis][c])
}

/// `c_α = ∫ f Φ_α` by Gauss–Hermite quadrature.
///
/// Needs at least `K_max + 1` nodes per axis, which makes the transform exact
/// on band-limited inputs.
pub fn analyze<T: Real>(f: &GridFunction<T>, kmax: usize) -> Result<SpectralField<T>> {
    let grid: &QuadratureGrid<T> = match f.grid() {
        Grid::Quadrature(g) => g,
        Grid::Uniform(_) => {
            return Err(Error::InvalidArgument("analysis requires a Gauss–Hermite quadrature grid".into()))
        }
    };
    if grid.axis_size() < kmax + 1 {
        return Err(Error::UndersizedQuadrature { axis_size: grid.axis_size(), kmax });
    }
    let basis = ShellBasis::shared(grid.n(), kmax)?;
    let weights = grid.tensor_weights();
    let points = grid.points();
    let zero = vec![cx(T::zero(), T::zero()); basis.len()];
    let coeffs = (0..points.len())
        .into_par_iter()
        .try_fold(
            || zero.clone(),
            |mut acc, i| -> Result<Vec<Cx<T>>> {
                let wf = f.values()[i] * weights[i];
                if wf.re == T::zero() && wf.im == T::zero() {
                    return Ok(acc);
                }
                let tables = axis_tables(&points[i], kmax)?;
                for (slot, alpha) in acc.iter_mut().zip(basis.indices()) {
                    *slot += wf * phi_from_tables(&tables, alpha);
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || zero.clone(),
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    SpectralField::new(grid.n(), kmax, coeffs)
}

/// `Σ_α c_α Φ_α(p)` at arbitrary points.
pub fn synthesize_at<T: Real>(c: &SpectralField<T>, points: &[Vec<T>]) -> Result<Vec<Cx<T>>> {
    let n = c.n();
    let basis = c.basis();
    points
        .par_iter()
        .map(|p| {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
            let tables = axis_tables(p, c.kmax())?;
            Ok(basis
                .indices()
                .iter()
                .zip(c.coeffs())
                .fold(cx(T::zero(), T::zero()), |acc, (alpha, &ca)| acc + ca * phi_from_tables(&tables, alpha)))
        })
        .collect()
}

/// Samples `Σ_α c_α Φ_α` on a grid.
pub fn synthesize<T: Real>(c: &SpectralField<T>, grid: impl Into<Grid<T>>) -> Result<GridFunction<T>> {
    let grid = grid.into();
    if grid.n() != c.n() {
        return Err(Error::DimensionMismatch { expected: c.n(), got: grid.n() });
    }
    let values = synthesize_at(c, &grid.points())?;
    GridFunction::new(grid, values)
}

/// Multiplier values `μ_k`, `k = 0..=K_max`, attached to the eigenvalue `2k+n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalMultiplier<T> {
    n: usize,
    values: Vec<Cx<T>>,
}

impl<T: Real> DiagonalMultiplier<T> {
    pub fn new(n: usize, values: Vec<Cx<T>>) -> Result<Self> {
        crate::basis::check_dimension(n)?;
        if values.is_empty() {
            return Err(Error::InvalidArgument("multiplier needs at least one shell".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("non-finite multiplier value".into()));
        }
        Ok(Self { n, values })
    }

    /// `μ_k = φ(2k+n)`.
    pub fn from_eigen(n: usize, kmax: usize, phi: impl Fn(T) -> Cx<T>) -> Result<Self> {
        Self::new(n, (0..=kmax).map(|k| phi(eigenvalue(k, n))).collect())
    }

    pub fn identity(n: usize, kmax: usize) -> Result<Self> {
        Self::from_eigen(n, kmax, |_| re(T::one()))
    }

    /// `e^{−tH}`.
    pub fn heat(n: usize, kmax: usize, t: T) -> Result<Self> {
        Self::from_eigen(n, kmax, |lam| re((-t * lam).exp()))
    }

    /// `e^{−itH}`.
    pub fn unitary(n: usize, kmax: usize, t: T) -> Result<Self> {
        Self::from_eigen(n, kmax, |lam| cis(-t * lam))
    }

    /// `χ_N`: indicator of `2^{N−1} ≤ 2k+n < 2^N`; `N = 0` is empty.
    pub fn dyadic_block(n: usize, kmax: usize, big_n: u32) -> Result<Self> {
        Self::new(
            n,
            (0..=kmax)
                .map(|k| re(if in_dyadic_block(2 * k + n, big_n) { T::one() } else { T::zero() }))
                .collect(),
        )
    }

    /// `S_j = φ_j(H)` with `φ_0(λ) = e^{−t_1 λ}`, `φ_j(λ) = e^{−t_{j+1}λ} − e^{−t_j λ}`.
    pub fn sj_multiplier(n: usize, kmax: usize, j: u32) -> Result<Self> {
        Self::from_eigen(n, kmax, |lam| re(phi_j(j, lam)))
    }

    /// `Σ_{j=0}^{N} S_j`, summed term by term.
    pub fn partial_sum(n: usize, kmax: usize, big_n: u32) -> Result<Self> {
        let mut acc = Self::sj_multiplier(n, kmax, 0)?;
        for j in 1..=big_n {
            acc = acc.add(&Self::sj_multiplier(n, kmax, j)?)?;
        }
        Ok(acc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kmax(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Cx<T>] {
        &self.values
    }

    pub fn value(&self, k: usize) -> Cx<T> {
        self.values[k]
    }

    /// `‖m(H)‖_{L²→L²} = max_k |μ_k|` on the truncated model.
    pub fn operator_norm(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Shell index attaining the operator norm.
    pub fn argmax_shell(&self) -> usize {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if v.norm() > self.values[best].norm() {
                best = k;
            }
        }
        best
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { n: self.n, values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { n: self.n, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { n: self.n, values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() })
    }

    /// Max over shells of `|μ_k − ν_k|`.
    pub fn max_diff(&self, other: &Self) -> Result<T> {
        self.check_same(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        if self.values.len() != other.values.len() {
            return Err(Error::LengthMismatch { expected: self.values.len(), got: other.values.len() });
        }
        Ok(())
    }
}

/// `2^{N−1} ≤ λ < 2^N`.
pub fn in_dyadic_block(lambda: usize, big_n: u32) -> bool {
    if big_n == 0 || big_n >= usize::BITS {
        return false;
    }
    (1usize << (big_n - 1)) <= lambda && lambda < (1usize << big_n)
}

/// `t_j = 2^{−j}`.
pub fn t_j<T: Real>(j: u32) -> T {
    T::lit(2.0).powi(-(j as i32))
}

/// `φ_j(λ)`: `e^{−t_1λ}` for `j = 0`, else `e^{−t_{j+1}λ} − e^{−t_jλ}`.
pub fn phi_j<T: Real>(j: u32, lambda: T) -> T {
    let next = (-t_j::<T>(j + 1) * lambda).exp();
    if j == 0 {
        next
    } else {
        next - (-t_j::<T>(j) * lambda).exp()
    }
}

/// `c_α ↦ μ_{|α|} c_α`.
pub fn apply_diagonal<T: Real>(mu: &DiagonalMultiplier<T>, c: &SpectralField<T>) -> Result<SpectralField<T>> {
    if mu.n() != c.n() {
        return Err(Error::DimensionMismatch { expected: c.n(), got: mu.n() });
    }
    if mu.kmax() != c.kmax() {
        return Err(Error::LengthMismatch { expected: c.kmax() + 1, got: mu.values().len() });
    }
    let basis = c.basis().clone();
    let coeffs = c.coeffs().iter().enumerate().map(|(i, &v)| mu.value(basis.degree(i)) * v).collect();
    Ok(SpectralField::from_parts(basis, coeffs))
}

/// Ladder action on coefficients, `A_j` (`raise = false`) or `A*_j`
/// (`raise = true`), into an output basis of truncation `kmax_out`.
///
/// `A_jΦ_μ = √(2μ_j) Φ_{μ−e_j}` and `A*_jΦ_μ = √(2μ_j+2) Φ_{μ+e_j}`; terms
/// landing above `kmax_out` are dropped.
pub fn ladder_apply<T: Real>(c: &SpectralField<T>, axis: usize, raise: bool, kmax_out: usize) -> Result<SpectralField<T>> {
    if axis >= c.n() {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range for dimension {}", c.n())));
    }
    let mut out = SpectralField::zeros(c.n(), kmax_out)?;
    let out_basis = out.basis().clone();
    for (alpha, &v) in c.basis().indices().iter().zip(c.coeffs()) {
        let mu = alpha.get(axis);
        let (target, w) = if raise {
            (alpha.shifted(axis, true), T::of_usize(2 * mu + 2).sqrt())
        } else {
            (alpha.shifted(axis, false), T::of_usize(2 * mu).sqrt())
        };
        if let Some(pos) = target.and_then(|t| out_basis.position(&t)) {
            out.coeffs[pos] += v * w;
        }
    }
    Ok(out)
}

/// Multiplication by `x_j = (A_j + A*_j)/2` in coefficient space.
pub fn position_apply<T: Real>(c: &SpectralField<T>, axis: usize, kmax_out: usize) -> Result<SpectralField<T>> {
    let lo = ladder_apply(c, axis, false, kmax_out)?;
    let hi = ladder_apply(c, axis, true, kmax_out)?;
    Ok(lo.add(&hi)?.scale(re(T::lit(0.5))))
}

/// `∂/∂x_j = (A_j − A*_j)/2` in coefficient space.
pub fn derivative_apply<T: Real>(c: &SpectralField<T>, axis: usize, kmax_out: usize) -> Result<SpectralField<T>> {
    let lo = ladder_apply(c, axis, false, kmax_out)?;
    let hi = ladder_apply(c, axis, true, kmax_out)?;
    Ok(lo.sub(&hi)?.scale(re(T::lit(0.5))))
}

/// `H = Σ_j (x_j² − ∂_j²)` assembled from the position and derivative
/// ladders; the output carries two extra shells so nothing is truncated.
pub fn hermite_operator_apply<T: Real>(c: &SpectralField<T>) -> Result<SpectralField<T>> {
    let top = c.kmax() + 2;
    let wide = c.retruncate(top)?;
    let mut out = SpectralField::zeros(c.n(), top)?;
    for axis in 0..c.n() {
        let xx = position_apply(&position_apply(&wide, axis, top)?, axis, top)?;
        let dd = derivative_apply(&derivative_apply(&wide, axis, top)?, axis, top)?;
        out = out.add(&xx.sub(&dd)?)?;
    }
    Ok(out)
}
