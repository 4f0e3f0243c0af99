//! Hermite functions, multi-indices, Gauss–Hermite quadrature, sampling grids
//! and the eigenprojection kernels `Φ_k(x, y)`.

mod grid;
mod hermite;
mod multi_index;
mod quadrature;

pub use grid::{Grid, GridFunction, UniformGrid};
pub use hermite::{hermite_all, hermite_derivative_all, hermite_eval, HermiteTable};
pub use multi_index::{shell, shell_size, MultiIndex, ShellBasis, MAX_DIMENSION};
pub use quadrature::{gauss_hermite, QuadratureGrid};

pub(crate) use multi_index::check_dimension;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `Φ_α(x) = Π_i h_{α_i}(x_i)`.
pub fn phi_alpha_eval<T: Real>(alpha: &MultiIndex, x: &[T]) -> Result<T> {
    if alpha.dim() != x.len() {
        return Err(Error::DimensionMismatch { expected: alpha.dim(), got: x.len() });
    }
    alpha
        .components()
        .iter()
        .zip(x)
        .try_fold(T::one(), |acc, (&k, &xi)| Ok(acc * hermite_eval(k, xi)?))
}

/// Kernel of the eigenprojection `P_k`: `Φ_k(x,y) = Σ_{|α|=k} Φ_α(x) Φ_α(y)`.
pub fn projection_kernel<T: Real>(k: usize, x: &[T], y: &[T], n: usize) -> Result<T> {
    check_dimension(n)?;
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let hx: Vec<Vec<T>> = x.iter().map(|&t| hermite_all(k, t)).collect::<Result<_>>()?;
    let hy: Vec<Vec<T>> = y.iter().map(|&t| hermite_all(k, t)).collect::<Result<_>>()?;
    Ok(shell(n, k)
        .iter()
        .map(|a| {
            a.components()
                .iter()
                .enumerate()
                .fold(T::one(), |acc, (axis, &c)| acc * hx[axis][c] * hy[axis][c])
        })
        .sum())
}

/// `∫∫|Φ_k(x,y)|² dx dy` by the tensor Gauss–Hermite rule with `q` nodes
/// per axis.
///
/// The double integral factors through the Gram matrix
/// `G_{αβ} = Σ_x w_x Φ_α(x)Φ_β(x)` over the shell, as `Σ_{α,β} G_{αβ}²`.
pub fn hs_shell_norm_sq<T: Real>(k: usize, n: usize, q: usize) -> Result<T> {
    check_dimension(n)?;
    let grid = QuadratureGrid::<T>::tensor(q, n)?;
    let alphas = shell(n, k);
    let m = alphas.len();
    let mut gram = vec![T::zero(); m * m];
    let axis_tables: Vec<Vec<T>> = grid.nodes().iter().map(|&t| hermite_all(k, t)).collect::<Result<_>>()?;
    let mut phi = vec![T::zero(); m];
    for i in 0..grid.len() {
        let multi = grid.multi(i);
        let w = grid.weight(i);
        for (slot, a) in phi.iter_mut().zip(&alphas) {
            *slot = a.components().iter().zip(&multi).fold(T::one(), |acc, (&c, &j)| acc * axis_tables[j][c]);
        }
        for r in 0..m {
            let wr = w * phi[r];
            for c in 0..m {
                gram[r * m + c] += wr * phi[c];
            }
        }
    }
    Ok(gram.iter().map(|&g| g * g).sum())
}

/// Per-axis Hermite tables at a batch of points, from which `Φ_α(p)` for every
/// basis element is assembled.
pub struct BasisEvaluator<'a, T> {
    basis: &'a ShellBasis,
    extra: usize,
    tables: Vec<Vec<Vec<T>>>,
}

impl<'a, T: Real> BasisEvaluator<'a, T> {
    /// Tables up to degree `kmax + extra` (the extra degrees serve ladder
    /// actions that step past the truncation).
    pub fn new(basis: &'a ShellBasis, points: &[Vec<T>], extra: usize) -> Result<Self> {
        let top = basis.kmax() + extra;
        let tables = points
            .iter()
            .map(|p| {
                if p.len() != basis.n() {
                    return Err(Error::DimensionMismatch { expected: basis.n(), got: p.len() });
                }
                p.iter().map(|&t| hermite_all(top, t)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { basis, extra, tables })
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// `h_c(p_axis)` for point `i`.
    #[inline]
    pub fn axis_value(&self, i: usize, axis: usize, c: usize) -> T {
        self.tables[i][axis][c]
    }

    /// `Φ_α(p_i)` for an arbitrary multi-index within the table range.
    pub fn phi(&self, i: usize, alpha: &MultiIndex) -> T {
        debug_assert!(alpha.degree() <= self.basis.kmax() + self.extra);
        alpha
            .components()
            .iter()
            .enumerate()
            .fold(T::one(), |acc, (axis, &c)| acc * self.tables[i][axis][c])
    }

    /// `[Φ_α(p_i)]` over the basis in storage order.
    pub fn row(&self, i: usize) -> Vec<T> {
        self.basis.indices().iter().map(|a| self.phi(i, a)).collect()
    }

    /// Dense `points × basis` matrix, row-major.
    pub fn matrix(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len() * self.basis.len());
        for i in 0..self.len() {
            out.extend(self.row(i));
        }
        out
    }
}
