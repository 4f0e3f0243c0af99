//! Truncated operator matrices in the Hermite basis, ladder operators,
//! noncommutative derivatives and the structural expansion checks.
//!
//! Products of truncated matrices are exact only away from the top shells, so
//! every identity is compared on shells `≤ K_max − order`.

mod lemma52;
mod matrix;
mod mauceri;
mod rows;

pub use lemma52::{lemma52_admissible, lemma52_check, lemma52_fit, Lemma52Fit, Lemma52Term};
pub use matrix::OperatorMatrix;
pub use mauceri::{mauceri_expand_check, mauceri_fit, ExpansionTerm, MauceriFit};
pub use rows::{row_l2_profile, row_l2_sup};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{gauss_hermite, hermite_all, hermite_derivative_all, ShellBasis};
use crate::error::{Error, Result};
use crate::scalar::{cx, re, Cx, Real};
use crate::symbol::Symbol;

/// Raising (`A*_j`) or lowering (`A_j`) ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Raise,
    Lower,
}

/// `A_jΦ_μ = √(2μ_j) Φ_{μ−e_j}` or `A*_jΦ_μ = √(2μ_j+2) Φ_{μ+e_j}`; the
/// raising matrix drops what leaves the top shell.
pub fn ladder<T: Real>(n: usize, kmax: usize, axis: usize, dir: Direction) -> Result<OperatorMatrix<T>> {
    let basis = ShellBasis::shared(n, kmax)?;
    if axis >= n {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range for dimension {n}")));
    }
    let mut m = OperatorMatrix::zeros(n, kmax)?;
    for col in 0..basis.len() {
        let mu = basis.index(col).get(axis);
        match dir {
            Direction::Lower => {
                if let Some(row) = basis.lowered(col, axis) {
                    m.set(row, col, re(T::of_usize(2 * mu).sqrt()));
                }
            }
            Direction::Raise => {
                if let Some(row) = basis.raised(col, axis) {
                    m.set(row, col, re(T::of_usize(2 * mu + 2).sqrt()));
                }
            }
        }
    }
    Ok(m)
}

/// One-dimensional matrix `∫ g(x) h_b(x) h_a(x) dx` by Gauss–Hermite
/// quadrature, with `g` applied through `kernel(x, table_row)`.
fn axis_matrix<T: Real>(kmax: usize, use_derivative: bool, weight_x: bool) -> Result<Vec<Vec<T>>> {
    let grid = gauss_hermite::<T>(kmax + 2)?;
    let mut out = vec![vec![T::zero(); kmax + 1]; kmax + 1];
    for (&x, &w) in grid.nodes().iter().zip(grid.weights()) {
        let h = hermite_all(kmax, x)?;
        let right = if use_derivative { hermite_derivative_all(kmax, x)? } else { h.clone() };
        let f = if weight_x { x * w } else { w };
        for (a, row) in out.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v += f * h[a] * right[b];
            }
        }
    }
    Ok(out)
}

fn lift_axis_matrix<T: Real>(n: usize, kmax: usize, axis: usize, m1: &[Vec<T>]) -> Result<OperatorMatrix<T>> {
    if axis >= n {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range for dimension {n}")));
    }
    let basis = ShellBasis::shared(n, kmax)?;
    OperatorMatrix::from_fn(n, kmax, |r, c| {
        let (a, b) = (basis.index(r), basis.index(c));
        let same_elsewhere = (0..n).all(|i| i == axis || a.get(i) == b.get(i));
        if same_elsewhere {
            re(m1[a.get(axis)][b.get(axis)])
        } else {
            cx(T::zero(), T::zero())
        }
    })
}

/// Multiplication by `x_j`, assembled by quadrature (independent of the
/// ladder formulas).
pub fn position_matrix<T: Real>(n: usize, kmax: usize, axis: usize) -> Result<OperatorMatrix<T>> {
    lift_axis_matrix(n, kmax, axis, &axis_matrix(kmax, false, true)?)
}

/// `∂/∂x_j`, assembled by quadrature from Hermite derivatives.
pub fn derivative_matrix<T: Real>(n: usize, kmax: usize, axis: usize) -> Result<OperatorMatrix<T>> {
    lift_axis_matrix(n, kmax, axis, &axis_matrix(kmax, true, false)?)
}

/// Default Gauss–Hermite size for [`matrix_of_symbol`].
pub fn default_symbol_quadrature(n: usize, kmax: usize) -> usize {
    match n {
        1 => 2 * (kmax + 1),
        2 => kmax + 9,
        _ => kmax + 1,
    }
}

/// `M_{μν} = ∫ m(x, |ν|) Φ_ν(x) Φ_μ(x) dx`.
///
/// x-free symbols are assembled exactly as diagonal matrices; otherwise a
/// tensor Gauss–Hermite rule of `q ≥ K_max + 1` nodes per axis is used.
pub fn matrix_of_symbol<T: Real>(m: &Symbol<T>, kmax: usize, q: Option<usize>) -> Result<OperatorMatrix<T>> {
    let n = m.n();
    let basis = ShellBasis::shared(n, kmax)?;
    if m.is_x_free() {
        let origin = vec![T::zero(); n];
        let row = m.row(&origin, kmax);
        let b = basis.clone();
        return OperatorMatrix::from_fn(n, kmax, move |r, c| if r == c { row[b.degree(c)] } else { cx(T::zero(), T::zero()) });
    }
    let q = q.unwrap_or_else(|| default_symbol_quadrature(n, kmax));
    if q < kmax + 1 {
        return Err(Error::UndersizedQuadrature { axis_size: q, kmax });
    }
    let grid = gauss_hermite::<T>(q)?.with_dimension(n)?;
    let points = grid.points();
    let weights = grid.tensor_weights();
    let d = basis.len();
    // phi[i][α] and the weighted symbol columns c[i][ν] = w_i m(x_i,|ν|) Φ_ν(x_i)
    let rows: Vec<(Vec<T>, Vec<Cx<T>>)> = points
        .par_iter()
        .zip(weights.par_iter())
        .map(|(p, &w)| {
            let tables: Vec<Vec<T>> = p.iter().map(|&t| hermite_all(kmax, t)).collect::<Result<_>>()?;
            let phi: Vec<T> = basis
                .indices()
                .iter()
                .map(|a| a.components().iter().enumerate().fold(T::one(), |acc, (ax, &c)| acc * tables[ax][c]))
                .collect();
            let sym = m.row(p, kmax);
            let weighted = phi.iter().enumerate().map(|(nu, &f)| sym[basis.degree(nu)] * (w * f)).collect();
            Ok((phi, weighted))
        })
        .collect::<Result<_>>()?;
    let mut data = vec![cx(T::zero(), T::zero()); d * d];
    data.par_chunks_mut(d).enumerate().for_each(|(mu, out)| {
        for (phi, weighted) in &rows {
            let a = phi[mu];
            if a == T::zero() {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(weighted) {
                *o += v * a;
            }
        }
    });
    OperatorMatrix::from_data(n, kmax, data)
}

/// Which noncommutative derivative to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NcKind {
    /// `δ_j M = [M, A_j]`.
    Delta,
    /// `δ̄_j M = −[M, A*_j]`.
    DeltaBar,
    /// `D_j M = [x_j, M]`.
    D,
}

pub fn nc_derivative<T: Real>(m: &OperatorMatrix<T>, axis: usize, kind: NcKind) -> Result<OperatorMatrix<T>> {
    let (n, kmax) = (m.n(), m.kmax());
    match kind {
        NcKind::Delta => OperatorMatrix::commutator(m, &ladder(n, kmax, axis, Direction::Lower)?),
        NcKind::DeltaBar => Ok(OperatorMatrix::commutator(m, &ladder(n, kmax, axis, Direction::Raise)?)?.scale(re(-T::one()))),
        NcKind::D => OperatorMatrix::commutator(&position_matrix(n, kmax, axis)?, m),
    }
}
