use rayon::prelude::*;

use super::{forward_differences, Symbol};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// A symbol tabulated on `points × {0..=kmax}`, optionally with its
/// x-gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolTable<T> {
    n: usize,
    kmax: usize,
    points: Vec<Vec<T>>,
    values: Vec<Cx<T>>,
    gradients: Option<Vec<Cx<T>>>,
}

impl<T: Real> SymbolTable<T> {
    pub fn build(m: &Symbol<T>, points: &[Vec<T>], kmax: usize) -> Result<Self> {
        let n = m.n();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
        let width = kmax + 1;
        let values: Vec<Cx<T>> = points.par_iter().flat_map_iter(|p| m.row(p, kmax)).collect();
        let gradients = m.has_gradient().then(|| {
            points
                .par_iter()
                .flat_map_iter(|p| {
                    (0..n).flat_map(move |axis| (0..width).map(move |k| m.gradient(p, k, axis).expect("gradient present")))
                })
                .collect()
        });
        Ok(Self { n, kmax, points: points.to_vec(), values, gradients })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_gradient(&self) -> bool {
        self.gradients.is_some()
    }

    /// `m(x_i, ·)` over shells `0..=kmax`.
    pub fn row(&self, i: usize) -> &[Cx<T>] {
        let w = self.kmax + 1;
        &self.values[i * w..(i + 1) * w]
    }

    pub fn value(&self, i: usize, k: usize) -> Cx<T> {
        self.row(i)[k]
    }

    /// `∂m/∂x_axis (x_i, ·)` over shells.
    pub fn gradient_row(&self, i: usize, axis: usize) -> Option<&[Cx<T>]> {
        let w = self.kmax + 1;
        let start = (i * self.n + axis) * w;
        self.gradients.as_ref().map(|g| &g[start..start + w])
    }

    /// `Δ^j m(x_i, k)`; errors past the truncation.
    pub fn delta(&self, i: usize, k: usize, j: usize) -> Result<Cx<T>> {
        if k + j > self.kmax {
            return Err(Error::DifferencePastTruncation { order: j, k, kmax: self.kmax });
        }
        Ok(forward_differences(&self.row(i)[k..=k + j], j, 0)[0])
    }

    /// `Δ^j m(x_i, k)` for `k = 0..=kmax−j`.
    pub fn delta_row(&self, i: usize, j: usize) -> Vec<Cx<T>> {
        if j > self.kmax {
            return Vec::new();
        }
        forward_differences(self.row(i), j, self.kmax - j)
    }

    /// `Δ^j ∂_axis m(x_i, k)` for `k = 0..=kmax−j`.
    pub fn delta_gradient_row(&self, i: usize, axis: usize, j: usize) -> Option<Vec<Cx<T>>> {
        if j > self.kmax {
            return Some(Vec::new());
        }
        self.gradient_row(i, axis).map(|g| forward_differences(g, j, self.kmax - j))
    }
}
