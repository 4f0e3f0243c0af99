use rayon::prelude::*;

use super::OperatorMatrix;
use crate::basis::hermite_all;
use crate::error::{Error, Result};
use crate::scalar::{cx, Real};
use crate::spectral::in_dyadic_block;

/// `∫|K(x,y)|² dy` where `K` is the kernel of `M χ_N(H)`, i.e.
/// `Σ_{ν∈χ_N} |Σ_μ M_{μν} Φ_μ(x)|²`, at each point.
pub fn row_l2_profile<T: Real>(m: &OperatorMatrix<T>, big_n: u32, points: &[Vec<T>]) -> Result<Vec<T>> {
    let (n, kmax) = (m.n(), m.kmax());
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: p.len() });
    }
    let basis = m.basis().clone();
    let cols: Vec<usize> = (0..basis.len()).filter(|&c| in_dyadic_block(2 * basis.degree(c) + n, big_n)).collect();
    points
        .par_iter()
        .map(|p| {
            let tables: Vec<Vec<T>> = p.iter().map(|&t| hermite_all(kmax, t)).collect::<Result<_>>()?;
            let phi: Vec<T> = basis
                .indices()
                .iter()
                .map(|a| (0..n).fold(T::one(), |acc, j| acc * tables[j][a.get(j)]))
                .collect();
            let mut total = T::zero();
            for &c in &cols {
                let mut s = cx(T::zero(), T::zero());
                for (r, &f) in phi.iter().enumerate() {
                    s += m.get(r, c) * f;
                }
                total += s.norm_sqr();
            }
            Ok(total)
        })
        .collect()
}

/// Largest value of [`row_l2_profile`] over the points, with its position.
pub fn row_l2_sup<T: Real>(m: &OperatorMatrix<T>, big_n: u32, points: &[Vec<T>]) -> Result<(T, usize)> {
    let prof = row_l2_profile(m, big_n, points)?;
    prof.iter()
        .enumerate()
        .fold(None, |best: Option<(T, usize)>, (i, &v)| match best {
            Some((b, _)) if b >= v => best,
            _ => Some((v, i)),
        })
        .ok_or_else(|| Error::InvalidArgument("no sample points".into()))
}
