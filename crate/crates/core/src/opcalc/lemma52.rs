use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{hermite_all, MultiIndex, ShellBasis};
use crate::error::{Error, Result};
use crate::fit::complex_lstsq;
use crate::scalar::{cx, Cx, Real};
use crate::symbol::{forward_differences, Symbol};

/// A fitted term `C_{β,γ} Σ_k Δ^{|γ|}m(x,k)(B*−A*)^β Φ_k(x,y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma52Term {
    pub beta: Vec<usize>,
    pub gamma: Vec<usize>,
    pub constant: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma52Fit {
    pub alpha: Vec<usize>,
    pub terms: Vec<Lemma52Term>,
    /// Relative residual over all sampled `(x, y)` pairs.
    pub residual: f64,
    pub samples: usize,
}

/// Pairs `(β, γ)` with `2γ_j − β_j = α_j` and `γ_j ≤ α_j` on every axis.
pub fn lemma52_admissible(alpha: &MultiIndex) -> Vec<(MultiIndex, MultiIndex)> {
    let n = alpha.dim();
    let mut out: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
    for axis in 0..n {
        let a = alpha.get(axis);
        let mut next = Vec::new();
        for (b, g) in &out {
            for gj in 0..=a {
                if 2 * gj >= a {
                    let mut b2 = b.clone();
                    let mut g2 = g.clone();
                    b2.push(2 * gj - a);
                    g2.push(gj);
                    next.push((b2, g2));
                }
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(b, g)| (MultiIndex::new(b).expect("n ≥ 1"), MultiIndex::new(g).expect("n ≥ 1")))
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Π_j √((2μ_j+2)…(2μ_j+2r_j))`, the factor of `(A*)^r Φ_μ = c Φ_{μ+r}`.
fn raise_factor<T: Real>(mu: &MultiIndex, r: &MultiIndex) -> T {
    (0..mu.dim()).fold(T::one(), |acc, j| {
        (1..=r.get(j)).fold(acc, |a, s| a * T::of_usize(2 * (mu.get(j) + s)).sqrt())
    })
}

/// Fits `(x−y)^α M(x,y)`, `M` the kernel of `m(x,H)` truncated at `K_max`,
/// against the admissible terms on every pair of `xs × ys`.
///
/// Differences in `k` use the truncated model: `m(·,k) = 0` for `k > K_max`.
pub fn lemma52_fit<T: Real>(
    m: &Symbol<T>,
    alpha: &MultiIndex,
    kmax: usize,
    xs: &[Vec<T>],
    ys: &[Vec<T>],
) -> Result<Lemma52Fit> {
    let n = m.n();
    if alpha.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: alpha.dim() });
    }
    if let Some(p) = xs.iter().chain(ys).find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: p.len() });
    }
    let basis = ShellBasis::shared(n, kmax)?;
    let admissible = lemma52_admissible(alpha);
    let top = kmax + alpha.degree();
    // expansion of (B* − A*)^β: (coefficient, r, s) with r + s = β, r acting in x
    let expansions: Vec<Vec<(T, MultiIndex, MultiIndex)>> = admissible
        .iter()
        .map(|(beta, _)| {
            beta.box_below()
                .into_iter()
                .map(|r| {
                    let s = beta.checked_sub(&r).expect("r ≤ β");
                    let c = (0..n).fold(1.0, |acc, j| acc * binomial(beta.get(j), r.get(j)));
                    let sign = if r.degree() % 2 == 1 { -1.0 } else { 1.0 };
                    (T::lit(c * sign), r, s)
                })
                .collect()
        })
        .collect();

    let x_rows: Vec<(Vec<Vec<T>>, Vec<Cx<T>>)> = xs
        .par_iter()
        .map(|x| {
            let tables = x.iter().map(|&t| hermite_all(top, t)).collect::<Result<Vec<_>>>()?;
            Ok((tables, m.row(x, kmax)))
        })
        .collect::<Result<_>>()?;
    let y_tables: Vec<Vec<Vec<T>>> = ys
        .par_iter()
        .map(|y| y.iter().map(|&t| hermite_all(top, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let phi = |tables: &[Vec<T>], mu: &MultiIndex, shift: &MultiIndex| -> T {
        (0..n).fold(T::one(), |acc, j| acc * tables[j][mu.get(j) + shift.get(j)])
    };
    let zero_shift = MultiIndex::zero(n);

    let pairs: Vec<(usize, usize)> = (0..xs.len()).flat_map(|i| (0..ys.len()).map(move |j| (i, j))).collect();
    let evaluated: Vec<(Cx<T>, Vec<Cx<T>>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (xt, row) = &x_rows[i];
            let yt = &y_tables[j];
            let x = &xs[i];
            let y = &ys[j];
            let mut lhs = cx(T::zero(), T::zero());
            for (idx, mu) in basis.indices().iter().enumerate() {
                lhs += row[basis.degree(idx)] * (phi(xt, mu, &zero_shift) * phi(yt, mu, &zero_shift));
            }
            let poly = (0..n).fold(T::one(), |acc, a| acc * (x[a] - y[a]).powi(alpha.get(a) as i32));
            lhs = lhs * poly;

            let terms = admissible
                .iter()
                .zip(&expansions)
                .map(|((_, gamma), expansion)| {
                    let g = gamma.degree();
                    let mut ext = row.clone();
                    ext.extend(std::iter::repeat(cx(T::zero(), T::zero())).take(g));
                    let diffs = forward_differences(&ext, g, kmax);
                    let mut acc = cx(T::zero(), T::zero());
                    for (idx, mu) in basis.indices().iter().enumerate() {
                        let dm = diffs[basis.degree(idx)];
                        if dm.re == T::zero() && dm.im == T::zero() {
                            continue;
                        }
                        let mut s_sum = T::zero();
                        for (c, r, s) in expansion {
                            s_sum += *c
                                * raise_factor::<T>(mu, r)
                                * raise_factor::<T>(mu, s)
                                * phi(xt, mu, r)
                                * phi(yt, mu, s);
                        }
                        acc += dm * s_sum;
                    }
                    acc
                })
                .collect();
            (lhs, terms)
        })
        .collect();

    let target: Vec<Cx<T>> = evaluated.iter().map(|(l, _)| *l).collect();
    let columns: Vec<Vec<Cx<T>>> = (0..admissible.len()).map(|t| evaluated.iter().map(|(_, c)| c[t]).collect()).collect();
    let fit = complex_lstsq(&columns, &target)?;
    Ok(Lemma52Fit {
        alpha: alpha.components().to_vec(),
        terms: admissible
            .iter()
            .zip(&fit.coeffs)
            .map(|((b, g), c)| Lemma52Term {
                beta: b.components().to_vec(),
                gamma: g.components().to_vec(),
                constant: [c.re.as_f64(), c.im.as_f64()],
            })
            .collect(),
        residual: fit.relative_residual().as_f64(),
        samples: pairs.len(),
    })
}

/// [`lemma52_fit`] with a structural tolerance.
pub fn lemma52_check<T: Real>(
    m: &Symbol<T>,
    alpha: &MultiIndex,
    kmax: usize,
    xs: &[Vec<T>],
    ys: &[Vec<T>],
    tolerance: f64,
) -> Result<Lemma52Fit> {
    let fit = lemma52_fit(m, alpha, kmax, xs, ys)?;
    if !(fit.residual <= tolerance) {
        return Err(Error::Structure { residual: fit.residual, tolerance });
    }
    Ok(fit)
}
