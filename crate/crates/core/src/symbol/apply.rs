use rayon::prelude::*;

use super::Symbol;
use crate::basis::{hermite_all, GridFunction};
use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};
use crate::spectral::{analyze, SpectralField};

/// `(P_k f)(x)` for every shell `k ≤ K_max` at every point, from the
/// coefficients of `f`.
pub fn shell_sums<T: Real>(c: &SpectralField<T>, points: &[Vec<T>]) -> Result<Vec<Vec<Cx<T>>>> {
    let basis = c.basis();
    let kmax = c.kmax();
    points
        .par_iter()
        .map(|p| {
            if p.len() != c.n() {
                return Err(Error::DimensionMismatch { expected: c.n(), got: p.len() });
            }
            let tables: Vec<Vec<T>> = p.iter().map(|&t| hermite_all(kmax, t)).collect::<Result<_>>()?;
            let mut sums = vec![cx(T::zero(), T::zero()); kmax + 1];
            for (i, (alpha, &ca)) in basis.indices().iter().zip(c.coeffs()).enumerate() {
                let phi = alpha
                    .components()
                    .iter()
                    .enumerate()
                    .fold(T::one(), |acc, (axis, &d)| acc * tables[axis][d]);
                sums[basis.degree(i)] += ca * phi;
            }
            Ok(sums)
        })
        .collect()
}

/// `Σ_{k ≤ K_max} m(x, k)(P_k f)(x)` at arbitrary points, `f` given by its
/// coefficients.
pub fn apply_pseudo_multiplier_at<T: Real>(m: &Symbol<T>, c: &SpectralField<T>, points: &[Vec<T>]) -> Result<Vec<Cx<T>>> {
    if m.n() != c.n() {
        return Err(Error::DimensionMismatch { expected: c.n(), got: m.n() });
    }
    let sums = shell_sums(c, points)?;
    Ok(points
        .par_iter()
        .zip(sums.par_iter())
        .map(|(p, s)| m.row(p, c.kmax()).iter().zip(s).map(|(a, b)| a * b).sum())
        .collect())
}

/// `m(x,H)f` on the grid of `f`, a Gauss–Hermite grid with at least
/// `K_max + 1` nodes per axis.
pub fn apply_pseudo_multiplier<T: Real>(m: &Symbol<T>, f: &GridFunction<T>, kmax: usize) -> Result<GridFunction<T>> {
    let c = analyze(f, kmax)?;
    let values = apply_pseudo_multiplier_at(m, &c, &f.grid().points())?;
    GridFunction::new(f.grid().clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::QuadratureGrid;
    use crate::scalar::re;
    use crate::spectral::{synthesize, DiagonalMultiplier};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn band_limited(n: usize, kmax: usize, seed: u64) -> GridFunction<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = SpectralField::from_fn(n, kmax, |_| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
        synthesize(&c, QuadratureGrid::tensor(kmax + 1, n).unwrap()).unwrap()
    }

    #[test]
    fn unit_symbol_is_identity_on_band_limited() {
        let f = band_limited(2, 8, 1);
        let out = apply_pseudo_multiplier(&Symbol::one(2).unwrap(), &f, 8).unwrap();
        assert!(out.l2_distance(&f).unwrap() < 1e-11);
    }

    #[test]
    fn x_factor_comes_out_of_the_sum() {
        let f = band_limited(1, 20, 2);
        let b = |p: &[f64]| (1.0 + p[0] * p[0]).recip();
        let out = apply_pseudo_multiplier(&Symbol::one(1).unwrap().times(b), &f, 20).unwrap();
        let expect = f.map(|p, v| v * b(p));
        assert!(out.l2_distance(&expect).unwrap() < 1e-11);
    }

    #[test]
    fn kronecker_selects_one_shell() {
        let f = band_limited(2, 6, 3);
        let out = apply_pseudo_multiplier(&Symbol::kronecker(2, 4).unwrap(), &f, 6).unwrap();
        let c = analyze(&f, 6).unwrap().project(4);
        let expect = synthesize(&c, f.grid().clone()).unwrap();
        assert!(out.l2_distance(&expect).unwrap() < 1e-11);
    }

    #[test]
    fn x_free_symbol_equals_diagonal_calculus() {
        let f = band_limited(1, 30, 4);
        let out = apply_pseudo_multiplier(&Symbol::mihlin_it(1, 1.0).unwrap(), &f, 30).unwrap();
        let mu = DiagonalMultiplier::from_eigen(1, 30, |l: f64| crate::scalar::cis(l.ln())).unwrap();
        let c = crate::spectral::apply_diagonal(&mu, &analyze(&f, 30).unwrap()).unwrap();
        let expect = synthesize(&c, f.grid().clone()).unwrap();
        assert!(out.l2_distance(&expect).unwrap() < 1e-11);
        // the norm bound is attained exactly in coefficient space
        assert!(c.norm() <= mu.operator_norm() * analyze(&f, 30).unwrap().norm() * (1.0 + 1e-14));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn linear_in_symbol_and_function(seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let f = band_limited(1, 12, seed);
            let g = band_limited(1, 12, seed + 7);
            let m1 = Symbol::mihlin_it(1, 1.0).unwrap().times(|p: &[f64]| (-p[0] * p[0]).exp());
            let m2 = Symbol::heat(1, 0.2).unwrap();
            let (ca, cb) = (re(a), re(b));
            let comb = Symbol::combine(ca, &m1, cb, &m2).unwrap();
            let lhs = apply_pseudo_multiplier(&comb, &f, 12).unwrap();
            let r1 = apply_pseudo_multiplier(&m1, &f, 12).unwrap();
            let r2 = apply_pseudo_multiplier(&m2, &f, 12).unwrap();
            let rhs = r1.map(|_, v| v * ca);
            let rhs = GridFunction::new(rhs.grid().clone(), rhs.values().iter().zip(r2.values()).map(|(u, v)| u + v * cb).collect()).unwrap();
            prop_assert!(lhs.l2_distance(&rhs).unwrap() <= 1e-12 * (1.0 + rhs.l2_norm()));

            let sum = GridFunction::new(f.grid().clone(), f.values().iter().zip(g.values()).map(|(u, v)| u * ca + v).collect()).unwrap();
            let lhs = apply_pseudo_multiplier(&m1, &sum, 12).unwrap();
            let rf = apply_pseudo_multiplier(&m1, &f, 12).unwrap();
            let rg = apply_pseudo_multiplier(&m1, &g, 12).unwrap();
            let rhs = GridFunction::new(f.grid().clone(), rf.values().iter().zip(rg.values()).map(|(u, v)| u * ca + v).collect()).unwrap();
            prop_assert!(lhs.l2_distance(&rhs).unwrap() <= 1e-12 * (1.0 + rhs.l2_norm()));
        }
    }
}
