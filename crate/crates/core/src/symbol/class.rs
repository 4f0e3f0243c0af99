use serde::{Deserialize, Serialize};

use super::{Symbol, SymbolTable};
use crate::basis::{gauss_hermite, UniformGrid};
use crate::error::{Error, Result};
use crate::scalar::{eigenvalue, Real};

/// The finite x-scan and k-range that stand in for `sup_{x∈ℝⁿ}` and all `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanDomain {
    pub points: usize,
    /// Largest `|x_i|` among the scanned points.
    pub extent: f64,
    pub kmax: usize,
}

/// Symbol-class constants `C_j = sup |Δ^j m(x,k)|(2k+n)^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolClassReport {
    pub order: usize,
    /// `C_0..=C_J`.
    pub constants: Vec<f64>,
    /// `sup |Δ^j ∂_{x_i} m(x,k)|(2k+n)^j` for `j = 0..J` (orders below `J`),
    /// maximized over axes; present iff the symbol carries a gradient.
    pub gradient_constants: Option<Vec<f64>>,
    pub threshold: f64,
    pub pass: bool,
    pub scan: ScanDomain,
}

/// Gauss–Hermite nodes together with a uniform grid past the turning point,
/// the default x-scan for class checks.
pub fn default_scan_points<T: Real>(n: usize, kmax: usize) -> Result<Vec<Vec<T>>> {
    crate::basis::check_dimension(n)?;
    let (q, uniform) = if n == 1 { (kmax + 1, 4 * kmax + 9) } else { ((kmax + 1).min(24), 33) };
    let mut pts = gauss_hermite::<T>(q)?.with_dimension(n)?.points();
    let half = T::lit((2.0 * (2 * kmax + n) as f64).sqrt() + 4.0);
    pts.extend(UniformGrid::new(n, half, uniform)?.points());
    Ok(pts)
}

/// Scans `C_j` for `j = 0..=J` over `points × {k : k + j ≤ kmax}`; shells
/// that would need the clamped tail are excluded.
pub fn symbol_class_check<T: Real>(
    m: &Symbol<T>,
    order: usize,
    points: &[Vec<T>],
    kmax: usize,
    threshold: f64,
) -> Result<SymbolClassReport> {
    if 2 * order > kmax {
        return Err(Error::InvalidArgument(format!("class order {order} exceeds half the truncation {kmax}")));
    }
    let table = SymbolTable::build(m, points, kmax)?;
    let n = m.n();
    let weight = |k: usize, j: usize| eigenvalue::<T>(k, n).as_f64().powi(j as i32);
    let constants: Vec<f64> = (0..=order)
        .map(|j| {
            (0..table.len())
                .flat_map(|i| table.delta_row(i, j).into_iter().enumerate().map(move |(k, v)| (k, v)))
                .map(|(k, v)| v.norm().as_f64() * weight(k, j))
                .fold(0.0, f64::max)
        })
        .collect();
    let gradient_constants = table.has_gradient().then(|| {
        (0..order.max(1))
            .map(|j| {
                let mut best = 0.0f64;
                for i in 0..table.len() {
                    for axis in 0..n {
                        let row = table.delta_gradient_row(i, axis, j).expect("gradient present");
                        for (k, v) in row.into_iter().enumerate() {
                            best = best.max(v.norm().as_f64() * weight(k, j));
                        }
                    }
                }
                best
            })
            .collect::<Vec<f64>>()
    });
    let pass = constants.iter().chain(gradient_constants.iter().flatten()).all(|&c| c <= threshold);
    let extent = points
        .iter()
        .flat_map(|p| p.iter().map(|v| v.abs().as_f64()))
        .fold(0.0, f64::max);
    Ok(SymbolClassReport {
        order,
        constants,
        gradient_constants,
        threshold,
        pass,
        scan: ScanDomain { points: points.len(), extent, kmax },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::XFactor;
    use proptest::prelude::*;

    #[test]
    fn unit_symbol_constants() {
        let pts = default_scan_points::<f64>(1, 32).unwrap();
        let r = symbol_class_check(&Symbol::one(1).unwrap(), 3, &pts, 32, 10.0).unwrap();
        assert_eq!(r.constants, vec![1.0, 0.0, 0.0, 0.0]);
        assert!(r.pass);
        assert_eq!(r.gradient_constants, Some(vec![0.0, 0.0, 0.0]));
    }

    #[test]
    fn mihlin_constants_stable_under_doubling() {
        let m = Symbol::<f64>::mihlin_it(1, 1.0).unwrap();
        let r1 = symbol_class_check(&m, 3, &[vec![0.0]], 256, 100.0).unwrap();
        let r2 = symbol_class_check(&m, 3, &[vec![0.0]], 512, 100.0).unwrap();
        for (a, b) in r1.constants.iter().zip(&r2.constants) {
            assert!(a.is_finite() && *a > 0.0);
            assert!((b / a - 1.0).abs() < 0.05, "{a} vs {b}");
        }
    }

    #[test]
    fn alternating_symbol_fails_class() {
        let kmax = 64;
        let r = symbol_class_check(&Symbol::<f64>::alternating(1).unwrap(), 1, &[vec![0.0]], kmax, 100.0).unwrap();
        // |Δm| = 2 on every scanned shell k ≤ kmax − 1
        assert_eq!(r.constants[1], 2.0 * (2 * (kmax - 1) + 1) as f64);
        assert!(r.constants[1] >= 0.9 * 2.0 * (2 * kmax + 1) as f64);
        assert!(!r.pass);
    }

    #[test]
    fn gradient_constants_present_only_with_gradient() {
        let pts = default_scan_points::<f64>(2, 8).unwrap();
        let m = Symbol::separable(XFactor::Gaussian { a: 0.5 }, Symbol::mihlin_it(2, 1.0).unwrap()).unwrap();
        let r = symbol_class_check(&m, 2, &pts, 8, 1e3).unwrap();
        assert_eq!(r.gradient_constants.as_ref().map(Vec::len), Some(2));
        let bare = symbol_class_check(&m.clone().without_gradient(), 2, &pts, 8, 1e3).unwrap();
        assert!(bare.gradient_constants.is_none());
        assert_eq!(bare.constants, r.constants);
    }

    #[test]
    fn order_limit() {
        assert!(symbol_class_check(&Symbol::<f64>::one(1).unwrap(), 6, &[vec![0.0]], 10, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn constants_monotone_in_scan_domain(a in 0.05f64..1.0, extra in 1usize..20) {
            let m = Symbol::separable(XFactor::Gaussian { a }, Symbol::<f64>::heat(1, 0.1).unwrap()).unwrap()
                .times(|p: &[f64]| 1.0 + 0.5 * p[0].sin());
            let small: Vec<Vec<f64>> = (0..5).map(|i| vec![0.3 * i as f64]).collect();
            let mut big = small.clone();
            big.extend((0..extra).map(|i| vec![-2.0 + 0.17 * i as f64]));
            let r1 = symbol_class_check(&m, 2, &small, 16, 1.0).unwrap();
            let r2 = symbol_class_check(&m, 2, &big, 16, 1.0).unwrap();
            for (c1, c2) in r1.constants.iter().zip(&r2.constants) {
                prop_assert!(c1 <= c2);
                prop_assert!(*c1 >= 0.0);
            }
        }
    }
}
