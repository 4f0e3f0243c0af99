use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::KernelCoeffs;
use crate::error::{Error, Result};
use crate::opcalc::OperatorMatrix;
use crate::scalar::{Cx, Real};
use crate::spectral::{t_j, DiagonalMultiplier};

/// Sample point triple with `|x−z| > 2|y−z|` and `|x−y| > 2|y−z|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// `y` uniform in `[−R, R]ⁿ`; `|y−z|` log-uniform in `[r_min, r_max]` along a
/// random direction; `x` uniform in the cube, by rejection.
pub fn sample_triples(n: usize, count: usize, extent: f64, r_min: f64, r_max: f64, rng: &mut impl Rng) -> Result<Vec<Triple>> {
    if !(extent > 0.0 && r_min > 0.0 && r_max >= r_min) {
        return Err(Error::InvalidArgument("need extent > 0 and 0 < r_min ≤ r_max".into()));
    }
    if 4.0 * r_max >= 2.0 * extent {
        return Err(Error::InvalidArgument("offsets too large for the sampling cube".into()));
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-extent..=extent)).collect();
        let r = (rng.gen_range(r_min.ln()..=r_max.ln())).exp();
        let dir: Vec<f64> = loop {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let s = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if s > 1e-3 && s <= 1.0 {
                break v.into_iter().map(|a| a / s).collect();
            }
        };
        let z: Vec<f64> = y.iter().zip(&dir).map(|(a, d)| a + r * d).collect();
        let x = loop {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-extent..=extent)).collect();
            if dist(&x, &z) > 2.0 * r && dist(&x, &y) > 2.0 * r {
                break x;
            }
        };
        out.push(Triple { x, y, z });
    }
    Ok(out)
}

/// `M(x, y)` at one pair of points.
pub fn kernel_at<T: Real>(m: &OperatorMatrix<T>, x: &[T], y: &[T]) -> Result<Cx<T>> {
    KernelCoeffs::new(m)?.value(x, y)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HormanderRow {
    pub big_n: u32,
    /// `sup |x−z|^{n+1/2} |K_N(x,y) − K_N(x,z)| / |y−z|^{1/2}` over the samples.
    pub sup: f64,
    pub argmax: usize,
    /// Highest shell of `K_N` carrying mass.
    pub band: usize,
    /// `e^{−t_{N+1}(2K_max+n)}`, the weight cut off by the truncation.
    pub tail: f64,
}

/// The smoothness sweep for `K_N = M e^{−t_{N+1}H} = Σ_{j≤N} M_j`.
pub fn hormander_check<T: Real>(m: &OperatorMatrix<T>, ns: &[u32], triples: &[Triple]) -> Result<Vec<HormanderRow>> {
    let n = m.n();
    if let Some(t) = triples.iter().find(|t| t.x.len() != n || t.y.len() != n || t.z.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: t.x.len() });
    }
    let pt = |v: &[f64]| -> Vec<T> { v.iter().map(|&a| T::lit(a)).collect() };
    ns.iter()
        .map(|&big_n| {
            let t = t_j::<T>(big_n + 1);
            let kn = m.mul_diagonal_right(&DiagonalMultiplier::heat(n, m.kmax(), t)?)?;
            let coeffs = KernelCoeffs::new(&kn)?;
            let ratios: Vec<f64> = triples
                .par_iter()
                .map(|tr| -> Result<f64> {
                    let (x, y, z) = (pt(&tr.x), pt(&tr.y), pt(&tr.z));
                    let c = coeffs.column_coeffs(&coeffs.phi_at(&x, None)?);
                    let py = coeffs.phi_at(&y, None)?;
                    let pz = coeffs.phi_at(&z, None)?;
                    let diff: Cx<T> = c.iter().zip(py.iter().zip(&pz)).map(|(v, (&a, &b))| *v * (a - b)).sum();
                    let (dxz, dyz) = (dist(&tr.x, &tr.z), dist(&tr.y, &tr.z));
                    Ok(dxz.powf(n as f64 + 0.5) * diff.norm().as_f64() / dyz.sqrt())
                })
                .collect::<Result<_>>()?;
            let (argmax, sup) = ratios
                .iter()
                .copied()
                .enumerate()
                .fold((0, 0.0), |a, (i, v)| if v > a.1 { (i, v) } else { a });
            Ok(HormanderRow {
                big_n,
                sup,
                argmax,
                band: coeffs.band(),
                tail: (-t.as_f64() * (2 * m.kmax() + n) as f64).exp(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::projection_kernel;
    use crate::opcalc::matrix_of_symbol;
    use crate::symbol::Symbol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triples_satisfy_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tr = sample_triples(2, 200, 4.0, 1e-3, 1.0, &mut rng).unwrap();
        for t in &tr {
            let r = dist(&t.y, &t.z);
            assert!((1e-3 - 1e-12..=1.0 + 1e-12).contains(&r));
            assert!(dist(&t.x, &t.z) > 2.0 * r && dist(&t.x, &t.y) > 2.0 * r);
        }
        let again = sample_triples(2, 200, 4.0, 1e-3, 1.0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(tr, again);
    }

    #[test]
    fn pointwise_kernel_matches_projection() {
        let m = OperatorMatrix::<f64>::identity(1, 10).unwrap();
        let v = kernel_at(&m, &[0.4], &[-1.1]).unwrap();
        let expect: f64 = (0..=10).map(|k| projection_kernel(k, &[0.4], &[-1.1], 1).unwrap()).sum();
        assert!((v.re - expect).abs() < 1e-13);
    }

    #[test]
    fn zero_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tr = sample_triples(1, 50, 4.0, 1e-3, 1.0, &mut rng).unwrap();
        let rows = hormander_check(&OperatorMatrix::<f64>::zeros(1, 16).unwrap(), &[2, 3], &tr).unwrap();
        assert!(rows.iter().all(|r| r.sup == 0.0));
    }

    #[test]
    fn mihlin_sweep_is_flat_alternating_grows() {
        let kmax = 512;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tr = sample_triples(1, 400, 6.0, 1e-3, 1.0, &mut rng).unwrap();
        let m = matrix_of_symbol(&Symbol::<f64>::mihlin_it(1, 1.0).unwrap(), kmax, None).unwrap();
        let rows = hormander_check(&m, &[3, 4, 5], &tr).unwrap();
        let hi = rows.iter().map(|r| r.sup).fold(0.0, f64::max);
        let lo = rows.iter().map(|r| r.sup).fold(f64::INFINITY, f64::min);
        assert!(hi / lo <= 3.0, "{rows:?}");
        let alt = matrix_of_symbol(&Symbol::<f64>::alternating(1).unwrap(), kmax, None).unwrap();
        let rows = hormander_check(&alt, &[3, 5], &tr).unwrap();
        assert!(rows[1].sup > 2.0 * rows[0].sup);
    }
}
