use serde::{Deserialize, Serialize};

use super::{CubeFamily, SummedArea};
use crate::basis::{Grid, GridFunction, UniformGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Serialized description of a weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `w ≡ 1`.
    Unit,
    /// `|x|^a`.
    Power { a: f64 },
    /// Explicit positive values in grid order.
    Table { values: Vec<f64> },
}

/// Positive weight sampled on a uniform grid.
///
/// Points where the defining formula is zero or infinite (`|x|^a` at the
/// origin) are excluded from every sum instead of being clamped.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight<T> {
    grid: UniformGrid<T>,
    name: String,
    values: Vec<T>,
    included: Vec<bool>,
}

impl<T: Real> Weight<T> {
    pub fn from_values(grid: UniformGrid<T>, name: impl Into<String>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !(**v > T::zero() && v.is_finite())) {
            return Err(Error::Domain(format!("weight values must be positive and finite, got {v}")));
        }
        let included = vec![true; values.len()];
        Ok(Self { grid, name: name.into(), values, included })
    }

    pub fn unit(grid: UniformGrid<T>) -> Self {
        let len = grid.len();
        Self { grid, name: "unit".into(), values: vec![T::one(); len], included: vec![true; len] }
    }

    pub fn power(grid: UniformGrid<T>, a: T) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::Domain(format!("power weight exponent must be finite, got {a}")));
        }
        let mut values = Vec::with_capacity(grid.len());
        let mut included = Vec::with_capacity(grid.len());
        for p in grid.points() {
            let r = p.iter().map(|&v| v * v).fold(T::zero(), |s, v| s + v).sqrt();
            let w = r.powf(a);
            let ok = w > T::zero() && w.is_finite();
            values.push(if ok { w } else { T::one() });
            included.push(ok);
        }
        if !included.iter().any(|&b| b) {
            return Err(Error::Domain("power weight excludes every grid point".into()));
        }
        Ok(Self { grid, name: format!("|x|^{a}"), values, included })
    }

    pub fn from_spec(spec: &WeightSpec, grid: UniformGrid<T>) -> Result<Self> {
        match spec {
            WeightSpec::Unit => Ok(Self::unit(grid)),
            WeightSpec::Power { a } => Self::power(grid, T::lit(*a)),
            WeightSpec::Table { values } => Self::from_values(grid, "table", values.iter().map(|&v| T::lit(v)).collect()),
        }
    }

    /// `c·w` for `c > 0`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        if !(c > T::zero() && c.is_finite()) {
            return Err(Error::Domain(format!("weight scale must be positive, got {c}")));
        }
        Ok(Self { values: self.values.iter().map(|&v| v * c).collect(), ..self.clone() })
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Weight at each grid point; excluded points hold a placeholder 1.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_included(&self, i: usize) -> bool {
        self.included[i]
    }

    pub fn excluded_count(&self) -> usize {
        self.included.iter().filter(|&&b| !b).count()
    }

    fn masked(&self, f: impl Fn(T) -> T) -> Vec<T> {
        self.values.iter().zip(&self.included).map(|(&v, &ok)| if ok { f(v) } else { T::zero() }).collect()
    }
}

/// `[w]_{A_p} = max_Q (avg_Q w)(avg_Q w^{−1/(p−1)})^{p−1}` over the family.
pub fn ap_characteristic<T: Real>(w: &Weight<T>, p: T, cubes: &CubeFamily<T>) -> Result<T> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(Error::Domain(format!("A_p characteristic needs p > 1, got {p}")));
    }
    if w.grid() != cubes.grid() {
        return Err(Error::InvalidArgument("weight and cube family live on different grids".into()));
    }
    let (n, size) = (w.grid.n(), w.grid.axis_size());
    let q = -T::one() / (p - T::one());
    let count = SummedArea::new(n, size, &w.masked(|_| T::one()))?;
    let direct = SummedArea::new(n, size, &w.masked(|v| v))?;
    let dual = SummedArea::new(n, size, &w.masked(|v| v.powf(q)))?;
    let mut best: Option<T> = None;
    for c in cubes.cubes() {
        let m = count.box_sum(c);
        if m < T::lit(0.5) {
            continue;
        }
        let val = direct.box_sum(c) / m * (dual.box_sum(c) / m).powf(p - T::one());
        if best.map_or(true, |b| val > b) {
            best = Some(val);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no cube contains an included grid point".into()))
}

/// `(Σ |f|^p w hⁿ)^{1/p}` over the included grid points.
pub fn weighted_lp_norm<T: Real>(f: &GridFunction<T>, w: &Weight<T>, p: T) -> Result<T> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::Domain(format!("L^p norm needs 1 ≤ p < ∞, got {p}")));
    }
    match f.grid() {
        Grid::Uniform(g) if g == w.grid() => {}
        _ => return Err(Error::InvalidArgument("function and weight live on different grids".into())),
    }
    let sum = f
        .values()
        .iter()
        .zip(w.masked(|v| v))
        .map(|(v, wv)| v.norm().powf(p) * wv)
        .fold(T::zero(), |a, b| a + b);
    Ok((sum * w.grid().cell_volume()).powf(p.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cx;
    use proptest::prelude::*;

    fn a2(a: f64, depth: u32) -> f64 {
        let fam = CubeFamily::new(1, 8.0, depth).unwrap();
        let w = Weight::power(fam.grid().clone(), a).unwrap();
        ap_characteristic(&w, 2.0, &fam).unwrap()
    }

    /// Brute-force scan over every index interval, no summed areas.
    fn a2_all_intervals(a: f64, depth: u32) -> f64 {
        let g = UniformGrid::new(1, 8.0, 1 << depth).unwrap();
        let w: Vec<f64> = g.axis_nodes().iter().map(|x: &f64| x.abs().powf(a)).collect();
        let mut best = 0.0f64;
        for lo in 0..w.len() {
            for hi in lo + 1..=w.len() {
                let m = (hi - lo) as f64;
                let s: f64 = w[lo..hi].iter().sum();
                let d: f64 = w[lo..hi].iter().map(|v| 1.0 / v).sum();
                best = best.max(s * d / (m * m));
            }
        }
        best
    }

    #[test]
    fn unit_weight_is_exactly_one() {
        let fam = CubeFamily::new(2, 3.0, 4).unwrap();
        let w = Weight::unit(fam.grid().clone());
        assert_eq!(ap_characteristic(&w, 2.0, &fam).unwrap(), 1.0);
        assert_eq!(ap_characteristic(&w, 3.5, &fam).unwrap(), 1.0);
        assert!(ap_characteristic(&w, 1.0, &fam).is_err());
    }

    #[test]
    fn power_weights_in_and_out_of_a2() {
        let (lo, hi) = (a2(0.5, 4), a2(0.5, 8));
        assert!(hi / lo <= 1.2, "{lo} {hi}");
        let (lo, hi) = (a2(1.5, 4), a2(1.5, 8));
        assert!(hi / lo > 2.0, "{lo} {hi}");
        // the family can only see fewer intervals than a full scan
        for (a, d) in [(0.5, 6), (1.5, 6)] {
            let full = a2_all_intervals(a, d);
            let fam = a2(a, d);
            assert!(fam <= full + 1e-12 && fam >= 0.6 * full, "{a}: {fam} vs {full}");
        }
    }

    #[test]
    fn origin_excluded_on_odd_grid() {
        let g = UniformGrid::new(1, 2.0, 5).unwrap();
        let w = Weight::power(g.clone(), -0.5).unwrap();
        assert_eq!(w.excluded_count(), 1);
        assert!(!w.is_included(2));
        let f = GridFunction::sample(g, |_| Cx::new(1.0, 0.0));
        let expect = (2.0 * (1.0 + 2f64.powf(-0.5)) * 1.0f64).powf(0.5);
        assert!((weighted_lp_norm(&f, &w, 2.0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn unit_weight_norm_and_gaussian() {
        let g = UniformGrid::new(1, 10.0, 2001).unwrap();
        let w = Weight::unit(g.clone());
        let f = GridFunction::sample(g, |x: &[f64]| Cx::new((-x[0] * x[0]).exp(), 0.0));
        // Σ|f|²h equals the trapezoid rule here since f vanishes at the ends
        assert!((weighted_lp_norm(&f, &w, 2.0).unwrap() - f.l2_norm()).abs() < 1e-12);
        // ∫ e^{−4x²} = √(π/4)
        let l4 = weighted_lp_norm(&f, &w, 4.0).unwrap();
        assert!((l4 - (std::f64::consts::PI / 4.0).sqrt().powf(0.25)).abs() < 1e-12);
        let f3 = f.map(|_, v| v * 3.0);
        assert!((weighted_lp_norm(&f3, &w, 4.0).unwrap() - 3.0 * l4).abs() < 1e-12);
    }

    #[test]
    fn spec_round_trip() {
        let g = UniformGrid::new(1, 1.0, 4).unwrap();
        for s in [
            WeightSpec::Unit,
            WeightSpec::Power { a: 0.5 },
            WeightSpec::Table { values: vec![1.0, 2.0, 3.0, 4.0] },
        ] {
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<WeightSpec>(&json).unwrap(), s);
            Weight::<f64>::from_spec(&s, g.clone()).unwrap();
        }
        let bad = WeightSpec::Table { values: vec![1.0, 0.0, 1.0, 1.0] };
        assert!(Weight::<f64>::from_spec(&bad, g).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn scale_invariance(c in 1e-3f64..1e3, a in -0.9f64..2.0, p in 1.2f64..4.0) {
            let fam = CubeFamily::new(1, 4.0, 5).unwrap();
            let w = Weight::power(fam.grid().clone(), a).unwrap();
            let base = ap_characteristic(&w, p, &fam).unwrap();
            let scaled = ap_characteristic(&w.scaled(c).unwrap(), p, &fam).unwrap();
            prop_assert!((scaled / base - 1.0).abs() < 1e-12);
            prop_assert!(base >= 1.0 - 1e-12);
        }
    }
}
