//! Weyl transforms of phase-space symbols in one dimension.
//!
//! `π(u+iv)φ(ξ) = e^{i(uξ + uv/2)} φ(ξ+v)`, and the transform of `a(x, w)` is
//! `Tf(ξ) = ∫ a(ξ, w) π(w)f(ξ) dw`. Matrix entries are computed by a
//! trapezoid rule over `(u, v) ∈ [−R, R]²` and a trapezoid rule in `ξ`.

mod checks;

pub use checks::{
    adjoint_check, laguerre_coeff_roundtrip, special_hermite_projection, t_equivalence, weyl_norm_bound,
    AdjointReport, EquivalenceReport, NormBound, ProjectionReport, RoundTrip,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{hermite_all, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::opcalc::OperatorMatrix;
use crate::scalar::{cis, cx, Cx, Real};
use crate::spectral::{analyze, synthesize_at, SpectralField};

/// `w = u + iv ∈ ℂ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint<T> {
    pub u: T,
    pub v: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(u: T, v: T) -> Result<Self> {
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::Domain("phase point must be finite".into()));
        }
        Ok(Self { u, v })
    }

    pub fn abs(&self) -> T {
        self.u.hypot(self.v)
    }

    pub fn neg(&self) -> Self {
        Self { u: -self.u, v: -self.v }
    }

    /// Phase `e^{i(uξ + uv/2)}` of the action at `ξ`.
    fn phase(&self, xi: T) -> Cx<T> {
        cis(self.u * xi + self.u * self.v / T::lit(2.0))
    }
}

/// `L_k^α(s)` by the three-term recurrence.
pub fn laguerre<T: Real>(k: usize, alpha: T, s: T) -> T {
    let mut prev = T::one();
    if k == 0 {
        return prev;
    }
    let mut cur = T::one() + alpha - s;
    for j in 1..k {
        let jt = T::of_usize(j);
        let next = ((T::lit(2.0) * jt + T::one() + alpha - s) * cur - (jt + alpha) * prev) / (jt + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_k^{n−1}(|w|²/2) e^{−|w|²/4}` as a function of `|w|²`.
pub fn laguerre_function<T: Real>(k: usize, n: usize, abs_sq: T) -> T {
    laguerre(k, T::of_usize(n) - T::one(), abs_sq / T::lit(2.0)) * (-abs_sq / T::lit(4.0)).exp()
}

/// One-dimensional case, `n = 1`.
pub fn laguerre_phi<T: Real>(k: usize, w: PhasePoint<T>) -> T {
    laguerre_function(k, 1, w.u * w.u + w.v * w.v)
}

/// All of `φ_0 … φ_kmax` at one `|w|²`.
pub fn laguerre_phi_all<T: Real>(kmax: usize, abs_sq: T) -> Vec<T> {
    let s = abs_sq / T::lit(2.0);
    let g = (-abs_sq / T::lit(4.0)).exp();
    let mut out = Vec::with_capacity(kmax + 1);
    let (mut prev, mut cur) = (T::zero(), T::one());
    for j in 0..=kmax {
        out.push(cur * g);
        let jt = T::of_usize(j);
        let next = ((T::lit(2.0) * jt + T::one() - s) * cur - jt * prev) / (jt + T::one());
        prev = cur;
        cur = next;
    }
    out
}

/// `π(w)f` with `f` given pointwise.
pub fn weyl_apply<T: Real>(w: PhasePoint<T>, f: impl Fn(T) -> Cx<T>) -> impl Fn(T) -> Cx<T> {
    move |xi| w.phase(xi) * f(xi + w.v)
}

#[derive(Clone, Debug)]
pub struct WeylAction<T> {
    pub values: GridFunction<T>,
    /// `|‖π(w)f‖ − ‖f‖| / ‖f‖` on the grid.
    pub norm_loss: T,
    /// The shifted function is not captured by the grid to 1e−8.
    pub unresolved: bool,
}

/// `π(w)f` on the grid of `f`, which must be a one-dimensional Gauss–Hermite
/// grid; `f(ξ+v)` comes from the Hermite expansion of `f` up to `kmax`.
pub fn weyl_action<T: Real>(w: PhasePoint<T>, f: &GridFunction<T>, kmax: usize) -> Result<WeylAction<T>> {
    if f.grid().n() != 1 {
        return Err(Error::UnsupportedDimension(f.grid().n()));
    }
    let c = analyze(f, kmax)?;
    weyl_action_spectral(w, &c, f.grid().clone())
}

/// `π(w)f` for `f = Σ c_k Φ_k`, sampled on `grid`.
pub fn weyl_action_spectral<T: Real>(w: PhasePoint<T>, c: &SpectralField<T>, grid: Grid<T>) -> Result<WeylAction<T>> {
    if c.n() != 1 || grid.n() != 1 {
        return Err(Error::UnsupportedDimension(c.n().max(grid.n())));
    }
    let xs: Vec<T> = grid.points().into_iter().map(|p| p[0]).collect();
    let shifted: Vec<Vec<T>> = xs.iter().map(|&x| vec![x + w.v]).collect();
    let vals = synthesize_at(c, &shifted)?;
    let out: Vec<Cx<T>> = xs.iter().zip(vals).map(|(&x, v)| w.phase(x) * v).collect();
    let values = GridFunction::new(grid, out)?;
    let norm = c.norm();
    let norm_loss = if norm > T::zero() { (values.l2_norm() - norm).abs() / norm } else { T::zero() };
    Ok(WeylAction { unresolved: norm_loss > T::lit(1e-8), values, norm_loss })
}

/// Phase-space quadrature: trapezoid with `points` nodes per axis on `[−R, R]²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylQuadrature {
    pub radius: f64,
    pub points: usize,
}

impl Default for WeylQuadrature {
    fn default() -> Self {
        Self { radius: 10.0, points: 128 }
    }
}

impl WeylQuadrature {
    pub fn new(radius: f64, points: usize) -> Result<Self> {
        let q = Self { radius, points };
        q.validate()?;
        Ok(q)
    }

    /// Large enough for Laguerre functions up to `kmax`: the radius clears
    /// the turning point `|w|² = 8k + 4` and the spacing resolves the
    /// product of two of them.
    pub fn for_laguerre(kmax: usize) -> Self {
        let tp = (8.0 * kmax as f64 + 4.0).sqrt();
        let radius = (tp + 8.0).max(10.0);
        let h = std::f64::consts::PI / (2.0 * (4.0 * kmax as f64 + 2.0).sqrt() + 6.0);
        let points = ((2.0 * radius / h).ceil() as usize + 1).max(128);
        Self { radius, points }
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius >= 8.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("phase-space radius must be ≥ 8, got {}", self.radius)));
        }
        if self.points < 64 {
            return Err(Error::InvalidArgument(format!("need ≥ 64 quadrature points per axis, got {}", self.points)));
        }
        Ok(())
    }

    pub(crate) fn nodes<T: Real>(&self) -> (Vec<T>, Vec<T>) {
        let r = T::lit(self.radius);
        let h = T::lit(2.0) * r / T::of_usize(self.points - 1);
        let nodes = (0..self.points).map(|i| -r + h * T::of_usize(i)).collect();
        let weights = (0..self.points)
            .map(|i| if i == 0 || i + 1 == self.points { h / T::lit(2.0) } else { h })
            .collect();
        (nodes, weights)
    }
}

/// Matrix of a Weyl transform with the size of the truncated integrand on
/// the boundary of the phase-space square.
#[derive(Clone, Debug)]
pub struct WeylMatrix<T> {
    pub matrix: OperatorMatrix<T>,
    /// Largest entry of the `(u, v)` integrand on the boundary nodes.
    pub boundary: T,
}

impl<T: Real> WeylMatrix<T> {
    pub fn truncated(&self) -> bool {
        self.boundary > T::lit(1e-12)
    }
}

/// `⟨TΦ_ν, Φ_μ⟩` for `μ, ν ≤ kmax`, where `T = ∫ a(ξ, u, v) π(u+iv) du dv`.
///
/// With `ξ = s − v/2` the phase collapses to `e^{ius}`, so the entry is
/// `∫dv ∫ds Φ_μ(s − v/2) Φ_ν(s + v/2) ∫du a(s − v/2, u, v) e^{ius}`.
pub fn weyl_transform_matrix<T: Real>(
    a: &(dyn Fn(T, T, T) -> Cx<T> + Sync),
    kmax: usize,
    quad: &WeylQuadrature,
) -> Result<WeylMatrix<T>> {
    quad.validate()?;
    let (us, wu) = quad.nodes::<T>();
    let r = T::lit(quad.radius);
    let tp = T::of_usize(2 * kmax + 1).sqrt();
    let half = r / T::lit(2.0) + tp + T::lit(8.0);
    let h_target = T::PI() / (T::lit(2.0) * (r + T::lit(2.0) * tp + T::lit(4.0)));
    let ns = (T::lit(2.0) * half / h_target).ceil().to_usize().unwrap_or(2) + 1;
    let hs = T::lit(2.0) * half / T::of_usize(ns - 1);
    let ss: Vec<T> = (0..ns).map(|i| -half + hs * T::of_usize(i)).collect();
    let phases: Vec<Vec<Cx<T>>> = us.iter().map(|&u| ss.iter().map(|&s| cis(u * s)).collect()).collect();
    let d = kmax + 1;
    let last = quad.points - 1;

    let partial = (0..quad.points)
        .into_par_iter()
        .map(|iv| -> Result<(Vec<Cx<T>>, T)> {
            let v = us[iv];
            let mut acc = vec![cx(T::zero(), T::zero()); d * d];
            let mut boundary = T::zero();
            let tab_a: Vec<Vec<T>> = ss.iter().map(|&s| hermite_all(kmax, s - v / T::lit(2.0))).collect::<Result<_>>()?;
            let tab_b: Vec<Vec<T>> = ss.iter().map(|&s| hermite_all(kmax, s + v / T::lit(2.0))).collect::<Result<_>>()?;
            let edge_row = iv == 0 || iv == last;
            // a(s − v/2, u, v) for every (u, s) of this v
            let vals: Vec<Vec<Cx<T>>> =
                us.iter().map(|&u| ss.iter().map(|&s| a(s - v / T::lit(2.0), u, v)).collect()).collect();
            let mut g = vec![cx(T::zero(), T::zero()); ns];
            for (ju, row) in vals.iter().enumerate() {
                for (i, gi) in g.iter_mut().enumerate() {
                    *gi += row[i] * phases[ju][i] * wu[ju];
                }
                if edge_row || ju == 0 || ju == last {
                    let mut m = vec![cx(T::zero(), T::zero()); d * d];
                    for i in 0..ns {
                        let t = row[i] * phases[ju][i] * hs;
                        accumulate(&mut m, t, &tab_a[i], &tab_b[i]);
                    }
                    boundary = m.iter().map(|z| z.norm()).fold(boundary, T::max);
                }
            }
            for i in 0..ns {
                accumulate(&mut acc, g[i] * hs * wu[iv], &tab_a[i], &tab_b[i]);
            }
            Ok((acc, boundary))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut data = vec![cx(T::zero(), T::zero()); d * d];
    let mut boundary = T::zero();
    for (m, b) in partial {
        data.iter_mut().zip(m).for_each(|(x, y)| *x += y);
        boundary = boundary.max(b);
    }
    Ok(WeylMatrix { matrix: OperatorMatrix::from_data(1, kmax, data)?, boundary })
}

fn accumulate<T: Real>(m: &mut [Cx<T>], t: Cx<T>, rows: &[T], cols: &[T]) {
    let d = rows.len();
    for (mu, &pa) in rows.iter().enumerate() {
        let tp = t * pa;
        for (slot, &pb) in m[mu * d..(mu + 1) * d].iter_mut().zip(cols) {
            *slot += tp * pb;
        }
    }
}
