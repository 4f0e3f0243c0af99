//! Sampled kernels `M(x,y) = Σ M_{μν} Φ_μ(x) Φ_ν(y)` of truncated operators,
//! their Littlewood–Paley pieces `M_j = M S_j`, moment integrals, decay fits
//! and the smoothness sweep.

mod decay;
mod hormander;

pub use decay::{decay_fit, decay_sweep, predicted_slope, DecayOptions, DecaySeries, Estimate};
pub use hormander::{hormander_check, kernel_at, sample_triples, HormanderRow, Triple};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{HermiteTable, ShellBasis, UniformGrid};
use crate::error::{Error, Result};
use crate::opcalc::OperatorMatrix;
use crate::scalar::{cx, Cx, Real};
use crate::spectral::{t_j, DiagonalMultiplier};

/// Which variable a gradient acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

/// Default half-width `√(2(2K+n)) + 4` of the kernel grid.
pub fn default_half_width<T: Real>(n: usize, kmax: usize) -> T {
    T::of_usize(2 * (2 * kmax + n)).sqrt() + T::lit(4.0)
}

/// Largest spacing that resolves shells up to `kmax`.
pub fn spacing_limit<T: Real>(n: usize, kmax: usize) -> T {
    T::PI() / T::of_usize(2 * (2 * kmax + n)).sqrt()
}

/// Smallest uniform grid with the default half-width and a resolving spacing.
pub fn default_kernel_grid<T: Real>(n: usize, kmax: usize) -> Result<UniformGrid<T>> {
    let l = default_half_width::<T>(n, kmax);
    let h = spacing_limit::<T>(n, kmax);
    let points = ((T::lit(2.0) * l / h).ceil().as_f64() as usize) + 1;
    UniformGrid::new(n, l, points)
}

/// Column coefficients `c_ν(x) = Σ_μ M_{μν} Φ_μ(x)`; diagonal matrices skip
/// the dense product.
#[derive(Clone, Debug)]
enum Coeffs<T> {
    Diagonal(Vec<Cx<T>>),
    Dense(Vec<Cx<T>>, usize),
}

/// The operator restricted to the shells that carry mass, ready for
/// pointwise kernel evaluation.
#[derive(Clone, Debug)]
pub(crate) struct KernelCoeffs<T> {
    n: usize,
    band: usize,
    basis: std::sync::Arc<ShellBasis>,
    coeffs: Coeffs<T>,
    top_mass: T,
}

/// Highest shell, in rows or columns, holding an entry above `1e-17` of the
/// largest.
pub(crate) fn effective_band<T: Real>(m: &OperatorMatrix<T>) -> usize {
    let scale = m.max_abs();
    let basis = m.basis();
    let mut band = 0;
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            if m.get(r, c).norm() > scale * T::lit(1e-17) {
                band = band.max(basis.degree(r)).max(basis.degree(c));
            }
        }
    }
    band
}

fn is_diagonal<T: Real>(m: &OperatorMatrix<T>) -> bool {
    (0..m.dim()).all(|r| (0..m.dim()).all(|c| r == c || m.get(r, c) == cx(T::zero(), T::zero())))
}

impl<T: Real> KernelCoeffs<T> {
    pub(crate) fn new(m: &OperatorMatrix<T>) -> Result<Self> {
        let n = m.n();
        let band = effective_band(m);
        let basis = ShellBasis::shared(n, band)?;
        let full = m.basis();
        let d = basis.len();
        let coeffs = if is_diagonal(m) {
            Coeffs::Diagonal((0..d).map(|i| m.get(i, i)).collect())
        } else {
            // shell ordering makes the band a leading block
            let mut data = Vec::with_capacity(d * d);
            for r in 0..d {
                for c in 0..d {
                    data.push(m.get(r, c));
                }
            }
            Coeffs::Dense(data, d)
        };
        let scale = m.max_abs();
        let top_mass = if scale == T::zero() {
            T::zero()
        } else {
            full.shell_range(full.kmax())
                .flat_map(|c| (0..m.dim()).flat_map(move |r| [(r, c), (c, r)]))
                .map(|(r, c)| m.get(r, c).norm())
                .fold(T::zero(), T::max)
                / scale
        };
        Ok(Self { n, band, basis, coeffs, top_mass })
    }

    pub(crate) fn phi_at(&self, x: &[T], derivative_axis: Option<usize>) -> Result<Vec<T>> {
        let tables: Vec<Vec<T>> = x.iter().map(|&t| crate::basis::hermite_all(self.band, t)).collect::<Result<_>>()?;
        let deriv = match derivative_axis {
            Some(a) => Some(crate::basis::hermite_derivative_all(self.band, x[a])?),
            None => None,
        };
        Ok(self
            .basis
            .indices()
            .iter()
            .map(|mu| {
                (0..self.n).fold(T::one(), |acc, j| {
                    let v = match (&deriv, derivative_axis) {
                        (Some(d), Some(a)) if a == j => d[mu.get(j)],
                        _ => tables[j][mu.get(j)],
                    };
                    acc * v
                })
            })
            .collect())
    }

    /// `c_ν = Σ_μ M_{μν} φ_μ`.
    pub(crate) fn column_coeffs(&self, phi: &[T]) -> Vec<Cx<T>> {
        match &self.coeffs {
            Coeffs::Diagonal(d) => d.iter().zip(phi).map(|(c, &p)| *c * p).collect(),
            Coeffs::Dense(data, d) => {
                let mut out = vec![cx(T::zero(), T::zero()); *d];
                for (r, &p) in phi.iter().enumerate() {
                    if p == T::zero() {
                        continue;
                    }
                    for (o, v) in out.iter_mut().zip(&data[r * d..(r + 1) * d]) {
                        *o += *v * p;
                    }
                }
                out
            }
        }
    }

    /// `M(x, y)` at a single pair of points.
    pub(crate) fn value(&self, x: &[T], y: &[T]) -> Result<Cx<T>> {
        for p in [x, y] {
            if p.len() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: p.len() });
            }
        }
        let c = self.column_coeffs(&self.phi_at(x, None)?);
        let py = self.phi_at(y, None)?;
        Ok(c.iter().zip(&py).fold(cx(T::zero(), T::zero()), |a, (v, &p)| a + *v * p))
    }

    pub(crate) fn band(&self) -> usize {
        self.band
    }
}

/// Evaluates rows `y ↦ M(x, y)` on a fixed y-grid.
#[derive(Clone, Debug)]
pub struct KernelSampler<T> {
    coeffs: KernelCoeffs<T>,
    y: UniformGrid<T>,
    y_nodes: Vec<T>,
    y_table: HermiteTable<T>,
    y_deriv: Option<HermiteTable<T>>,
}

impl<T: Real> KernelSampler<T> {
    /// Fails with an aliasing error when the y-spacing cannot resolve the
    /// highest shell that carries mass.
    pub fn new(m: &OperatorMatrix<T>, y: UniformGrid<T>, y_derivative: bool) -> Result<Self> {
        let n = m.n();
        if y.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.n() });
        }
        let coeffs = KernelCoeffs::new(m)?;
        let limit = spacing_limit::<T>(n, coeffs.band);
        if y.spacing() > limit {
            return Err(Error::Aliasing { spacing: y.spacing().as_f64(), limit: limit.as_f64() });
        }
        let y_nodes = y.axis_nodes();
        let y_table = HermiteTable::new(coeffs.band, &y_nodes)?;
        let y_deriv = if y_derivative { Some(HermiteTable::derivatives(coeffs.band, &y_nodes)?) } else { None };
        Ok(Self { coeffs, y, y_nodes, y_table, y_deriv })
    }

    pub fn n(&self) -> usize {
        self.coeffs.n
    }

    /// Highest shell retained.
    pub fn band(&self) -> usize {
        self.coeffs.band
    }

    pub fn y_grid(&self) -> &UniformGrid<T> {
        &self.y
    }

    /// Largest top-shell entry of the source matrix relative to its largest
    /// entry; nonzero means a ladder step would leave the truncation.
    pub fn top_shell_mass(&self) -> T {
        self.coeffs.top_mass
    }

    fn synthesize_rows(&self, cs: &[Vec<Cx<T>>], y_axis: Option<usize>) -> Vec<Vec<Cx<T>>> {
        let table_for = |axis: usize| -> &HermiteTable<T> {
            match (y_axis, &self.y_deriv) {
                (Some(a), Some(d)) if a == axis => d,
                _ => &self.y_table,
            }
        };
        if self.coeffs.n == 1 {
            // one pass over the table serves the whole block of rows
            let t = table_for(0);
            let split: Vec<(Vec<T>, Vec<T>)> =
                cs.iter().map(|c| (c.iter().map(|v| v.re).collect(), c.iter().map(|v| v.im).collect())).collect();
            let mut out = vec![Vec::with_capacity(self.y_nodes.len()); cs.len()];
            for i in 0..self.y_nodes.len() {
                let row = t.row(i);
                for ((re, im), o) in split.iter().zip(out.iter_mut()) {
                    let (a, b) = dot2(&row[..re.len()], re, im);
                    o.push(cx(a, b));
                }
            }
            return out;
        }
        cs.iter()
            .map(|c| {
                (0..self.y.len())
                    .map(|i| {
                        let multi = self.y.multi(i);
                        let mut acc = cx(T::zero(), T::zero());
                        for (nu, cv) in self.coeffs.basis.indices().iter().zip(c) {
                            let p = (0..self.coeffs.n).fold(T::one(), |a, j| a * table_for(j).get(multi[j], nu.get(j)));
                            acc += *cv * p;
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    fn synthesize_row(&self, c: &[Cx<T>], y_axis: Option<usize>) -> Vec<Cx<T>> {
        self.synthesize_rows(&[c.to_vec()], y_axis).remove(0)
    }

    /// Rows for a block of x-points; cheaper than one [`row`](Self::row) call
    /// per point because the y-table is streamed once per block.
    pub fn rows(&self, xs: &[Vec<T>]) -> Result<Vec<Vec<Cx<T>>>> {
        let cs = xs
            .iter()
            .map(|x| {
                self.check_point(x)?;
                Ok(self.coeffs.column_coeffs(&self.coeffs.phi_at(x, None)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.synthesize_rows(&cs, None))
    }

    /// `y ↦ M(x, y)` on the y-grid.
    pub fn row(&self, x: &[T]) -> Result<Vec<Cx<T>>> {
        self.check_point(x)?;
        Ok(self.synthesize_row(&self.coeffs.column_coeffs(&self.coeffs.phi_at(x, None)?), None))
    }

    /// `y ↦ ∂_{x_i} M(x, y)` or `∂_{y_i} M(x, y)`, through the ladder form of
    /// the Hermite derivative.
    pub fn grad_row(&self, x: &[T], axis: usize, side: Side) -> Result<Vec<Cx<T>>> {
        self.check_point(x)?;
        if axis >= self.coeffs.n {
            return Err(Error::InvalidArgument(format!("axis {axis} out of range for dimension {}", self.coeffs.n)));
        }
        match side {
            Side::X => Ok(self.synthesize_row(&self.coeffs.column_coeffs(&self.coeffs.phi_at(x, Some(axis))?), None)),
            Side::Y => {
                if self.y_deriv.is_none() {
                    return Err(Error::InvalidArgument("sampler was built without y-derivative tables".into()));
                }
                Ok(self.synthesize_row(&self.coeffs.column_coeffs(&self.coeffs.phi_at(x, None)?), Some(axis)))
            }
        }
    }

    fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.coeffs.n {
            return Err(Error::DimensionMismatch { expected: self.coeffs.n, got: x.len() });
        }
        Ok(())
    }

    /// `|x−y|²` for every y-grid point.
    pub fn squared_distances(&self, x: &[T]) -> Vec<T> {
        squared_distances(x, &self.y, &self.y_nodes)
    }

    /// `Σ_y w_y |x−y|^{2l} |row(y)|²`.
    pub fn row_moment_l2(&self, x: &[T], row: &[Cx<T>], l: u32) -> T {
        moment_l2_of(&self.squared_distances(x), row, l, self.y.cell_volume())
    }

    /// `max_y |x−y|^l |row(y)|`.
    pub fn row_moment_sup(&self, x: &[T], row: &[Cx<T>], l: u32) -> T {
        moment_sup_of(&self.squared_distances(x), row, l)
    }
}

/// `(a·b, a·c)` with independent partial sums, so the loop pipelines.
fn dot2<T: Real>(a: &[T], b: &[T], c: &[T]) -> (T, T) {
    const W: usize = 4;
    let mut p = [T::zero(); W];
    let mut q = [T::zero(); W];
    let split = a.len() - a.len() % W;
    for ((x, y), z) in a[..split].chunks_exact(W).zip(b[..split].chunks_exact(W)).zip(c[..split].chunks_exact(W)) {
        for i in 0..W {
            p[i] += x[i] * y[i];
            q[i] += x[i] * z[i];
        }
    }
    let mut s = p.iter().fold(T::zero(), |u, &v| u + v);
    let mut t = q.iter().fold(T::zero(), |u, &v| u + v);
    for i in split..a.len() {
        s += a[i] * b[i];
        t += a[i] * c[i];
    }
    (s, t)
}

fn squared_distances<T: Real>(x: &[T], y: &UniformGrid<T>, nodes: &[T]) -> Vec<T> {
    let p = y.axis_size();
    let n = y.n();
    (0..y.len())
        .map(|i| {
            let mut rem = i;
            let mut d2 = T::zero();
            for a in (0..n).rev() {
                let d = nodes[rem % p] - x[a];
                d2 += d * d;
                rem /= p;
            }
            d2
        })
        .collect()
}

fn dist_pow<T: Real>(d2: T, p: u32) -> T {
    match p {
        0 => T::one(),
        p if p % 2 == 0 => d2.powi((p / 2) as i32),
        p => d2.sqrt().powi(p as i32),
    }
}

pub(crate) fn moment_l2_of<T: Real>(d2: &[T], row: &[Cx<T>], l: u32, w: T) -> T {
    d2.iter().zip(row).map(|(&d, v)| dist_pow(d, 2 * l) * v.norm_sqr()).fold(T::zero(), |a, b| a + b) * w
}

pub(crate) fn moment_sup_of<T: Real>(d2: &[T], row: &[Cx<T>], l: u32) -> T {
    d2.iter().zip(row).map(|(&d, v)| dist_pow(d, l) * v.norm()).fold(T::zero(), T::max)
}

/// A kernel sampled on `xs × y-grid`, row-major in x.
#[derive(Clone, Debug)]
pub struct KernelGrid<T> {
    xs: Vec<Vec<T>>,
    y: UniformGrid<T>,
    values: Vec<Cx<T>>,
    band: usize,
    top_shell_mass: T,
}

impl<T: Real> KernelGrid<T> {
    pub fn xs(&self) -> &[Vec<T>] {
        &self.xs
    }

    pub fn y_grid(&self) -> &UniformGrid<T> {
        &self.y
    }

    pub fn values(&self) -> &[Cx<T>] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[Cx<T>] {
        let p = self.y.len();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn value(&self, ix: usize, iy: usize) -> Cx<T> {
        self.values[ix * self.y.len() + iy]
    }

    /// Highest shell that carried mass in the source operator.
    pub fn band(&self) -> usize {
        self.band
    }

    /// Relative size of the source operator's top-shell entries; gradients
    /// of a kernel with a nonzero value here reach past the truncation.
    pub fn top_shell_mass(&self) -> T {
        self.top_shell_mass
    }

    /// `∫|x−y|^{2l}|K(x,y)|² dy` at the `i`-th x-point.
    pub fn moment_l2(&self, l: u32, i: usize) -> T {
        let d2 = squared_distances(&self.xs[i], &self.y, &self.y.axis_nodes());
        moment_l2_of(&d2, self.row(i), l, self.y.cell_volume())
    }

    /// Largest [`moment_l2`](Self::moment_l2) over the x-points and its index.
    pub fn moment_l2_sup(&self, l: u32) -> (T, usize) {
        (0..self.xs.len())
            .map(|i| (self.moment_l2(l, i), i))
            .fold((T::zero(), 0), |a, b| if b.0 > a.0 { b } else { a })
    }

    /// `max_{x,y} |x−y|^l |K(x,y)|` over the grid.
    pub fn moment_sup(&self, l: u32) -> T {
        let nodes = self.y.axis_nodes();
        (0..self.xs.len())
            .map(|i| moment_sup_of(&squared_distances(&self.xs[i], &self.y, &nodes), self.row(i), l))
            .fold(T::zero(), T::max)
    }
}

/// Samples `M(x,y)` for `x ∈ xs` and `y` on the uniform grid.
pub fn kernel_from_matrix<T: Real>(m: &OperatorMatrix<T>, xs: &[Vec<T>], y: &UniformGrid<T>) -> Result<KernelGrid<T>> {
    let s = KernelSampler::new(m, y.clone(), false)?;
    collect_rows(&s, xs, |x| s.row(x))
}

fn collect_rows<T: Real>(
    s: &KernelSampler<T>,
    xs: &[Vec<T>],
    f: impl Fn(&[T]) -> Result<Vec<Cx<T>>> + Sync,
) -> Result<KernelGrid<T>> {
    let rows: Vec<Vec<Cx<T>>> = xs.par_iter().map(|x| f(x)).collect::<Result<_>>()?;
    Ok(KernelGrid {
        xs: xs.to_vec(),
        y: s.y.clone(),
        values: rows.into_iter().flatten().collect(),
        band: s.band(),
        top_shell_mass: s.top_shell_mass(),
    })
}

/// `M S_j` as a matrix.
pub fn mj_matrix<T: Real>(m: &OperatorMatrix<T>, j: u32) -> Result<OperatorMatrix<T>> {
    m.mul_diagonal_right(&DiagonalMultiplier::sj_multiplier(m.n(), m.kmax(), j)?)
}

/// Kernel of `M_j = M S_j`.
pub fn mj_kernel<T: Real>(m: &OperatorMatrix<T>, j: u32, xs: &[Vec<T>], y: &UniformGrid<T>) -> Result<KernelGrid<T>> {
    kernel_from_matrix(&mj_matrix(m, j)?, xs, y)
}

/// Kernels of `∂_{x_i} M_j` (or `∂_{y_i} M_j`), one per axis.
///
/// Check [`KernelGrid::top_shell_mass`] before trusting these: the
/// derivative raises the top shell out of the truncated space.
pub fn grad_kernels<T: Real>(
    m: &OperatorMatrix<T>,
    j: u32,
    side: Side,
    xs: &[Vec<T>],
    y: &UniformGrid<T>,
) -> Result<Vec<KernelGrid<T>>> {
    let mj = mj_matrix(m, j)?;
    let s = KernelSampler::new(&mj, y.clone(), side == Side::Y)?;
    (0..m.n()).map(|axis| collect_rows(&s, xs, |x| s.grad_row(x, axis, side))).collect()
}

/// `sup_ℓ Σ_{j≥0} min{ℓ^{1/2} t_{j+1}^{−1/4}, t_{j+1}^{1/4} ℓ^{−1/2}}` over a
/// log-spaced sample of `[ell_min, ell_max]`; returns the sup and where.
pub fn min_summability(ell_min: f64, ell_max: f64, samples: usize) -> Result<(f64, f64)> {
    if !(ell_min > 0.0 && ell_max >= ell_min) || samples < 2 {
        return Err(Error::InvalidArgument("need 0 < ell_min ≤ ell_max and two samples".into()));
    }
    let term = |ell: f64, j: u32| {
        let q = t_j::<f64>(j + 1).powf(0.25);
        (ell.sqrt() / q).min(q / ell.sqrt())
    };
    let (lo, hi) = (ell_min.ln(), ell_max.ln());
    let mut best = (0.0, ell_min);
    for s in 0..samples {
        let ell = (lo + (hi - lo) * s as f64 / (samples - 1) as f64).exp();
        let mut sum = 0.0;
        let mut j = 0;
        loop {
            let v = term(ell, j);
            sum += v;
            j += 1;
            // past the crossover the terms decay geometrically
            if (v < 1e-17 && t_j::<f64>(j + 1).sqrt() < ell) || j > 4000 {
                break;
            }
        }
        if sum > best.0 {
            best = (sum, ell);
        }
    }
    Ok(best)
}
