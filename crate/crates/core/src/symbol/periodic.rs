use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::apply::apply_pseudo_multiplier;
use super::spec::XFactor;
use super::Symbol;
use crate::basis::GridFunction;
use crate::error::{Error, Result};
use crate::scalar::{cis, cx, re, Cx, Real};
use crate::spectral::{analyze, apply_diagonal, synthesize_at, DiagonalMultiplier};

type PeriodicFn<T> = dyn Fn(&[T], T) -> Cx<T> + Send + Sync;
type PeriodicGradFn<T> = dyn Fn(&[T], T, usize) -> Cx<T> + Send + Sync;

/// One term `c·b(x)·e^{i·freq·t}` of a trigonometric polynomial symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigTerm<T> {
    pub freq: i64,
    pub coeff: Cx<T>,
    pub b: XFactor,
}

/// `a(x, t)`, 2π-periodic in `t`, with its trapezoid size in `t`.
#[derive(Clone)]
pub struct PeriodicSymbol<T> {
    n: usize,
    t_samples: usize,
    degree: usize,
    sup_bound: Option<T>,
    eval: Arc<PeriodicFn<T>>,
    dt: Option<Arc<PeriodicFn<T>>>,
    grad: Option<Arc<PeriodicGradFn<T>>>,
}

impl<T> fmt::Debug for PeriodicSymbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicSymbol")
            .field("n", &self.n)
            .field("t_samples", &self.t_samples)
            .field("degree", &self.degree)
            .finish()
    }
}

impl<T: Real> PeriodicSymbol<T> {
    /// General periodic symbol; `degree` bounds its t-bandwidth (use a
    /// generous value for non-polynomial symbols).
    pub fn new(
        n: usize,
        t_samples: usize,
        degree: usize,
        a: impl Fn(&[T], T) -> Cx<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        crate::basis::check_dimension(n)?;
        if t_samples < 2 {
            return Err(Error::InvalidArgument("t-quadrature needs at least two samples".into()));
        }
        Ok(Self { n, t_samples, degree, sup_bound: None, eval: Arc::new(a), dt: None, grad: None })
    }

    /// Attaches the analytic t-derivative.
    pub fn with_dt(mut self, dt: impl Fn(&[T], T) -> Cx<T> + Send + Sync + 'static) -> Self {
        self.dt = Some(Arc::new(dt));
        self
    }

    /// `a(x,t) = Σ c_m b_m(x) e^{i m t}` with analytic `∂_t` and `∇_x`.
    pub fn trig_polynomial(n: usize, terms: Vec<TrigTerm<T>>, t_samples: usize) -> Result<Self> {
        let degree = terms.iter().map(|t| t.freq.unsigned_abs() as usize).max().unwrap_or(0);
        let sup = terms.iter().map(|t| t.coeff.norm() * T::lit(t.b.sup())).sum();
        let terms = Arc::new(terms);
        let (ta, td, tg) = (terms.clone(), terms.clone(), terms);
        let mut out = Self::new(n, t_samples, degree, move |x, t| {
            ta.iter().map(|m| m.coeff * m.b.value::<T>(x) * cis(T::lit(m.freq as f64) * t)).sum()
        })?
        .with_dt(move |x, t| {
            td.iter()
                .map(|m| {
                    let f = T::lit(m.freq as f64);
                    m.coeff * m.b.value::<T>(x) * cis(f * t) * cx(T::zero(), f)
                })
                .sum()
        });
        out.grad = Some(Arc::new(move |x: &[T], t, axis| {
            tg.iter().map(|m| m.coeff * m.b.gradient::<T>(x, axis) * cis(T::lit(m.freq as f64) * t)).sum()
        }));
        out.sup_bound = Some(sup);
        Ok(out)
    }

    /// Smallest trapezoid size resolving shells up to `kmax` for a symbol of
    /// t-degree `degree`: at least `4(kmax+1)` and alias-free at `λ = 2kmax+n`.
    pub fn min_samples(n: usize, kmax: usize, degree: usize) -> usize {
        (4 * (kmax + 1)).max(2 * kmax + n + degree + 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_samples(&self) -> usize {
        self.t_samples
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Known bound on `sup |a|`, when available.
    pub fn sup_bound(&self) -> Option<T> {
        self.sup_bound
    }

    pub fn value(&self, x: &[T], t: T) -> Cx<T> {
        (self.eval)(x, t)
    }

    /// Trapezoid nodes `t_s = 2πs/T`.
    pub fn nodes(&self) -> Vec<T> {
        let step = T::TAU() / T::of_usize(self.t_samples);
        (0..self.t_samples).map(|s| step * T::of_usize(s)).collect()
    }

    fn samples(&self, x: &[T]) -> Vec<Cx<T>> {
        self.nodes().into_iter().map(|t| self.value(x, t)).collect()
    }

    /// `∂_t a` on the nodes: analytic when supplied, else spectral.
    fn dt_samples(&self, x: &[T]) -> Vec<Cx<T>> {
        match &self.dt {
            Some(d) => self.nodes().into_iter().map(|t| d(x, t)).collect(),
            None => spectral_derivative(&self.samples(x)),
        }
    }
}

/// Trapezoid Fourier coefficient of samples at integer frequency `k`:
/// `(2π/T) Σ_s v_s e^{−ikt_s}`.
fn trapezoid_coefficient<T: Real>(samples: &[Cx<T>], k: i64) -> Cx<T> {
    let len = samples.len();
    let step = T::TAU() / T::of_usize(len);
    // reduce k·s modulo T so the phase stays small for large frequencies
    let kk = k.rem_euclid(len as i64) as usize;
    samples
        .iter()
        .enumerate()
        .map(|(s, &v)| v * cis(-step * T::of_usize((kk * s) % len)))
        .sum::<Cx<T>>()
        * step
}

/// Derivative of a periodic sample vector by its discrete Fourier series.
fn spectral_derivative<T: Real>(samples: &[Cx<T>]) -> Vec<Cx<T>> {
    let len = samples.len() as i64;
    let lo = -(len - 1) / 2;
    let hi = len / 2;
    let coeffs: Vec<(i64, Cx<T>)> = (lo..=hi).map(|m| (m, trapezoid_coefficient(samples, m) / T::TAU())).collect();
    let step = T::TAU() / T::of_usize(samples.len());
    (0..samples.len())
        .map(|s| {
            let t = step * T::of_usize(s);
            coeffs
                .iter()
                .map(|&(m, c)| {
                    // the Nyquist mode of an even grid carries no derivative
                    if len % 2 == 0 && m == hi {
                        cx(T::zero(), T::zero())
                    } else {
                        let f = T::lit(m as f64);
                        c * cis(f * t) * cx(T::zero(), f)
                    }
                })
                .sum()
        })
        .collect()
}

/// `â(x, k) = ∫_0^{2π} a(x,t) e^{−ikt} dt` at integer frequency `k`.
pub fn fourier_coefficient<T: Real>(a: &PeriodicSymbol<T>, x: &[T], k: i64) -> Cx<T> {
    trapezoid_coefficient(&a.samples(x), k)
}

/// The pseudo-multiplier symbol of `â(x, H)`: shell `k` carries `â(x, 2k+n)`.
pub fn periodic_to_symbol<T: Real>(a: &PeriodicSymbol<T>, kmax: usize) -> Result<Symbol<T>> {
    if a.t_samples < 4 * (kmax + 1) {
        return Err(Error::InvalidArgument(format!(
            "t-quadrature of {} samples cannot resolve shells up to {kmax}; need at least {}",
            a.t_samples,
            4 * (kmax + 1)
        )));
    }
    let n = a.n;
    let ev = a.clone();
    let mut s = Symbol::from_row_fn(n, "periodic", move |x, top| {
        let samples = ev.samples(x);
        (0..=top).map(|k| trapezoid_coefficient(&samples, (2 * k + n) as i64)).collect()
    })?;
    if let Some(g) = a.grad.clone() {
        let nodes = a.nodes();
        s = s.with_gradient(move |x, k, axis| {
            let samples: Vec<Cx<T>> = nodes.iter().map(|&t| g(x, t, axis)).collect();
            trapezoid_coefficient(&samples, (2 * k + n) as i64)
        });
    }
    Ok(s)
}

/// `â(x,H)f(x) = ∫ a(x,t)(e^{−itH}f)(x) dt` by the t-trapezoid, each
/// `e^{−itH}f` formed spectrally. The result is cross-checked against the
/// symbol-sum pipeline and a [`Error::Consistency`] is raised when the two
/// disagree by more than `1e−8` relative.
pub fn apply_via_unitary_group<T: Real>(a: &PeriodicSymbol<T>, f: &GridFunction<T>, kmax: usize) -> Result<GridFunction<T>> {
    let n = a.n;
    if f.grid().n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.grid().n() });
    }
    let c = analyze(f, kmax)?;
    let points = f.grid().points();
    let nodes = a.nodes();
    let step = T::TAU() / T::of_usize(a.t_samples);
    let evolved: Vec<Vec<Cx<T>>> = nodes
        .par_iter()
        .map(|&t| synthesize_at(&apply_diagonal(&DiagonalMultiplier::unitary(n, kmax, t)?, &c)?, &points))
        .collect::<Result<_>>()?;
    let values: Vec<Cx<T>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            nodes.iter().zip(&evolved).map(|(&t, u)| a.value(p, t) * u[i]).sum::<Cx<T>>() * step
        })
        .collect();
    let out = GridFunction::new(f.grid().clone(), values)?;

    let reference = apply_pseudo_multiplier(&periodic_to_symbol(a, kmax)?, f, kmax)?;
    let scale = reference.max_abs().max(f.max_abs()).max(T::min_positive_value());
    let diff = out
        .values()
        .iter()
        .zip(reference.values())
        .map(|(u, v)| (u - v).norm())
        .fold(T::zero(), T::max)
        / scale;
    let tol = consistency_tolerance::<T>();
    if diff > tol {
        return Err(Error::Consistency {
            what: "unitary-group and symbol-sum pipelines".into(),
            value: diff.as_f64(),
            tolerance: tol.as_f64(),
        });
    }
    Ok(out)
}

fn consistency_tolerance<T: Real>() -> T {
    // 1e−8 in double precision; single precision is bounded by its epsilon
    T::lit(1e-8).max(T::epsilon() * T::lit(1e3))
}

/// `max_x |ikΔâ(x,k) − ∫ Da(x,t) e^{−ikt} dt|` with `Da = ∂_t((e^{−it}−1)a)`
/// and `Δâ(x,k) = â(x,k+1) − â(x,k)` at integer frequency `k`.
pub fn da_identity_check<T: Real>(a: &PeriodicSymbol<T>, k: i64, points: &[Vec<T>]) -> Result<T> {
    if let Some(p) = points.iter().find(|p| p.len() != a.n) {
        return Err(Error::DimensionMismatch { expected: a.n, got: p.len() });
    }
    let nodes = a.nodes();
    let kf = T::lit(k as f64);
    Ok(points
        .par_iter()
        .map(|x| {
            let samples = a.samples(x);
            let dts = a.dt_samples(x);
            let lhs = cx(T::zero(), kf) * (trapezoid_coefficient(&samples, k + 1) - trapezoid_coefficient(&samples, k));
            let da: Vec<Cx<T>> = nodes
                .iter()
                .zip(samples.iter().zip(&dts))
                .map(|(&t, (&v, &d))| {
                    let e = cis(-t);
                    cx(T::zero(), -T::one()) * e * v + (e - re(T::one())) * d
                })
                .collect();
            (lhs - trapezoid_coefficient(&da, k)).norm()
        })
        .reduce(T::zero, T::max))
}
