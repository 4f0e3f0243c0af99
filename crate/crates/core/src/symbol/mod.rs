//! Pseudo-multiplier symbols `m(x, k)`, their finite-difference calculus and
//! the operator `m(x,H) = Σ_k m(x, 2k+n) P_k`.
//!
//! A symbol is indexed by the shell `k`; built-ins evaluate their eigenvalue
//! formula at `λ = 2k + n`.

mod apply;
mod class;
mod periodic;
mod spec;
mod table;

use std::fmt;
use std::sync::Arc;

pub use apply::{apply_pseudo_multiplier, apply_pseudo_multiplier_at, shell_sums};
pub use class::{default_scan_points, symbol_class_check, ScanDomain, SymbolClassReport};
pub use periodic::{
    apply_via_unitary_group, da_identity_check, fourier_coefficient, periodic_to_symbol, PeriodicSymbol, TrigTerm,
};
pub use spec::{SymbolSpec, TrigTermSpec, XFactor};
pub use table::SymbolTable;

use crate::error::{Error, Result};
use crate::scalar::{cis, eigenvalue, re, Cx, Real};
use crate::spectral::DiagonalMultiplier;

type PointFn<T> = dyn Fn(&[T], usize) -> Cx<T> + Send + Sync;
type RowFn<T> = dyn Fn(&[T], usize) -> Vec<Cx<T>> + Send + Sync;
type GradFn<T> = dyn Fn(&[T], usize, usize) -> Cx<T> + Send + Sync;

#[derive(Clone)]
enum Eval<T> {
    Point(Arc<PointFn<T>>),
    Row(Arc<RowFn<T>>),
}

/// The datum `m(x, k)` of a pseudo-multiplier, optionally with `∂m/∂x_i`.
#[derive(Clone)]
pub struct Symbol<T> {
    n: usize,
    name: String,
    x_free: bool,
    eval: Eval<T>,
    gradient: Option<Arc<GradFn<T>>>,
}

impl<T> fmt::Debug for Symbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("n", &self.n)
            .field("name", &self.name)
            .field("x_free", &self.x_free)
            .field("gradient", &self.gradient.is_some())
            .finish()
    }
}

impl<T: Real> Symbol<T> {
    /// General symbol from a pointwise evaluator `(x, k) ↦ m(x, k)`.
    pub fn from_fn(
        n: usize,
        name: impl Into<String>,
        f: impl Fn(&[T], usize) -> Cx<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        crate::basis::check_dimension(n)?;
        Ok(Self { n, name: name.into(), x_free: false, eval: Eval::Point(Arc::new(f)), gradient: None })
    }

    /// Symbol whose evaluator produces all shells `0..=kmax` at once.
    pub fn from_row_fn(
        n: usize,
        name: impl Into<String>,
        f: impl Fn(&[T], usize) -> Vec<Cx<T>> + Send + Sync + 'static,
    ) -> Result<Self> {
        crate::basis::check_dimension(n)?;
        Ok(Self { n, name: name.into(), x_free: false, eval: Eval::Row(Arc::new(f)), gradient: None })
    }

    /// x-independent symbol `m(k) = φ(2k+n)`.
    pub fn from_eigen(n: usize, name: impl Into<String>, phi: impl Fn(T) -> Cx<T> + Send + Sync + 'static) -> Result<Self> {
        let mut s = Self::from_fn(n, name, move |_, k| phi(eigenvalue(k, n)))?;
        s.x_free = true;
        s.gradient = Some(Arc::new(|_, _, _| re(T::zero())));
        Ok(s)
    }

    /// x-independent symbol from per-shell values; shells past the table
    /// repeat the last value.
    pub fn table(n: usize, values: Vec<Cx<T>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty symbol table".into()));
        }
        let mut s = Self::from_fn(n, "table", move |_, k| values[k.min(values.len() - 1)])?;
        s.x_free = true;
        s.gradient = Some(Arc::new(|_, _, _| re(T::zero())));
        Ok(s)
    }

    pub fn from_multiplier(mu: &DiagonalMultiplier<T>) -> Result<Self> {
        Self::table(mu.n(), mu.values().to_vec())
    }

    pub fn one(n: usize) -> Result<Self> {
        Self::constant(n, re(T::one()))
    }

    pub fn constant(n: usize, c: Cx<T>) -> Result<Self> {
        Self::from_eigen(n, "constant", move |_| c)
    }

    /// `m(λ) = λ^{is}`.
    pub fn mihlin_it(n: usize, s: T) -> Result<Self> {
        Self::from_eigen(n, "mihlin_it", move |lam: T| cis(s * lam.ln()))
    }

    /// `m(λ) = e^{−tλ}`.
    pub fn heat(n: usize, t: T) -> Result<Self> {
        Self::from_eigen(n, "heat", move |lam: T| re((-t * lam).exp()))
    }

    /// `m(k) = (−1)^k`.
    pub fn alternating(n: usize) -> Result<Self> {
        let mut s = Self::from_fn(n, "alternating", |_, k| re(if k % 2 == 0 { T::one() } else { -T::one() }))?;
        s.x_free = true;
        s.gradient = Some(Arc::new(|_, _, _| re(T::zero())));
        Ok(s)
    }

    /// `m(k) = δ_{k,k₀}`.
    pub fn kronecker(n: usize, k0: usize) -> Result<Self> {
        let mut s = Self::from_fn(n, "kronecker", move |_, k| re(if k == k0 { T::one() } else { T::zero() }))?;
        s.x_free = true;
        s.gradient = Some(Arc::new(|_, _, _| re(T::zero())));
        Ok(s)
    }

    /// `m(x, k) = b(x)·m₀(x, k)`; the gradient follows the product rule when
    /// both factors supply one.
    pub fn separable(b: XFactor, m0: Symbol<T>) -> Result<Self> {
        let n = m0.n;
        let name = format!("{}*{}", b.name(), m0.name);
        let bv = b.clone();
        let inner = m0.clone();
        let mut s = match &m0.eval {
            Eval::Point(_) => Self::from_fn(n, name, move |x, k| inner.value(x, k) * bv.value::<T>(x))?,
            Eval::Row(_) => Self::from_row_fn(n, name, move |x, kmax| {
                let bx = bv.value::<T>(x);
                inner.row(x, kmax).into_iter().map(|v| v * bx).collect()
            })?,
        };
        if let Some(g0) = m0.gradient.clone() {
            let inner = m0.clone();
            s.gradient = Some(Arc::new(move |x: &[T], k, axis| {
                inner.value(x, k) * b.gradient::<T>(x, axis) + g0(x, k, axis) * b.value::<T>(x)
            }));
        }
        Ok(s)
    }

    /// Attaches an analytic x-gradient `(x, k, axis) ↦ ∂m/∂x_axis`.
    pub fn with_gradient(mut self, g: impl Fn(&[T], usize, usize) -> Cx<T> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn without_gradient(mut self) -> Self {
        self.gradient = None;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// True when `m` does not depend on `x`.
    pub fn is_x_free(&self) -> bool {
        self.x_free
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// `m(x, k)`.
    pub fn value(&self, x: &[T], k: usize) -> Cx<T> {
        match &self.eval {
            Eval::Point(f) => f(x, k),
            Eval::Row(f) => f(x, k)[k],
        }
    }

    /// `[m(x, 0), …, m(x, kmax)]`.
    pub fn row(&self, x: &[T], kmax: usize) -> Vec<Cx<T>> {
        match &self.eval {
            Eval::Point(f) => (0..=kmax).map(|k| f(x, k)).collect(),
            Eval::Row(f) => {
                let mut r = f(x, kmax);
                r.truncate(kmax + 1);
                r
            }
        }
    }

    /// `∂m/∂x_axis (x, k)` when available.
    pub fn gradient(&self, x: &[T], k: usize, axis: usize) -> Option<Cx<T>> {
        self.gradient.as_ref().map(|g| g(x, k, axis))
    }

    /// `b(x)·m` for a plain function `b` (no gradient is carried).
    pub fn times(&self, b: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        let inner = self.clone();
        let mut s = match &self.eval {
            Eval::Point(_) => Self::from_fn(self.n, format!("b*{}", self.name), move |x, k| inner.value(x, k) * b(x)),
            Eval::Row(_) => Self::from_row_fn(self.n, format!("b*{}", self.name), move |x, kmax| {
                let bx = b(x);
                inner.row(x, kmax).into_iter().map(|v| v * bx).collect()
            }),
        }
        .expect("dimension already validated");
        s.x_free = false;
        s
    }

    /// `α m₁ + β m₂`.
    pub fn combine(a: Cx<T>, m1: &Self, b: Cx<T>, m2: &Self) -> Result<Self> {
        if m1.n != m2.n {
            return Err(Error::DimensionMismatch { expected: m1.n, got: m2.n });
        }
        let (p, q) = (m1.clone(), m2.clone());
        let mut s = Self::from_row_fn(m1.n, format!("{}+{}", m1.name, m2.name), move |x, kmax| {
            p.row(x, kmax).into_iter().zip(q.row(x, kmax)).map(|(u, v)| u * a + v * b).collect()
        })?;
        s.x_free = m1.x_free && m2.x_free;
        if let (Some(g1), Some(g2)) = (m1.gradient.clone(), m2.gradient.clone()) {
            s.gradient = Some(Arc::new(move |x: &[T], k, axis| g1(x, k, axis) * a + g2(x, k, axis) * b));
        }
        Ok(s)
    }
}

/// Forward difference `Δm(x,k) = m(x,k+1) − m(x,k)` iterated `j` times.
///
/// Past `kmax` the symbol is clamped, `m(·,k) = m(·,kmax)`; use
/// [`delta_value`] for the strict form.
pub fn delta_k<T: Real>(m: &Symbol<T>, j: usize, kmax: usize) -> Result<Symbol<T>> {
    if j == 0 {
        return Err(Error::InvalidArgument("difference order must be at least 1".into()));
    }
    if j > kmax {
        return Err(Error::DifferencePastTruncation { order: j, k: 0, kmax });
    }
    let inner = m.clone();
    let mut s = Symbol::from_row_fn(m.n(), format!("delta^{j}({})", m.name()), move |x, top| {
        let row = inner.row(x, kmax);
        let clamped: Vec<Cx<T>> = (0..=top + j).map(|k| row[k.min(kmax)]).collect();
        forward_differences(&clamped, j, top)
    })?;
    s.x_free = m.is_x_free();
    if let Some(g) = m.gradient.clone() {
        s.gradient = Some(Arc::new(move |x: &[T], k, axis| {
            let vals: Vec<Cx<T>> = (0..=j).map(|i| g(x, (k + i).min(kmax), axis)).collect();
            forward_differences(&vals, j, 0)[0]
        }));
    }
    Ok(s)
}

/// `Δ^j m(x, k)`; errors when `k + j > kmax`.
pub fn delta_value<T: Real>(m: &Symbol<T>, x: &[T], k: usize, j: usize, kmax: usize) -> Result<Cx<T>> {
    if k + j > kmax {
        return Err(Error::DifferencePastTruncation { order: j, k, kmax });
    }
    let vals: Vec<Cx<T>> = (k..=k + j).map(|i| m.value(x, i)).collect();
    Ok(forward_differences(&vals, j, 0)[0])
}

/// `Δ^j` of a sequence, keeping entries `0..=top`. Needs `vals.len() > top + j`.
pub(crate) fn forward_differences<T: Real>(vals: &[Cx<T>], j: usize, top: usize) -> Vec<Cx<T>> {
    let mut cur = vals.to_vec();
    for _ in 0..j {
        cur = cur.windows(2).map(|w| w[1] - w[0]).collect();
    }
    cur.truncate(top + 1);
    cur
}

/// Direction of the step-2 eigenvalue differences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// `D_−φ(λ) = φ(λ) − φ(λ−2)`.
    Minus,
    /// `D_+φ(λ) = φ(λ+2) − φ(λ)`.
    Plus,
}

/// A function of the eigenvalue variable.
pub type EigenFn<T> = Arc<dyn Fn(T) -> Cx<T> + Send + Sync>;

/// `D_±^j φ` as a new eigenvalue function.
pub fn dpm_eigen<T: Real>(phi: EigenFn<T>, sign: Sign, j: usize) -> EigenFn<T> {
    let two = T::lit(2.0);
    (0..j).fold(phi, |f, _| -> EigenFn<T> {
        match sign {
            Sign::Minus => Arc::new(move |lam| f(lam) - f(lam - two)),
            Sign::Plus => Arc::new(move |lam| f(lam + two) - f(lam)),
        }
    })
}

/// `D_±^j φ` at shell `k` from per-shell values `φ(2k+n)`, `k = 0..values.len()`.
pub fn dpm_eval<T: Real>(values: &[Cx<T>], sign: Sign, j: usize, k: usize) -> Result<Cx<T>> {
    let kmax = values.len().saturating_sub(1);
    let (lo, hi) = match sign {
        Sign::Minus => (k.checked_sub(j), Some(k)),
        Sign::Plus => (Some(k), Some(k + j)),
    };
    match (lo, hi) {
        (Some(lo), Some(hi)) if hi <= kmax && !values.is_empty() => Ok(forward_differences(&values[lo..=hi], j, 0)[0]),
        _ => Err(Error::DifferencePastTruncation { order: j, k, kmax }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(v: f64) -> Cx<f64> {
        Cx::new(v, 0.0)
    }

    #[test]
    fn delta_of_linear_and_quadratic() {
        let lin = Symbol::<f64>::from_fn(1, "k", |_, k| c(k as f64)).unwrap();
        let d = delta_k(&lin, 1, 20).unwrap();
        for k in 0..20 {
            assert_eq!(d.value(&[0.3], k), c(1.0));
        }
        let quad = Symbol::<f64>::from_fn(1, "k2", |_, k| c((k * k) as f64)).unwrap();
        let d2 = delta_k(&quad, 2, 30).unwrap();
        for k in 0..=28 {
            assert_eq!(d2.value(&[1.0], k), c(2.0));
        }
        assert_eq!(delta_value(&quad, &[0.0], 5, 2, 30).unwrap(), c(2.0));
    }

    #[test]
    fn delta_of_constant_vanishes() {
        let m = Symbol::<f64>::constant(2, Cx::new(3.0, -1.0)).unwrap();
        for j in 1..5 {
            let d = delta_k(&m, j, 16).unwrap();
            assert!(d.row(&[0.1, 0.2], 16).iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn delta_past_truncation() {
        let m = Symbol::<f64>::one(1).unwrap();
        assert!(matches!(delta_value(&m, &[0.0], 9, 2, 10), Err(Error::DifferencePastTruncation { .. })));
        assert!(delta_k(&m, 0, 10).is_err());
        assert!(delta_k(&m, 11, 10).is_err());
    }

    #[test]
    fn clamped_tail_is_flat() {
        let lin = Symbol::<f64>::from_fn(1, "k", |_, k| c(k as f64)).unwrap();
        let d = delta_k(&lin, 1, 10).unwrap();
        assert_eq!(d.value(&[0.0], 10), c(0.0));
    }

    #[test]
    fn dpm_examples() {
        let id: EigenFn<f64> = Arc::new(|l| c(l));
        let dp = dpm_eigen(id, Sign::Plus, 1);
        assert_eq!(dp(7.0), c(2.0));
        let cst: EigenFn<f64> = Arc::new(|_| c(4.0));
        assert_eq!(dpm_eigen(cst, Sign::Minus, 2)(9.0), c(0.0));
        let t = 0.3;
        let heat: EigenFn<f64> = Arc::new(move |l| c((-t * l).exp()));
        let dm = dpm_eigen(heat, Sign::Minus, 1);
        for lam in [1.0, 5.0, 11.0] {
            assert_relative_eq!(dm(lam).re, (-t * lam).exp() * (1.0 - (2.0 * t).exp()), epsilon = 1e-14);
        }
    }

    #[test]
    fn dpm_eval_on_tables() {
        let vals: Vec<Cx<f64>> = (0..10).map(|k| c((2 * k + 1) as f64)).collect();
        assert_eq!(dpm_eval(&vals, Sign::Minus, 1, 3).unwrap(), c(2.0));
        assert_eq!(dpm_eval(&vals, Sign::Plus, 2, 3).unwrap(), c(0.0));
        assert!(dpm_eval(&vals, Sign::Minus, 2, 1).is_err());
        assert!(dpm_eval(&vals, Sign::Plus, 1, 9).is_err());
    }

    #[test]
    fn builtins_evaluate_at_eigenvalue() {
        let m = Symbol::<f64>::mihlin_it(2, 1.0).unwrap();
        let v = m.value(&[0.0, 0.0], 3);
        assert_relative_eq!(v.re, (8f64.ln()).cos(), epsilon = 1e-15);
        assert_relative_eq!(v.im, (8f64.ln()).sin(), epsilon = 1e-15);
        let a = Symbol::<f64>::alternating(1).unwrap();
        assert_eq!(a.value(&[0.0], 5), c(-1.0));
        assert!(a.is_x_free());
    }

    #[test]
    fn separable_gradient_matches_finite_difference() {
        let m = Symbol::separable(XFactor::Lorentz { scale: 1.0 }, Symbol::<f64>::mihlin_it(1, 1.0).unwrap()).unwrap();
        let h = 1e-5;
        for x in [-2.0, -0.4, 0.7, 3.0] {
            for k in [0, 5, 40] {
                let fd = (m.value(&[x + h], k) - m.value(&[x - h], k)) / (2.0 * h);
                let g = m.gradient(&[x], k, 0).unwrap();
                assert!((fd - g).norm() <= 1e-4 * g.norm().max(1e-8));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn delta_commutes_with_x_factor(x in -3.0f64..3.0, k in 0usize..20, j in 1usize..4, s in -2.0f64..2.0) {
            let m = Symbol::<f64>::mihlin_it(1, s).unwrap();
            let b = |p: &[f64]| (1.0 + p[0] * p[0]).recip();
            let lhs = delta_value(&m.times(b), &[x], k, j, 32).unwrap();
            let rhs = delta_value(&m, &[x], k, j, 32).unwrap() * b(&[x]);
            prop_assert!((lhs - rhs).norm() <= 1e-15 * (1.0 + rhs.norm()));
        }

        #[test]
        fn clamped_and_strict_differences_agree_inside(k in 0usize..28, j in 1usize..4) {
            let m = Symbol::<f64>::heat(1, 0.05).unwrap();
            let d = delta_k(&m, j, 32).unwrap();
            prop_assume!(k + j <= 32);
            prop_assert_eq!(d.value(&[0.0], k), delta_value(&m, &[0.0], k, j, 32).unwrap());
        }
    }
}
