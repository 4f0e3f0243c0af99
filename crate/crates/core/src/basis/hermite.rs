//! Normalized Hermite functions `h_k(x) = (2^k k! √π)^{-1/2} H_k(x) e^{-x²/2}`.
//!
//! Evaluation runs the orthonormal three-term recurrence
//!
//! ```text
//! h_{k+1}(x) = √(2/(k+1)) x h_k(x) − √(k/(k+1)) h_{k−1}(x)
//! ```
//!
//! seeded with `h_0(x) = π^{-1/4} e^{-x²/2}`. The Gaussian factor is carried
//! as a separate logarithmic scale which is folded back in only when a value
//! is returned, so neither the factor nor the polynomial part over/underflows
//! for large degree or far-out arguments.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Running state of the scaled recurrence: the true values are
/// `cur · e^{log_scale}` and `prev · e^{log_scale}`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ScaledPair<T> {
    pub cur: T,
    pub prev: T,
    pub log_scale: T,
}

impl<T: Real> ScaledPair<T> {
    #[inline]
    pub(crate) fn value(self) -> T {
        unscale(self.cur, self.log_scale)
    }
}

#[inline]
pub(crate) fn unscale<T: Real>(v: T, log_scale: T) -> T {
    if v == T::zero() {
        return T::zero();
    }
    let mag = (v.abs().ln() + log_scale).exp();
    if v < T::zero() {
        -mag
    } else {
        mag
    }
}

#[inline]
fn rescale_threshold<T: Real>() -> T {
    T::max_value().sqrt().sqrt()
}

fn check_finite<T: Real>(x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Hermite function argument {x} is not finite")))
    }
}

/// Runs the recurrence up to degree `k`, calling `visit(i, state)` after each
/// degree `i = 0..=k` is reached.
pub(crate) fn recurrence<T: Real>(k: usize, x: T, mut visit: impl FnMut(usize, ScaledPair<T>)) -> ScaledPair<T> {
    let big = rescale_threshold::<T>();
    let log_big = big.ln();
    let two = T::lit(2.0);
    let mut st = ScaledPair {
        cur: T::PI().powf(T::lit(-0.25)),
        prev: T::zero(),
        log_scale: -x * x / two,
    };
    visit(0, st);
    for i in 0..k {
        let fi = T::of_usize(i);
        let next = (two / (fi + T::one())).sqrt() * x * st.cur - (fi / (fi + T::one())).sqrt() * st.prev;
        st.prev = st.cur;
        st.cur = next;
        if st.cur.abs() > big {
            st.cur = st.cur / big;
            st.prev = st.prev / big;
            st.log_scale += log_big;
        }
        visit(i + 1, st);
    }
    st
}

/// `h_k(x)`.
pub fn hermite_eval<T: Real>(k: usize, x: T) -> Result<T> {
    check_finite(x)?;
    Ok(recurrence(k, x, |_, _| {}).value())
}

/// `[h_0(x), …, h_kmax(x)]`.
pub fn hermite_all<T: Real>(kmax: usize, x: T) -> Result<Vec<T>> {
    check_finite(x)?;
    let mut out = Vec::with_capacity(kmax + 1);
    recurrence(kmax, x, |_, st| out.push(st.value()));
    Ok(out)
}

/// `[h_0'(x), …, h_kmax'(x)]` from `h_k' = √(k/2) h_{k−1} − √((k+1)/2) h_{k+1}`.
pub fn hermite_derivative_all<T: Real>(kmax: usize, x: T) -> Result<Vec<T>> {
    let h = hermite_all(kmax + 1, x)?;
    let half = T::lit(0.5);
    Ok((0..=kmax)
        .map(|k| {
            let down = if k > 0 { (T::of_usize(k) * half).sqrt() * h[k - 1] } else { T::zero() };
            down - (T::of_usize(k + 1) * half).sqrt() * h[k + 1]
        })
        .collect())
}

/// Row-major table `h_k(x_i)` with `kmax + 1` entries per point.
#[derive(Clone, Debug)]
pub struct HermiteTable<T> {
    kmax: usize,
    values: Vec<T>,
}

impl<T: Real> HermiteTable<T> {
    pub fn new(kmax: usize, xs: &[T]) -> Result<Self> {
        let mut values = Vec::with_capacity(xs.len() * (kmax + 1));
        for &x in xs {
            values.extend(hermite_all(kmax, x)?);
        }
        Ok(Self { kmax, values })
    }

    /// Table of derivatives `h_k'(x_i)`.
    pub fn derivatives(kmax: usize, xs: &[T]) -> Result<Self> {
        let mut values = Vec::with_capacity(xs.len() * (kmax + 1));
        for &x in xs {
            values.extend(hermite_derivative_all(kmax, x)?);
        }
        Ok(Self { kmax, values })
    }

    #[inline]
    pub fn kmax(&self) -> usize {
        self.kmax
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        let w = self.kmax + 1;
        &self.values[i * w..(i + 1) * w]
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> T {
        self.values[i * (self.kmax + 1) + k]
    }
}
