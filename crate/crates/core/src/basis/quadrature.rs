//! Gauss–Hermite quadrature with weights pre-multiplied by `e^{x²}`, so that
//! `∫ f ≈ Σ w̃_i f(x_i)` for integrands that already carry Gaussian decay
//! (products of Hermite functions in particular).

use super::hermite::recurrence;
use super::multi_index::check_dimension;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tensor Gauss–Hermite grid: the same `Q`-point rule on each of `n` axes.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid<T> {
    n: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
}

/// One-dimensional `Q`-point rule.
///
/// Nodes are the zeros of `H_Q`, found largest-first by Newton's method on
/// the polynomial with the already located zeros deflated out. Started to the
/// right of every remaining zero, each iteration converges monotonically. The
/// modified weights `1 / (Q h_{Q−1}(x_i)²)` are formed in log space.
pub fn gauss_hermite<T: Real>(q: usize) -> Result<QuadratureGrid<T>> {
    if q == 0 {
        return Err(Error::InvalidArgument("Gauss–Hermite rule needs at least one node".into()));
    }
    let qf = T::of_usize(q);
    let sqrt_2q = (T::lit(2.0) * qf).sqrt();
    let tol = T::epsilon() * T::lit(4.0);
    let nudge = T::epsilon().sqrt();

    let mut positive: Vec<T> = Vec::with_capacity(q / 2);
    let mut x = (T::lit(2.0) * qf + T::one()).sqrt() + T::one();
    for _ in 0..q / 2 {
        if let Some(&last) = positive.last() {
            x = last - nudge * (T::one() + last.abs());
        }
        for _ in 0..200 {
            let st = recurrence(q, x, |_, _| {});
            if st.cur == T::zero() {
                break;
            }
            // p_Q'/p_Q = √(2Q) h_{Q−1}/h_Q for the orthonormal polynomials
            let mut logderiv = sqrt_2q * st.prev / st.cur;
            for &r in &positive {
                logderiv -= T::one() / (x - r);
            }
            let dx = T::one() / logderiv;
            x -= dx;
            if dx.abs() <= tol * T::one().max(x.abs()) {
                break;
            }
        }
        positive.push(x);
    }

    let mut nodes: Vec<T> = positive.iter().map(|&r| -r).collect();
    if q % 2 == 1 {
        nodes.push(T::zero());
    }
    nodes.extend(positive.iter().rev().copied());

    let ln_q = qf.ln();
    let weights = nodes
        .iter()
        .map(|&xi| {
            let st = recurrence(q - 1, xi, |_, _| {});
            let ln_h = st.cur.abs().ln() + st.log_scale;
            (-ln_q - T::lit(2.0) * ln_h).exp()
        })
        .collect();
    Ok(QuadratureGrid { n: 1, nodes, weights })
}

impl<T: Real> QuadratureGrid<T> {
    /// `n`-dimensional tensor product of the `q`-point rule.
    pub fn tensor(q: usize, n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self { n, ..gauss_hermite(q)? })
    }

    pub fn with_dimension(mut self, n: usize) -> Result<Self> {
        check_dimension(n)?;
        self.n = n;
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Nodes per axis.
    #[inline]
    pub fn axis_size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Total number of tensor points `Q^n`.
    pub fn len(&self) -> usize {
        self.nodes.len().pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Per-axis node indices of tensor point `i` (first axis slowest).
    pub fn multi(&self, i: usize) -> Vec<usize> {
        let q = self.nodes.len();
        let mut out = vec![0; self.n];
        let mut rem = i;
        for a in (0..self.n).rev() {
            out[a] = rem % q;
            rem /= q;
        }
        out
    }

    pub fn point(&self, i: usize) -> Vec<T> {
        self.multi(i).into_iter().map(|j| self.nodes[j]).collect()
    }

    pub fn weight(&self, i: usize) -> T {
        self.multi(i).into_iter().map(|j| self.weights[j]).fold(T::one(), |a, b| a * b)
    }

    /// Tensor points and weights in storage order.
    pub fn points(&self) -> Vec<Vec<T>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn tensor_weights(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    /// Highest shell whose products are integrated exactly: `Q − 1`.
    pub fn exact_shell(&self) -> usize {
        self.nodes.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::hermite::{hermite_all, hermite_eval};
    use approx::assert_relative_eq;

    fn integrate_product(g: &QuadratureGrid<f64>, a: usize, b: usize) -> f64 {
        g.nodes()
            .iter()
            .zip(g.weights())
            .map(|(&x, &w)| w * hermite_eval(a, x).unwrap() * hermite_eval(b, x).unwrap())
            .sum()
    }

    #[test]
    fn one_point_rule() {
        let g = gauss_hermite::<f64>(1).unwrap();
        assert_eq!(g.nodes(), &[0.0]);
        assert_relative_eq!(integrate_product(&g, 0, 0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn two_point_rule_closed_form() {
        let g = gauss_hermite::<f64>(2).unwrap();
        let r = 0.5_f64.sqrt();
        assert_relative_eq!(g.nodes()[0], -r, epsilon = 1e-15);
        assert_relative_eq!(g.nodes()[1], r, epsilon = 1e-15);
        // raw weights √π/2, modified by e^{1/2}
        let w = std::f64::consts::PI.sqrt() / 2.0 * 0.5_f64.exp();
        assert_relative_eq!(g.weights()[0], w, epsilon = 1e-14);
    }

    #[test]
    fn orthogonality_sixty_four_points() {
        let g = gauss_hermite::<f64>(64).unwrap();
        assert!(integrate_product(&g, 10, 12).abs() < 1e-12);
        assert_relative_eq!(integrate_product(&g, 12, 12), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nodes_sorted_and_symmetric() {
        for q in [3, 7, 50, 129, 512] {
            let g = gauss_hermite::<f64>(q).unwrap();
            let x = g.nodes();
            assert!(x.windows(2).all(|w| w[0] < w[1]), "q={q}");
            for i in 0..q {
                assert!((x[i] + x[q - 1 - i]).abs() < 1e-12);
            }
            assert!(g.weights().iter().all(|&w| w > 0.0 && w.is_finite()));
        }
    }

    #[test]
    fn large_rule_normalization_and_exactness() {
        for q in [90, 200, 512] {
            let g = gauss_hermite::<f64>(q).unwrap();
            assert_relative_eq!(integrate_product(&g, 0, 0), 1.0, epsilon = 1e-10);
            // top-degree pair still exact
            let k = q - 1;
            let rows: Vec<Vec<f64>> = g.nodes().iter().map(|&x| hermite_all(k, x).unwrap()).collect();
            let inner = |a: usize, b: usize| -> f64 {
                rows.iter().zip(g.weights()).map(|(h, &w)| w * h[a] * h[b]).sum()
            };
            assert_relative_eq!(inner(k, k), 1.0, epsilon = 1e-10);
            assert!(inner(k, k - 2).abs() < 1e-10);
            assert!(inner(k / 2, k / 3).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(gauss_hermite::<f64>(0).is_err());
    }

    #[test]
    fn tensor_grid_layout() {
        let g = QuadratureGrid::<f64>::tensor(3, 2).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.multi(5), vec![1, 2]);
        let total: f64 = g.tensor_weights().iter().sum();
        let one: f64 = g.weights().iter().sum();
        assert_relative_eq!(total, one * one, epsilon = 1e-14);
    }
}
