use super::multi_index::check_dimension;
use super::quadrature::QuadratureGrid;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Equispaced tensor grid covering `[−L, L]ⁿ`, endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformGrid<T> {
    n: usize,
    half_width: T,
    points: usize,
}

impl<T: Real> UniformGrid<T> {
    pub fn new(n: usize, half_width: T, points: usize) -> Result<Self> {
        check_dimension(n)?;
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidArgument(format!("half-width must be positive, got {half_width}")));
        }
        if points < 2 {
            return Err(Error::InvalidArgument("uniform grid needs at least two points per axis".into()));
        }
        Ok(Self { n, half_width, points })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn half_width(&self) -> T {
        self.half_width
    }

    #[inline]
    pub fn axis_size(&self) -> usize {
        self.points
    }

    /// `h = 2L / (points − 1)`.
    #[inline]
    pub fn spacing(&self) -> T {
        T::lit(2.0) * self.half_width / T::of_usize(self.points - 1)
    }

    pub fn axis_nodes(&self) -> Vec<T> {
        let h = self.spacing();
        (0..self.points).map(|i| -self.half_width + h * T::of_usize(i)).collect()
    }

    /// Trapezoid weights along one axis.
    pub fn axis_weights(&self) -> Vec<T> {
        let h = self.spacing();
        (0..self.points)
            .map(|i| if i == 0 || i + 1 == self.points { h / T::lit(2.0) } else { h })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume `hⁿ` of one cell.
    pub fn cell_volume(&self) -> T {
        self.spacing().powi(self.n as i32)
    }

    pub fn multi(&self, i: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        let mut rem = i;
        for a in (0..self.n).rev() {
            out[a] = rem % self.points;
            rem /= self.points;
        }
        out
    }

    pub fn flat(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &j| acc * self.points + j)
    }

    pub fn point(&self, i: usize) -> Vec<T> {
        let h = self.spacing();
        self.multi(i).into_iter().map(|j| -self.half_width + h * T::of_usize(j)).collect()
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn tensor_weights(&self) -> Vec<T> {
        let w = self.axis_weights();
        (0..self.len()).map(|i| self.multi(i).into_iter().map(|j| w[j]).fold(T::one(), |a, b| a * b)).collect()
    }
}

/// Sampling grid of a [`GridFunction`].
#[derive(Clone, Debug, PartialEq)]
pub enum Grid<T> {
    Quadrature(QuadratureGrid<T>),
    Uniform(UniformGrid<T>),
}

impl<T: Real> Grid<T> {
    pub fn n(&self) -> usize {
        match self {
            Grid::Quadrature(g) => g.n(),
            Grid::Uniform(g) => g.n(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Quadrature(g) => g.len(),
            Grid::Uniform(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        match self {
            Grid::Quadrature(g) => g.points(),
            Grid::Uniform(g) => g.points(),
        }
    }

    /// Integration weights: modified Gauss–Hermite weights or trapezoid weights.
    pub fn weights(&self) -> Vec<T> {
        match self {
            Grid::Quadrature(g) => g.tensor_weights(),
            Grid::Uniform(g) => g.tensor_weights(),
        }
    }
}

impl<T> From<QuadratureGrid<T>> for Grid<T> {
    fn from(g: QuadratureGrid<T>) -> Self {
        Grid::Quadrature(g)
    }
}

impl<T> From<UniformGrid<T>> for Grid<T> {
    fn from(g: UniformGrid<T>) -> Self {
        Grid::Uniform(g)
    }
}

/// Complex samples of a function on a tensor grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    grid: Grid<T>,
    values: Vec<Cx<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(grid: impl Into<Grid<T>>, values: Vec<Cx<T>>) -> Result<Self> {
        let grid = grid.into();
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every grid point.
    pub fn sample(grid: impl Into<Grid<T>>, f: impl Fn(&[T]) -> Cx<T>) -> Self {
        let grid = grid.into();
        let values = grid.points().iter().map(|p| f(p)).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: impl Into<Grid<T>>) -> Self {
        let grid = grid.into();
        let values = vec![Cx::new(T::zero(), T::zero()); grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Cx<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Cx<T>> {
        self.values
    }

    /// `(∫|f|²)^{1/2}` with the grid's weights.
    pub fn l2_norm(&self) -> T {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(&w, v)| w * v.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Largest pointwise modulus.
    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// `‖self − other‖₂` on the shared grid.
    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("grid functions live on different grids".into()));
        }
        Ok(self
            .grid
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(&w, (a, b))| w * (a - b).norm_sqr())
            .sum::<T>()
            .sqrt())
    }

    pub fn map(&self, f: impl Fn(&[T], Cx<T>) -> Cx<T>) -> Self {
        let values = self.grid.points().iter().zip(&self.values).map(|(p, &v)| f(p, v)).collect();
        Self { grid: self.grid.clone(), values }
    }
}
