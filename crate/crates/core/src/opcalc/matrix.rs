use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::ShellBasis;
use crate::error::{Error, Result};
use crate::scalar::{cx, re, Cx, Real};
use crate::spectral::{in_dyadic_block, DiagonalMultiplier, SpectralField};

/// Dense truncated matrix `M_{μν} = ⟨MΦ_ν, Φ_μ⟩` over the shell-ordered basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<T> {
    basis: Arc<ShellBasis>,
    data: Vec<Cx<T>>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn zeros(n: usize, kmax: usize) -> Result<Self> {
        let basis = ShellBasis::shared(n, kmax)?;
        let d = basis.len();
        Ok(Self { basis, data: vec![cx(T::zero(), T::zero()); d * d] })
    }

    pub fn identity(n: usize, kmax: usize) -> Result<Self> {
        Self::from_fn(n, kmax, |r, c| re(if r == c { T::one() } else { T::zero() }))
    }

    /// Entries `f(row, col)` by basis position.
    pub fn from_fn(n: usize, kmax: usize, f: impl Fn(usize, usize) -> Cx<T> + Sync) -> Result<Self> {
        let basis = ShellBasis::shared(n, kmax)?;
        let d = basis.len();
        let data = (0..d * d).into_par_iter().map(|i| f(i / d, i % d)).collect();
        Ok(Self { basis, data })
    }

    pub fn from_data(n: usize, kmax: usize, data: Vec<Cx<T>>) -> Result<Self> {
        let basis = ShellBasis::shared(n, kmax)?;
        let d = basis.len();
        if data.len() != d * d {
            return Err(Error::LengthMismatch { expected: d * d, got: data.len() });
        }
        Ok(Self { basis, data })
    }

    /// `m(H)` for a diagonal multiplier.
    pub fn diagonal(mu: &DiagonalMultiplier<T>) -> Result<Self> {
        let basis = ShellBasis::shared(mu.n(), mu.kmax())?;
        let b = basis.clone();
        Self::from_fn(mu.n(), mu.kmax(), move |r, c| if r == c { mu.value(b.degree(r)) } else { cx(T::zero(), T::zero()) })
    }

    pub fn basis(&self) -> &Arc<ShellBasis> {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn kmax(&self) -> usize {
        self.basis.kmax()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn data(&self) -> &[Cx<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Cx<T> {
        self.data[r * self.dim() + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Cx<T>) {
        let d = self.dim();
        self.data[r * d + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Cx<T>] {
        let d = self.dim();
        &self.data[r * d..(r + 1) * d]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: other.n() });
        }
        if self.dim() != other.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let d = self.dim();
        let mut data = vec![cx(T::zero(), T::zero()); d * d];
        data.par_chunks_mut(d).enumerate().for_each(|(r, out)| {
            for (k, &a) in self.row(r).iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for (o, &b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        });
        Ok(Self { basis: self.basis.clone(), data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { basis: self.basis.clone(), data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { basis: self.basis.clone(), data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self { basis: self.basis.clone(), data: self.data.iter().map(|&a| a * s).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let data = (0..d * d).into_par_iter().map(|i| self.get(i % d, i / d).conj()).collect();
        Self { basis: self.basis.clone(), data }
    }

    /// `AB − BA`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self> {
        a.matmul(b)?.sub(&b.matmul(a)?)
    }

    /// `M·μ(H)`: column `ν` scaled by `μ_{|ν|}`.
    pub fn mul_diagonal_right(&self, mu: &DiagonalMultiplier<T>) -> Result<Self> {
        self.check_multiplier(mu)?;
        let d = self.dim();
        let b = &self.basis;
        let data = self.data.iter().enumerate().map(|(i, &v)| v * mu.value(b.degree(i % d))).collect();
        Ok(Self { basis: self.basis.clone(), data })
    }

    /// `μ(H)·M`: row `μ` scaled by `μ_{|μ|}`.
    pub fn mul_diagonal_left(&self, mu: &DiagonalMultiplier<T>) -> Result<Self> {
        self.check_multiplier(mu)?;
        let d = self.dim();
        let b = &self.basis;
        let data = self.data.iter().enumerate().map(|(i, &v)| v * mu.value(b.degree(i / d))).collect();
        Ok(Self { basis: self.basis.clone(), data })
    }

    fn check_multiplier(&self, mu: &DiagonalMultiplier<T>) -> Result<()> {
        if mu.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: mu.n() });
        }
        if mu.kmax() != self.kmax() {
            return Err(Error::LengthMismatch { expected: self.kmax() + 1, got: mu.values().len() });
        }
        Ok(())
    }

    /// `‖M‖_HS = (Σ|M_{μν}|²)^{1/2}`.
    pub fn hs_norm(&self) -> T {
        self.data.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
    }

    /// `‖Mχ_N‖²_HS` as a sum of squared column norms over `χ_N`.
    pub fn hs_norm_sq_block(&self, big_n: u32) -> T {
        let d = self.dim();
        let n = self.n();
        (0..d)
            .filter(|&c| in_dyadic_block(2 * self.basis.degree(c) + n, big_n))
            .map(|c| (0..d).map(|r| self.get(r, c).norm_sqr()).sum::<T>())
            .sum()
    }

    /// Largest `|M_{μν}|`.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Largest `|M_{μν}|` with both `|μ|, |ν| ≤ shell`.
    pub fn max_abs_interior(&self, shell: usize) -> T {
        let end = self.interior_end(shell);
        (0..end)
            .flat_map(|r| (0..end).map(move |c| (r, c)))
            .map(|(r, c)| self.get(r, c).norm())
            .fold(T::zero(), T::max)
    }

    /// Number of basis functions in shells `0..=shell`.
    pub fn interior_end(&self, shell: usize) -> usize {
        if shell >= self.kmax() {
            self.dim()
        } else {
            self.basis.shell_range(shell).end
        }
    }

    /// Entries with row and column in shells `0..=shell`, row-major.
    pub fn interior_entries(&self, shell: usize) -> Vec<Cx<T>> {
        let end = self.interior_end(shell);
        (0..end).flat_map(|r| self.row(r)[..end].to_vec()).collect()
    }

    /// `M` applied to a coefficient vector.
    pub fn apply(&self, c: &SpectralField<T>) -> Result<SpectralField<T>> {
        if c.n() != self.n() || c.kmax() != self.kmax() {
            return Err(Error::LengthMismatch { expected: self.dim(), got: c.coeffs().len() });
        }
        let out = (0..self.dim())
            .into_par_iter()
            .map(|r| self.row(r).iter().zip(c.coeffs()).map(|(a, b)| a * b).sum())
            .collect();
        SpectralField::new(self.n(), self.kmax(), out)
    }

    /// Largest singular value by power iteration on `M*M`.
    pub fn spectral_norm(&self) -> T {
        let d = self.dim();
        let adj = self.adjoint();
        // deterministic, generic start vector
        let mut v: Vec<Cx<T>> = (0..d).map(|i| cx(T::one() + T::lit(0.37 * ((i * 7919) % 97) as f64 / 97.0), T::lit(0.01))).collect();
        let mut est = T::zero();
        for _ in 0..2000 {
            let nv = v.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
            if nv == T::zero() {
                return T::zero();
            }
            v.iter_mut().for_each(|a| *a = *a / nv);
            let w = mat_vec(self, &v);
            let u = mat_vec(&adj, &w);
            let next = w.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
            let done = (next - est).abs() <= T::epsilon() * T::lit(16.0) * next;
            est = next;
            v = u;
            if done {
                break;
            }
        }
        est
    }

    /// Flat binary layout: little-endian `u64` n, kmax, dim, then `dim²`
    /// pairs of `f64` (re, im), row-major.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        for v in [self.n() as u64, self.kmax() as u64, self.dim() as u64] {
            w.write_all(&v.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.data.len() * 16);
        for v in &self.data {
            buf.extend_from_slice(&v.re.as_f64().to_le_bytes());
            buf.extend_from_slice(&v.im.as_f64().to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut header = [0u8; 24];
        r.read_exact(&mut header).map_err(|e| Error::Format(format!("truncated header: {e}")))?;
        let word = |i: usize| u64::from_le_bytes(header[8 * i..8 * i + 8].try_into().expect("eight bytes")) as usize;
        let (n, kmax, dim) = (word(0), word(1), word(2));
        let basis = ShellBasis::shared(n, kmax).map_err(|e| Error::Format(e.to_string()))?;
        if basis.len() != dim {
            return Err(Error::Format(format!("dimension {dim} does not match basis size {}", basis.len())));
        }
        let mut bytes = vec![0u8; dim * dim * 16];
        r.read_exact(&mut bytes).map_err(|e| Error::Format(format!("truncated body: {e}")))?;
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after matrix body".into()));
        }
        let f = |i: usize| f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("eight bytes"));
        let data = (0..dim * dim).map(|i| cx(T::lit(f(2 * i)), T::lit(f(2 * i + 1)))).collect();
        Ok(Self { basis, data })
    }
}

fn mat_vec<T: Real>(m: &OperatorMatrix<T>, v: &[Cx<T>]) -> Vec<Cx<T>> {
    (0..m.dim())
        .into_par_iter()
        .map(|r| m.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}
