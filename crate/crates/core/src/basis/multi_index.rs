use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIMENSION: usize = 3;

pub(crate) fn check_dimension(n: usize) -> Result<()> {
    if (1..=MAX_DIMENSION).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// Multi-index `α ∈ ℕⁿ` labelling the tensor Hermite function `Φ_α`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("multi-index needs at least one component".into()));
        }
        Ok(Self(components))
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n.max(1)])
    }

    /// Unit vector `e_axis`.
    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n.max(1)];
        v[axis] = 1;
        Self(v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = Σ α_i`.
    #[inline]
    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    #[inline]
    pub fn components(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn get(&self, axis: usize) -> usize {
        self.0[axis]
    }

    /// `α ± e_axis`, `None` when lowering a zero component.
    pub fn shifted(&self, axis: usize, up: bool) -> Option<Self> {
        let mut v = self.0.clone();
        if up {
            v[axis] += 1;
        } else {
            v[axis] = v[axis].checked_sub(1)?;
        }
        Some(Self(v))
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other` if nonnegative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Self)
    }

    /// Colexicographic comparison: the last differing component decides.
    pub fn colex_cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }

    /// All `β` with `0 ≤ β ≤ self` componentwise.
    pub fn box_below(&self) -> Vec<Self> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &top in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=top).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(Self).collect()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of dimension `n` with degree exactly `k`, in colex order.
pub fn shell(n: usize, k: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == n {
            prefix.push(k);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for c in 0..=k {
            prefix.push(c);
            rec(n, k - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n.max(1), k, &mut Vec::with_capacity(n), &mut out);
    out.sort_by(|a, b| a.colex_cmp(b));
    out
}

/// Number of multi-indices in shell `k`: `(k+n−1)! / (k! (n−1)!)`.
pub fn shell_size(n: usize, k: usize) -> usize {
    // binomial(k + n − 1, n − 1)
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..n {
        num *= (k + i) as u128;
        den *= i as u128;
    }
    (num / den) as usize
}

/// The truncated Hermite basis `{Φ_α : |α| ≤ kmax}` in shell order, colex
/// within each shell, with precomputed ladder neighbours.
#[derive(Debug)]
pub struct ShellBasis {
    n: usize,
    kmax: usize,
    indices: Vec<MultiIndex>,
    degrees: Vec<usize>,
    shell_start: Vec<usize>,
    lookup: HashMap<MultiIndex, usize>,
    raise: Vec<Vec<Option<usize>>>,
    lower: Vec<Vec<Option<usize>>>,
}

impl PartialEq for ShellBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.kmax == other.kmax
    }
}

impl Eq for ShellBasis {}

type BasisCache = Mutex<HashMap<(usize, usize), Arc<ShellBasis>>>;

impl ShellBasis {
    pub fn new(n: usize, kmax: usize) -> Result<Self> {
        check_dimension(n)?;
        let mut indices = Vec::new();
        let mut shell_start = Vec::with_capacity(kmax + 2);
        for k in 0..=kmax {
            shell_start.push(indices.len());
            indices.extend(shell(n, k));
        }
        shell_start.push(indices.len());
        let degrees = indices.iter().map(MultiIndex::degree).collect();
        let lookup: HashMap<_, _> = indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let neighbour = |up: bool| {
            (0..n)
                .map(|axis| {
                    indices
                        .iter()
                        .map(|a| a.shifted(axis, up).and_then(|b| lookup.get(&b).copied()))
                        .collect()
                })
                .collect()
        };
        let raise = neighbour(true);
        let lower = neighbour(false);
        Ok(Self { n, kmax, indices, degrees, shell_start, lookup, raise, lower })
    }

    /// Process-wide cached instance for `(n, kmax)`.
    pub fn shared(n: usize, kmax: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<BasisCache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.lock().expect("basis cache poisoned").get(&(n, kmax)) {
            return Ok(b.clone());
        }
        let built = Arc::new(Self::new(n, kmax)?);
        let mut guard = cache.lock().expect("basis cache poisoned");
        Ok(guard.entry((n, kmax)).or_insert(built).clone())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn kmax(&self) -> usize {
        self.kmax
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    #[inline]
    pub fn index(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Shell `|α|` of the basis function at position `i`.
    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    /// Positions occupied by shell `k`.
    pub fn shell_range(&self, k: usize) -> std::ops::Range<usize> {
        self.shell_start[k]..self.shell_start[k + 1]
    }

    /// Position of `α + e_axis`, `None` past the truncation.
    #[inline]
    pub fn raised(&self, i: usize, axis: usize) -> Option<usize> {
        self.raise[axis][i]
    }

    /// Position of `α − e_axis`.
    #[inline]
    pub fn lowered(&self, i: usize, axis: usize) -> Option<usize> {
        self.lower[axis][i]
    }
}
