use serde::{Deserialize, Serialize};

use super::{ladder, nc_derivative, Direction, NcKind, OperatorMatrix};
use crate::basis::MultiIndex;
use crate::error::{Error, Result};
use crate::fit::complex_lstsq;
use crate::scalar::{Cx, Real};
use crate::spectral::DiagonalMultiplier;
use crate::symbol::{dpm_eigen, EigenFn, Sign};

/// One fitted term `C·(A*)^{raise} A^{lower} (D_−^{dminus} D_+^{dplus} φ)(H)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub alpha: Vec<usize>,
    pub raise: Vec<usize>,
    pub lower: Vec<usize>,
    pub dminus: usize,
    pub dplus: usize,
    pub constant: [f64; 2],
}

/// Result of fitting `δ^γ δ̄^ρ φ(H)` against its shift-form expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MauceriFit {
    pub gamma: Vec<usize>,
    pub rho: Vec<usize>,
    pub terms: Vec<ExpansionTerm>,
    /// Relative Frobenius residual on the compared block.
    pub residual: f64,
    /// Rows and columns in shells `0..=interior_shell` are compared.
    pub interior_shell: usize,
}

/// Multi-indices `α` with `α ≤ γ ≤ ρ + α`.
fn admissible_alphas(gamma: &MultiIndex, rho: &MultiIndex) -> Vec<MultiIndex> {
    gamma
        .box_below()
        .into_iter()
        .filter(|a| gamma.checked_sub(a).is_some_and(|g| g.le(rho)))
        .collect()
}

fn ladder_power<T: Real>(n: usize, kmax: usize, powers: &MultiIndex, dir: Direction) -> Result<OperatorMatrix<T>> {
    let mut acc = OperatorMatrix::identity(n, kmax)?;
    for axis in 0..n {
        let step = ladder(n, kmax, axis, dir)?;
        for _ in 0..powers.get(axis) {
            acc = step.matmul(&acc)?;
        }
    }
    Ok(acc)
}

/// Computes `δ^γ δ̄^ρ φ(H)` by commutators and fits it, over the admissible
/// `α`, as `Σ_α C_α (A*)^{ρ+α−γ} A^α (D_−^{|α|} D_+^{|ρ|}φ)(H)`.
///
/// Constants are fitted, not assumed; the relative residual on shells
/// `≤ K_max − |γ| − |ρ|` is returned.
pub fn mauceri_fit<T: Real>(
    phi: EigenFn<T>,
    gamma: &MultiIndex,
    rho: &MultiIndex,
    kmax: usize,
) -> Result<MauceriFit> {
    let n = gamma.dim();
    if rho.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rho.dim() });
    }
    let order = gamma.degree() + rho.degree();
    if order > 2 {
        return Err(Error::InvalidArgument(format!("expansion checks cover total order ≤ 2, got {order}")));
    }
    if order >= kmax {
        return Err(Error::InvalidArgument(format!("truncation {kmax} leaves no interior shells at order {order}")));
    }
    let base = {
        let f = phi.clone();
        OperatorMatrix::diagonal(&DiagonalMultiplier::from_eigen(n, kmax, move |l| f(l))?)?
    };
    let mut lhs = base;
    for axis in 0..n {
        for _ in 0..rho.get(axis) {
            lhs = nc_derivative(&lhs, axis, NcKind::DeltaBar)?;
        }
    }
    for axis in 0..n {
        for _ in 0..gamma.get(axis) {
            lhs = nc_derivative(&lhs, axis, NcKind::Delta)?;
        }
    }
    let interior = kmax - order;
    let alphas = admissible_alphas(gamma, rho);
    let mut columns = Vec::with_capacity(alphas.len());
    let mut shapes = Vec::with_capacity(alphas.len());
    for alpha in &alphas {
        let raise = rho.add(alpha).checked_sub(gamma).expect("admissible α keeps ρ + α − γ ≥ 0");
        let dminus = alpha.degree();
        let dplus = rho.degree();
        let g = dpm_eigen(dpm_eigen(phi.clone(), Sign::Plus, dplus), Sign::Minus, dminus);
        let diag = OperatorMatrix::diagonal(&DiagonalMultiplier::from_eigen(n, kmax, move |l| g(l))?)?;
        let term = ladder_power::<T>(n, kmax, &raise, Direction::Raise)?
            .matmul(&ladder_power(n, kmax, alpha, Direction::Lower)?)?
            .matmul(&diag)?;
        columns.push(term.interior_entries(interior));
        shapes.push((alpha.clone(), raise, dminus, dplus));
    }
    let fit = complex_lstsq(&columns, &lhs.interior_entries(interior))?;
    let terms = shapes
        .into_iter()
        .zip(&fit.coeffs)
        .map(|((alpha, raise, dminus, dplus), c): ((MultiIndex, MultiIndex, usize, usize), &Cx<T>)| ExpansionTerm {
            lower: alpha.components().to_vec(),
            alpha: alpha.components().to_vec(),
            raise: raise.components().to_vec(),
            dminus,
            dplus,
            constant: [c.re.as_f64(), c.im.as_f64()],
        })
        .collect();
    Ok(MauceriFit {
        gamma: gamma.components().to_vec(),
        rho: rho.components().to_vec(),
        terms,
        residual: fit.relative_residual().as_f64(),
        interior_shell: interior,
    })
}

/// [`mauceri_fit`] with a structural tolerance.
pub fn mauceri_expand_check<T: Real>(
    phi: EigenFn<T>,
    gamma: &MultiIndex,
    rho: &MultiIndex,
    kmax: usize,
    tolerance: f64,
) -> Result<MauceriFit> {
    let fit = mauceri_fit(phi, gamma, rho, kmax)?;
    if !(fit.residual <= tolerance) {
        return Err(Error::Structure { residual: fit.residual, tolerance });
    }
    Ok(fit)
}
