use hermitia::basis::{hs_shell_norm_sq, shell_size, QuadratureGrid, ShellBasis};
use hermitia::spectral::{apply_diagonal, hermite_operator_apply, synthesize, t_j, DiagonalMultiplier, SpectralField};
use num_complex::Complex64;
use rand::Rng;

use super::Context;
use crate::error::{invalid, Result};
use crate::report::{num, Check, Output, Table};

fn random_coeff(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `Σ_{j≤N} S_j` against `e^{−t_{N+1}H}`, per `N`.
pub fn identity_partition(ctx: &mut Context) -> Result<Output> {
    let cfg = ctx.cfg;
    let n = cfg.dimension(1);
    let kmax = cfg.kmax.unwrap_or(64);
    let ns = cfg.ns.clone().unwrap_or_else(|| (0..=10).collect());
    let tol = cfg.tolerance.unwrap_or(1e-14);
    if let Some(&big) = ns.iter().find(|&&b| b as usize > kmax) {
        return Err(invalid(format!("N = {big} exceeds kmax = {kmax}")));
    }

    let mut table = Table::new(&["big_n", "t", "coefficient_error", "relative_l2_error", "bound"]);
    let mut worst_coeff = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for &big in &ns {
        let t = t_j::<f64>(big + 1);
        let sum = DiagonalMultiplier::<f64>::partial_sum(n, kmax, big)?;
        let coeff = sum.max_diff(&DiagonalMultiplier::heat(n, kmax, t)?)?;
        let f = SpectralField::from_fn(n, kmax, |a| {
            if a.degree() <= big as usize {
                random_coeff(&mut ctx.rng)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })?;
        let rel = apply_diagonal(&sum, &f)?.sub(&f)?.norm() / f.norm();
        let bound = t * (2 * big as usize + n) as f64;
        worst_coeff = worst_coeff.max(coeff);
        worst_ratio = worst_ratio.max(rel / bound);
        table.push(vec![big.to_string(), num(t), num(coeff), num(rel), num(bound)]);
    }

    let mut out = Output::new(table);
    out.param("n", n);
    out.param("kmax", kmax);
    out.param("ns", &ns);
    out.domain("coefficients", format!("shells 0..={kmax}"));
    out.domain("test_functions", "random coefficients on shells 0..=N");
    out.checks.push(Check::at_most("max coefficient error", worst_coeff, tol));
    out.checks.push(Check::at_most("max relative error / t_{N+1}(2N+n)", worst_ratio, 1.0));
    Ok(out)
}

/// Parseval on random band-limited fields and `HΦ_α = (2|α|+n)Φ_α`.
pub fn parseval(ctx: &mut Context) -> Result<Output> {
    let cfg = ctx.cfg;
    let n = cfg.dimension(1);
    let kmax = cfg.kmax.unwrap_or(20);
    let q = cfg.q.unwrap_or(kmax + 2);
    let trials = cfg.samples.unwrap_or(5);
    let tol = cfg.tolerance.unwrap_or(1e-10);
    if q < kmax + 1 {
        return Err(invalid(format!("q = {q} cannot integrate shells up to {kmax}; use q ≥ kmax + 1")));
    }

    let mut table = Table::new(&["trial", "norm_sq", "coeff_sq", "parseval_gap"]);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let f = SpectralField::from_fn(n, kmax, |_| random_coeff(&mut ctx.rng))?;
        let samples = synthesize(&f, QuadratureGrid::<f64>::tensor(q, n)?)?;
        let norm_sq = samples.l2_norm().powi(2);
        let coeff_sq: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let gap = (norm_sq - coeff_sq).abs();
        worst = worst.max(gap);
        table.push(vec![trial.to_string(), num(norm_sq), num(coeff_sq), num(gap)]);
    }

    let basis = ShellBasis::shared(n, kmax)?;
    let mut eigen = 0.0f64;
    for alpha in basis.indices() {
        let unit = SpectralField::unit(kmax, alpha)?;
        let h = hermite_operator_apply(&unit)?;
        let expect = unit.retruncate(h.kmax())?.scale(Complex64::new((2 * alpha.degree() + n) as f64, 0.0));
        eigen = eigen.max(h.sub(&expect)?.max_abs());
    }

    let mut out = Output::new(table);
    out.param("n", n);
    out.param("kmax", kmax);
    out.param("q", q);
    out.param("trials", trials);
    out.domain("quadrature", format!("tensor Gauss-Hermite, {q} nodes per axis"));
    out.domain("eigenrelation", format!("all {} indices with |α| ≤ {kmax}", basis.len()));
    out.checks.push(Check::at_most("max Parseval gap", worst, tol));
    out.checks.push(Check::at_most("max eigenrelation error", eigen, 1e-9));
    Ok(out)
}

/// `∫∫|Φ_k(x,y)|² dx dy` against the shell dimension.
pub fn hs_shell(ctx: &mut Context) -> Result<Output> {
    let cfg = ctx.cfg;
    let n = cfg.dimension(2);
    let kmax = cfg.kmax.unwrap_or(8);
    let q = cfg.q.unwrap_or(24);
    let tol = cfg.tolerance.unwrap_or(1e-6);

    let mut table = Table::new(&["k", "value", "expected", "relative_error"]);
    let mut worst = 0.0f64;
    for k in 0..=kmax {
        let v: f64 = hs_shell_norm_sq(k, n, q)?;
        let expected = shell_size(n, k) as f64;
        let rel = (v - expected).abs() / expected;
        worst = worst.max(rel);
        table.push(vec![k.to_string(), num(v), num(expected), num(rel)]);
    }

    let mut out = Output::new(table);
    out.param("n", n);
    out.param("kmax", kmax);
    out.param("q", q);
    out.domain("quadrature", format!("Gauss-Hermite, {q} nodes per axis"));
    out.checks.push(Check::at_most("max relative error", worst, tol));
    Ok(out)
}
