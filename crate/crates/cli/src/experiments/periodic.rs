use hermitia::basis::{GridFunction, QuadratureGrid};
use hermitia::symbol::{
    apply_pseudo_multiplier, apply_via_unitary_group, da_identity_check, periodic_to_symbol, SymbolSpec, TrigTermSpec,
    XFactor,
};
use num_complex::Complex64;
use rand::Rng;

use super::Context;
use crate::error::Result;
use crate::report::{num, Check, Output, Table};

fn random_terms(rng: &mut impl Rng, degree: i64) -> Vec<TrigTermSpec> {
    (-degree..=degree)
        .map(|freq| {
            let b = if freq % 2 == 0 {
                XFactor::Gaussian { a: rng.gen_range(0.05..0.5) }
            } else {
                XFactor::Cosine { omega: rng.gen_range(0.5..2.0), amplitude: rng.gen_range(0.0..0.5) }
            };
            TrigTermSpec { freq, coeff: [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], b }
        })
        .collect()
}

/// A periodic symbol through the Fourier-coefficient identity and the
/// unitary-group route.
pub fn periodic_pipeline(ctx: &mut Context) -> Result<Output> {
    let cfg = ctx.cfg;
    let n = cfg.require_dimension(1, "periodic-pipeline")?;
    let kmax = cfg.kmax.unwrap_or(16);
    let degree = cfg.degree.unwrap_or(4) as i64;
    let tol = cfg.tolerance.unwrap_or(1e-8);
    let spec = match &cfg.symbol {
        Some(s @ SymbolSpec::Periodic { .. }) => s.clone(),
        Some(_) => return Err(crate::error::invalid("periodic-pipeline needs a symbol of type \"periodic\"")),
        None => SymbolSpec::Periodic { terms: random_terms(&mut ctx.rng, degree), t_samples: None },
    };
    let a = spec.build_periodic::<f64>(n, kmax)?;

    let pts: Vec<Vec<f64>> = (0..13).map(|i| vec![-3.0 + 0.5 * i as f64]).collect();
    let d = a.degree() as i64;
    let mut table = Table::new(&["k", "da_residual"]);
    let mut worst = 0.0f64;
    for k in -d..=(2 * kmax as i64 + n as i64).min(d + 8) {
        let r = da_identity_check(&a, k, &pts)?;
        worst = worst.max(r);
        table.push(vec![k.to_string(), num(r)]);
    }

    let grid = QuadratureGrid::<f64>::tensor(kmax + 1, n)?;
    let f = GridFunction::sample(grid, |p| {
        Complex64::new((-p[0] * p[0] / 2.0).exp() * (1.0 + p[0]), 0.3 * p[0] * (-p[0] * p[0] / 3.0).exp())
    });
    let via_group = apply_via_unitary_group(&a, &f, kmax)?;
    let via_symbol = apply_pseudo_multiplier(&periodic_to_symbol(&a, kmax)?, &f, kmax)?;
    let scale = via_symbol.max_abs().max(f.max_abs());
    let agreement =
        via_group.values().iter().zip(via_symbol.values()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / scale;

    let mut out = Output::new(table);
    out.param("n", n);
    out.param("kmax", kmax);
    out.param("symbol", &spec);
    out.param("t_samples", a.t_samples());
    out.domain("x", "13 points on [-3, 3]");
    out.domain("f", format!("Gauss-Hermite grid with {} nodes", kmax + 1));
    out.diag("unitary_vs_symbol", agreement);
    out.checks.push(Check::at_most("max Fourier-coefficient identity residual", worst, tol));
    out.checks.push(Check::at_most("unitary group vs symbol sum", agreement, tol));
    Ok(out)
}
