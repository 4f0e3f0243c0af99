use std::sync::Arc;

use hermitia::weylcheck::{adjoint_check, laguerre_coeff_roundtrip, special_hermite_projection, WeylQuadrature};
use num_complex::Complex64;

use super::Context;
use crate::error::{invalid, Result};
use crate::report::{num, Check, Output, Table};

/// Projection constant, Laguerre round trip and adjoint rule in phase space.
pub fn weyl(ctx: &mut Context) -> Result<Output> {
    let cfg = ctx.cfg;
    cfg.require_dimension(1, "weyl")?;
    let kmax = cfg.kmax.unwrap_or(5);
    let shells = cfg.shells.clone().unwrap_or_else(|| (0..=3).collect());
    let radius = cfg.radius.unwrap_or(12.0);
    let points = cfg.points.unwrap_or(160);
    let tol = cfg.tolerance.unwrap_or(1e-4);
    if let Some(&k) = shells.iter().find(|&&k| k > kmax) {
        return Err(invalid(format!("shell {k} exceeds kmax = {kmax}")));
    }
    let quad = WeylQuadrature::new(radius, points)?;

    let mut table = Table::new(&["quantity", "k", "value"]);
    let mut out = Output::new(Table::default());
    let mut leak = 0.0f64;
    let mut constants = Vec::new();
    for &k in &shells {
        let r = special_hermite_projection(k, kmax, &quad)?;
        table.push(vec!["projection_constant".into(), k.to_string(), num(r.constant)]);
        table.push(vec!["projection_leakage".into(), k.to_string(), num(r.leakage)]);
        table.push(vec!["projection_boundary".into(), k.to_string(), num(r.boundary)]);
        if r.truncated {
            out.warnings.push(format!("shell {k}: quadrature boundary term {:.1e} above 1e-12", r.boundary));
        }
        leak = leak.max(r.leakage);
        constants.push((r.constant, r.printed_constant, r.ratio_to_printed));
    }
    let c0 = constants[0].0;
    let consistency = constants.iter().map(|c| (c.0 / c0 - 1.0).abs()).fold(0.0, f64::max);

    let lq = WeylQuadrature::for_laguerre(16);
    let coeffs: Vec<Complex64> = (0..17).map(|k| Complex64::new((-(k as f64) / 4.0).exp(), 0.1 * k as f64)).collect();
    let rt = laguerre_coeff_roundtrip(&coeffs, &lq)?;
    table.push(vec!["laguerre_roundtrip".into(), String::new(), num(rt.residual)]);

    let a = Arc::new(|x: f64, r: f64| Complex64::new((-x * x).exp() * (-r * r / 4.0).exp(), 0.0));
    let adj = adjoint_check(a, 6, &WeylQuadrature::default())?;
    table.push(vec!["adjoint_x_plus_v".into(), String::new(), num(adj.residual)]);
    table.push(vec!["adjoint_x_minus_v".into(), String::new(), num(adj.minus_residual)]);

    out.table = table;
    out.param("kmax", kmax);
    out.param("shells", &shells);
    out.param("radius", radius);
    out.param("points", points);
    out.domain("projection", format!("trapezoid on [-{radius}, {radius}]^2, {points} points per axis"));
    out.domain("roundtrip", format!("radius {}, {} points", lq.radius, lq.points));
    out.domain("adjoint", "default quadrature, shells 0..=6");
    out.diag("measured_constant", c0);
    out.diag("printed_constant", constants[0].1);
    out.diag("measured_over_printed", constants[0].2);
    out.diag("laguerre_bare_scale", rt.bare_scale);
    out.diag("adjoint_x_minus_v", adj.minus_residual);
    out.checks.push(Check::at_most("projection leakage", leak, 1e-5));
    out.checks.push(Check::at_most("projection constant spread across k", consistency, 0.01));
    out.checks.push(Check::at_most("Laguerre coefficient round trip", rt.residual, tol));
    out.checks.push(Check::at_most("adjoint residual (x+v form)", adj.residual, tol));
    Ok(out)
}
