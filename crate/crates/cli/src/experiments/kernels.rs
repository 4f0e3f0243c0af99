use hermitia::kernellab::{decay_sweep, hormander_check, sample_triples, DecayOptions, Estimate};
use hermitia::symbol::SymbolSpec;

use super::{range, spread, Context};
use crate::config::EstimateSpec;
use crate::error::Result;
use crate::report::{num, opt, Check, Output, Table};

fn default_estimates() -> Vec<EstimateSpec> {
    [(Estimate::MomentL2, 0), (Estimate::MomentL2, 1), (Estimate::MomentSup, 0), (Estimate::MomentSup, 1), (Estimate::MomentSup, 2)]
        .into_iter()
        .map(|(estimate, l)| EstimateSpec { estimate, l })
        .collect()
}

/// Decay of the pieces `M_j` against `t_{j+1}`.
pub fn decay(ctx: &mut Context) -> Result<Output> {
    let cfg = ctx.cfg;
    let n = cfg.dimension(1);
    let kmax = cfg.kmax.unwrap_or(2048);
    let spec = cfg.symbol.clone().unwrap_or(SymbolSpec::MihlinIt { s: 1.0 });
    let estimates = cfg.estimates.clone().unwrap_or_else(default_estimates);
    let slope_tol = cfg.tolerance.unwrap_or(0.3);
    let defaults = DecayOptions::default();
    let opts = DecayOptions {
        js: cfg.js.clone().unwrap_or(defaults.js),
        tail_threshold: cfg.tail_threshold.unwrap_or(defaults.tail_threshold),
        x_window: cfg.x_window.unwrap_or(defaults.x_window),
    };

    let m = ctx.cache.matrix(n, kmax, &spec)?;
    let req: Vec<(Estimate, u32)> = estimates.iter().map(|e| (e.estimate, e.l)).collect();
    let series = decay_sweep(&m, &req, &opts)?;

    let mut table = Table::new(&["estimate", "l", "j", "t", "value", "slope_so_far"]);
    let mut out_checks = Vec::new();
    let mut fits = Vec::new();
    let mut warnings = Vec::new();
    for s in &series {
        for r in s.rows() {
            table.push(vec![r.estimate, r.l.to_string(), r.j.to_string(), num(r.t), num(r.value), opt(r.slope_so_far)]);
        }
        let label = format!("{} l={}", s.estimate.name(), s.l);
        if let Some(f) = s.fit {
            out_checks.push(Check::at_most(format!("{label}: |slope - predicted|"), (f.slope - s.predicted_slope).abs(), slope_tol));
            out_checks.push(Check::at_most(format!("{label}: max fit residual (log2)"), f.max_residual, 0.1));
        }
        if !s.excluded.is_empty() {
            warnings.push(format!("{label}: j excluded by truncation: {:?}", s.excluded));
        }
        warnings.extend(s.warnings.iter().map(|w| format!("{label}: {w}")));
        fits.push(serde_json::json!({
            "estimate": s.estimate,
            "l": s.l,
            "predicted_slope": s.predicted_slope,
            "fit": s.fit,
            "excluded": s.excluded,
        }));
    }
    warnings.dedup();

    let mut out = Output::new(table);
    out.param("n", n);
    out.param("kmax", kmax);
    out.param("symbol", &spec);
    out.param("js", &opts.js);
    out.param("tail_threshold", opts.tail_threshold);
    out.param("x_window", opts.x_window);
    out.param("estimates", &estimates);
    let (lo, hi) = range(&opts.js);
    out.domain("x", format!("|x_i| <= sqrt({} / t_(j+1)) + 4 for j in {lo}..={hi}", opts.x_window));
    out.domain("y", "uniform kernel grid from the truncation");
    out.diag("fits", fits);
    out.checks = out_checks;
    out.warnings = warnings;
    Ok(out)
}

/// Hörmander smoothness of `K_N` over sampled admissible triples.
pub fn hormander(ctx: &mut Context) -> Result<Output> {
    let cfg = ctx.cfg;
    let n = cfg.dimension(1);
    let kmax = cfg.kmax.unwrap_or(1024);
    let spec = cfg.symbol.clone().unwrap_or(SymbolSpec::MihlinIt { s: 1.0 });
    let diag_spec = cfg.diagnostic_symbol.clone().unwrap_or(SymbolSpec::Alternating);
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![4, 5, 6]);
    let count = cfg.samples.unwrap_or(2000);
    let extent = cfg.extent.unwrap_or(6.0);
    let (r_min, r_max) = (cfg.r_min.unwrap_or(1e-3), cfg.r_max.unwrap_or(1.0));
    let spread_max = cfg.tolerance.unwrap_or(3.0);

    let triples = sample_triples(n, count, extent, r_min, r_max, &mut ctx.rng)?;
    let mut table = Table::new(&["role", "big_n", "sup", "argmax", "band", "tail"]);
    let mut sups = Vec::new();
    let mut diag_sups = Vec::new();
    for (role, s, acc) in [("primary", &spec, &mut sups), ("diagnostic", &diag_spec, &mut diag_sups)] {
        let m = ctx.cache.matrix(n, kmax, s)?;
        for r in hormander_check(&m, &ns, &triples)? {
            table.push(vec![role.into(), r.big_n.to_string(), num(r.sup), r.argmax.to_string(), r.band.to_string(), num(r.tail)]);
            acc.push(r.sup);
        }
    }

    let mut out = Output::new(table);
    out.param("n", n);
    out.param("kmax", kmax);
    out.param("symbol", &spec);
    out.param("diagnostic_symbol", &diag_spec);
    out.param("ns", &ns);
    out.param("samples", count);
    out.domain("y", format!("uniform in [-{extent}, {extent}]^{n}"));
    out.domain("|y-z|", format!("log-uniform in [{r_min}, {r_max}]"));
    out.domain("x", format!("uniform in [-{extent}, {extent}]^{n} with |x-z|, |x-y| > 2|y-z|"));
    out.diag("primary_spread", spread(&sups));
    out.diag("diagnostic_spread", spread(&diag_sups));
    out.checks.push(Check::at_most("spread of sup over N", spread(&sups), spread_max));
    Ok(out)
}
