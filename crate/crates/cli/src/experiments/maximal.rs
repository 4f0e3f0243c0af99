use hermitia::basis::UniformGrid;
use hermitia::maxweights::{ap_characteristic, thm31_ratio, weighted_operator_ratio, CubeFamily, Weight, WeightSpec};
use hermitia::symbol::{SymbolSpec, XFactor};
use rand::Rng;

use super::{spectral_of, spread, Context};
use crate::config::TestFunction;
use crate::error::{invalid, Result};
use crate::report::{num, Check, Output, Table};

/// Ratio of `Λ^♯(T_N f)` to `Λ₂f + Λ(Λ₂f)` across `N`.
pub fn sharp_maximal(ctx: &mut Context) -> Result<Output> {
    let cfg = ctx.cfg;
    let n = cfg.dimension(1);
    let kmax = cfg.kmax.unwrap_or(64);
    let spec = cfg.symbol.clone().unwrap_or(SymbolSpec::MihlinIt { s: 1.0 });
    let half_width = cfg.half_width.unwrap_or(8.0);
    let depth = cfg.depth.unwrap_or(8);
    let ns = cfg.ns.clone().unwrap_or_else(|| (3..=7).collect());
    let functions = cfg
        .functions
        .clone()
        .unwrap_or_else(|| vec![TestFunction::Gaussian, TestFunction::Oscillatory { omega: 2.0 }]);
    let spread_max = cfg.tolerance.unwrap_or(1.5);
    if (depth as usize) * n > 24 {
        return Err(invalid(format!("depth {depth} in dimension {n} exceeds 2^24 grid points")));
    }

    let m = ctx.cache.matrix(n, kmax, &spec)?;
    let cubes = CubeFamily::new(n, half_width, depth)?;
    let mut table = Table::new(&["function", "big_n", "ratio", "argmax", "sharp_max"]);
    let mut out = Output::new(Table::default());
    for f in &functions {
        let field = spectral_of(n, kmax, |x| f.eval(x))?;
        let mut ratios = Vec::new();
        for &big in &ns {
            let r = thm31_ratio(&m, &field, big, &cubes)?;
            table.push(vec![f.label(), big.to_string(), num(r.ratio), r.argmax.to_string(), num(r.sharp_max)]);
            ratios.push(r.ratio);
        }
        out.checks.push(Check::at_most(format!("{}: spread over N", f.label()), spread(&ratios), spread_max));
    }
    out.table = table;
    out.param("n", n);
    out.param("kmax", kmax);
    out.param("symbol", &spec);
    out.param("ns", &ns);
    out.param("functions", &functions);
    out.domain("grid", format!("[-{half_width}, {half_width}]^{n}, {} points per axis", 1usize << depth));
    out.domain("cubes", format!("dyadic levels 0..={depth} and centred cubes of radius 0, 1, 2, 4, ... cells"));
    Ok(out)
}

/// Weighted `L^p` operator ratio across truncations and `A_p` characteristic
/// across cube depths.
pub fn weighted_sweep(ctx: &mut Context) -> Result<Output> {
    let cfg = ctx.cfg;
    let n = cfg.require_dimension(1, "weighted-sweep")?;
    let spec = cfg.symbol.clone().unwrap_or(SymbolSpec::Separable {
        b: XFactor::Lorentz { scale: 1.0 },
        m0: Box::new(SymbolSpec::MihlinIt { s: 1.0 }),
    });
    let weight = cfg.weight.clone().unwrap_or(WeightSpec::Power { a: 0.5 });
    let p = cfg.p.unwrap_or(4.0);
    let ap = cfg.ap.unwrap_or(2.0);
    let kmaxes = cfg.kmax_list.clone().unwrap_or_else(|| vec![32, 64]);
    let family = cfg.samples.unwrap_or(10);
    let half_width = cfg.half_width.unwrap_or(8.0);
    let points = cfg.points.unwrap_or(256);
    let depths = cfg.depths.clone().unwrap_or_else(|| vec![4, 8]);
    let change_max = cfg.tolerance.unwrap_or(0.25);
    if kmaxes.len() < 2 || depths.len() < 2 {
        return Err(invalid("kmax_list and depths need at least two entries"));
    }

    let symbol = spec.build::<f64>(n, *kmaxes.iter().max().expect("nonempty"))?;
    let grid = UniformGrid::new(n, half_width, points)?;
    let w = Weight::from_spec(&weight, grid)?;
    let mut table = Table::new(&["quantity", "function", "parameter", "value"]);
    let mut worst = 0.0f64;
    for i in 0..family {
        let (c0, s, a1, a2) = (
            ctx.rng.gen_range(-1.5..1.5),
            ctx.rng.gen_range(0.7..1.5),
            ctx.rng.gen_range(-1.0..1.0),
            ctx.rng.gen_range(-0.5..0.5),
        );
        let f = move |x: &[f64]| (1.0 + a1 * x[0] + a2 * x[0] * x[0]) * (-(x[0] - c0).powi(2) / (2.0 * s * s)).exp();
        let mut ratios = Vec::new();
        for &k in &kmaxes {
            let r = weighted_operator_ratio(&symbol, &spectral_of(n, k, f)?, &w, p)?;
            table.push(vec!["operator_ratio".into(), i.to_string(), k.to_string(), num(r)]);
            ratios.push(r);
        }
        let base = ratios[0];
        worst = ratios.iter().fold(worst, |acc, r| acc.max((r / base - 1.0).abs()));
    }
    let mut chars = Vec::new();
    for &d in &depths {
        let cubes = CubeFamily::new(n, half_width, d)?;
        let a = ap_characteristic(&Weight::from_spec(&weight, cubes.grid().clone())?, ap, &cubes)?;
        table.push(vec!["ap_characteristic".into(), String::new(), d.to_string(), num(a)]);
        chars.push(a);
    }
    let growth = chars.last().expect("nonempty") / chars[0];

    let mut out = Output::new(table);
    out.param("n", n);
    out.param("symbol", &spec);
    out.param("weight", &weight);
    out.param("p", p);
    out.param("ap", ap);
    out.param("kmax_list", &kmaxes);
    out.param("family_size", family);
    out.param("depths", &depths);
    out.domain("norm_grid", format!("[-{half_width}, {half_width}], {points} points"));
    out.domain("cube_grids", format!("[-{half_width}, {half_width}], 2^D points for D in {depths:?}"));
    out.domain("family", "(1 + a1 x + a2 x^2) exp(-(x-c)^2 / (2 s^2)), c in [-1.5,1.5], s in [0.7,1.5]");
    if w.excluded_count() > 0 {
        out.warnings.push(format!("{} grid points excluded where the weight is zero or infinite", w.excluded_count()));
    }
    out.diag("ap_growth", growth);
    out.checks.push(Check::at_most("max relative change across kmax", worst, change_max));
    out.checks.push(Check::at_most("A_p growth under depth refinement", growth, 1.2));
    Ok(out)
}
