//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Every criterion runs even when an earlier one fails; the test fails at the
//! end if any line says FAIL.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use hermitia::basis::{gauss_hermite, hs_shell_norm_sq, shell_size, GridFunction, MultiIndex, UniformGrid};
use hermitia::kernellab::{decay_sweep, hormander_check, sample_triples, DecayOptions, Estimate};
use hermitia::maxweights::{ap_characteristic, thm31_ratio, weighted_operator_ratio, CubeFamily, Weight};
use hermitia::opcalc::{
    derivative_matrix, ladder, lemma52_check, matrix_of_symbol, mauceri_expand_check, nc_derivative, position_matrix,
    Direction, NcKind, OperatorMatrix,
};
use hermitia::spectral::{analyze, apply_diagonal, hermite_operator_apply, synthesize, t_j, DiagonalMultiplier, SpectralField};
use hermitia::symbol::{
    apply_pseudo_multiplier, apply_via_unitary_group, da_identity_check, periodic_to_symbol, EigenFn, PeriodicSymbol,
    Symbol, TrigTerm, XFactor,
};
use hermitia::weylcheck::{adjoint_check, laguerre_coeff_roundtrip, special_hermite_projection, WeylQuadrature};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Cx = Complex<f64>;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn c(re: f64) -> Cx {
    Cx::new(re, 0.0)
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::MIN, f64::max);
    let lo = v.iter().copied().fold(f64::MAX, f64::min);
    hi / lo
}

fn partition_identity() -> Outcome {
    let (n, kmax) = (1, 64);
    let sum = DiagonalMultiplier::<f64>::partial_sum(n, kmax, 10).unwrap();
    let heat = DiagonalMultiplier::heat(n, kmax, t_j(11)).unwrap();
    let coeff_err = sum.max_diff(&heat).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = SpectralField::from_fn(n, kmax, |a| {
        if a.degree() <= 10 {
            Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            c(0.0)
        }
    })
    .unwrap();
    let g = apply_diagonal(&sum, &f).unwrap();
    let rel = g.sub(&f).unwrap().norm() / f.norm();
    let bound = t_j::<f64>(11) * 21.0;
    Outcome::new(
        coeff_err <= 1e-14 && rel <= bound,
        format!("coefficient error {coeff_err:.2e} (≤ 1e-14); relative L2 error {rel:.3e} (≤ {bound:.3e})"),
    )
}

fn parseval_and_eigen() -> Outcome {
    let mut worst_parseval = 0.0f64;
    let mut worst_eigen = 0.0f64;
    for (n, kmax) in [(1usize, 20usize), (2, 10), (3, 6)] {
        let mut rng = ChaCha8Rng::seed_from_u64(2 + n as u64);
        let f = SpectralField::from_fn(n, kmax, |_| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
        let grid = hermitia::basis::QuadratureGrid::<f64>::tensor(kmax + 2, n).unwrap();
        let samples = synthesize(&f, grid).unwrap();
        let coeff_sq: f64 = f.coeffs().iter().map(|v| v.norm_sqr()).sum();
        worst_parseval = worst_parseval.max((samples.l2_norm().powi(2) - coeff_sq).abs());
        for alpha in f.basis().indices().iter().take(40) {
            let unit = SpectralField::unit(kmax, alpha).unwrap();
            let h = hermite_operator_apply(&unit).unwrap();
            let expect = unit.retruncate(h.kmax()).unwrap().scale(c((2 * alpha.degree() + n) as f64));
            worst_eigen = worst_eigen.max(h.sub(&expect).unwrap().max_abs());
        }
    }
    Outcome::new(
        worst_parseval <= 1e-10 && worst_eigen <= 1e-9,
        format!("Parseval gap {worst_parseval:.2e} (≤ 1e-10); eigenrelation error {worst_eigen:.2e} (≤ 1e-9)"),
    )
}

fn hs_shell() -> Outcome {
    let mut worst = 0.0f64;
    let mut k3 = 0.0;
    for k in 0..=8 {
        let v: f64 = hs_shell_norm_sq(k, 2, 24).unwrap();
        let expect = shell_size(2, k) as f64;
        worst = worst.max((v - expect).abs() / expect);
        if k == 3 {
            k3 = v;
        }
    }
    Outcome::new(worst <= 1e-6, format!("n=2, k=0..8: worst relative error {worst:.2e} (≤ 1e-6); k=3 gives {k3:.9}"))
}

fn ladder_algebra() -> Outcome {
    let (n, kmax) = (2, 8);
    let interior = kmax - 2;
    let mut notes = Vec::new();
    let mut pass = true;

    // [A_j, A*_k] = 2δ_jk, x = (A + A*)/2, ∂ = (A − A*)/2
    let mut ladder_err = 0.0f64;
    for j in 0..n {
        let a = ladder::<f64>(n, kmax, j, Direction::Lower).unwrap();
        let ad = ladder::<f64>(n, kmax, j, Direction::Raise).unwrap();
        for k in 0..n {
            let bd = ladder::<f64>(n, kmax, k, Direction::Raise).unwrap();
            let comm = OperatorMatrix::commutator(&a, &bd).unwrap();
            let expect = if j == k { 2.0 } else { 0.0 };
            let id = OperatorMatrix::identity(n, kmax).unwrap().scale(c(expect));
            ladder_err = ladder_err.max(comm.sub(&id).unwrap().max_abs_interior(interior));
        }
        let x = a.add(&ad).unwrap().scale(c(0.5));
        let d = a.sub(&ad).unwrap().scale(c(0.5));
        ladder_err = ladder_err.max(x.sub(&position_matrix(n, kmax, j).unwrap()).unwrap().max_abs());
        ladder_err = ladder_err.max(d.sub(&derivative_matrix(n, kmax, j).unwrap()).unwrap().max_abs());
        ladder_err = ladder_err.max(a.adjoint().sub(&ad).unwrap().max_abs());
    }
    pass &= ladder_err <= 1e-12;
    notes.push(format!("ladder relations {ladder_err:.1e}"));

    // 2D_j = δ_j + δ̄_j as stated, with the difference form alongside
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let dim = hermitia::basis::ShellBasis::shared(n, kmax).unwrap().len();
    let data = (0..dim * dim).map(|_| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let m = OperatorMatrix::from_data(n, kmax, data).unwrap();
    let mut sum_err = 0.0f64;
    let mut diff_err = 0.0f64;
    for j in 0..n {
        let d2 = nc_derivative(&m, j, NcKind::D).unwrap().scale(c(2.0));
        let del = nc_derivative(&m, j, NcKind::Delta).unwrap();
        let bar = nc_derivative(&m, j, NcKind::DeltaBar).unwrap();
        sum_err = sum_err.max(d2.sub(&del.add(&bar).unwrap()).unwrap().max_abs_interior(interior));
        diff_err = diff_err.max(d2.sub(&bar.sub(&del).unwrap()).unwrap().max_abs_interior(interior));
    }
    let scale = m.max_abs();
    pass &= sum_err <= 1e-12 * scale;
    notes.push(format!("2D-(δ+δ̄) {sum_err:.2e} [as stated]; 2D-(δ̄-δ) {diff_err:.1e} [diagnostic]"));

    let heat: EigenFn<f64> = Arc::new(|l| c((-0.05 * l).exp()));
    // the expansion samples φ below the spectrum, so use a Mihlin function smooth on all of ℝ
    let mihlin: EigenFn<f64> = Arc::new(|l: f64| Cx::new(0.0, 0.5 * (1.0 + l * l).ln()).exp());
    let mut mauceri = 0.0f64;
    for (nn, k) in [(1usize, 30usize), (2, 10)] {
        for axis in 0..nn {
            let e = MultiIndex::unit(nn, axis);
            let z = MultiIndex::zero(nn);
            for phi in [heat.clone(), mihlin.clone()] {
                for (g, r) in [(&e, &z), (&z, &e)] {
                    match mauceri_expand_check(phi.clone(), g, r, k, 1e-9) {
                        Ok(f) => mauceri = mauceri.max(f.residual),
                        Err(_) => mauceri = f64::INFINITY,
                    }
                }
            }
        }
    }
    pass &= mauceri <= 1e-9;
    notes.push(format!("Mauceri first order {mauceri:.1e}"));

    let line = |lo: f64, hi: f64, k: usize| -> Vec<Vec<f64>> {
        (0..k).map(|i| vec![lo + (hi - lo) * i as f64 / (k - 1) as f64]).collect()
    };
    let (xs, ys) = (line(-3.0, 3.0, 9), line(-2.7, 3.3, 9));
    let families = [
        Symbol::<f64>::mihlin_it(1, 1.0).unwrap(),
        Symbol::separable(XFactor::Lorentz { scale: 1.0 }, Symbol::mihlin_it(1, 1.0).unwrap()).unwrap(),
        Symbol::separable(XFactor::Gaussian { a: 0.2 }, Symbol::heat(1, 0.05).unwrap()).unwrap(),
    ];
    let mut l52 = 0.0f64;
    for s in &families {
        match lemma52_check(s, &MultiIndex::unit(1, 0), 24, &xs, &ys, 1e-6) {
            Ok(f) => l52 = l52.max(f.residual),
            Err(_) => l52 = f64::INFINITY,
        }
    }
    pass &= l52 <= 1e-6;
    notes.push(format!("kernel expansion fits {l52:.1e}"));
    Outcome::new(pass, notes.join("; "))
}

fn decay_slopes() -> Outcome {
    let m = matrix_of_symbol(&Symbol::<f64>::mihlin_it(1, 1.0).unwrap(), 2048, None).unwrap();
    let req = [
        (Estimate::MomentL2, 0),
        (Estimate::MomentL2, 1),
        (Estimate::MomentSup, 0),
        (Estimate::MomentSup, 1),
        (Estimate::MomentSup, 2),
    ];
    let series = decay_sweep(&m, &req, &DecayOptions::default()).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for s in &series {
        match s.fit {
            Some(f) if s.excluded.is_empty() => {
                let ok = (f.slope - s.predicted_slope).abs() <= 0.3 && f.max_residual < 0.1;
                pass &= ok;
                notes.push(format!(
                    "{} l={}: slope {:.3} vs {:.2}, residual {:.3}",
                    s.estimate.name(),
                    s.l,
                    f.slope,
                    s.predicted_slope,
                    f.max_residual
                ));
            }
            _ => {
                pass = false;
                notes.push(format!("{} l={}: no fit (excluded {:?})", s.estimate.name(), s.l, s.excluded));
            }
        }
    }
    Outcome::new(pass, notes.join("; "))
}

fn hormander_uniformity() -> Outcome {
    let kmax = 1024;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let triples = sample_triples(1, 2000, 6.0, 1e-3, 1.0, &mut rng).unwrap();
    let m = matrix_of_symbol(&Symbol::<f64>::mihlin_it(1, 1.0).unwrap(), kmax, None).unwrap();
    let rows = hormander_check(&m, &[4, 5, 6], &triples).unwrap();
    let sups: Vec<f64> = rows.iter().map(|r| r.sup).collect();
    let alt = matrix_of_symbol(&Symbol::<f64>::alternating(1).unwrap(), kmax, None).unwrap();
    let alt_rows = hormander_check(&alt, &[4, 5, 6], &triples).unwrap();
    let alt_sups: Vec<f64> = alt_rows.iter().map(|r| r.sup).collect();
    let s = spread(&sups);
    Outcome::new(
        s <= 3.0,
        format!("Mihlin sup over N=4,5,6: {sups:.3?}, spread {s:.2} (≤ 3); alternating [diagnostic]: {alt_sups:.1?}"),
    )
}

fn spectral_of(f: impl Fn(f64) -> f64, kmax: usize) -> SpectralField<f64> {
    let g = gauss_hermite::<f64>(2 * kmax + 2).unwrap();
    analyze(&GridFunction::sample(g, |x| c(f(x[0]))), kmax).unwrap()
}

fn sharp_maximal_stability() -> Outcome {
    let kmax = 64;
    let fam = CubeFamily::new(1, 8.0, 8).unwrap();
    let m = matrix_of_symbol(&Symbol::<f64>::mihlin_it(1, 1.0).unwrap(), kmax, None).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    let tests: [(&str, Box<dyn Fn(f64) -> f64>, bool); 3] = [
        ("gaussian", Box::new(|x: f64| (-x * x / 2.0).exp()), true),
        ("cos(2x)", Box::new(|x: f64| (2.0 * x).cos() * (-x * x / 2.0).exp()), true),
        ("cos(5x) [diagnostic]", Box::new(|x: f64| (5.0 * x).cos() * (-x * x / 2.0).exp()), false),
    ];
    for (name, f, asserted) in tests {
        let field = spectral_of(f, kmax);
        let r: Vec<f64> = (3..=7).map(|nn| thm31_ratio(&m, &field, nn, &fam).unwrap().ratio).collect();
        let s = spread(&r);
        if asserted {
            pass &= s <= 1.5;
        }
        notes.push(format!("{name}: {r:.3?} spread {s:.2}"));
    }
    Outcome::new(pass, notes.join("; ") + " (asserted spreads ≤ 1.5)")
}

fn weighted_stability() -> Outcome {
    let grid = UniformGrid::new(1, 8.0, 256).unwrap();
    let w = Weight::power(grid, 0.5).unwrap();
    let m = Symbol::separable(XFactor::Lorentz { scale: 1.0 }, Symbol::mihlin_it(1, 1.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (c0, s, a1, a2) =
            (rng.gen_range(-1.5..1.5), rng.gen_range(0.7..1.5), rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
        let f = move |x: f64| (1.0 + a1 * x + a2 * x * x) * (-(x - c0).powi(2) / (2.0 * s * s)).exp();
        let r32 = weighted_operator_ratio(&m, &spectral_of(f, 32), &w, 4.0).unwrap();
        let r64 = weighted_operator_ratio(&m, &spectral_of(f, 64), &w, 4.0).unwrap();
        worst = worst.max((r64 / r32 - 1.0).abs());
    }
    let a2 = |a: f64, d: u32| {
        let fam = CubeFamily::new(1, 8.0, d).unwrap();
        ap_characteristic(&Weight::power(fam.grid().clone(), a).unwrap(), 2.0, &fam).unwrap()
    };
    let (h4, h8) = (a2(0.5, 4), a2(0.5, 8));
    let (g4, g8) = (a2(1.5, 4), a2(1.5, 8));
    let pass = worst <= 0.25 && h8 / h4 <= 1.2 && g8 / g4 > 2.0;
    Outcome::new(
        pass,
        format!(
            "L4(|x|^0.5) relative change K 32→64: worst {:.2e} (≤ 0.25); A2 |x|^0.5: {h4:.3}→{h8:.3} (×{:.3}, ≤ 1.2); A2 |x|^1.5: {g4:.2}→{g8:.2} (×{:.2}, > 2)",
            worst,
            h8 / h4,
            g8 / g4
        ),
    )
}

fn periodic_pipeline() -> Outcome {
    let (n, kmax, degree) = (1usize, 16usize, 4i64);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let terms: Vec<TrigTerm<f64>> = (-degree..=degree)
        .map(|m| {
            let b = if m % 2 == 0 {
                XFactor::Gaussian { a: rng.gen_range(0.05..0.5) }
            } else {
                XFactor::Cosine { omega: rng.gen_range(0.5..2.0), amplitude: rng.gen_range(0.0..0.5) }
            };
            TrigTerm { freq: m, coeff: Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), b }
        })
        .collect();
    let a = PeriodicSymbol::trig_polynomial(n, terms, PeriodicSymbol::<f64>::min_samples(n, kmax, degree as usize)).unwrap();
    let pts: Vec<Vec<f64>> = (0..13).map(|i| vec![-3.0 + 0.5 * i as f64]).collect();
    let da = (-4..=12).map(|k| da_identity_check(&a, k, &pts).unwrap()).fold(0.0, f64::max);
    let grid = hermitia::basis::QuadratureGrid::<f64>::tensor(kmax + 1, n).unwrap();
    let f = GridFunction::sample(grid, |p| Cx::new((-p[0] * p[0] / 2.0).exp() * (1.0 + p[0]), 0.3 * p[0] * (-p[0] * p[0] / 3.0).exp()));
    let agreement = match apply_via_unitary_group(&a, &f, kmax) {
        Ok(out) => {
            let reference = apply_pseudo_multiplier(&periodic_to_symbol(&a, kmax).unwrap(), &f, kmax).unwrap();
            let scale = reference.max_abs().max(f.max_abs());
            out.values().iter().zip(reference.values()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / scale
        }
        Err(_) => f64::INFINITY,
    };
    Outcome::new(
        da <= 1e-8 && agreement <= 1e-8,
        format!("Da identity {da:.2e} (≤ 1e-8); unitary group vs symbol sum {agreement:.2e} (≤ 1e-8)"),
    )
}

fn weyl_identities() -> Outcome {
    let quad = WeylQuadrature::new(12.0, 160).unwrap();
    let reps: Vec<_> = (0..=3).map(|k| special_hermite_projection(k, 5, &quad).unwrap()).collect();
    let leak = reps.iter().map(|r| r.leakage).fold(0.0, f64::max);
    let c0 = reps[0].constant;
    let consistency = reps.iter().map(|r| (r.constant / c0 - 1.0).abs()).fold(0.0, f64::max);
    let truncated = reps.iter().any(|r| r.truncated);

    let lq = WeylQuadrature::for_laguerre(16);
    let mut e0 = vec![c(0.0); 17];
    e0[0] = c(1.0);
    let mut e3 = vec![c(0.0); 17];
    e3[3] = c(1.0);
    let decaying: Vec<Cx> = (0..17).map(|k| Cx::new((-(k as f64) / 4.0).exp(), 0.1 * k as f64)).collect();
    let rt = [e0, e3, decaying]
        .iter()
        .map(|m| laguerre_coeff_roundtrip(m, &lq).unwrap().residual)
        .fold(0.0, f64::max);

    let a = Arc::new(|x: f64, r: f64| c((-x * x).exp() * (-r * r / 4.0).exp()));
    let adj = adjoint_check(a, 6, &WeylQuadrature::default()).unwrap();

    let pass = leak <= 1e-5 && consistency <= 0.01 && !truncated && rt <= 1e-4 && adj.residual <= 1e-4;
    Outcome::new(
        pass,
        format!(
            "projection leakage {leak:.1e} (≤ 1e-5); constant {c0:.8} across k=0..3 within {:.1e}; measured/printed (2π)^-1 = {:.4} (4π² = {:.4}); round trip {rt:.1e} (≤ 1e-4); adjoint with x+v {:.1e} (≤ 1e-4), with x-v [diagnostic] {:.2e}",
            consistency,
            reps[0].ratio_to_printed,
            4.0 * PI * PI,
            adj.residual,
            adj.minus_residual
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "partition identity", partition_identity),
        (2, "Parseval and eigenrelation", parseval_and_eigen),
        (3, "Hilbert-Schmidt shell identity", hs_shell),
        (4, "ladder and derivative algebra", ladder_algebra),
        (5, "kernel decay slopes", decay_slopes),
        (6, "Hormander uniformity", hormander_uniformity),
        (7, "sharp-maximal stability", sharp_maximal_stability),
        (8, "weighted-norm stability", weighted_stability),
        (9, "periodic pipeline", periodic_pipeline),
        (10, "Weyl identities", weyl_identities),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        let t0 = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Outcome::new(false, format!("panicked: {msg}"))
            });
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict} {name} [{:.1} s]: {}", t0.elapsed().as_secs_f64(), out.detail);
        if !out.pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
