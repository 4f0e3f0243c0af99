//! Cross-module consistency: the same operator reached by different routes.

use std::f64::consts::PI;
use std::sync::Arc;

use hermitia::basis::{gauss_hermite, GridFunction, QuadratureGrid};
use hermitia::opcalc::{matrix_of_symbol, OperatorMatrix};
use hermitia::spectral::{analyze, apply_diagonal, synthesize, DiagonalMultiplier, SpectralField};
use hermitia::symbol::{apply_pseudo_multiplier, Symbol, SymbolSpec, XFactor};
use hermitia::weylcheck::{t_equivalence, WeylQuadrature};
use hermitia::{Cx64, SpectralField64};
use proptest::prelude::*;

fn field(n: usize, kmax: usize, coeffs: &[(f64, f64)]) -> SpectralField64 {
    let mut it = coeffs.iter().cycle();
    SpectralField::from_fn(n, kmax, |_| {
        let (re, im) = *it.next().unwrap();
        Cx64::new(re, im)
    })
    .unwrap()
}

#[test]
fn analyze_inverts_synthesize() {
    let f = field(2, 6, &[(0.3, -0.1), (1.0, 0.5), (-0.7, 0.2)]);
    let grid = QuadratureGrid::<f64>::tensor(8, 2).unwrap();
    let back = analyze(&synthesize(&f, grid).unwrap(), 6).unwrap();
    assert!(back.sub(&f).unwrap().max_abs() < 1e-12);
}

#[test]
fn x_free_symbol_matrix_is_its_multiplier() {
    let mu = DiagonalMultiplier::<f64>::heat(1, 20, 0.2).unwrap();
    let m = matrix_of_symbol(&Symbol::from_multiplier(&mu).unwrap(), 20, None).unwrap();
    let f = field(1, 20, &[(1.0, 0.0), (0.2, -0.4)]);
    let d = m.apply(&f).unwrap().sub(&apply_diagonal(&mu, &f).unwrap()).unwrap().max_abs();
    assert!(d < 1e-14, "{d}");
}

#[test]
fn matrix_and_pointwise_routes_agree() {
    let kmax = 24;
    let sym = SymbolSpec::Separable { b: XFactor::Gaussian { a: 0.3 }, m0: Box::new(SymbolSpec::Heat { t: 0.1 }) }
        .build::<f64>(1, kmax)
        .unwrap();
    let g = gauss_hermite::<f64>(2 * kmax + 2).unwrap();
    let f = GridFunction::sample(g, |x| Cx64::new((-x[0] * x[0] / 2.0).exp() * (1.0 + x[0]), 0.0));
    let pointwise = apply_pseudo_multiplier(&sym, &f, kmax).unwrap();
    let m = matrix_of_symbol(&sym, kmax, Some(4 * (kmax + 1))).unwrap();
    let projected = m.apply(&analyze(&f, kmax).unwrap()).unwrap();
    // the matrix route projects the output back onto shells ≤ kmax
    let back = analyze(&pointwise, kmax).unwrap();
    let d = back.sub(&projected).unwrap().max_abs();
    assert!(d < 1e-10, "{d}");
}

#[test]
fn weyl_transform_matches_pseudo_multiplier_up_to_two_pi() {
    let m = Arc::new(|x: f64, k: usize| Cx64::new((1.0 + x * x).recip() * (-0.3 * k as f64).exp(), 0.0));
    let r = t_equivalence(m, 6, 2.0 * PI, &WeylQuadrature::new(12.0, 160).unwrap()).unwrap();
    assert!(r.residual < 1e-8, "{r:?}");
    assert!((r.fitted_scale / (2.0 * PI) - 1.0).abs() < 1e-8);
}

#[test]
fn binary_layout_survives_round_trip() {
    let m = matrix_of_symbol(&Symbol::<f64>::mihlin_it(2, 0.5).unwrap(), 5, None).unwrap();
    let mut buf = Vec::new();
    m.write_to(&mut buf).unwrap();
    let back = OperatorMatrix::<f64>::read_from(&mut buf.as_slice()).unwrap();
    assert_eq!(back.sub(&m).unwrap().max_abs(), 0.0);
    assert!(OperatorMatrix::<f64>::read_from(&mut &buf[..buf.len() - 1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Unitary multipliers preserve the coefficient norm.
    #[test]
    fn unitary_group_is_isometric(t in -3.0f64..3.0, coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12)) {
        let f = field(1, 16, &coeffs);
        let u = DiagonalMultiplier::<f64>::unitary(1, 16, t).unwrap();
        let g = apply_diagonal(&u, &f).unwrap();
        prop_assert!((g.norm() - f.norm()).abs() <= 1e-12 * f.norm().max(1.0));
    }

    /// Symbol and matrix routes are linear in the symbol.
    #[test]
    fn matrix_of_symbol_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let m1 = Symbol::<f64>::heat(1, 0.1).unwrap();
        let m2 = Symbol::<f64>::mihlin_it(1, 1.0).unwrap();
        let (ca, cb) = (Cx64::new(a, 0.0), Cx64::new(b, 0.0));
        let combo = matrix_of_symbol(&Symbol::combine(ca, &m1, cb, &m2).unwrap(), 10, None).unwrap();
        let sum = matrix_of_symbol(&m1, 10, None).unwrap().scale(ca)
            .add(&matrix_of_symbol(&m2, 10, None).unwrap().scale(cb)).unwrap();
        prop_assert!(combo.sub(&sum).unwrap().max_abs() < 1e-12);
    }
}
