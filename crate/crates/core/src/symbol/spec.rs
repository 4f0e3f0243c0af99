use serde::{Deserialize, Serialize};

use super::periodic::{periodic_to_symbol, PeriodicSymbol, TrigTerm};
use super::Symbol;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Smooth bounded x-factor `b(x)` used by separable symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum XFactor {
    One,
    /// `(1 + |x|²/s²)^{−1}`.
    Lorentz { scale: f64 },
    /// `e^{−a|x|²}`.
    Gaussian { a: f64 },
    /// `1 + ε cos(ω x₁)`.
    Cosine { omega: f64, amplitude: f64 },
}

impl XFactor {
    pub fn name(&self) -> &'static str {
        match self {
            XFactor::One => "one",
            XFactor::Lorentz { .. } => "lorentz",
            XFactor::Gaussian { .. } => "gaussian",
            XFactor::Cosine { .. } => "cosine",
        }
    }

    fn r2<T: Real>(x: &[T]) -> T {
        x.iter().map(|&v| v * v).sum()
    }

    pub fn value<T: Real>(&self, x: &[T]) -> T {
        match *self {
            XFactor::One => T::one(),
            XFactor::Lorentz { scale } => {
                let s = T::lit(scale);
                (T::one() + Self::r2(x) / (s * s)).recip()
            }
            XFactor::Gaussian { a } => (-T::lit(a) * Self::r2(x)).exp(),
            XFactor::Cosine { omega, amplitude } => T::one() + T::lit(amplitude) * (T::lit(omega) * x[0]).cos(),
        }
    }

    pub fn gradient<T: Real>(&self, x: &[T], axis: usize) -> T {
        match *self {
            XFactor::One => T::zero(),
            XFactor::Lorentz { scale } => {
                let s2 = T::lit(scale * scale);
                let d = T::one() + Self::r2(x) / s2;
                -T::lit(2.0) * x[axis] / (s2 * d * d)
            }
            XFactor::Gaussian { a } => -T::lit(2.0 * a) * x[axis] * (-T::lit(a) * Self::r2(x)).exp(),
            XFactor::Cosine { omega, amplitude } => {
                if axis == 0 {
                    -T::lit(amplitude * omega) * (T::lit(omega) * x[0]).sin()
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            XFactor::Cosine { amplitude, .. } => 1.0 + amplitude.abs(),
            _ => 1.0,
        }
    }
}

/// JSON description of a symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SymbolSpec {
    One,
    /// `λ^{is}`.
    MihlinIt {
        #[serde(default = "unit_exponent")]
        s: f64,
    },
    /// `e^{−tλ}`.
    Heat { t: f64 },
    /// `(−1)^k`.
    Alternating,
    /// `δ_{k,k₀}`.
    Kronecker { k0: usize },
    /// `b(x)·m₀(k)`.
    Separable { b: XFactor, m0: Box<SymbolSpec> },
    /// `â(x, 2k+n)` for a trigonometric polynomial `a(x,t) = Σ c_m b_m(x) e^{imt}`.
    Periodic {
        terms: Vec<TrigTermSpec>,
        #[serde(default)]
        t_samples: Option<usize>,
    },
    /// Per-shell values `[re, im]`; shells past the table repeat the last entry.
    Table { values: Vec<[f64; 2]> },
    /// The zero symbol.
    Zero,
}

fn unit_exponent() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTermSpec {
    pub freq: i64,
    pub coeff: [f64; 2],
    #[serde(default = "one_factor")]
    pub b: XFactor,
}

fn one_factor() -> XFactor {
    XFactor::One
}

impl SymbolSpec {
    /// Builds the symbol in dimension `n`; `kmax` fixes the t-quadrature of
    /// periodic symbols.
    pub fn build<T: Real>(&self, n: usize, kmax: usize) -> Result<Symbol<T>> {
        match self {
            SymbolSpec::One => Symbol::one(n),
            SymbolSpec::Zero => Symbol::constant(n, Cx::new(T::zero(), T::zero())),
            SymbolSpec::MihlinIt { s } => Symbol::mihlin_it(n, T::lit(*s)),
            SymbolSpec::Heat { t } => {
                if !(*t >= 0.0) {
                    return Err(Error::InvalidArgument(format!("heat time must be nonnegative, got {t}")));
                }
                Symbol::heat(n, T::lit(*t))
            }
            SymbolSpec::Alternating => Symbol::alternating(n),
            SymbolSpec::Kronecker { k0 } => Symbol::kronecker(n, *k0),
            SymbolSpec::Separable { b, m0 } => Symbol::separable(b.clone(), m0.build(n, kmax)?),
            SymbolSpec::Table { values } => Symbol::table(n, values.iter().map(|v| Cx::new(T::lit(v[0]), T::lit(v[1]))).collect()),
            SymbolSpec::Periodic { terms, t_samples } => {
                let a = self.periodic::<T>(n, kmax, terms, *t_samples)?;
                periodic_to_symbol(&a, kmax)
            }
        }
    }

    /// The underlying periodic symbol, when this spec describes one.
    pub fn build_periodic<T: Real>(&self, n: usize, kmax: usize) -> Result<PeriodicSymbol<T>> {
        match self {
            SymbolSpec::Periodic { terms, t_samples } => self.periodic(n, kmax, terms, *t_samples),
            _ => Err(Error::InvalidArgument("symbol spec is not periodic".into())),
        }
    }

    fn periodic<T: Real>(&self, n: usize, kmax: usize, terms: &[TrigTermSpec], t_samples: Option<usize>) -> Result<PeriodicSymbol<T>> {
        let terms: Vec<TrigTerm<T>> = terms
            .iter()
            .map(|t| TrigTerm { freq: t.freq, coeff: Cx::new(T::lit(t.coeff[0]), T::lit(t.coeff[1])), b: t.b.clone() })
            .collect();
        let degree = terms.iter().map(|t: &TrigTerm<T>| t.freq.unsigned_abs() as usize).max().unwrap_or(0);
        PeriodicSymbol::trig_polynomial(n, terms, t_samples.unwrap_or_else(|| PeriodicSymbol::<T>::min_samples(n, kmax, degree)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let spec = SymbolSpec::Separable {
            b: XFactor::Lorentz { scale: 1.0 },
            m0: Box::new(SymbolSpec::MihlinIt { s: 1.0 }),
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: SymbolSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        let parsed: SymbolSpec = serde_json::from_str(r#"{"type":"mihlin_it"}"#).unwrap();
        assert_eq!(parsed, SymbolSpec::MihlinIt { s: 1.0 });
    }

    #[test]
    fn builds_every_variant() {
        let specs = [
            r#"{"type":"one"}"#,
            r#"{"type":"zero"}"#,
            r#"{"type":"heat","t":0.1}"#,
            r#"{"type":"alternating"}"#,
            r#"{"type":"kronecker","k0":2}"#,
            r#"{"type":"table","values":[[1,0],[0,1]]}"#,
            r#"{"type":"periodic","terms":[{"freq":1,"coeff":[1,0]}]}"#,
            r#"{"type":"separable","b":{"type":"gaussian","a":0.5},"m0":{"type":"one"}}"#,
        ];
        for s in specs {
            let spec: SymbolSpec = serde_json::from_str(s).unwrap();
            let m = spec.build::<f64>(1, 8).unwrap();
            assert!(m.row(&[0.2], 8).iter().all(|v| v.re.is_finite()));
        }
    }

    #[test]
    fn negative_heat_time_rejected() {
        assert!(SymbolSpec::Heat { t: -1.0 }.build::<f64>(1, 4).is_err());
    }

    #[test]
    fn factor_gradients_match_differences() {
        let h = 1e-6;
        for b in [
            XFactor::Lorentz { scale: 1.5 },
            XFactor::Gaussian { a: 0.3 },
            XFactor::Cosine { omega: 2.0, amplitude: 0.4 },
        ] {
            for x in [[-1.0, 0.5], [0.3, 2.0]] {
                for axis in 0..2 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[axis] += h;
                    xm[axis] -= h;
                    let fd = (b.value::<f64>(&xp) - b.value::<f64>(&xm)) / (2.0 * h);
                    assert!((fd - b.gradient::<f64>(&x, axis)).abs() < 1e-7);
                }
            }
        }
    }
}
