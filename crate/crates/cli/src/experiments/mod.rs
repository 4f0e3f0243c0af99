use clap::ValueEnum;
use hermitia::basis::{gauss_hermite, GridFunction, QuadratureGrid};
use hermitia::spectral::{analyze, SpectralField};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cache::MatrixCache;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::Output;

mod kernels;
mod maximal;
mod periodic;
mod spectral;
mod weyl;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    IdentityPartition,
    Parseval,
    HsShell,
    Decay,
    Hormander,
    SharpMaximal,
    WeightedSweep,
    PeriodicPipeline,
    Weyl,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::IdentityPartition => "identity-partition",
            Experiment::Parseval => "parseval",
            Experiment::HsShell => "hs-shell",
            Experiment::Decay => "decay",
            Experiment::Hormander => "hormander",
            Experiment::SharpMaximal => "sharp-maximal",
            Experiment::WeightedSweep => "weighted-sweep",
            Experiment::PeriodicPipeline => "periodic-pipeline",
            Experiment::Weyl => "weyl",
        }
    }
}

/// Shared state of one run. All randomness comes from `rng`.
pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub rng: ChaCha8Rng,
    pub cache: MatrixCache,
}

pub fn run(exp: Experiment, ctx: &mut Context) -> Result<Output> {
    ctx.cfg.validate()?;
    match exp {
        Experiment::IdentityPartition => spectral::identity_partition(ctx),
        Experiment::Parseval => spectral::parseval(ctx),
        Experiment::HsShell => spectral::hs_shell(ctx),
        Experiment::Decay => kernels::decay(ctx),
        Experiment::Hormander => kernels::hormander(ctx),
        Experiment::SharpMaximal => maximal::sharp_maximal(ctx),
        Experiment::WeightedSweep => maximal::weighted_sweep(ctx),
        Experiment::PeriodicPipeline => periodic::periodic_pipeline(ctx),
        Experiment::Weyl => weyl::weyl(ctx),
    }
}

/// Hermite coefficients of a real function, from a Gauss–Hermite rule with
/// `2K_max + 2` nodes per axis.
fn spectral_of(n: usize, kmax: usize, f: impl Fn(&[f64]) -> f64) -> Result<SpectralField<f64>> {
    let grid: QuadratureGrid<f64> = gauss_hermite(2 * kmax + 2)?.with_dimension(n)?;
    Ok(analyze(&GridFunction::sample(grid, |x| Complex64::new(f(x), 0.0)), kmax)?)
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::MIN, f64::max);
    let lo = v.iter().copied().fold(f64::MAX, f64::min);
    hi / lo
}

fn range(v: &[u32]) -> (u32, u32) {
    (*v.iter().min().expect("nonempty"), *v.iter().max().expect("nonempty"))
}
