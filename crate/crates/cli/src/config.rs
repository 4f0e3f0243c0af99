//! Experiment configuration.
//!
//! Every field is optional; each experiment fills the gaps with its own
//! defaults and reports the resolved values next to the verbatim echo.

use std::path::{Path, PathBuf};

use hermitia::basis::MAX_DIMENSION;
use hermitia::kernellab::Estimate;
use hermitia::maxweights::WeightSpec;
use hermitia::symbol::SymbolSpec;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, Result};

/// Largest truncation any experiment accepts.
pub const MAX_KMAX: usize = 4096;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Shell truncation `K_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    /// Truncations compared by the weighted sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax_list: Option<Vec<usize>>,
    /// Gauss–Hermite nodes per axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    /// Half width `L` of uniform grids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Uniform grid points per axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolSpec>,
    /// Reported next to `symbol`, never asserted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic_symbol: Option<SymbolSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    /// Exponent of the weighted norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Index of the Muckenhoupt characteristic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub js: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<u32>>,
    /// Shells `k` probed by the Weyl experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shells: Option<Vec<usize>>,
    /// Cube depth `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depths: Option<Vec<u32>>,
    /// Trials, sampled triples or family size, depending on the experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<TestFunction>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimates: Option<Vec<EstimateSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_window: Option<f64>,
    /// t-degree of the random trigonometric symbol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Phase-space radius of the Weyl quadrature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Overrides the experiment's main asserted tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Test function for the sharp-maximal experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `e^{−|x|²/2}`.
    Gaussian,
    /// `cos(ω x₁) e^{−|x|²/2}`.
    Oscillatory { omega: f64 },
}

impl TestFunction {
    pub fn label(&self) -> String {
        match self {
            TestFunction::Gaussian => "gaussian".into(),
            TestFunction::Oscillatory { omega } => format!("oscillatory_{omega}"),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let g = (-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp();
        match self {
            TestFunction::Gaussian => g,
            TestFunction::Oscillatory { omega } => (omega * x[0]).cos() * g,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSpec {
    pub estimate: Estimate,
    pub l: u32,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Checks that hold for every experiment.
    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.n {
            if n == 0 || n > MAX_DIMENSION {
                return Err(invalid(format!("n must lie in 1..={MAX_DIMENSION}, got {n}")));
            }
        }
        for k in self.kmax.iter().chain(self.kmax_list.iter().flatten()) {
            if *k > MAX_KMAX {
                return Err(invalid(format!("kmax {k} exceeds the limit {MAX_KMAX}")));
            }
        }
        if let Some(q) = self.q {
            if q == 0 {
                return Err(invalid("q must be positive"));
            }
        }
        let positive = [
            ("half_width", self.half_width),
            ("extent", self.extent),
            ("r_min", self.r_min),
            ("r_max", self.r_max),
            ("x_window", self.x_window),
            ("radius", self.radius),
            ("tolerance", self.tolerance),
        ];
        for (name, v) in positive {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(invalid(format!("{name} must be positive and finite, got {v}")));
                }
            }
        }
        if let (Some(a), Some(b)) = (self.r_min, self.r_max) {
            if a >= b {
                return Err(invalid(format!("r_min {a} must be below r_max {b}")));
            }
        }
        for (name, v) in [("p", self.p), ("ap", self.ap)] {
            if let Some(v) = v {
                if !(v > 1.0 && v.is_finite()) {
                    return Err(invalid(format!("{name} must exceed 1, got {v}")));
                }
            }
        }
        if let Some(t) = self.tail_threshold {
            if !(t > 0.0 && t <= 1.0) {
                return Err(invalid(format!("tail_threshold must lie in (0, 1], got {t}")));
            }
        }
        for (name, list) in [("js", &self.js), ("ns", &self.ns)] {
            if let Some(list) = list {
                if list.is_empty() {
                    return Err(invalid(format!("{name} must not be empty")));
                }
                if list.iter().any(|&j| j > 40) {
                    return Err(invalid(format!("{name} entries must be at most 40")));
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    pub fn require_dimension(&self, n: usize, experiment: &str) -> Result<usize> {
        match self.n {
            Some(m) if m != n => Err(invalid(format!("{experiment} runs in dimension {n} only, got n = {m}"))),
            _ => Ok(n),
        }
    }
}
