use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{default_kernel_grid, effective_band, mj_matrix, moment_l2_of, moment_sup_of, KernelSampler, Side};
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LineFit};
use crate::opcalc::OperatorMatrix;
use crate::scalar::Real;
use crate::spectral::t_j;

/// Quantity tracked across the pieces `M_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    /// `sup_x ∫|x−y|^{2l}|M_j(x,y)|² dy`.
    MomentL2,
    /// `sup_{x,y} |x−y|^l |M_j(x,y)|`.
    MomentSup,
    /// `sup_{x,y} |x−y|^l |∇_x M_j(x,y)|`.
    GradSup,
}

impl Estimate {
    pub fn name(self) -> &'static str {
        match self {
            Estimate::MomentL2 => "moment_l2",
            Estimate::MomentSup => "moment_sup",
            Estimate::GradSup => "grad_sup",
        }
    }
}

/// Expected slope of `log v_j` against `log t_{j+1}`.
pub fn predicted_slope(estimate: Estimate, l: u32, n: usize) -> f64 {
    let (l, n) = (l as f64, n as f64);
    match estimate {
        Estimate::MomentL2 => l - n / 2.0,
        Estimate::MomentSup => (l - n) / 2.0,
        Estimate::GradSup => (l - n - 1.0) / 2.0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub js: Vec<u32>,
    /// `j` is kept only when `e^{−t_{j+1}(2K_max+n)}` is at most this.
    pub tail_threshold: f64,
    /// x-points cover `|x_i| ≤ √(c / t_{j+1}) + 4`, past the turning points
    /// of the shells `S_j` weights.
    pub x_window: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self { js: (3..=7).collect(), tail_threshold: 0.9, x_window: 8.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub estimate: Estimate,
    pub l: u32,
    pub n: usize,
    pub js: Vec<u32>,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// `j` dropped because the truncation cuts `S_j` too early.
    pub excluded: Vec<u32>,
    pub predicted_slope: f64,
    /// Fit of `log₂ v` against `log₂ t`; `None` when fewer than two positive
    /// values remain.
    pub fit: Option<LineFit>,
    pub warnings: Vec<String>,
}

/// One CSV line of a decay series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub j: u32,
    pub t: f64,
    pub l: u32,
    pub estimate: String,
    pub value: f64,
    pub slope_so_far: Option<f64>,
}

impl DecaySeries {
    fn finish(mut self) -> Self {
        self.fit = fit_log2(&self.t, &self.values);
        if self.fit.is_none() {
            self.warnings.push("slope undefined: fewer than two positive values".into());
        }
        self
    }

    pub fn slope_error(&self) -> Option<f64> {
        self.fit.map(|f| (f.slope - self.predicted_slope).abs())
    }

    pub fn rows(&self) -> Vec<DecayRow> {
        (0..self.js.len())
            .map(|i| DecayRow {
                j: self.js[i],
                t: self.t[i],
                l: self.l,
                estimate: self.estimate.name().into(),
                value: self.values[i],
                slope_so_far: fit_log2(&self.t[..=i], &self.values[..=i]).map(|f| f.slope),
            })
            .collect()
    }
}

fn fit_log2(t: &[f64], v: &[f64]) -> Option<LineFit> {
    if t.len() < 2 || v.iter().any(|&x| !(x > 0.0)) {
        return None;
    }
    let lt: Vec<f64> = t.iter().map(|x| x.log2()).collect();
    let lv: Vec<f64> = v.iter().map(|x| x.log2()).collect();
    linear_fit(&lt, &lv).ok()
}

fn x_points<T: Real>(y_nodes: &[T], n: usize, half: T) -> Vec<Vec<T>> {
    let axis: Vec<T> = y_nodes.iter().copied().filter(|v| v.abs() <= half).collect();
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Copy, Default)]
struct Acc {
    l2: [f64; 8],
    sup: [f64; 8],
    grad: [f64; 8],
}

/// Evaluates several `(estimate, l)` requests from one kernel sweep per `j`.
pub fn decay_sweep<T: Real>(
    m: &OperatorMatrix<T>,
    requests: &[(Estimate, u32)],
    opts: &DecayOptions,
) -> Result<Vec<DecaySeries>> {
    let n = m.n();
    if let Some((_, l)) = requests.iter().find(|(_, l)| *l as usize > n + 1) {
        return Err(Error::InvalidArgument(format!("moment order {l} exceeds n + 1 = {}", n + 1)));
    }
    let mut series: Vec<DecaySeries> = requests
        .iter()
        .map(|&(estimate, l)| DecaySeries {
            estimate,
            l,
            n,
            js: Vec::new(),
            t: Vec::new(),
            values: Vec::new(),
            excluded: Vec::new(),
            predicted_slope: predicted_slope(estimate, l, n),
            fit: None,
            warnings: Vec::new(),
        })
        .collect();
    let need_grad = requests.iter().any(|(e, _)| *e == Estimate::GradSup);
    for &j in &opts.js {
        let t = t_j::<f64>(j + 1);
        let tail = (-t * (2 * m.kmax() + n) as f64).exp();
        if tail > opts.tail_threshold {
            for s in &mut series {
                s.excluded.push(j);
                s.warnings.push(format!("j = {j} excluded: truncation tail {tail:.3e}"));
            }
            continue;
        }
        let mj = mj_matrix(m, j)?;
        let band = effective_band(&mj);
        let sampler = KernelSampler::new(&mj, default_kernel_grid::<T>(n, band)?, false)?;
        let half = T::lit((opts.x_window / t).sqrt() + 4.0);
        let xs = x_points(&sampler.y_grid().axis_nodes(), n, half);
        let acc = xs
            .par_chunks(16)
            .map(|block| -> Result<Acc> {
                let mut a = Acc::default();
                let rows = sampler.rows(block)?;
                let w = sampler.y_grid().cell_volume();
                for (x, row) in block.iter().zip(&rows) {
                    let d2 = sampler.squared_distances(x);
                    for l in 0..=(n + 1) {
                        a.l2[l] = a.l2[l].max(moment_l2_of(&d2, row, l as u32, w).as_f64());
                        a.sup[l] = a.sup[l].max(moment_sup_of(&d2, row, l as u32).as_f64());
                    }
                    if need_grad {
                        let grads: Vec<Vec<_>> =
                            (0..n).map(|ax| sampler.grad_row(x, ax, Side::X)).collect::<Result<_>>()?;
                        let mag: Vec<_> = (0..row.len())
                            .map(|i| {
                                let s = grads.iter().map(|g| g[i].norm_sqr()).fold(T::zero(), |p, q| p + q);
                                crate::scalar::re(s.sqrt())
                            })
                            .collect();
                        for l in 0..=(n + 1) {
                            a.grad[l] = a.grad[l].max(moment_sup_of(&d2, &mag, l as u32).as_f64());
                        }
                    }
                }
                Ok(a)
            })
            .try_reduce(Acc::default, |mut p, q| {
                for i in 0..8 {
                    p.l2[i] = p.l2[i].max(q.l2[i]);
                    p.sup[i] = p.sup[i].max(q.sup[i]);
                    p.grad[i] = p.grad[i].max(q.grad[i]);
                }
                Ok(p)
            })?;
        if need_grad && sampler.top_shell_mass() > T::lit(1e-12) {
            for s in series.iter_mut().filter(|s| s.estimate == Estimate::GradSup) {
                s.warnings.push(format!("j = {j}: top shell carries mass, gradient reaches past the truncation"));
            }
        }
        for s in &mut series {
            let v = match s.estimate {
                Estimate::MomentL2 => acc.l2[s.l as usize],
                Estimate::MomentSup => acc.sup[s.l as usize],
                Estimate::GradSup => acc.grad[s.l as usize],
            };
            s.js.push(j);
            s.t.push(t);
            s.values.push(v);
        }
    }
    Ok(series.into_iter().map(DecaySeries::finish).collect())
}

/// Single-request form of [`decay_sweep`].
pub fn decay_fit<T: Real>(m: &OperatorMatrix<T>, estimate: Estimate, l: u32, opts: &DecayOptions) -> Result<DecaySeries> {
    Ok(decay_sweep(m, &[(estimate, l)], opts)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcalc::matrix_of_symbol;
    use crate::spectral::DiagonalMultiplier;
    use crate::symbol::Symbol;

    #[test]
    fn predicted_slopes() {
        assert_eq!(predicted_slope(Estimate::MomentL2, 1, 1), 0.5);
        assert_eq!(predicted_slope(Estimate::MomentSup, 0, 1), -0.5);
        assert_eq!(predicted_slope(Estimate::GradSup, 2, 1), 0.0);
    }

    #[test]
    fn zero_operator_has_no_slope() {
        let z = OperatorMatrix::<f64>::zeros(1, 32).unwrap();
        let s = decay_fit(&z, Estimate::MomentL2, 0, &DecayOptions { js: vec![1, 2, 3], ..Default::default() }).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
        assert!(s.fit.is_none());
        assert_eq!(s.rows().len(), 3);
    }

    #[test]
    fn unresolved_pieces_are_excluded() {
        let id = OperatorMatrix::<f64>::identity(1, 8).unwrap();
        let s = decay_fit(&id, Estimate::MomentSup, 0, &DecayOptions { js: vec![1, 2, 8], ..Default::default() }).unwrap();
        assert_eq!(s.excluded, vec![8]);
        assert_eq!(s.js, vec![1, 2]);
    }

    #[test]
    fn mihlin_l2_slopes_small_band() {
        // a short sweep; the full acceptance run uses higher j and K
        let kmax = 256;
        let m = matrix_of_symbol(&Symbol::<f64>::mihlin_it(1, 1.0).unwrap(), kmax, None).unwrap();
        let opts = DecayOptions { js: vec![2, 3, 4], ..Default::default() };
        let out = decay_sweep(&m, &[(Estimate::MomentL2, 0), (Estimate::MomentL2, 1)], &opts).unwrap();
        for s in &out {
            let f = s.fit.unwrap();
            assert!((f.slope - s.predicted_slope).abs() < 0.3, "{} slope {}", s.l, f.slope);
        }
    }

    #[test]
    fn heat_tail_flattens() {
        let kmax = 128;
        let m = OperatorMatrix::diagonal(&DiagonalMultiplier::<f64>::heat(1, kmax, 1.0).unwrap()).unwrap();
        let s = decay_fit(&m, Estimate::MomentL2, 0, &DecayOptions { js: vec![4, 5, 6], ..Default::default() }).unwrap();
        // e^{−H} S_j ≈ (t_j − t_{j+1}) H e^{−H}: halves with each j
        let f = s.fit.unwrap();
        assert!((f.slope - 2.0).abs() < 0.05, "{}", f.slope);
    }

    #[test]
    fn csv_rows_carry_running_slope() {
        let kmax = 64;
        let m = OperatorMatrix::<f64>::identity(1, kmax);
        let s = decay_fit(&m.unwrap(), Estimate::MomentSup, 0, &DecayOptions { js: vec![1, 2, 3], ..Default::default() }).unwrap();
        let rows = s.rows();
        assert!(rows[0].slope_so_far.is_none());
        assert!(rows[2].slope_so_far.is_some());
        assert_eq!(rows[1].estimate, "moment_sup");
    }
}
