//! Competitors: kernel-smoothed Pearson second moments and kernel-weighted
//! neighborhood selection.

use nalgebra::DMatrix;

use crate::datamodel::{Dataset, Graph, KernelSpec, SymMatrix};
use crate::error::{Error, Result};
use crate::par;

/// `sum_i K_h(Z_i - z0) X_i X_i' / sum_i K_h(Z_i - z0)`. No centering: the
/// model has mean zero, so uncentered data should be centered by the caller.
pub fn kernel_pearson(data: &Dataset, spec: &KernelSpec, z0: f64) -> Result<SymMatrix> {
    let d = data.d();
    let mut m = DMatrix::zeros(d, d);
    let mut total = 0.0;
    for i in 0..data.n() {
        let w = spec.weight(data.z()[i] - z0);
        if w == 0.0 {
            continue;
        }
        total += w;
        let row = data.row(i);
        for a in 0..d {
            for b in a..d {
                m[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    if !(total > 0.0) {
        return Err(Error::ZeroWeight);
    }
    for a in 0..d {
        for b in a..d {
            let v = m[(a, b)] / total;
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    SymMatrix::new(m)
}

#[derive(Debug, Clone, Copy)]
pub struct LassoConfig {
    pub lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl LassoConfig {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            max_iter: 1000,
            tol: 1e-7,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.tol > 0.0 && self.max_iter > 0) {
            return Err(Error::InvalidArgument(format!("invalid lasso config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LassoFit {
    /// Coefficients on the other `d - 1` variables, in index order.
    pub beta: Vec<f64>,
    pub sweeps: usize,
    /// Largest stationarity violation at exit.
    pub kkt_gap: f64,
    /// Objective after each sweep.
    pub objective_trace: Vec<f64>,
}

/// Weighted design at `z0`: sample weights `K((Z_i - z0)/h)/(n h)` of the
/// in-window samples and their rows.
struct WindowDesign {
    w: Vec<f64>,
    rows: Vec<usize>,
}

fn window(data: &Dataset, spec: &KernelSpec, z0: f64) -> Result<WindowDesign> {
    let n = data.n() as f64;
    let mut w = Vec::new();
    let mut rows = Vec::new();
    for i in 0..data.n() {
        // weight() is K(t/h)/h, so one more 1/n gives K/(n h).
        let k = spec.weight(data.z()[i] - z0) / n;
        if k > 0.0 {
            w.push(k);
            rows.push(i);
        }
    }
    if rows.len() < 2 {
        return Err(Error::DegenerateWindow {
            z0,
            in_window: rows.len(),
        });
    }
    Ok(WindowDesign { w, rows })
}

/// Cyclic coordinate descent for
/// `(n h)^{-1} sum_i K((Z_i - z0)/h) (X_ij - X_{i,-j} beta)^2 + lambda |beta|_1`.
pub fn kernel_neighborhood_column(
    data: &Dataset,
    spec: &KernelSpec,
    z0: f64,
    j: usize,
    cfg: &LassoConfig,
) -> Result<LassoFit> {
    cfg.validate()?;
    let d = data.d();
    if j >= d {
        return Err(Error::InvalidArgument(format!("column {j} out of range for d = {d}")));
    }
    let win = window(data, spec, z0)?;
    let m = win.rows.len();
    let others: Vec<usize> = (0..d).filter(|&k| k != j).collect();
    let p = others.len();
    // Column-major copies of the in-window design.
    let x: Vec<Vec<f64>> = others
        .iter()
        .map(|&k| win.rows.iter().map(|&i| data.x(i, k)).collect())
        .collect();
    let y: Vec<f64> = win.rows.iter().map(|&i| data.x(i, j)).collect();
    let col_sq: Vec<f64> = x
        .iter()
        .map(|c| c.iter().zip(&win.w).map(|(v, w)| w * v * v).sum())
        .collect();
    let mut beta = vec![0.0; p];
    let mut resid = y;
    let lam = cfg.lambda;
    let objective = |resid: &[f64], beta: &[f64]| -> f64 {
        let fit: f64 = resid.iter().zip(&win.w).map(|(r, w)| w * r * r).sum();
        fit + lam * beta.iter().map(|b| b.abs()).sum::<f64>()
    };
    let kkt = |resid: &[f64], beta: &[f64]| -> f64 {
        (0..p)
            .map(|c| {
                let g: f64 = 2.0 * (0..m).map(|r| win.w[r] * x[c][r] * resid[r]).sum::<f64>();
                if beta[c] != 0.0 {
                    (g - lam * beta[c].signum()).abs()
                } else {
                    (g.abs() - lam).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    };
    let mut trace = Vec::new();
    for sweep in 1..=cfg.max_iter {
        for c in 0..p {
            if col_sq[c] == 0.0 {
                continue;
            }
            let old = beta[c];
            let rho: f64 = (0..m).map(|r| win.w[r] * x[c][r] * (resid[r] + x[c][r] * old)).sum();
            let new = soft_threshold(rho, lam / 2.0) / col_sq[c];
            if new != old {
                let delta = new - old;
                for r in 0..m {
                    resid[r] -= x[c][r] * delta;
                }
                beta[c] = new;
            }
        }
        trace.push(objective(&resid, &beta));
        let gap = kkt(&resid, &beta);
        if gap <= cfg.tol {
            return Ok(LassoFit {
                beta,
                sweeps: sweep,
                kkt_gap: gap,
                objective_trace: trace,
            });
        }
    }
    Err(Error::LassoNotConverged {
        iterations: cfg.max_iter,
        gap: kkt(&resid, &beta),
    })
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Neighborhood-selection graph at `z0`: edge `(j,k)` if either regression
/// selects the other variable.
pub fn neighborhood_graph(data: &Dataset, spec: &KernelSpec, z0: f64, cfg: &LassoConfig) -> Result<Graph> {
    let d = data.d();
    let fits = par::try_map_range(d, |j| kernel_neighborhood_column(data, spec, z0, j, cfg))?;
    let mut g = Graph::empty(d);
    for (j, fit) in fits.iter().enumerate() {
        let others = (0..d).filter(|&k| k != j);
        for (k, &b) in others.zip(&fit.beta) {
            if b != 0.0 {
                g.insert(j.min(k), j.max(k))?;
            }
        }
    }
    Ok(g)
}
