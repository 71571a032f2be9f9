//! Kernel-smoothed Kendall's tau and the latent correlation it implies.
//!
//! For an index value `z0` every ordered pair `i != i'` carries the weight
//! `w(i, i') = K_h(Z_i - z0) K_h(Z_i' - z0)`. [`PairSummary`] stores, per
//! sample, the row sums of `w` and of `w * sign(dX_j) * sign(dX_k)`. Those row
//! sums are all the tau estimate, the Jackknife variance and the multiplier
//! bootstrap ever need, so the O(n^2) pair loop runs once per index value.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

use crate::datamodel::{Dataset, EvalGrid, KernelSpec, SymMatrix};
use crate::error::{Error, Result};
use crate::par;

/// Index of `(j, k)`, `j <= k`, in packed upper-triangular storage.
#[inline]
pub fn packed_index(d: usize, j: usize, k: usize) -> usize {
    let (j, k) = if j <= k { (j, k) } else { (k, j) };
    j * d - j * (j + 1) / 2 + k
}

pub fn packed_len(d: usize) -> usize {
    d * (d + 1) / 2
}

#[inline]
pub(crate) fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Row sums of the weighted-sign U-statistic at one index value.
///
/// Only samples with nonzero kernel weight ("members") are stored; every
/// other sample has all-zero rows.
#[derive(Debug, Clone)]
pub struct PairSummary {
    z0: f64,
    h: f64,
    n: usize,
    d: usize,
    members: Vec<usize>,
    w_row: Vec<f64>,
    s_row: Vec<f64>,
    w_total: f64,
    s_total: Vec<f64>,
}

impl PairSummary {
    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Sample indices with nonzero kernel weight, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// `w_row` aligned with [`members`](Self::members).
    pub fn member_weights(&self) -> &[f64] {
        &self.w_row
    }

    /// Packed sign rows of member `r` (position in `members`).
    pub fn member_signs(&self, r: usize) -> &[f64] {
        let p = packed_len(self.d);
        &self.s_row[r * p..(r + 1) * p]
    }

    pub fn w_total(&self) -> f64 {
        self.w_total
    }

    pub fn s_total(&self, j: usize, k: usize) -> f64 {
        self.s_total[packed_index(self.d, j, k)]
    }

    pub fn s_total_packed(&self) -> &[f64] {
        &self.s_total
    }

    /// `w_row[i]` for any sample index `i`.
    pub fn w_row(&self, i: usize) -> f64 {
        match self.members.binary_search(&i) {
            Ok(r) => self.w_row[r],
            Err(_) => 0.0,
        }
    }

    /// `s_row[i][j][k]` for any sample index `i`.
    pub fn s_row(&self, i: usize, j: usize, k: usize) -> f64 {
        match self.members.binary_search(&i) {
            Ok(r) => self.member_signs(r)[packed_index(self.d, j, k)],
            Err(_) => 0.0,
        }
    }
}

/// Accumulates the pair row sums at `z0`.
pub fn pair_summary(data: &Dataset, spec: &KernelSpec, z0: f64) -> Result<PairSummary> {
    let (n, d) = (data.n(), data.d());
    let mut members = Vec::new();
    let mut kw = Vec::new();
    for (i, &zi) in data.z().iter().enumerate() {
        let w = spec.weight(zi - z0);
        if w > 0.0 {
            members.push(i);
            kw.push(w);
        }
    }
    let m = members.len();
    if m < 2 {
        return Err(Error::DegenerateWindow { z0, in_window: m });
    }

    let p = packed_len(d);
    let mut w_row = vec![0.0; m];
    let mut s_row = vec![0.0; m * p];
    let mut sgn = vec![0.0; d];
    let mut contrib = vec![0.0; p];
    for a in 0..m {
        let xa = data.row(members[a]);
        for b in a + 1..m {
            let xb = data.row(members[b]);
            let w = kw[a] * kw[b];
            for c in 0..d {
                sgn[c] = sign(xa[c] - xb[c]);
            }
            let mut q = 0;
            for j in 0..d {
                let wj = w * sgn[j];
                for &sk in &sgn[j..] {
                    contrib[q] = wj * sk;
                    q += 1;
                }
            }
            w_row[a] += w;
            w_row[b] += w;
            let (lo, hi) = s_row.split_at_mut(b * p);
            let ra = &mut lo[a * p..(a + 1) * p];
            let rb = &mut hi[..p];
            for q in 0..p {
                ra[q] += contrib[q];
                rb[q] += contrib[q];
            }
        }
    }

    let w_total: f64 = w_row.iter().sum();
    let mut s_total = vec![0.0; p];
    for r in 0..m {
        for (acc, v) in s_total.iter_mut().zip(&s_row[r * p..(r + 1) * p]) {
            *acc += v;
        }
    }
    Ok(PairSummary {
        z0,
        h: spec.h,
        n,
        d,
        members,
        w_row,
        s_row,
        w_total,
        s_total,
    })
}

/// Kendall's tau matrix at one index value.
#[derive(Debug, Clone)]
pub struct TauEstimate {
    pub z0: f64,
    pub h: f64,
    pub tau: SymMatrix,
    /// `w_total / (n (n - 1))`, the ordered-pair U-statistic of the weights.
    pub un_omega: f64,
}

const TAU_DRIFT: f64 = 1e-12;

/// Ratio of packed sign sums to the weight total, symmetrized into a matrix.
pub(crate) fn tau_from_packed(d: usize, s_total: &[f64], w_total: f64) -> DMatrix<f64> {
    let mut tau = DMatrix::zeros(d, d);
    for j in 0..d {
        for k in j..d {
            let mut t = s_total[packed_index(d, j, k)] / w_total;
            if t.abs() > 1.0 && t.abs() <= 1.0 + TAU_DRIFT {
                t = t.signum();
            }
            tau[(j, k)] = t;
            tau[(k, j)] = t;
        }
    }
    tau
}

pub fn kendall_tau(summary: &PairSummary) -> Result<TauEstimate> {
    if !(summary.w_total > 0.0) {
        return Err(Error::ZeroWeight);
    }
    let tau = tau_from_packed(summary.d, &summary.s_total, summary.w_total);
    let n = summary.n as f64;
    Ok(TauEstimate {
        z0: summary.z0,
        h: summary.h,
        tau: SymMatrix::from_symmetric_unchecked(tau),
        un_omega: summary.w_total / (n * (n - 1.0)),
    })
}

/// Elementwise `sin(pi/2 * t)` with the diagonal pinned to 1.
pub(crate) fn sine_transform(tau: &DMatrix<f64>) -> DMatrix<f64> {
    let d = tau.nrows();
    let mut s = tau.map(|t| (FRAC_PI_2 * t).sin());
    for j in 0..d {
        s[(j, j)] = 1.0;
    }
    s
}

pub fn latent_correlation(tau: &TauEstimate) -> SymMatrix {
    SymMatrix::from_symmetric_unchecked(sine_transform(tau.tau.as_matrix()))
}

/// Latent correlation at one point of a path.
#[derive(Debug, Clone)]
pub struct PathPoint {
    pub z: f64,
    pub sigma: SymMatrix,
    pub un_omega: f64,
}

/// Latent correlation at every grid point. Points whose window is
/// degenerate come back as `Err` in place.
pub fn correlation_path(
    data: &Dataset,
    spec: &KernelSpec,
    grid: &EvalGrid,
) -> Vec<Result<PathPoint>> {
    par::map_slice(grid.points(), |&z| {
        let summary = pair_summary(data, spec, z)?;
        let tau = kendall_tau(&summary)?;
        Ok(PathPoint {
            z,
            sigma: latent_correlation(&tau),
            un_omega: tau.un_omega,
        })
    })
}

/// Convenience: latent correlation and its tau at a single `z0`.
pub fn estimate_at(data: &Dataset, spec: &KernelSpec, z0: f64) -> Result<(PairSummary, TauEstimate, SymMatrix)> {
    let summary = pair_summary(data, spec, z0)?;
    let tau = kendall_tau(&summary)?;
    let sigma = latent_correlation(&tau);
    Ok((summary, tau, sigma))
}
