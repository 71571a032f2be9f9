//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Solves `min c'x  s.t.  A x (<=, >=, =) b,  x >= 0`. The problems here are
//! tiny (a few hundred columns at most), so a dense tableau is the simplest
//! thing that works. After termination the basic variables are recomputed
//! from the original data with an LU solve to strip accumulated pivot error.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variables; meaningful only when `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

const PIVOT_EPS: f64 = 1e-9;
const REL_PIVOT_EPS: f64 = 1e-7;
/// Tied pivots below this fraction of the column maximum lose to larger ones.
const WEAK_PIVOT: f64 = 1e-3;
const COST_EPS: f64 = 1e-10;
const PHASE1_TOL: f64 = 1e-9;

struct Tableau {
    /// (m + 1) x (cols + 1); last row is the reduced-cost row, last column the rhs.
    t: DMatrix<f64>,
    basis: Vec<usize>,
    m: usize,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[(row, col)];
        let width = self.cols + 1;
        for c in 0..width {
            self.t[(row, c)] /= piv;
        }
        for r in 0..=self.m {
            if r == row {
                continue;
            }
            let f = self.t[(r, col)];
            if f != 0.0 {
                for c in 0..width {
                    let v = self.t[(row, c)];
                    if v != 0.0 {
                        self.t[(r, c)] -= f * v;
                    }
                }
                self.t[(r, col)] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Loads the cost row for `cost` (length `cols`) given the current basis.
    fn price(&mut self, cost: &[f64]) {
        let m = self.m;
        for c in 0..=self.cols {
            self.t[(m, c)] = if c < self.cols { cost[c] } else { 0.0 };
        }
        for r in 0..m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..=self.cols {
                    let v = self.t[(r, c)];
                    self.t[(m, c)] -= cb * v;
                }
            }
        }
    }

    /// Runs Bland's rule until optimal; `allowed[c]` gates entering columns.
    /// Basic variables with index `>= pinned` (artificials left in the basis
    /// at level zero) must stay at zero, so their rows block any nonzero entry.
    ///
    /// Pivoting lets the cost row drift by ~1e-10, enough to show a negative
    /// reduced cost on a column with no positive entry. Before reporting
    /// unboundedness the row is re-priced from `cost`; a column whose only
    /// positive entries are below `PIVOT_EPS` is set aside until the next pivot.
    fn run(&mut self, cost: &[f64], allowed: &[bool], pinned: usize, iters: &mut usize, limit: usize) -> LpStatus {
        let m = self.m;
        let mut fresh = false;
        let mut skipped = vec![false; self.cols];
        loop {
            let entering = (0..self.cols).find(|&c| allowed[c] && !skipped[c] && self.t[(m, c)] < -COST_EPS);
            let Some(col) = entering else {
                return LpStatus::Optimal;
            };
            if *iters >= limit {
                return LpStatus::IterationLimit;
            }
            // Pivots tiny relative to the column wreck the tableau, so the
            // threshold scales with the column.
            let colmax = (0..m).map(|r| self.t[(r, col)].abs()).fold(0.0, f64::max);
            let eps = PIVOT_EPS.max(REL_PIVOT_EPS * colmax);
            let mut best: Option<(usize, f64)> = None;
            for r in 0..m {
                let a = self.t[(r, col)];
                let ratio = if self.basis[r] >= pinned && a.abs() > eps {
                    0.0
                } else if a > eps {
                    // Round-off can leave a rhs at -1e-17; treat it as zero.
                    self.t[(r, self.cols)].max(0.0) / a
                } else {
                    continue;
                };
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        let tie = (ratio - bv).abs() <= 1e-12 * bv.abs().max(1.0);
                        let (pa, pb) = (a.abs(), self.t[(br, col)].abs());
                        // Bland's lowest index among ties unless one pivot is much better conditioned.
                        let better = if pa > WEAK_PIVOT * colmax && pb > WEAK_PIVOT * colmax {
                            self.basis[r] < self.basis[br]
                        } else {
                            pa > pb
                        };
                        if ratio < bv && !tie || tie && better {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
            let Some((row, _)) = best else {
                if !fresh {
                    self.price(cost);
                    fresh = true;
                    continue;
                }
                if (0..m).any(|r| self.t[(r, col)] > 0.0) {
                    // Only sub-threshold positive entries: not a usable direction.
                    skipped[col] = true;
                    continue;
                }
                return LpStatus::Unbounded;
            };
            fresh = false;
            skipped.iter_mut().for_each(|s| *s = false);
            self.pivot(row, col);
            *iters += 1;
        }
    }
}

/// Solves the LP. `a` is `m x n` (rows of constraints), `b` has length `m`.
///
/// The iteration limit is `50 * (number of standard-form columns)`.
pub fn lp_solve(c: &[f64], a: &DMatrix<f64>, b: &[f64], sense: &[RowSense]) -> LpSolution {
    let n = c.len();
    let m = b.len();
    assert_eq!(a.ncols(), n, "constraint matrix width must match cost length");
    assert_eq!(a.nrows(), m, "constraint matrix height must match rhs length");
    assert_eq!(sense.len(), m, "one sense per row");

    // Normalize to b >= 0.
    let mut rows: Vec<(Vec<f64>, f64, RowSense)> = (0..m)
        .map(|r| {
            let row: Vec<f64> = (0..n).map(|j| a[(r, j)]).collect();
            if b[r] < 0.0 {
                let flipped = match sense[r] {
                    RowSense::Le => RowSense::Ge,
                    RowSense::Ge => RowSense::Le,
                    RowSense::Eq => RowSense::Eq,
                };
                (row.iter().map(|v| -v).collect(), -b[r], flipped)
            } else {
                (row, b[r], sense[r])
            }
        })
        .collect();

    let n_slack = rows.iter().filter(|r| r.2 != RowSense::Eq).count();
    let n_art = rows.iter().filter(|r| r.2 != RowSense::Le).count();
    let cols = n + n_slack + n_art;
    let mut t = DMatrix::zeros(m + 1, cols + 1);
    let mut basis = vec![0; m];
    let mut slack = n;
    let mut art = n + n_slack;
    let first_art = art;
    for (r, (row, rhs, s)) in rows.iter_mut().enumerate() {
        for j in 0..n {
            t[(r, j)] = row[j];
        }
        t[(r, cols)] = *rhs;
        match s {
            RowSense::Le => {
                t[(r, slack)] = 1.0;
                basis[r] = slack;
                slack += 1;
            }
            RowSense::Ge => {
                t[(r, slack)] = -1.0;
                slack += 1;
                t[(r, art)] = 1.0;
                basis[r] = art;
                art += 1;
            }
            RowSense::Eq => {
                t[(r, art)] = 1.0;
                basis[r] = art;
                art += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, m, cols };
    let limit = 50 * (n + n_slack).max(1);
    let mut iters = 0;

    if n_art > 0 {
        let mut cost1 = vec![0.0; cols];
        for c in cost1.iter_mut().skip(first_art) {
            *c = 1.0;
        }
        tab.price(&cost1);
        let all = vec![true; cols];
        match tab.run(&cost1, &all, cols, &mut iters, limit) {
            LpStatus::Optimal => {}
            LpStatus::IterationLimit => return failed(LpStatus::IterationLimit, n, iters),
            // Phase 1 is bounded below by zero.
            LpStatus::Unbounded | LpStatus::Infeasible => unreachable!("phase 1 is bounded"),
        }
        let infeas = -tab.t[(m, cols)];
        if infeas > PHASE1_TOL {
            return failed(LpStatus::Infeasible, n, iters);
        }
        // Drive artificials out of the basis where possible.
        for r in 0..tab.m {
            if tab.basis[r] >= first_art {
                let best = (0..first_art)
                    .map(|c| (c, tab.t[(r, c)].abs()))
                    .max_by(|a, b| a.1.total_cmp(&b.1));
                if let Some((col, mag)) = best {
                    if mag > 1e-7 {
                        tab.pivot(r, col);
                    }
                }
            }
        }
    }

    let mut cost2 = vec![0.0; cols];
    cost2[..n].copy_from_slice(c);
    tab.price(&cost2);
    let allowed: Vec<bool> = (0..cols).map(|c| c < first_art).collect();
    let status = tab.run(&cost2, &allowed, first_art, &mut iters, limit);
    if status != LpStatus::Optimal {
        return failed(status, n, iters);
    }

    let mut xfull = vec![0.0; cols];
    for r in 0..m {
        xfull[tab.basis[r]] = tab.t[(r, cols)];
    }
    if let Some(refined) = refine(&rows, n, n_slack, &tab.basis, first_art) {
        xfull = refined;
    }
    let x: Vec<f64> = xfull[..n].iter().map(|&v| if v < 0.0 && v > -1e-9 { 0.0 } else { v }).collect();
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        iterations: iters,
    }
}

fn failed(status: LpStatus, n: usize, iterations: usize) -> LpSolution {
    LpSolution {
        status,
        x: vec![f64::NAN; n],
        objective: f64::NAN,
        iterations,
    }
}

/// Re-solves `B x_B = b` against the original rows. Returns `None` when an
/// artificial is still basic (redundant row) or the basis is singular.
fn refine(
    rows: &[(Vec<f64>, f64, RowSense)],
    n: usize,
    n_slack: usize,
    basis: &[usize],
    first_art: usize,
) -> Option<Vec<f64>> {
    if basis.iter().any(|&c| c >= first_art) {
        return None;
    }
    let m = rows.len();
    // Column `n + s` is the slack of the s-th non-equality row.
    let mut slack_row = Vec::with_capacity(n_slack);
    for (r, row) in rows.iter().enumerate() {
        if row.2 != RowSense::Eq {
            slack_row.push(r);
        }
    }
    let mut bm = DMatrix::zeros(m, m);
    for (p, &col) in basis.iter().enumerate() {
        if col < n {
            for r in 0..m {
                bm[(r, p)] = rows[r].0[col];
            }
        } else {
            let r = slack_row[col - n];
            bm[(r, p)] = if rows[r].2 == RowSense::Le { 1.0 } else { -1.0 };
        }
    }
    let rhs = DVector::from_iterator(m, rows.iter().map(|r| r.1));
    let xb = bm.lu().solve(&rhs)?;
    if xb.iter().any(|v| !v.is_finite() || *v < -1e-7) {
        return None;
    }
    let mut x = vec![0.0; first_art];
    for (p, &col) in basis.iter().enumerate() {
        x[col] = xb[p].max(0.0);
    }
    Some(x)
}
