//! Independent reference implementations for the integration and acceptance
//! tests: literal double/triple loops for the U-statistics and exhaustive
//! vertex enumeration for the linear programs. Nothing here calls into the
//! code under test except for data containers.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tvnpn::Dataset;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian columns with a shared factor so that tau is not near zero.
pub fn random_dataset(r: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
    let mut x = Vec::with_capacity(n * d);
    for _ in 0..n {
        let f: f64 = r.sample(StandardNormal);
        for _ in 0..d {
            let e: f64 = r.sample(StandardNormal);
            x.push(0.6 * f + e);
        }
    }
    let z = (0..n).map(|_| r.random_range(0.05..0.95)).collect();
    Dataset::new(x, z, d).unwrap()
}

pub fn epanechnikov(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        0.75 * (1.0 - u * u)
    } else {
        0.0
    }
}

pub fn kernel_weight(z: f64, z0: f64, h: f64) -> f64 {
    epanechnikov((z - z0) / h) / h
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn concord(data: &Dataset, i: usize, ip: usize, a: usize, b: usize) -> f64 {
    sgn(data.x(i, a) - data.x(ip, a)) * sgn(data.x(i, b) - data.x(ip, b))
}

/// Literal kernel Kendall tau over ordered pairs `i != i'` and the weight
/// U-statistic `sum w / (n (n - 1))`.
pub fn brute_tau(data: &Dataset, z0: f64, h: f64) -> (DMatrix<f64>, f64) {
    let (n, d) = (data.n(), data.d());
    let mut num = DMatrix::zeros(d, d);
    let mut den = 0.0;
    for i in 0..n {
        for ip in 0..n {
            if i == ip {
                continue;
            }
            let w = kernel_weight(data.z()[i], z0, h) * kernel_weight(data.z()[ip], z0, h);
            den += w;
            for a in 0..d {
                for b in 0..d {
                    num[(a, b)] += w * concord(data, i, ip, a, b);
                }
            }
        }
    }
    (num / den, den / (n * (n - 1)) as f64)
}

pub fn sine(tau: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(tau.nrows(), tau.ncols(), |a, b| {
        if a == b {
            1.0
        } else {
            (FRAC_PI_2 * tau[(a, b)]).sin()
        }
    })
}

/// Literal triple-loop Jackknife variance of the `(j, k)` score.
pub fn brute_jackknife(data: &Dataset, z0: f64, h: f64, omega: &DMatrix<f64>, j: usize, k: usize) -> f64 {
    let (n, d) = (data.n(), data.d());
    let (tau, un) = brute_tau(data, z0, h);
    let mut acc = 0.0;
    for s in 0..n {
        let mut theta = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut q = 0.0;
                for sp in 0..n {
                    if sp != s {
                        let w = kernel_weight(data.z()[s], z0, h) * kernel_weight(data.z()[sp], z0, h);
                        q += w * (concord(data, s, sp, a, b) - tau[(a, b)]);
                    }
                }
                q *= h.sqrt() / (n - 1) as f64;
                theta[(a, b)] = PI * (FRAC_PI_2 * tau[(a, b)]).cos() * q;
            }
        }
        let v = (omega.column(j).transpose() * theta * omega.column(k))[(0, 0)];
        acc += v * v;
    }
    acc / n as f64 / (un * un)
}

/// Literal multiplier draw: pair weights scaled by `xi_i + xi_i'`.
pub fn brute_bootstrap(data: &Dataset, z0: f64, h: f64, xi: &[f64]) -> (DMatrix<f64>, f64) {
    let (n, d) = (data.n(), data.d());
    let mut num = DMatrix::zeros(d, d);
    let mut den = 0.0;
    for i in 0..n {
        for ip in 0..n {
            if i == ip {
                continue;
            }
            let w = kernel_weight(data.z()[i], z0, h) * kernel_weight(data.z()[ip], z0, h) * (xi[i] + xi[ip]);
            den += w;
            for a in 0..d {
                for b in 0..d {
                    num[(a, b)] += w * concord(data, i, ip, a, b);
                }
            }
        }
    }
    (num / den, den / (n * (n - 1)) as f64)
}

/// Random correlation matrix from normalized Gram of a random factor.
pub fn random_correlation(r: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let m = d + 2;
    let g = DMatrix::from_fn(d, m, |_, _| r.sample::<f64, _>(StandardNormal));
    let s = &g * g.transpose();
    DMatrix::from_fn(d, d, |a, b| {
        if a == b {
            1.0
        } else {
            s[(a, b)] / (s[(a, a)] * s[(b, b)]).sqrt()
        }
    })
}

/// Solves the square system by Gaussian elimination with partial pivoting;
/// `None` if (numerically) singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

fn combinations(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::with_capacity(k), f);
}

/// A half-space `a'x <= b`.
pub type Row = (Vec<f64>, f64);

/// Minimum of `objective` over every point where `n` linearly independent
/// hyperplanes of `planes` meet and all `rows` hold (within `tol`).
/// `None` if no such point is feasible.
pub fn vertex_min(n: usize, planes: &[Row], rows: &[Row], objective: impl Fn(&[f64]) -> f64, tol: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    combinations(planes.len(), n, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| planes[i].1).collect();
        let Some(x) = solve(a, b) else { return };
        let feasible = rows.iter().all(|(a, b)| {
            let lhs: f64 = a.iter().zip(&x).map(|(u, v)| u * v).sum();
            lhs <= b + tol
        });
        if feasible {
            let v = objective(&x);
            best = Some(best.map_or(v, |cur: f64| cur.min(v)));
        }
    });
    best
}

/// `|Sigma beta - e_j|_inf <= lambda` as `2d` half-spaces in `beta`.
fn linf_rows(sigma: &DMatrix<f64>, j: usize, lambda: f64) -> Vec<Row> {
    let d = sigma.nrows();
    let mut rows = Vec::with_capacity(2 * d);
    for r in 0..d {
        let e = if r == j { 1.0 } else { 0.0 };
        let a: Vec<f64> = (0..d).map(|c| sigma[(r, c)]).collect();
        rows.push((a.clone(), e + lambda));
        rows.push((a.iter().map(|v| -v).collect(), lambda - e));
    }
    rows
}

/// `min |beta|_1 s.t. |Sigma beta - e_j|_inf <= lambda`, by enumerating the
/// vertices of the feasible polytope cut by the coordinate hyperplanes.
pub fn clime_oracle(sigma: &DMatrix<f64>, j: usize, lambda: f64) -> f64 {
    let d = sigma.nrows();
    let rows = linf_rows(sigma, j, lambda);
    let mut planes = rows.clone();
    for i in 0..d {
        let mut a = vec![0.0; d];
        a[i] = 1.0;
        planes.push((a, 0.0));
    }
    vertex_min(d, &planes, &rows, |x| x.iter().map(|v| v.abs()).sum(), 1e-9).expect("CLIME feasible")
}

/// `min |beta|_1 + gamma kappa s.t. |Sigma beta - e_j|_inf <= lambda kappa,
/// |beta|_1 <= kappa`, one orthant at a time so the l1 terms are linear.
pub fn calibrated_oracle(sigma: &DMatrix<f64>, j: usize, lambda: f64, gamma: f64) -> f64 {
    let d = sigma.nrows();
    let n = d + 1;
    let mut best = f64::INFINITY;
    for mask in 0..(1usize << d) {
        let s: Vec<f64> = (0..d).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
        let mut rows: Vec<Row> = Vec::new();
        for r in 0..d {
            let e = if r == j { 1.0 } else { 0.0 };
            let mut up: Vec<f64> = (0..d).map(|c| sigma[(r, c)]).collect();
            let mut lo: Vec<f64> = up.iter().map(|v| -v).collect();
            up.push(-lambda);
            lo.push(-lambda);
            rows.push((up, e));
            rows.push((lo, -e));
        }
        let mut l1 = s.clone();
        l1.push(-1.0);
        rows.push((l1, 0.0));
        for i in 0..d {
            let mut a = vec![0.0; n];
            a[i] = -s[i];
            rows.push((a, 0.0));
        }
        let mut k = vec![0.0; n];
        k[d] = -1.0;
        rows.push((k, 0.0));
        let obj = |x: &[f64]| (0..d).map(|i| s[i] * x[i]).sum::<f64>() + gamma * x[d];
        if let Some(v) = vertex_min(n, &rows, &rows, obj, 1e-9) {
            best = best.min(v);
        }
    }
    best
}
