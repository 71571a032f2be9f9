//! Score-based tests: single edge, super-graph, and uniform edge presence.
//!
//! All three tests evaluate the score `Omega_j' (Sigma Omega_{k\j} - e_k)`,
//! where `Omega_{k\j}` is column `k` of the inverse estimate with entry `j`
//! zeroed. The edge test standardizes it with a leave-one-out Jackknife
//! variance; the other two calibrate a max (or sup over a grid) of scores
//! with a Gaussian multiplier bootstrap of the Kendall's tau U-statistic.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::clime::{inverse_correlation, ClimeConfig, Symmetrize};
use crate::datamodel::{Dataset, EvalGrid, Graph, KernelSpec, SymMatrix};
use crate::error::{Error, Result};
use crate::kendall::{self, packed_index, packed_len, PairSummary, TauEstimate};
use crate::normal::{std_normal_cdf, std_normal_quantile};
use crate::{par, rng};

/// Everything the score at one index value depends on.
#[derive(Debug, Clone)]
pub struct ScoreContext {
    pub z0: f64,
    pub summary: PairSummary,
    pub tau: TauEstimate,
    pub sigma_hat: SymMatrix,
    /// Unsymmetrized inverse estimate; column `j` is the fitted column `j`.
    pub omega_hat: DMatrix<f64>,
}

impl ScoreContext {
    /// Builds from a summary and an externally supplied inverse estimate.
    pub fn new(summary: PairSummary, omega_hat: DMatrix<f64>) -> Result<Self> {
        let d = summary.d();
        if omega_hat.nrows() != d || omega_hat.ncols() != d {
            return Err(Error::InvalidArgument(format!(
                "omega is {}x{}, expected {d}x{d}",
                omega_hat.nrows(),
                omega_hat.ncols()
            )));
        }
        let tau = kendall::kendall_tau(&summary)?;
        let sigma_hat = kendall::latent_correlation(&tau);
        Ok(Self {
            z0: summary.z0(),
            summary,
            tau,
            sigma_hat,
            omega_hat,
        })
    }

    pub fn from_data(data: &Dataset, spec: &KernelSpec, z0: f64, omega_hat: DMatrix<f64>) -> Result<Self> {
        Self::new(kendall::pair_summary(data, spec, z0)?, omega_hat)
    }

    /// Runs the whole estimation pipeline at `z0` and keeps the raw columns.
    pub fn fit(data: &Dataset, spec: &KernelSpec, z0: f64, clime: &ClimeConfig) -> Result<Self> {
        let summary = kendall::pair_summary(data, spec, z0)?;
        let tau = kendall::kendall_tau(&summary)?;
        let sigma_hat = kendall::latent_correlation(&tau);
        let est = inverse_correlation(&sigma_hat, &clime.with_symmetrize(Symmetrize::None))?;
        Ok(Self {
            z0,
            summary,
            tau,
            sigma_hat,
            omega_hat: est.raw,
        })
    }

    pub fn d(&self) -> usize {
        self.summary.d()
    }

    pub fn n(&self) -> usize {
        self.summary.n()
    }

    /// `sqrt(n h)`.
    pub fn root_nh(&self) -> f64 {
        (self.n() as f64 * self.summary.h()).sqrt()
    }
}

/// Fits a context at each point, in parallel.
pub fn fit_contexts(data: &Dataset, spec: &KernelSpec, points: &[f64], clime: &ClimeConfig) -> Result<Vec<ScoreContext>> {
    par::map_slice(points, |&z| ScoreContext::fit(data, spec, z, clime))
        .into_iter()
        .collect()
}

/// `Sigma * Omega_k`.
fn sigma_times_column(sigma: &DMatrix<f64>, omega: &DMatrix<f64>, k: usize) -> Vec<f64> {
    let d = sigma.nrows();
    let mut out = vec![0.0; d];
    for b in 0..d {
        let w = omega[(b, k)];
        if w != 0.0 {
            for (a, o) in out.iter_mut().enumerate() {
                *o += sigma[(a, b)] * w;
            }
        }
    }
    out
}

/// `Omega_j' (Sigma Omega_{k\j} - e_k)` given `mk = Sigma Omega_k`.
fn score_from_column(sigma: &DMatrix<f64>, omega: &DMatrix<f64>, mk: &[f64], j: usize, k: usize) -> f64 {
    let w_jk = omega[(j, k)];
    let mut total = 0.0;
    for (a, &m) in mk.iter().enumerate() {
        let o = omega[(a, j)];
        if o != 0.0 {
            total += o * (m - sigma[(a, j)] * w_jk);
        }
    }
    total - omega[(k, j)]
}

fn check_pair(d: usize, j: usize, k: usize) -> Result<()> {
    if j == k || j >= d || k >= d {
        return Err(Error::InvalidArgument(format!("({j},{k}) is not a valid off-diagonal pair for d = {d}")));
    }
    Ok(())
}

/// Score at the null-restricted column for the pair `(j, k)` (0-indexed).
pub fn score(ctx: &ScoreContext, j: usize, k: usize) -> Result<f64> {
    check_pair(ctx.d(), j, k)?;
    let sigma = ctx.sigma_hat.as_matrix();
    let mk = sigma_times_column(sigma, &ctx.omega_hat, k);
    Ok(score_from_column(sigma, &ctx.omega_hat, &mk, j, k))
}

/// Scores for a list of pairs against an arbitrary correlation matrix.
fn pair_scores(sigma: &DMatrix<f64>, omega: &DMatrix<f64>, pairs: &[(usize, usize)]) -> Vec<f64> {
    let d = sigma.nrows();
    let mut cols: Vec<Option<Vec<f64>>> = vec![None; d];
    pairs
        .iter()
        .map(|&(j, k)| {
            let mk = cols[k].get_or_insert_with(|| sigma_times_column(sigma, omega, k));
            score_from_column(sigma, omega, mk, j, k)
        })
        .collect()
}

/// Leave-one-out Jackknife estimate of the score's asymptotic variance.
pub fn jackknife_variance(ctx: &ScoreContext, j: usize, k: usize) -> Result<f64> {
    check_pair(ctx.d(), j, k)?;
    let n = ctx.n();
    if n < 3 {
        return Err(Error::InvalidArgument("Jackknife needs n >= 3".into()));
    }
    let un = ctx.tau.un_omega;
    if !(un > 0.0) {
        return Err(Error::ZeroWeight);
    }
    let d = ctx.d();
    let tau = ctx.tau.tau.as_matrix();
    let omega = &ctx.omega_hat;
    let scale = ctx.summary.h().sqrt() / (n - 1) as f64;
    let mut cos_fac = vec![0.0; packed_len(d)];
    let mut tau_p = vec![0.0; packed_len(d)];
    for a in 0..d {
        for b in a..d {
            let q = packed_index(d, a, b);
            cos_fac[q] = PI * (FRAC_PI_2 * tau[(a, b)]).cos();
            tau_p[q] = tau[(a, b)];
        }
    }
    let oj: Vec<f64> = (0..d).map(|a| omega[(a, j)]).collect();
    let ok: Vec<f64> = (0..d).map(|b| omega[(b, k)]).collect();
    let mut sum_sq = 0.0;
    for (r, &w) in ctx.summary.member_weights().iter().enumerate() {
        let s = ctx.summary.member_signs(r);
        let mut v = 0.0;
        for a in 0..d {
            if oj[a] == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for b in 0..d {
                let q = packed_index(d, a, b);
                let theta = cos_fac[q] * scale * (s[q] - tau_p[q] * w);
                inner += theta * ok[b];
            }
            v += oj[a] * inner;
        }
        sum_sq += v * v;
    }
    Ok(sum_sq / n as f64 / (un * un))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Edge,
    Supergraph,
    Uniform,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub kind: TestKind,
    pub statistic: f64,
    pub threshold: f64,
    pub alpha: f64,
    pub reject: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    #[serde(skip)]
    pub replicates: Option<Vec<f64>>,
    pub n_replicates: usize,
    pub degenerate_replicates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0,1)")));
    }
    Ok(())
}

/// Raw pieces of the edge test.
#[derive(Debug, Clone, Copy)]
pub struct EdgeStatistic {
    pub score: f64,
    pub variance: f64,
    /// `sqrt(n h) * score / sigma_hat`, signed.
    pub standardized: f64,
}

pub fn edge_statistic(ctx: &ScoreContext, j: usize, k: usize) -> Result<EdgeStatistic> {
    let s = score(ctx, j, k)?;
    let variance = jackknife_variance(ctx, j, k)?;
    if !(variance > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(EdgeStatistic {
        score: s,
        variance,
        standardized: ctx.root_nh() * s / variance.sqrt(),
    })
}

/// Decision rule shared by [`edge_test`]: reject iff `|z| > Phi^{-1}(1 - alpha/2)`.
pub fn edge_decision(standardized: f64, variance: f64, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let statistic = standardized.abs();
    let threshold = std_normal_quantile(1.0 - alpha / 2.0)?;
    Ok(TestReport {
        kind: TestKind::Edge,
        statistic,
        threshold,
        alpha,
        reject: statistic > threshold,
        p_value: Some(2.0 * (1.0 - std_normal_cdf(statistic))),
        variance: Some(variance),
        replicates: None,
        n_replicates: 0,
        degenerate_replicates: 0,
        seed: None,
    })
}

/// Level-`alpha` test of `Omega_jk(z0) = 0`.
pub fn edge_test(ctx: &ScoreContext, j: usize, k: usize, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let e = edge_statistic(ctx, j, k)?;
    edge_decision(e.standardized, e.variance, alpha)
}

/// Where bootstrap multipliers come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multipliers {
    /// i.i.d. N(0,1) from the seeded stream.
    Gaussian,
    /// Every multiplier equal to the given constant (test harness).
    Constant(f64),
}

/// How a multiplier draw enters the score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapForm {
    /// `U^B S_hat + Omega_j' Delta^B Omega_{k\j}` with
    /// `Delta^B = (pi/2) cos(pi/2 T_hat) o U^B (T^B - T_hat)`: the sine is
    /// expanded to first order around the point estimate.
    Linearized,
    /// `U^B Omega_j' (sin(pi/2 T^B) Omega_{k\j} - e_k)` evaluated as is.
    /// `T^B` is a ratio of two mean-zero sums, so the sine squashes it and
    /// the resulting quantiles are too small.
    Literal,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub seed: u64,
    /// Use `max |.|` instead of the signed max.
    pub two_sided: bool,
    pub multipliers: Multipliers,
    pub form: BootstrapForm,
}

impl BootstrapOptions {
    pub const DEFAULT_REPLICATES: usize = 1000;
    pub const MIN_REPLICATES: usize = 100;

    pub fn new(replicates: usize, seed: u64) -> Self {
        Self {
            replicates,
            seed,
            two_sided: false,
            multipliers: Multipliers::Gaussian,
            form: BootstrapForm::Linearized,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicates < Self::MIN_REPLICATES {
            return Err(Error::InvalidArgument(format!(
                "need at least {} bootstrap replicates, got {}",
                Self::MIN_REPLICATES,
                self.replicates
            )));
        }
        Ok(())
    }

    fn degenerate_limit(&self) -> usize {
        self.replicates / 10
    }

    fn draw(&self, n: usize, replicate: usize, attempt: usize) -> Vec<f64> {
        match self.multipliers {
            Multipliers::Constant(c) => vec![c; n],
            Multipliers::Gaussian => {
                let mut r = rng::stream(self.seed, &[rng::tag::BOOTSTRAP, replicate as u64, attempt as u64]);
                (0..n).map(|_| r.sample(StandardNormal)).collect()
            }
        }
    }
}

/// One bootstrap perturbation of the tau estimate at a single index value.
#[derive(Debug, Clone)]
pub struct BootstrapDraw {
    pub xi: Vec<f64>,
    pub un_omega_b: f64,
    pub tau_b: SymMatrix,
    pub sigma_b: SymMatrix,
}

struct DrawCore {
    un_omega_b: f64,
    tau_b: DMatrix<f64>,
    sigma_b: DMatrix<f64>,
}

/// `sum_i xi_i s_row[i]` (packed), `sum_i xi_i w_row[i]` and
/// `sum_i |xi_i| w_row[i]`; the bootstrap numerator and denominator are twice
/// the first two.
fn multiplier_sums(summary: &PairSummary, xi: &[f64]) -> (Vec<f64>, f64, f64) {
    let mut num = vec![0.0; packed_len(summary.d())];
    let mut den = 0.0;
    let mut scale = 0.0;
    for (r, (&i, &w)) in summary.members().iter().zip(summary.member_weights()).enumerate() {
        let x = xi[i];
        den += x * w;
        scale += x.abs() * w;
        for (acc, &s) in num.iter_mut().zip(summary.member_signs(r)) {
            *acc += x * s;
        }
    }
    (num, den, scale)
}

fn pair_count(summary: &PairSummary) -> f64 {
    let n = summary.n() as f64;
    n * (n - 1.0)
}

/// Row-sum form of the multiplier bootstrap: the numerator of `tau_b` is
/// `2 sum_i xi_i s_row[i]`, the denominator `2 sum_i xi_i w_row[i]`.
fn draw_core(summary: &PairSummary, xi: &[f64]) -> Option<DrawCore> {
    let d = summary.d();
    let (mut num, den, scale) = multiplier_sums(summary, xi);
    if den.abs() <= 1e-12 * scale {
        return None;
    }
    let den2 = 2.0 * den;
    for v in num.iter_mut() {
        *v *= 2.0;
    }
    let tau_b = kendall::tau_from_packed(d, &num, den2);
    let sigma_b = kendall::sine_transform(&tau_b);
    Some(DrawCore {
        un_omega_b: den2 / pair_count(summary),
        tau_b,
        sigma_b,
    })
}

/// Evaluates one bootstrap draw; `None` flags a degenerate denominator.
pub fn bootstrap_draw(summary: &PairSummary, xi: &[f64]) -> Result<Option<BootstrapDraw>> {
    if xi.len() != summary.n() {
        return Err(Error::InvalidArgument(format!(
            "{} multipliers for {} samples",
            xi.len(),
            summary.n()
        )));
    }
    Ok(draw_core(summary, xi).map(|c| BootstrapDraw {
        xi: xi.to_vec(),
        un_omega_b: c.un_omega_b,
        tau_b: SymMatrix::from_symmetric_unchecked(c.tau_b),
        sigma_b: SymMatrix::from_symmetric_unchecked(c.sigma_b),
    }))
}

/// `max` over pairs of `weight * score`, or of `|weight * score|`.
fn weighted_max(weight: f64, scores: &[f64], two_sided: bool) -> f64 {
    scores
        .iter()
        .map(|&s| {
            let v = weight * s;
            if two_sided {
                v.abs()
            } else {
                v
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn complement_pairs(graph: &Graph, d: usize) -> Result<Vec<(usize, usize)>> {
    if graph.d() != d {
        return Err(Error::InvalidArgument(format!("graph has {} vertices, data has {d}", graph.d())));
    }
    let pairs = graph.complement_edges();
    if pairs.is_empty() {
        return Err(Error::EmptyComplement);
    }
    Ok(pairs)
}

fn context_statistic(ctx: &ScoreContext, pairs: &[(usize, usize)], two_sided: bool) -> f64 {
    let scores = pair_scores(ctx.sigma_hat.as_matrix(), &ctx.omega_hat, pairs);
    ctx.root_nh() * weighted_max(ctx.tau.un_omega, &scores, two_sided)
}

/// `sqrt(n h) U_n[w] max_{(j,k)} score(j, k)` over the listed pairs.
pub fn supergraph_statistic(ctx: &ScoreContext, pairs: &[(usize, usize)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyComplement);
    }
    for &(j, k) in pairs {
        check_pair(ctx.d(), j, k)?;
    }
    Ok(context_statistic(ctx, pairs, false))
}

/// `ceil((1 - alpha) B)`-th order statistic (1-based) of the replicates.
pub fn bootstrap_quantile(replicates: &[f64], alpha: f64) -> f64 {
    let mut sorted = replicates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let b = sorted.len();
    let idx = (((1.0 - alpha) * b as f64) - 1e-9).ceil() as usize;
    sorted[idx.clamp(1, b) - 1]
}

/// Per-context quantities reused by every replicate of the linearized form.
struct LinearPrep {
    hat_scores: Vec<f64>,
    /// `(pi/2) cos(pi/2 tau_hat)`, packed.
    slope: Vec<f64>,
}

impl LinearPrep {
    fn new(ctx: &ScoreContext, pairs: &[(usize, usize)]) -> Self {
        let d = ctx.d();
        let tau = ctx.tau.tau.as_matrix();
        let mut slope = vec![0.0; packed_len(d)];
        for a in 0..d {
            for b in a + 1..d {
                slope[packed_index(d, a, b)] = FRAC_PI_2 * (FRAC_PI_2 * tau[(a, b)]).cos();
            }
        }
        Self {
            hat_scores: pair_scores(ctx.sigma_hat.as_matrix(), &ctx.omega_hat, pairs),
            slope,
        }
    }
}

/// `U^B S_hat + Omega_j' Delta^B Omega_{k\j}` for every pair. `U^B (T^B - T_hat)`
/// is written as `2 (num W - S den) / (W n(n-1))`, which vanishes exactly for
/// constant multipliers.
fn linearized_values(ctx: &ScoreContext, prep: &LinearPrep, pairs: &[(usize, usize)], xi: &[f64]) -> (f64, Vec<f64>) {
    let summary = &ctx.summary;
    let d = summary.d();
    let (num, den, _) = multiplier_sums(summary, xi);
    let nn1 = pair_count(summary);
    let w = summary.w_total();
    let s_tot = summary.s_total_packed();
    let mut delta = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in a + 1..d {
            let p = packed_index(d, a, b);
            let v = prep.slope[p] * 2.0 * (num[p] * w - s_tot[p] * den) / (w * nn1);
            delta[(a, b)] = v;
            delta[(b, a)] = v;
        }
    }
    let un_b = 2.0 * den / nn1;
    let linear = pair_scores(&delta, &ctx.omega_hat, pairs);
    let values = pairs
        .iter()
        .enumerate()
        // pair_scores subtracts Omega_kj for the e_k term; add it back.
        .map(|(q, &(j, k))| un_b * prep.hat_scores[q] + (linear[q] + ctx.omega_hat[(k, j)]))
        .collect();
    (un_b, values)
}

fn signed_or_abs_max(values: impl Iterator<Item = f64>, two_sided: bool) -> f64 {
    values
        .map(|v| if two_sided { v.abs() } else { v })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Shared bootstrap loop: one multiplier vector per replicate, evaluated at
/// every context. In the literal form a draw is redrawn if any denominator is
/// degenerate.
fn run_bootstrap(
    contexts: &[ScoreContext],
    pairs: &[(usize, usize)],
    opts: &BootstrapOptions,
) -> Result<(Vec<f64>, usize)> {
    let n = contexts[0].n();
    let root_nh = contexts[0].root_nh();
    let limit = opts.degenerate_limit();
    let preps: Vec<LinearPrep> = match opts.form {
        BootstrapForm::Linearized => contexts.iter().map(|c| LinearPrep::new(c, pairs)).collect(),
        BootstrapForm::Literal => Vec::new(),
    };
    let results: Vec<(Option<f64>, usize)> = par::map_range(opts.replicates, |b| {
        let mut attempt = 0;
        'redraw: loop {
            if attempt > limit {
                return (None, attempt);
            }
            let xi = opts.draw(n, b, attempt);
            let mut stat = f64::NEG_INFINITY;
            for (c, ctx) in contexts.iter().enumerate() {
                let m = match opts.form {
                    BootstrapForm::Linearized => {
                        let (_, values) = linearized_values(ctx, &preps[c], pairs, &xi);
                        signed_or_abs_max(values.into_iter(), opts.two_sided)
                    }
                    BootstrapForm::Literal => {
                        let Some(core) = draw_core(&ctx.summary, &xi) else {
                            attempt += 1;
                            continue 'redraw;
                        };
                        let scores = pair_scores(&core.sigma_b, &ctx.omega_hat, pairs);
                        weighted_max(core.un_omega_b, &scores, opts.two_sided)
                    }
                };
                stat = stat.max(m);
            }
            return (Some(root_nh * stat), attempt);
        }
    });
    let degenerate: usize = results.iter().map(|r| r.1).sum();
    if degenerate > limit || results.iter().any(|r| r.0.is_none()) {
        return Err(Error::TooManyDegenerate {
            degenerate,
            limit,
        });
    }
    Ok((results.into_iter().map(|r| r.0.expect("checked")).collect(), degenerate))
}

fn bootstrap_report(
    kind: TestKind,
    statistic: f64,
    replicates: Vec<f64>,
    degenerate: usize,
    alpha: f64,
    opts: &BootstrapOptions,
) -> TestReport {
    let threshold = bootstrap_quantile(&replicates, alpha);
    let exceed = replicates.iter().filter(|&&r| r >= statistic).count();
    TestReport {
        kind,
        statistic,
        threshold,
        alpha,
        reject: statistic > threshold,
        p_value: Some(exceed as f64 / replicates.len() as f64),
        variance: None,
        n_replicates: replicates.len(),
        replicates: Some(replicates),
        degenerate_replicates: degenerate,
        seed: Some(opts.seed),
    }
}

/// Super-graph test at a fitted context.
pub fn supergraph_test_ctx(ctx: &ScoreContext, graph: &Graph, alpha: f64, opts: &BootstrapOptions) -> Result<TestReport> {
    check_alpha(alpha)?;
    opts.validate()?;
    let pairs = complement_pairs(graph, ctx.d())?;
    let statistic = context_statistic(ctx, &pairs, opts.two_sided);
    let (reps, degenerate) = run_bootstrap(std::slice::from_ref(ctx), &pairs, opts)?;
    Ok(bootstrap_report(TestKind::Supergraph, statistic, reps, degenerate, alpha, opts))
}

/// Level-`alpha` test of `G*(z0) subset of graph` given an inverse estimate.
pub fn supergraph_test(
    data: &Dataset,
    spec: &KernelSpec,
    z0: f64,
    omega_hat: &DMatrix<f64>,
    graph: &Graph,
    alpha: f64,
    opts: &BootstrapOptions,
) -> Result<TestReport> {
    let ctx = ScoreContext::from_data(data, spec, z0, omega_hat.clone())?;
    supergraph_test_ctx(&ctx, graph, alpha, opts)
}

/// `sqrt(n h) max_z max_{(j,k)} U_n[w_z] score_z(j, k)` over fitted contexts.
pub fn uniform_statistic_ctx(contexts: &[ScoreContext], graph: &Graph) -> Result<f64> {
    let first = contexts
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty grid".into()))?;
    let pairs = complement_pairs(graph, first.d())?;
    Ok(contexts
        .iter()
        .map(|c| context_statistic(c, &pairs, false))
        .fold(f64::NEG_INFINITY, f64::max))
}

fn grid_contexts(
    data: &Dataset,
    spec: &KernelSpec,
    grid: &EvalGrid,
    omega_path: &[DMatrix<f64>],
) -> Result<Vec<ScoreContext>> {
    if omega_path.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "{} inverse estimates for {} grid points",
            omega_path.len(),
            grid.len()
        )));
    }
    let idx: Vec<usize> = (0..grid.len()).collect();
    par::map_slice(&idx, |&g| ScoreContext::from_data(data, spec, grid.points()[g], omega_path[g].clone()))
        .into_iter()
        .collect()
}

pub fn uniform_statistic(
    data: &Dataset,
    spec: &KernelSpec,
    grid: &EvalGrid,
    omega_path: &[DMatrix<f64>],
    graph: &Graph,
) -> Result<f64> {
    uniform_statistic_ctx(&grid_contexts(data, spec, grid, omega_path)?, graph)
}

/// Uniform test over fitted contexts (one per grid point).
pub fn uniform_test_ctx(contexts: &[ScoreContext], graph: &Graph, alpha: f64, opts: &BootstrapOptions) -> Result<TestReport> {
    check_alpha(alpha)?;
    opts.validate()?;
    let first = contexts
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty grid".into()))?;
    let pairs = complement_pairs(graph, first.d())?;
    let statistic = contexts
        .iter()
        .map(|c| context_statistic(c, &pairs, opts.two_sided))
        .fold(f64::NEG_INFINITY, f64::max);
    let (reps, degenerate) = run_bootstrap(contexts, &pairs, opts)?;
    Ok(bootstrap_report(TestKind::Uniform, statistic, reps, degenerate, alpha, opts))
}

/// Level-`alpha` test of `G*(z) subset of graph` for every grid point.
pub fn uniform_test(
    data: &Dataset,
    spec: &KernelSpec,
    grid: &EvalGrid,
    omega_path: &[DMatrix<f64>],
    graph: &Graph,
    alpha: f64,
    opts: &BootstrapOptions,
) -> Result<TestReport> {
    uniform_test_ctx(&grid_contexts(data, spec, grid, omega_path)?, graph, alpha, opts)
}
