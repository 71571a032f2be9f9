//! Tuning rules and Monte-Carlo drivers for size, power and ROC experiments.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::Serialize;

use crate::baselines::{kernel_pearson, neighborhood_graph, LassoConfig};
use crate::clime::{inverse_correlation, ClimeConfig, ClimeMethod, SUPPORT_TOL};
use crate::datamodel::{Dataset, EvalGrid, Graph, Kernel, KernelSpec, SymMatrix};
use crate::error::{Error, Result};
use crate::inference::{self, BootstrapForm, BootstrapOptions, ScoreContext, TestReport};
use crate::kendall;
use crate::normal::std_normal_cdf;
use crate::simgen::{self, tpr_at_fpr, RocPoint, SimConfig};
use crate::{par, rng};

/// Bandwidth as a function of the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum BandwidthRule {
    Fixed(f64),
    /// `c n^{-1/5}`, default `c = 0.35`.
    Estimate(f64),
    /// `c n^{-1/5}`, default `c = 0.9`.
    Test(f64),
}

impl BandwidthRule {
    pub const ESTIMATE_CONST: f64 = 0.35;
    pub const TEST_CONST: f64 = 0.9;

    pub fn estimate() -> Self {
        Self::Estimate(Self::ESTIMATE_CONST)
    }

    pub fn test() -> Self {
        Self::Test(Self::TEST_CONST)
    }

    pub fn resolve(self, n: usize) -> Result<f64> {
        let h = match self {
            Self::Fixed(h) => h,
            Self::Estimate(c) | Self::Test(c) => c * (n as f64).powf(-0.2),
        };
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidArgument(format!("bandwidth {h} outside (0,1)")));
        }
        Ok(h)
    }
}

/// `test`, `estimate`, `test:C`, `estimate:C`, `fixed:H`, or a bare bandwidth.
impl FromStr for BandwidthRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, value) = split_rule(s)?;
        match (name.as_str(), value) {
            ("test", c) => Ok(Self::Test(c.unwrap_or(Self::TEST_CONST))),
            ("estimate", c) => Ok(Self::Estimate(c.unwrap_or(Self::ESTIMATE_CONST))),
            ("fixed", Some(h)) => Ok(Self::Fixed(h)),
            _ => Err(Error::InvalidArgument(format!("unknown bandwidth rule '{s}'"))),
        }
    }
}

/// Splits `name[:value]`; a bare number reads as `fixed:number`.
fn split_rule(s: &str) -> Result<(String, Option<f64>)> {
    let s = s.trim().to_ascii_lowercase();
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("bad number '{v}' in rule '{s}'")))
    };
    if let Ok(v) = s.parse::<f64>() {
        return Ok(("fixed".into(), Some(v)));
    }
    match s.split_once(':') {
        Some((name, v)) => Ok((name.trim().to_string(), Some(num(v)?))),
        None => Ok((s.clone(), None)),
    }
}

/// Regularization level as a function of `(n, d, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum LambdaRule {
    Fixed(f64),
    /// `c (h^2 + sqrt(log(d/h) / (n h)))`, default `c = 0.2`.
    Scaled(f64),
}

impl LambdaRule {
    pub const DEFAULT_CONST: f64 = 0.2;

    pub fn paper() -> Self {
        Self::Scaled(Self::DEFAULT_CONST)
    }

    pub fn resolve(self, n: usize, d: usize, h: f64) -> Result<f64> {
        let lambda = match self {
            Self::Fixed(l) => l,
            Self::Scaled(c) => c * (h * h + ((d as f64 / h).ln() / (n as f64 * h)).sqrt()),
        };
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda {lambda} must be positive")));
        }
        Ok(lambda)
    }
}

/// `paper`, `scaled:C`, `fixed:L`, or a bare lambda.
impl FromStr for LambdaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, value) = split_rule(s)?;
        match (name.as_str(), value) {
            ("paper", None) => Ok(Self::paper()),
            ("scaled", Some(c)) => Ok(Self::Scaled(c)),
            ("fixed", Some(l)) => Ok(Self::Fixed(l)),
            _ => Err(Error::InvalidArgument(format!("unknown lambda rule '{s}'"))),
        }
    }
}

/// Wilson score interval for `k` successes in `r` trials at normal quantile `q`.
pub fn wilson_interval(k: usize, r: usize, q: f64) -> (f64, f64) {
    if r == 0 {
        return (0.0, 1.0);
    }
    let n = r as f64;
    let p = k as f64 / n;
    let q2 = q * q;
    let centre = (p + q2 / (2.0 * n)) / (1.0 + q2 / n);
    let half = q / (1.0 + q2 / n) * (p * (1.0 - p) / n + q2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Kolmogorov-Smirnov distance between the empirical CDF and `N(0,1)`.
pub fn ks_distance_normal(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = std_normal_cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Kernel and tuning choices shared by the test studies.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TestSettings {
    pub kernel: Kernel,
    pub h_rule: BandwidthRule,
    pub lambda_rule: LambdaRule,
    pub gamma: f64,
    pub alpha: f64,
    pub method: ClimeMethod,
}

impl Default for TestSettings {
    fn default() -> Self {
        Self {
            kernel: Kernel::Epanechnikov,
            h_rule: BandwidthRule::test(),
            lambda_rule: LambdaRule::paper(),
            gamma: ClimeConfig::DEFAULT_GAMMA,
            alpha: 0.05,
            method: ClimeMethod::CalibratedClime,
        }
    }
}

/// Resolved tuning for a given problem size.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Resolved {
    pub h: f64,
    pub lambda: f64,
    #[serde(skip)]
    pub spec: KernelSpec,
    #[serde(skip)]
    pub clime: ClimeConfig,
}

impl TestSettings {
    pub fn resolve(&self, n: usize, d: usize) -> Result<Resolved> {
        let h = self.h_rule.resolve(n)?;
        let lambda = self.lambda_rule.resolve(n, d, h)?;
        let mut clime = ClimeConfig::new(self.method, lambda);
        clime.gamma = self.gamma;
        clime.validate()?;
        Ok(Resolved {
            h,
            lambda,
            spec: KernelSpec::new(self.kernel, h)?,
            clime,
        })
    }
}

/// Rejection count with a Wilson 95% interval.
#[derive(Debug, Clone, Serialize)]
pub struct RejectionSummary {
    pub reps: usize,
    pub completed: usize,
    pub rejections: usize,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    /// Replicates that ended in an error, with the message.
    pub failures: Vec<(usize, String)>,
}

impl RejectionSummary {
    fn from_outcomes(outcomes: &[std::result::Result<bool, String>]) -> Self {
        let failures: Vec<(usize, String)> = outcomes
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.as_ref().err().map(|e| (i, e.clone())))
            .collect();
        let completed = outcomes.len() - failures.len();
        let rejections = outcomes.iter().filter(|o| matches!(o, Ok(true))).count();
        let rate = if completed == 0 {
            f64::NAN
        } else {
            rejections as f64 / completed as f64
        };
        let (wilson_lo, wilson_hi) = wilson_interval(rejections, completed, 1.959_963_984_540_054);
        Self {
            reps: outcomes.len(),
            completed,
            rejections,
            rate,
            wilson_lo,
            wilson_hi,
            failures,
        }
    }
}

fn replicate_config(sim: &SimConfig, seed: u64, r: usize) -> SimConfig {
    SimConfig {
        seed: rng::child_seed(seed, &[rng::tag::SIMULATION, r as u64]),
        ..sim.clone()
    }
}

fn bootstrap_seed(seed: u64, r: usize) -> u64 {
    rng::child_seed(seed, &[rng::tag::BOOTSTRAP, r as u64])
}

/// Repeated single-edge tests on simulated data.
#[derive(Debug, Clone, Serialize)]
pub struct EdgeStudyConfig {
    pub sim: SimConfig,
    pub z0: f64,
    /// 0-indexed pair; serialized 1-indexed.
    #[serde(serialize_with = "pair_json")]
    pub edge: (usize, usize),
    pub settings: TestSettings,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeStudyResult {
    pub summary: RejectionSummary,
    pub resolved: Resolved,
    /// Signed standardized statistics of the completed replicates.
    pub statistics: Vec<f64>,
}

pub fn edge_test_on(data: &Dataset, z0: f64, edge: (usize, usize), settings: &TestSettings) -> Result<(TestReport, f64)> {
    let res = settings.resolve(data.n(), data.d())?;
    let ctx = ScoreContext::fit(data, &res.spec, z0, &res.clime)?;
    let e = inference::edge_statistic(&ctx, edge.0, edge.1)?;
    Ok((inference::edge_decision(e.standardized, e.variance, settings.alpha)?, e.standardized))
}

pub fn edge_study(cfg: &EdgeStudyConfig) -> Result<EdgeStudyResult> {
    cfg.sim.validate()?;
    let resolved = cfg.settings.resolve(cfg.sim.n, cfg.sim.d)?;
    let runs: Vec<std::result::Result<(bool, f64), String>> = par::map_range(cfg.reps, |r| {
        let sim = replicate_config(&cfg.sim, cfg.seed, r);
        let (_, data) = simgen::simulate(&sim).map_err(|e| e.to_string())?;
        edge_test_on(&data, cfg.z0, cfg.edge, &cfg.settings)
            .map(|(rep, z)| (rep.reject, z))
            .map_err(|e| e.to_string())
    });
    let outcomes: Vec<_> = runs.iter().map(|o| o.as_ref().map(|x| x.0).map_err(Clone::clone)).collect();
    Ok(EdgeStudyResult {
        summary: RejectionSummary::from_outcomes(&outcomes),
        resolved,
        statistics: runs.iter().filter_map(|o| o.as_ref().ok().map(|x| x.1)).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphTest {
    Supergraph,
    Uniform,
}

/// Repeated super-graph or uniform tests on simulated data.
#[derive(Debug, Clone, Serialize)]
pub struct GraphStudyConfig {
    pub sim: SimConfig,
    pub test: GraphTest,
    #[serde(serialize_with = "graph_json")]
    pub graph: Graph,
    /// Single point for the super-graph test.
    pub grid: EvalGrid,
    pub settings: TestSettings,
    pub replicates: usize,
    pub two_sided: bool,
    pub form: BootstrapForm,
    pub reps: usize,
    pub seed: u64,
}

fn pair_json<S: serde::Serializer>(p: &(usize, usize), s: S) -> std::result::Result<S::Ok, S::Error> {
    [p.0 + 1, p.1 + 1].serialize(s)
}

fn graph_json<S: serde::Serializer>(g: &Graph, s: S) -> std::result::Result<S::Ok, S::Error> {
    g.to_json().serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphStudyResult {
    pub summary: RejectionSummary,
    pub resolved: Resolved,
}

/// Runs one graph test on a dataset; the grid has one point for the
/// super-graph test.
pub fn graph_test_on(
    data: &Dataset,
    test: GraphTest,
    graph: &Graph,
    grid: &EvalGrid,
    settings: &TestSettings,
    opts: &BootstrapOptions,
) -> Result<TestReport> {
    let res = settings.resolve(data.n(), data.d())?;
    let contexts = inference::fit_contexts(data, &res.spec, grid.points(), &res.clime)?;
    match test {
        GraphTest::Supergraph => {
            if contexts.len() != 1 {
                return Err(Error::InvalidArgument("super-graph test takes a single z0".into()));
            }
            inference::supergraph_test_ctx(&contexts[0], graph, settings.alpha, opts)
        }
        GraphTest::Uniform => inference::uniform_test_ctx(&contexts, graph, settings.alpha, opts),
    }
}

pub fn graph_study(cfg: &GraphStudyConfig) -> Result<GraphStudyResult> {
    cfg.sim.validate()?;
    let resolved = cfg.settings.resolve(cfg.sim.n, cfg.sim.d)?;
    let outcomes = par::map_range(cfg.reps, |r| {
        let sim = replicate_config(&cfg.sim, cfg.seed, r);
        let (_, data) = simgen::simulate(&sim).map_err(|e| e.to_string())?;
        let opts = BootstrapOptions {
            two_sided: cfg.two_sided,
            form: cfg.form,
            ..BootstrapOptions::new(cfg.replicates, bootstrap_seed(cfg.seed, r))
        };
        graph_test_on(&data, cfg.test, &cfg.graph, &cfg.grid, &cfg.settings, &opts)
            .map(|rep| rep.reject)
            .map_err(|e| e.to_string())
    });
    Ok(GraphStudyResult {
        summary: RejectionSummary::from_outcomes(&outcomes),
        resolved,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RocMethod {
    KendallClime,
    PearsonClime,
    Neighborhood,
}

impl RocMethod {
    pub const ALL: [RocMethod; 3] = [RocMethod::KendallClime, RocMethod::PearsonClime, RocMethod::Neighborhood];

    pub fn name(self) -> &'static str {
        match self {
            RocMethod::KendallClime => "kendall-clime",
            RocMethod::PearsonClime => "pearson-clime",
            RocMethod::Neighborhood => "neighborhood",
        }
    }
}

impl fmt::Display for RocMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RocMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        RocMethod::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

/// `count` log-spaced values from `lo` to `hi`.
pub fn log_path(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && count >= 2) {
        return Err(Error::InvalidArgument(format!("bad path [{lo}, {hi}] x {count}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct RocStudyConfig {
    pub sim: SimConfig,
    pub runs: usize,
    pub methods: Vec<RocMethod>,
    pub lambdas: Vec<f64>,
    pub kernel: Kernel,
    pub h_rule: BandwidthRule,
    pub gamma: f64,
    pub clime_method: ClimeMethod,
    /// Evaluation points drawn from the sample's index values, per run.
    pub eval_points: usize,
    /// FPR at which TPR is summarized.
    pub target_fpr: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RocCurvePoint {
    pub lambda: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodRoc {
    pub method: RocMethod,
    /// Mean over runs at each tuning value, sorted by FPR.
    pub curve: Vec<RocCurvePoint>,
    /// Interpolated TPR at the target FPR, one per run.
    pub tpr_at_target: Vec<f64>,
    pub mean_tpr_at_target: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RocStudyResult {
    pub h: f64,
    pub methods: Vec<MethodRoc>,
}

/// Distinct sample index values used as evaluation points.
pub fn evaluation_points(data: &Dataset, count: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, &[rng::tag::EVALUATION]);
    let count = count.min(data.n());
    let mut zs: Vec<f64> = index::sample(&mut r, data.n(), count)
        .into_iter()
        .map(|i| data.z()[i])
        .collect();
    zs.sort_by(f64::total_cmp);
    zs
}

fn estimated_graph(sigma: &SymMatrix, lambda: f64, gamma: f64, method: ClimeMethod) -> Result<Graph> {
    let mut cfg = ClimeConfig::new(method, lambda);
    cfg.gamma = gamma;
    Ok(inverse_correlation(sigma, &cfg)?.support(SUPPORT_TOL))
}

/// One run: `[method][lambda] -> (fpr, tpr)` averaged over evaluation points.
fn roc_run(cfg: &RocStudyConfig, spec: &KernelSpec, r: usize) -> Result<Vec<Vec<RocPoint>>> {
    let sim = replicate_config(&cfg.sim, cfg.seed, r);
    let (truth, data) = simgen::simulate(&sim)?;
    let zs = evaluation_points(&data, cfg.eval_points, sim.seed);
    let truths: Vec<Graph> = zs.iter().map(|&z| truth.support_of(z)).collect::<Result<_>>()?;
    let m = zs.len() as f64;
    cfg.methods
        .iter()
        .map(|&method| {
            let sigmas: Vec<Option<SymMatrix>> = zs
                .iter()
                .map(|&z| match method {
                    RocMethod::KendallClime => kendall::estimate_at(&data, spec, z).map(|e| Some(e.2)),
                    RocMethod::PearsonClime => kernel_pearson(&data, spec, z).map(Some),
                    RocMethod::Neighborhood => Ok(None),
                })
                .collect::<Result<_>>()?;
            let per_lambda = par::try_map_range(cfg.lambdas.len(), |li| -> Result<RocPoint> {
                let lambda = cfg.lambdas[li];
                let (mut fpr, mut tpr) = (0.0, 0.0);
                for (zi, &z) in zs.iter().enumerate() {
                    let g = match &sigmas[zi] {
                        Some(s) => estimated_graph(s, lambda, cfg.gamma, cfg.clime_method)?,
                        None => neighborhood_graph(&data, spec, z, &LassoConfig::new(lambda))?,
                    };
                    let p = simgen::rates(&g, &truths[zi], z)?;
                    fpr += p.fpr;
                    tpr += p.tpr;
                }
                Ok(RocPoint {
                    fpr: fpr / m,
                    tpr: tpr / m,
                })
            })?;
            Ok(per_lambda)
        })
        .collect()
}

pub fn roc_study(cfg: &RocStudyConfig) -> Result<RocStudyResult> {
    cfg.sim.validate()?;
    if cfg.runs == 0 || cfg.methods.is_empty() || cfg.lambdas.is_empty() || cfg.eval_points == 0 {
        return Err(Error::InvalidArgument("ROC study needs runs, methods, lambdas and evaluation points".into()));
    }
    let h = cfg.h_rule.resolve(cfg.sim.n)?;
    let spec = KernelSpec::new(cfg.kernel, h)?;
    let runs = par::try_map_range(cfg.runs, |r| roc_run(cfg, &spec, r))?;
    let methods = cfg
        .methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let tpr_at_target: Vec<f64> = runs.iter().map(|run| tpr_at_fpr(&run[mi], cfg.target_fpr)).collect();
            let mut curve: Vec<RocCurvePoint> = cfg
                .lambdas
                .iter()
                .enumerate()
                .map(|(li, &lambda)| {
                    let k = runs.len() as f64;
                    RocCurvePoint {
                        lambda,
                        fpr: runs.iter().map(|run| run[mi][li].fpr).sum::<f64>() / k,
                        tpr: runs.iter().map(|run| run[mi][li].tpr).sum::<f64>() / k,
                    }
                })
                .collect();
            curve.sort_by(|a, b| a.fpr.total_cmp(&b.fpr).then(a.tpr.total_cmp(&b.tpr)));
            MethodRoc {
                method,
                curve,
                mean_tpr_at_target: tpr_at_target.iter().sum::<f64>() / tpr_at_target.len() as f64,
                tpr_at_target,
            }
        })
        .collect();
    Ok(RocStudyResult { h, methods })
}
