//! Command-line front end. Every command writes into an output directory and
//! every file it writes carries the resolved configuration and seed.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::clime::{inverse_correlation, ClimeConfig, ClimeMethod, Symmetrize, SUPPORT_TOL};
use crate::datamodel::{Dataset, EvalGrid, Graph, Kernel};
use crate::inference::{self, BootstrapForm, BootstrapOptions, ScoreContext, TestReport};
use crate::kendall;
use crate::simgen::{self, knn_graph, FixedEdge, Scheme, SimConfig};
use crate::study::{
    self, BandwidthRule, EdgeStudyConfig, GraphStudyConfig, GraphTest, LambdaRule, RejectionSummary, RocMethod,
    RocStudyConfig, TestSettings,
};
use crate::par;

#[derive(Parser, Debug)]
#[command(name = "tvnpn", version, about = "Time-varying nonparanormal graph estimation and testing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Latent correlation, inverse and support at every grid point.
    Estimate(EstimateArgs),
    /// Test one edge at one index value.
    TestEdge(TestEdgeArgs),
    /// Test that a graph contains the true graph at one index value.
    TestGraph(TestGraphArgs),
    /// Test that a graph contains the true graph over a grid.
    TestUniform(TestUniformArgs),
    /// Draw a synthetic dataset and its truth sidecar.
    Simulate(SimulateArgs),
    /// Sweep lambda and record (FPR, TPR) per method.
    RocStudy(RocStudyArgs),
    /// Monte-Carlo rejection rates of a test.
    PowerStudy(PowerStudyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Tuning {
    #[arg(long, default_value = "epanechnikov")]
    pub kernel: Kernel,
    /// `test`, `estimate`, `test:C`, `estimate:C`, `fixed:H` or a number.
    /// Defaults to `estimate` for estimation and ROC, `test` for tests.
    #[arg(long)]
    pub h_rule: Option<BandwidthRule>,
    /// `paper`, `scaled:C`, `fixed:L` or a number.
    #[arg(long, default_value = "paper")]
    pub lambda_rule: LambdaRule,
    #[arg(long, default_value_t = ClimeConfig::DEFAULT_GAMMA)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value = "calibrated-clime")]
    pub method: ClimeMethod,
}

impl Tuning {
    fn settings(&self, default_h: BandwidthRule) -> TestSettings {
        TestSettings {
            kernel: self.kernel,
            h_rule: self.h_rule.unwrap_or(default_h),
            lambda_rule: self.lambda_rule,
            gamma: self.gamma,
            alpha: self.alpha,
            method: self.method,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct BootstrapArgs {
    #[arg(long = "B", default_value_t = BootstrapOptions::DEFAULT_REPLICATES)]
    pub replicates: usize,
    /// Take the max of `|score|` instead of the signed max.
    #[arg(long)]
    pub two_sided: bool,
    #[arg(long, value_enum, default_value_t = FormArg::Linearized)]
    pub bootstrap_form: FormArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Linearized,
    Literal,
}

impl From<FormArg> for BootstrapForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Linearized => BootstrapForm::Linearized,
            FormArg::Literal => BootstrapForm::Literal,
        }
    }
}

impl BootstrapArgs {
    fn options(&self, seed: u64) -> BootstrapOptions {
        BootstrapOptions {
            two_sided: self.two_sided,
            form: self.bootstrap_form.into(),
            ..BootstrapOptions::new(self.replicates, seed)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SymmetrizeArg {
    MinMagnitude,
    None,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
    /// `lo:hi:count`; open endpoints 0 and 1 become cell midpoints.
    #[arg(long, default_value = "0:1:100")]
    pub grid: String,
    #[arg(long, value_enum, default_value_t = SymmetrizeArg::MinMagnitude)]
    pub symmetrize: SymmetrizeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TestEdgeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
    #[arg(long)]
    pub z0: f64,
    /// 1-indexed pair `j,k`.
    #[arg(long, value_parser = parse_edge)]
    pub edge: (usize, usize),
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TestGraphArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    #[arg(long)]
    pub z0: f64,
    /// Graph JSON `{"d": int, "edges": [[j,k],...]}`, 1-indexed.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TestUniformArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    #[arg(long, default_value = "0:1:100")]
    pub grid: String,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Synthetic model. Unset sizes follow `d`: `e = d/2` edges per graph and
/// `2e/5` swapped at each change point.
#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[arg(long, default_value = "gaussian")]
    pub sim_scheme: Scheme,
    /// Sample size; power-study accepts a comma-separated list.
    #[arg(long, value_delimiter = ',', default_value = "600")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    #[arg(long)]
    pub e: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub knn_k: usize,
    #[arg(long)]
    pub churn: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub mu_min: f64,
    #[arg(long, default_value_t = 0.9)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 3.0)]
    pub contamination_variance: f64,
    /// `j,k,value` (1-indexed): hold one entry constant over the whole path.
    #[arg(long, value_parser = parse_fixed_edge)]
    pub fixed_edge: Option<FixedEdge>,
}

impl SimArgs {
    fn config(&self, n: usize, seed: u64) -> anyhow::Result<SimConfig> {
        let e = self.e.unwrap_or(self.d / 2);
        let cfg = SimConfig {
            d: self.d,
            e,
            knn_k: self.knn_k,
            churn: self.churn.unwrap_or(2 * e / 5),
            mu_min: self.mu_min,
            mu_max: self.mu_max,
            scheme: self.sim_scheme,
            contamination_variance: self.contamination_variance,
            fixed_edge: self.fixed_edge,
            ..SimConfig::full(n, seed)
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn single(&self, seed: u64) -> anyhow::Result<SimConfig> {
        ensure!(self.n.len() == 1, "this command takes a single --n");
        self.config(self.n[0], seed)
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct RocStudyArgs {
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub tuning: Tuning,
    /// Simulation runs averaged into each curve.
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    #[arg(long, value_delimiter = ',', default_value = "kendall-clime,pearson-clime,neighborhood")]
    pub methods: Vec<RocMethod>,
    /// Log-spaced `lo:hi:count`.
    #[arg(long, default_value = "0.001:1:30")]
    pub lambda_path: String,
    #[arg(long, default_value_t = 10)]
    pub eval_points: usize,
    #[arg(long, default_value_t = 0.2)]
    pub target_fpr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestArg {
    Edge,
    Supergraph,
    Uniform,
}

#[derive(Args, Debug)]
pub struct PowerStudyArgs {
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = TestArg::Edge)]
    pub test: TestArg,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.5)]
    pub z0: f64,
    #[arg(long, value_parser = parse_edge, default_value = "1,2")]
    pub edge: (usize, usize),
    /// Graph JSON to test; `--graph-knn` builds the k-NN ring instead.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub graph_knn: Option<usize>,
    #[arg(long, default_value = "0:1:100")]
    pub grid: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_edge(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [j, k] = parts.as_slice() else {
        return Err(format!("expected j,k but got '{s}'"));
    };
    let j: usize = j.parse().map_err(|_| format!("bad index '{j}'"))?;
    let k: usize = k.parse().map_err(|_| format!("bad index '{k}'"))?;
    if j == 0 || k == 0 || j == k {
        return Err(format!("need two distinct 1-indexed vertices, got '{s}'"));
    }
    Ok((j.min(k) - 1, j.max(k) - 1))
}

fn parse_fixed_edge(s: &str) -> Result<FixedEdge, String> {
    let (pair, value) = s.rsplit_once(',').ok_or_else(|| format!("expected j,k,value but got '{s}'"))?;
    let (j, k) = parse_edge(pair)?;
    let value: f64 = value.trim().parse().map_err(|_| format!("bad value '{value}'"))?;
    Ok(FixedEdge { j, k, value })
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value)?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn csv_writer(dir: &Path, name: &str) -> anyhow::Result<csv::Writer<fs::File>> {
    let path = dir.join(name);
    csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))
}

fn prepare(output: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(output).with_context(|| format!("creating {}", output.display()))
}

fn load(input: &Path) -> anyhow::Result<Dataset> {
    Dataset::load_csv(input).with_context(|| format!("reading {}", input.display()))
}

fn load_graph(path: &Path, d: usize) -> anyhow::Result<Graph> {
    let g = Graph::load_json(path).with_context(|| format!("reading {}", path.display()))?;
    ensure!(g.d() == d, "graph has d = {} but the data has d = {d}", g.d());
    Ok(g)
}

fn pair_to_json(p: (usize, usize)) -> [usize; 2] {
    [p.0 + 1, p.1 + 1]
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: C,
    result: R,
}

fn manifest<'a, C: Serialize, R: Serialize>(command: &'a str, seed: u64, config: C, result: R) -> Manifest<'a, C, R> {
    Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        config,
        result,
    }
}

#[derive(Serialize)]
struct MatrixEntry {
    z: f64,
    j: usize,
    k: usize,
    value: f64,
}

#[derive(Serialize)]
struct SupportEntry {
    z: f64,
    j: usize,
    k: usize,
}

#[derive(Serialize)]
struct PointFailure {
    z: f64,
    error: String,
}

fn estimate(args: &EstimateArgs) -> anyhow::Result<()> {
    let data = load(&args.input)?;
    let grid = EvalGrid::parse(&args.grid)?;
    let settings = args.tuning.settings(BandwidthRule::estimate());
    let res = settings.resolve(data.n(), data.d())?;
    let clime = res.clime.with_symmetrize(match args.symmetrize {
        SymmetrizeArg::MinMagnitude => Symmetrize::MinMagnitude,
        SymmetrizeArg::None => Symmetrize::None,
    });
    prepare(&args.output)?;

    let fits = par::map_slice(grid.points(), |&z| -> crate::Result<_> {
        let (_, _, sigma) = kendall::estimate_at(&data, &res.spec, z)?;
        let inv = inverse_correlation(&sigma, &clime)?;
        Ok((sigma, inv))
    });

    let d = data.d();
    let mut sigma_csv = csv_writer(&args.output, "sigma.csv")?;
    let mut omega_csv = csv_writer(&args.output, "omega.csv")?;
    let mut support_csv = csv_writer(&args.output, "support.csv")?;
    let mut failures = Vec::new();
    for (&z, fit) in grid.points().iter().zip(&fits) {
        let (sigma, inv) = match fit {
            Ok(f) => f,
            Err(e) => {
                failures.push(PointFailure { z, error: e.to_string() });
                continue;
            }
        };
        for j in 0..d {
            for k in j..d {
                let (j1, k1) = (j + 1, k + 1);
                sigma_csv.serialize(MatrixEntry { z, j: j1, k: k1, value: sigma.get(j, k) })?;
                omega_csv.serialize(MatrixEntry { z, j: j1, k: k1, value: inv.omega[(j, k)] })?;
            }
        }
        for (j, k) in inv.support(SUPPORT_TOL).edges() {
            support_csv.serialize(SupportEntry { z, j: j + 1, k: k + 1 })?;
        }
    }
    sigma_csv.flush()?;
    omega_csv.flush()?;
    support_csv.flush()?;

    #[derive(Serialize)]
    struct Config<'a> {
        input: &'a Path,
        n: usize,
        d: usize,
        settings: TestSettings,
        h: f64,
        lambda: f64,
        clime: ClimeConfig,
        grid: &'a EvalGrid,
    }
    #[derive(Serialize)]
    struct Outcome {
        points: usize,
        failures: Vec<PointFailure>,
        files: [&'static str; 3],
    }
    let config = Config {
        input: &args.input,
        n: data.n(),
        d,
        settings,
        h: res.h,
        lambda: res.lambda,
        clime,
        grid: &grid,
    };
    let outcome = Outcome {
        points: grid.len() - failures.len(),
        failures,
        files: ["sigma.csv", "omega.csv", "support.csv"],
    };
    write_json(&args.output, "manifest.json", &manifest("estimate", args.seed, config, outcome))
}

#[derive(Serialize)]
struct TestConfig<'a> {
    input: &'a Path,
    n: usize,
    d: usize,
    settings: TestSettings,
    h: f64,
    lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    z0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<&'a EvalGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap: Option<BootstrapOptions>,
}

fn test_edge(args: &TestEdgeArgs) -> anyhow::Result<()> {
    let data = load(&args.input)?;
    let (j, k) = args.edge;
    ensure!(k < data.d(), "edge {:?} out of range for d = {}", pair_to_json(args.edge), data.d());
    let settings = args.tuning.settings(BandwidthRule::test());
    let res = settings.resolve(data.n(), data.d())?;
    let ctx = ScoreContext::fit(&data, &res.spec, args.z0, &res.clime)?;
    let stat = inference::edge_statistic(&ctx, j, k)?;
    let report = inference::edge_decision(stat.standardized, stat.variance, settings.alpha)?;
    prepare(&args.output)?;

    #[derive(Serialize)]
    struct Outcome {
        score: f64,
        standardized: f64,
        report: TestReport,
    }
    let config = TestConfig {
        input: &args.input,
        n: data.n(),
        d: data.d(),
        settings,
        h: res.h,
        lambda: res.lambda,
        z0: Some(args.z0),
        grid: None,
        edge: Some(pair_to_json(args.edge)),
        graph: None,
        bootstrap: None,
    };
    let outcome = Outcome {
        score: stat.score,
        standardized: stat.standardized,
        report,
    };
    write_json(&args.output, "report.json", &manifest("test-edge", args.seed, config, outcome))
}

fn graph_test(
    name: &str,
    input: &Path,
    output: &Path,
    tuning: &Tuning,
    bootstrap: &BootstrapArgs,
    graph: &Path,
    grid: EvalGrid,
    test: GraphTest,
    seed: u64,
) -> anyhow::Result<()> {
    let data = load(input)?;
    let graph = load_graph(graph, data.d())?;
    let settings = tuning.settings(BandwidthRule::test());
    let res = settings.resolve(data.n(), data.d())?;
    let opts = bootstrap.options(seed);
    let report = study::graph_test_on(&data, test, &graph, &grid, &settings, &opts)?;
    prepare(output)?;
    let single = test == GraphTest::Supergraph;
    let config = TestConfig {
        input,
        n: data.n(),
        d: data.d(),
        settings,
        h: res.h,
        lambda: res.lambda,
        z0: single.then(|| grid.points()[0]),
        grid: (!single).then_some(&grid),
        edge: None,
        graph: Some(graph.to_json()),
        bootstrap: Some(opts),
    };
    write_json(output, "report.json", &manifest(name, seed, config, report))
}

fn simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let cfg = args.sim.single(args.seed)?;
    let (truth, data) = simgen::simulate(&cfg)?;
    prepare(&args.output)?;
    let path = args.output.join("data.csv");
    data.save_csv(&path).with_context(|| format!("writing {}", path.display()))?;
    write_json(&args.output, "truth.json", &manifest("simulate", args.seed, &cfg, truth.to_json()))
}

#[derive(Serialize)]
struct CurveRow {
    method: RocMethod,
    lambda: f64,
    fpr: f64,
    tpr: f64,
}

#[derive(Serialize)]
struct TargetRow {
    method: RocMethod,
    run: usize,
    tpr_at_target: f64,
}

fn parse_lambda_path(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        bail!("lambda path must be lo:hi:count, got '{s}'");
    };
    Ok(study::log_path(lo.trim().parse()?, hi.trim().parse()?, count.trim().parse()?)?)
}

fn roc(args: &RocStudyArgs) -> anyhow::Result<()> {
    let sim = args.sim.single(args.seed)?;
    let cfg = RocStudyConfig {
        sim,
        runs: args.runs,
        methods: args.methods.clone(),
        lambdas: parse_lambda_path(&args.lambda_path)?,
        kernel: args.tuning.kernel,
        h_rule: args.tuning.h_rule.unwrap_or(BandwidthRule::estimate()),
        gamma: args.tuning.gamma,
        clime_method: args.tuning.method,
        eval_points: args.eval_points,
        target_fpr: args.target_fpr,
        seed: args.seed,
    };
    let result = study::roc_study(&cfg)?;
    prepare(&args.output)?;
    let mut curve = csv_writer(&args.output, "roc.csv")?;
    let mut target = csv_writer(&args.output, "tpr_at_target.csv")?;
    for m in &result.methods {
        for p in &m.curve {
            curve.serialize(CurveRow { method: m.method, lambda: p.lambda, fpr: p.fpr, tpr: p.tpr })?;
        }
        for (run, &t) in m.tpr_at_target.iter().enumerate() {
            target.serialize(TargetRow { method: m.method, run, tpr_at_target: t })?;
        }
    }
    curve.flush()?;
    target.flush()?;
    write_json(&args.output, "roc.json", &manifest("roc-study", args.seed, &cfg, &result))
}

#[derive(Serialize)]
struct PowerRow {
    test: TestArg,
    n: usize,
    d: usize,
    scheme: Scheme,
    h: f64,
    lambda: f64,
    reps: usize,
    completed: usize,
    rejections: usize,
    rate: f64,
    wilson_lo: f64,
    wilson_hi: f64,
}

#[derive(Serialize)]
struct StatRow {
    n: usize,
    rep: usize,
    standardized: f64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum StudyRecord {
    Edge {
        config: EdgeStudyConfig,
        summary: RejectionSummary,
        h: f64,
        lambda: f64,
        ks_distance: f64,
    },
    Graph {
        config: GraphStudyConfig,
        summary: RejectionSummary,
        h: f64,
        lambda: f64,
    },
}

fn power(args: &PowerStudyArgs) -> anyhow::Result<()> {
    ensure!(!args.sim.n.is_empty(), "need at least one --n");
    let settings = args.tuning.settings(BandwidthRule::test());
    let graph = match args.test {
        TestArg::Edge => None,
        _ => Some(match (&args.graph, args.graph_knn) {
            (Some(p), None) => load_graph(p, args.sim.d)?,
            (None, Some(k)) => knn_graph(args.sim.d, k)?,
            _ => bail!("graph tests need exactly one of --graph or --graph-knn"),
        }),
    };
    if args.test == TestArg::Edge {
        ensure!(args.edge.1 < args.sim.d, "edge {:?} out of range", pair_to_json(args.edge));
    }
    prepare(&args.output)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut stats_csv = (args.test == TestArg::Edge)
        .then(|| csv_writer(&args.output, "statistics.csv"))
        .transpose()?;
    for &n in &args.sim.n {
        let sim = args.sim.config(n, args.seed)?;
        let (summary, h, lambda, record) = match args.test {
            TestArg::Edge => {
                let config = EdgeStudyConfig {
                    sim,
                    z0: args.z0,
                    edge: args.edge,
                    settings,
                    reps: args.reps,
                    seed: args.seed,
                };
                let r = study::edge_study(&config)?;
                if let Some(w) = stats_csv.as_mut() {
                    for (i, s) in r.statistics.iter().enumerate() {
                        w.serialize(StatRow { n, rep: i, standardized: *s })?;
                    }
                }
                let ks = study::ks_distance_normal(&r.statistics);
                let (h, lambda) = (r.resolved.h, r.resolved.lambda);
                let record = StudyRecord::Edge {
                    config,
                    summary: r.summary.clone(),
                    h,
                    lambda,
                    ks_distance: ks,
                };
                (r.summary, h, lambda, record)
            }
            TestArg::Supergraph | TestArg::Uniform => {
                let (test, grid) = if args.test == TestArg::Supergraph {
                    (GraphTest::Supergraph, EvalGrid::singleton(args.z0)?)
                } else {
                    (GraphTest::Uniform, EvalGrid::parse(&args.grid)?)
                };
                let config = GraphStudyConfig {
                    sim,
                    test,
                    graph: graph.clone().expect("graph resolved above"),
                    grid,
                    settings,
                    replicates: args.bootstrap.replicates,
                    two_sided: args.bootstrap.two_sided,
                    form: args.bootstrap.bootstrap_form.into(),
                    reps: args.reps,
                    seed: args.seed,
                };
                let r = study::graph_study(&config)?;
                let (h, lambda) = (r.resolved.h, r.resolved.lambda);
                let record = StudyRecord::Graph {
                    config,
                    summary: r.summary.clone(),
                    h,
                    lambda,
                };
                (r.summary, h, lambda, record)
            }
        };
        rows.push(PowerRow {
            test: args.test,
            n,
            d: args.sim.d,
            scheme: args.sim.sim_scheme,
            h,
            lambda,
            reps: summary.reps,
            completed: summary.completed,
            rejections: summary.rejections,
            rate: summary.rate,
            wilson_lo: summary.wilson_lo,
            wilson_hi: summary.wilson_hi,
        });
        records.push(record);
    }
    if let Some(mut w) = stats_csv {
        w.flush()?;
    }
    let mut table = csv_writer(&args.output, "power.csv")?;
    for r in &rows {
        table.serialize(r)?;
    }
    table.flush()?;
    write_json(&args.output, "power.json", &manifest("power-study", args.seed, &args.test, &records))
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Estimate(a) => estimate(a),
        Command::TestEdge(a) => test_edge(a),
        Command::TestGraph(a) => graph_test(
            "test-graph",
            &a.input,
            &a.output,
            &a.tuning,
            &a.bootstrap,
            &a.graph,
            EvalGrid::singleton(a.z0)?,
            GraphTest::Supergraph,
            a.seed,
        ),
        Command::TestUniform(a) => graph_test(
            "test-uniform",
            &a.input,
            &a.output,
            &a.tuning,
            &a.bootstrap,
            &a.graph,
            EvalGrid::parse(&a.grid)?,
            GraphTest::Uniform,
            a.seed,
        ),
        Command::Simulate(a) => simulate(a),
        Command::RocStudy(a) => roc(a),
        Command::PowerStudy(a) => power(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_strings_are_one_indexed() {
        assert_eq!(parse_edge("1,2").unwrap(), (0, 1));
        assert_eq!(parse_edge("5, 3").unwrap(), (2, 4));
        assert!(parse_edge("0,2").is_err());
        assert!(parse_edge("2,2").is_err());
        assert!(parse_edge("1,2,3").is_err());
        let f = parse_fixed_edge("1,2,0.9").unwrap();
        assert_eq!((f.j, f.k, f.value), (0, 1, 0.9));
    }

    #[test]
    fn sim_sizes_follow_d() {
        let cli = Cli::parse_from(["tvnpn", "simulate", "--output", "x", "--d", "50", "--n", "100"]);
        let Command::Simulate(a) = cli.command else { panic!() };
        let cfg = a.sim.single(3).unwrap();
        assert_eq!((cfg.e, cfg.churn), (25, 10));
        assert_eq!(cfg, SimConfig::full(100, 3));
        let cli = Cli::parse_from(["tvnpn", "simulate", "--output", "x"]);
        let Command::Simulate(a) = cli.command else { panic!() };
        assert_eq!(a.sim.single(3).unwrap(), SimConfig::desk(600, 3));
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::parse_from([
            "tvnpn", "test-uniform", "--input", "a.csv", "--output", "o", "--graph", "g.json", "--B", "500",
            "--h-rule", "fixed:0.3", "--lambda-rule", "scaled:0.3", "--two-sided", "--method", "clime",
        ]);
        let Command::TestUniform(a) = cli.command else { panic!() };
        assert_eq!(a.bootstrap.replicates, 500);
        assert!(a.bootstrap.two_sided);
        assert_eq!(a.tuning.h_rule, Some(BandwidthRule::Fixed(0.3)));
        assert_eq!(a.tuning.lambda_rule, LambdaRule::Scaled(0.3));
        assert_eq!(a.tuning.method, ClimeMethod::Clime);
        assert!(Cli::try_parse_from(["tvnpn", "test-edge", "--input", "a", "--output", "o", "--z0", "0.5"]).is_err());
    }
}
