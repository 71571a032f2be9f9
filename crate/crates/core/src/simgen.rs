//! Synthetic time-varying nonparanormal data.
//!
//! A ring k-nearest-neighbor scaffold supplies candidate edges. Anchor graphs
//! change at a few index values by swapping edges; inverse-correlation
//! entries are drawn at knots (interval midpoints and change points) and
//! interpolated linearly in between, then the diagonal is lifted so the
//! smallest eigenvalue is one. Samples come from `N(0, Sigma(Z))` with
//! `Z ~ U(0,1)`, optionally pushed through `Phi` or contaminated.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::datamodel::{Dataset, Graph, SymMatrix};
use crate::error::{Error, Result};
use crate::normal::std_normal_cdf;
use crate::{par, rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Gaussian,
    GaussianCopula,
    #[serde(rename = "contaminated_2pct")]
    Contaminated2Pct,
    #[serde(rename = "contaminated_5pct")]
    Contaminated5Pct,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Gaussian,
        Scheme::GaussianCopula,
        Scheme::Contaminated2Pct,
        Scheme::Contaminated5Pct,
    ];

    /// Fraction of the `n * d` cells that get replaced.
    pub fn contamination(self) -> f64 {
        match self {
            Scheme::Contaminated2Pct => 0.02,
            Scheme::Contaminated5Pct => 0.05,
            _ => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gaussian => "gaussian",
            Scheme::GaussianCopula => "gaussian_copula",
            Scheme::Contaminated2Pct => "contaminated_2pct",
            Scheme::Contaminated5Pct => "contaminated_5pct",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme '{s}'")))
    }
}

/// Pins one inverse-correlation entry to a constant over the whole path.
/// Serialized with 1-indexed vertices like every other file format here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "FixedEdgeJson", try_from = "FixedEdgeJson")]
pub struct FixedEdge {
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Serialize, Deserialize)]
struct FixedEdgeJson {
    j: usize,
    k: usize,
    value: f64,
}

impl From<FixedEdge> for FixedEdgeJson {
    fn from(f: FixedEdge) -> Self {
        Self {
            j: f.j + 1,
            k: f.k + 1,
            value: f.value,
        }
    }
}

impl TryFrom<FixedEdgeJson> for FixedEdge {
    type Error = String;

    fn try_from(f: FixedEdgeJson) -> std::result::Result<Self, String> {
        if f.j == 0 || f.k == 0 {
            return Err("fixed edge vertices are 1-indexed".into());
        }
        Ok(Self {
            j: f.j - 1,
            k: f.k - 1,
            value: f.value,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub d: usize,
    /// Edges per anchor graph.
    pub e: usize,
    pub knn_k: usize,
    /// Index values where the graph changes.
    pub anchors: Vec<f64>,
    /// Edges swapped at each change point.
    pub churn: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    pub scheme: Scheme,
    pub n: usize,
    pub seed: u64,
    /// Variance of the contaminating normal.
    pub contamination_variance: f64,
    pub fixed_edge: Option<FixedEdge>,
}

impl SimConfig {
    /// Full-size configuration (50 variables, 25 edges per graph).
    pub fn full(n: usize, seed: u64) -> Self {
        Self {
            d: 50,
            e: 25,
            knn_k: 4,
            anchors: vec![0.2, 0.4, 0.6, 0.8],
            churn: 10,
            mu_min: 0.5,
            mu_max: 0.9,
            scheme: Scheme::Gaussian,
            n,
            seed,
            contamination_variance: 3.0,
            fixed_edge: None,
        }
    }

    /// Reduced configuration on 10 variables with the same edge density.
    pub fn desk(n: usize, seed: u64) -> Self {
        Self {
            d: 10,
            e: 5,
            churn: 2,
            ..Self::full(n, seed)
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.d < 2 {
            return bad(format!("d = {} < 2", self.d));
        }
        if self.n < 2 {
            return bad(format!("n = {} < 2", self.n));
        }
        check_knn(self.d, self.knn_k)?;
        let scaffold = self.d * self.knn_k / 2;
        if self.e > scaffold {
            return bad(format!("e = {} exceeds the {scaffold} scaffold edges", self.e));
        }
        if self.churn > self.e {
            return bad(format!("churn = {} exceeds e = {}", self.churn, self.e));
        }
        if !(self.mu_min > 0.0 && self.mu_min <= self.mu_max && self.mu_max <= 0.9) {
            return bad(format!("need 0 < mu_min <= mu_max <= 0.9, got [{}, {}]", self.mu_min, self.mu_max));
        }
        if self.anchors.iter().any(|&a| !(a > 0.0 && a < 1.0)) || self.anchors.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("change points {:?} must increase strictly inside (0,1)", self.anchors));
        }
        if !(self.contamination_variance > 0.0) {
            return bad("contamination variance must be positive".into());
        }
        if let Some(f) = self.fixed_edge {
            if f.j == f.k || f.j >= self.d || f.k >= self.d || !f.value.is_finite() {
                return bad(format!("invalid fixed edge {f:?}"));
            }
        }
        Ok(())
    }
}

fn check_knn(d: usize, k: usize) -> Result<()> {
    if k % 2 != 0 || k >= d {
        return Err(Error::InvalidArgument(format!("k-NN ring needs even k < d, got k = {k}, d = {d}")));
    }
    Ok(())
}

/// Ring graph joining each vertex to `i +- 1, ..., i +- k/2` (mod d).
pub fn knn_graph(d: usize, k: usize) -> Result<Graph> {
    check_knn(d, k)?;
    let mut g = Graph::empty(d);
    for i in 0..d {
        for s in 1..=k / 2 {
            g.insert(i, (i + s) % d)?;
        }
    }
    Ok(g)
}

/// `G0` plus one graph per change point.
pub fn anchor_graphs<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Result<Vec<Graph>> {
    cfg.validate()?;
    let scaffold: Vec<(usize, usize)> = knn_graph(cfg.d, cfg.knn_k)?.edges().collect();
    let first = index::sample(rng, scaffold.len(), cfg.e)
        .into_iter()
        .map(|i| scaffold[i]);
    let mut graphs = vec![Graph::from_edges(cfg.d, first)?];
    for _ in &cfg.anchors {
        let prev = graphs.last().expect("nonempty");
        let fresh: Vec<(usize, usize)> = scaffold.iter().copied().filter(|&(j, k)| !prev.contains(j, k)).collect();
        if fresh.len() < cfg.churn {
            return Err(Error::ScaffoldExhausted {
                needed: cfg.churn,
                available: fresh.len(),
            });
        }
        let current: Vec<(usize, usize)> = prev.edges().collect();
        let mut next = prev.clone();
        for i in index::sample(rng, current.len(), cfg.churn) {
            let (j, k) = current[i];
            next.remove(j, k);
        }
        for i in index::sample(rng, fresh.len(), cfg.churn) {
            let (j, k) = fresh[i];
            next.insert(j, k)?;
        }
        graphs.push(next);
    }
    Ok(graphs)
}

/// True parameter path of one simulated model.
#[derive(Debug, Clone)]
pub struct TruthPath {
    pub config: SimConfig,
    pub scaffold: Graph,
    /// `G0, G1, ...`; graph `l` is in force on `[b_l, b_{l+1})`.
    pub graphs: Vec<Graph>,
    /// `0, change points..., 1`.
    pub boundaries: Vec<f64>,
    /// Knot locations: boundaries and interval midpoints, sorted.
    pub knots: Vec<f64>,
    /// Off-diagonal inverse-correlation values at the knots (zero diagonal).
    pub knot_omegas: Vec<DMatrix<f64>>,
}

fn apply_fixed(graphs: &mut [Graph], fixed: Option<FixedEdge>) -> Result<()> {
    if let Some(f) = fixed {
        for g in graphs {
            if f.value == 0.0 {
                g.remove(f.j, f.k);
            } else {
                g.insert(f.j, f.k)?;
            }
        }
    }
    Ok(())
}

/// Draws anchor graphs and knot values.
pub fn truth_path<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Result<TruthPath> {
    let mut graphs = anchor_graphs(cfg, rng)?;
    apply_fixed(&mut graphs, cfg.fixed_edge)?;
    let mut boundaries = vec![0.0];
    boundaries.extend(&cfg.anchors);
    boundaries.push(1.0);
    let d = cfg.d;
    let mut knots = Vec::new();
    let mut knot_omegas = Vec::new();
    let fill = |edges: &mut dyn Iterator<Item = (usize, usize)>, rng: &mut R| {
        let mut m = DMatrix::zeros(d, d);
        for (j, k) in edges {
            let v = if cfg.mu_min == cfg.mu_max {
                cfg.mu_min
            } else {
                rng.random_range(cfg.mu_min..cfg.mu_max)
            };
            m[(j, k)] = v;
            m[(k, j)] = v;
        }
        if let Some(f) = cfg.fixed_edge {
            m[(f.j, f.k)] = f.value;
            m[(f.k, f.j)] = f.value;
        }
        m
    };
    let last = graphs.len() - 1;
    for l in 0..=last {
        let b = boundaries[l];
        let at_boundary = if l == 0 {
            fill(&mut graphs[0].edges(), &mut *rng)
        } else {
            let (prev, cur) = (&graphs[l - 1], &graphs[l]);
            fill(&mut prev.edges().filter(|&(j, k)| cur.contains(j, k)), &mut *rng)
        };
        knots.push(b);
        knot_omegas.push(at_boundary);
        knots.push(0.5 * (b + boundaries[l + 1]));
        knot_omegas.push(fill(&mut graphs[l].edges(), &mut *rng));
    }
    knots.push(1.0);
    knot_omegas.push(fill(&mut graphs[last].edges(), &mut *rng));
    Ok(TruthPath {
        config: cfg.clone(),
        scaffold: knn_graph(d, cfg.knn_k)?,
        graphs,
        boundaries,
        knots,
        knot_omegas,
    })
}

/// Smallest eigenvalue of a symmetric matrix. The QR iteration runs on
/// `m + I`: with the default tolerance it can diverge on zero-diagonal
/// block matrices whose eigenvalues cluster at zero.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    let d = m.nrows();
    let shifted = m + DMatrix::<f64>::identity(d, d);
    let eig = SymmetricEigen::try_new(shifted, 1e-15, 100_000).ok_or(Error::NotPositiveDefinite)?;
    let lmin = eig.eigenvalues.min();
    if !lmin.is_finite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(lmin - 1.0)
}

fn check_z(z: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidArgument(format!("index value {z} outside [0,1]")));
    }
    Ok(())
}

impl TruthPath {
    pub fn d(&self) -> usize {
        self.config.d
    }

    /// Anchor graph in force at `z` (the last graph also at `z = 1`).
    pub fn graph_of(&self, z: f64) -> Result<&Graph> {
        check_z(z)?;
        let inner = &self.boundaries[1..self.boundaries.len() - 1];
        let l = inner.iter().take_while(|&&b| b <= z).count();
        Ok(&self.graphs[l])
    }

    /// Interpolated off-diagonal values before the diagonal lift.
    pub fn raw_omega_of(&self, z: f64) -> Result<DMatrix<f64>> {
        check_z(z)?;
        let hi = self.knots.iter().position(|&t| t >= z).expect("z <= 1 = last knot");
        if self.knots[hi] == z || hi == 0 {
            return Ok(self.knot_omegas[hi].clone());
        }
        let (t0, t1) = (self.knots[hi - 1], self.knots[hi]);
        let a = (z - t0) / (t1 - t0);
        Ok(&self.knot_omegas[hi - 1] * (1.0 - a) + &self.knot_omegas[hi] * a)
    }

    /// `Omega(z) + (1 - lambda_min) I`; smallest eigenvalue exactly one.
    pub fn omega_of(&self, z: f64) -> Result<DMatrix<f64>> {
        let mut m = self.raw_omega_of(z)?;
        let lmin = min_eigenvalue(&m)?;
        for i in 0..self.d() {
            m[(i, i)] += 1.0 - lmin;
        }
        Ok(m)
    }

    /// `Omega(z)^{-1}` rescaled to unit diagonal.
    pub fn sigma_of(&self, z: f64) -> Result<SymMatrix> {
        let omega = self.omega_of(z)?;
        let inv = Cholesky::new(omega).ok_or(Error::NotPositiveDefinite)?.inverse();
        let d = self.d();
        let s: Vec<f64> = (0..d).map(|i| inv[(i, i)].sqrt()).collect();
        let m = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                1.0
            } else {
                0.5 * (inv[(i, j)] + inv[(j, i)]) / (s[i] * s[j])
            }
        });
        SymMatrix::new(m)
    }

    /// True edge set: nonzero off-diagonal entries of `Omega(z)`.
    pub fn support_of(&self, z: f64) -> Result<Graph> {
        let m = self.raw_omega_of(z)?;
        let d = self.d();
        let edges = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k)));
        Graph::from_edges(d, edges.filter(|&(j, k)| m[(j, k)] != 0.0))
    }

    /// Sidecar description: config, anchor graphs, knot values (1-indexed).
    pub fn to_json(&self) -> serde_json::Value {
        let knots: Vec<serde_json::Value> = self
            .knots
            .iter()
            .zip(&self.knot_omegas)
            .map(|(&z, m)| {
                let d = m.nrows();
                let entries: Vec<(usize, usize, f64)> = (0..d)
                    .flat_map(|j| (j + 1..d).map(move |k| (j, k)))
                    .filter(|&(j, k)| m[(j, k)] != 0.0)
                    .map(|(j, k)| (j + 1, k + 1, m[(j, k)]))
                    .collect();
                serde_json::json!({ "z": z, "entries": entries })
            })
            .collect();
        serde_json::json!({
            "config": self.config,
            "seed": self.config.seed,
            "boundaries": self.boundaries,
            "anchor_graphs": self.graphs.iter().map(Graph::to_json).collect::<Vec<_>>(),
            "knots": knots,
        })
    }
}

fn uniform_open<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Draws `cfg.n` samples. Sample `i` uses its own stream so the result does
/// not depend on the thread count.
pub fn sample_dataset(truth: &TruthPath, cfg: &SimConfig) -> Result<Dataset> {
    cfg.validate()?;
    if cfg.d != truth.d() {
        return Err(Error::InvalidArgument(format!("config has d = {}, truth has {}", cfg.d, truth.d())));
    }
    let d = cfg.d;
    let rows = par::try_map_range(cfg.n, |i| -> Result<(f64, Vec<f64>)> {
        let mut r = rng::stream(cfg.seed, &[rng::tag::SIMULATION, 1, i as u64]);
        let z = uniform_open(&mut r);
        let sigma = truth.sigma_of(z)?;
        let l = Cholesky::new(sigma.into_matrix()).ok_or(Error::NotPositiveDefinite)?;
        let g = DVector::from_fn(d, |_, _| r.sample::<f64, _>(StandardNormal));
        let mut x: Vec<f64> = (l.l() * g).iter().copied().collect();
        if cfg.scheme == Scheme::GaussianCopula {
            for v in x.iter_mut() {
                *v = std_normal_cdf(*v);
            }
        }
        Ok((z, x))
    })?;
    let mut z = Vec::with_capacity(cfg.n);
    let mut x = Vec::with_capacity(cfg.n * d);
    for (zi, xi) in rows {
        z.push(zi);
        x.extend(xi);
    }
    let frac = cfg.scheme.contamination();
    if frac > 0.0 {
        let mut r = rng::stream(cfg.seed, &[rng::tag::SIMULATION, 2]);
        let cells = cfg.n * d;
        let count = (frac * cells as f64).round() as usize;
        let sd = cfg.contamination_variance.sqrt();
        for c in index::sample(&mut r, cells, count) {
            let mag = 3.0 + sd * r.sample::<f64, _>(StandardNormal);
            x[c] = if r.random::<bool>() { mag } else { -mag };
        }
    }
    Dataset::new(x, z, d)
}

/// Truth path from the `(seed, SIMULATION, 0)` stream followed by the sample.
pub fn simulate(cfg: &SimConfig) -> Result<(TruthPath, Dataset)> {
    let mut r = rng::stream(cfg.seed, &[rng::tag::SIMULATION, 0]);
    let truth = truth_path(cfg, &mut r)?;
    let data = sample_dataset(&truth, cfg)?;
    Ok((truth, data))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// `(FPR, TPR)` of an estimated edge set against the truth.
pub fn rates(estimate: &Graph, truth: &Graph, z: f64) -> Result<RocPoint> {
    if truth.is_empty() {
        return Err(Error::DegenerateTruth { z });
    }
    let d = truth.d();
    let hits = estimate.intersection_len(truth);
    let negatives = d * (d - 1) / 2 - truth.len();
    let false_pos = estimate.len() - hits;
    Ok(RocPoint {
        fpr: if negatives == 0 {
            0.0
        } else {
            false_pos as f64 / negatives as f64
        },
        tpr: hits as f64 / truth.len() as f64,
    })
}

/// One ROC point per tuning value. `path[t]` holds `(z, estimated graph)` for
/// every evaluation point; rates are averaged over those points.
pub fn roc_points(path: &[Vec<(f64, Graph)>], truth: &TruthPath) -> Result<Vec<RocPoint>> {
    let mut out = Vec::with_capacity(path.len());
    for evals in path {
        if evals.is_empty() {
            return Err(Error::InvalidArgument("no evaluation points".into()));
        }
        let (mut fpr, mut tpr) = (0.0, 0.0);
        for (z, g) in evals {
            let p = rates(g, &truth.support_of(*z)?, *z)?;
            fpr += p.fpr;
            tpr += p.tpr;
        }
        let m = evals.len() as f64;
        out.push(RocPoint {
            fpr: fpr / m,
            tpr: tpr / m,
        });
    }
    out.sort_by(|a, b| a.fpr.total_cmp(&b.fpr).then(a.tpr.total_cmp(&b.tpr)));
    Ok(out)
}

/// TPR at a given FPR by linear interpolation along the sorted curve, with
/// `(0,0)` and `(1,1)` appended.
pub fn tpr_at_fpr(points: &[RocPoint], target: f64) -> f64 {
    let mut curve = Vec::with_capacity(points.len() + 2);
    curve.push(RocPoint { fpr: 0.0, tpr: 0.0 });
    curve.extend_from_slice(points);
    curve.push(RocPoint { fpr: 1.0, tpr: 1.0 });
    curve.sort_by(|a, b| a.fpr.total_cmp(&b.fpr).then(a.tpr.total_cmp(&b.tpr)));
    // Highest TPR reached at or below the target, interpolated to the next point.
    for w in curve.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b.fpr >= target && a.fpr <= target {
            if b.fpr == a.fpr {
                return a.tpr.max(b.tpr);
            }
            let t = (target - a.fpr) / (b.fpr - a.fpr);
            return a.tpr + t * (b.tpr - a.tpr);
        }
    }
    1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk(seed: u64) -> SimConfig {
        SimConfig::desk(50, seed)
    }

    #[test]
    fn knn_ring() {
        let g = knn_graph(6, 2).unwrap();
        assert_eq!(g.len(), 6);
        assert!((0..6).all(|v| g.degree(v) == 2));
        assert!(g.contains(0, 5));
        let g = knn_graph(50, 4).unwrap();
        assert_eq!(g.len(), 50 * 4 / 2);
        assert!((0..50).all(|v| g.degree(v) == 4));
        assert!(knn_graph(4, 4).is_err());
        assert!(knn_graph(10, 3).is_err());
        assert!(knn_graph(10, 0).unwrap().is_empty());
    }

    #[test]
    fn anchor_graph_churn() {
        let cfg = SimConfig::full(100, 3);
        let mut r = rng::stream(1, &[]);
        let gs = anchor_graphs(&cfg, &mut r).unwrap();
        let scaffold = knn_graph(50, 4).unwrap();
        assert_eq!(gs.len(), 5);
        for w in gs.windows(2) {
            assert_eq!(w[1].symmetric_difference_len(&w[0]), 2 * cfg.churn);
        }
        for g in &gs {
            assert_eq!(g.len(), 25);
            assert!(g.is_subgraph_of(&scaffold));
        }
        let still = SimConfig { churn: 0, ..cfg.clone() };
        let gs = anchor_graphs(&still, &mut r).unwrap();
        assert!(gs.iter().all(|g| *g == gs[0]));
        // 10-vertex ring with k = 2 has 10 edges: 8 in use leaves 2 fresh.
        let tight = SimConfig {
            d: 10,
            knn_k: 2,
            e: 8,
            churn: 3,
            ..cfg
        };
        assert!(matches!(
            anchor_graphs(&tight, &mut r),
            Err(Error::ScaffoldExhausted { needed: 3, available: 2 })
        ));
    }

    #[test]
    fn knots_are_tenths() {
        let mut r = rng::stream(2, &[]);
        let t = truth_path(&desk(1), &mut r).unwrap();
        assert_eq!(t.knots.len(), 11);
        for (i, &k) in t.knots.iter().enumerate() {
            assert!((k - i as f64 / 10.0).abs() < 1e-12);
        }
        // Midpoint knots carry their interval's graph; change points the intersection.
        for l in 0..5 {
            assert_eq!(support(&t.knot_omegas[2 * l + 1]), t.graphs[l]);
        }
        for l in 1..5 {
            let both: Vec<_> = t.graphs[l - 1].edges().filter(|&(j, k)| t.graphs[l].contains(j, k)).collect();
            assert_eq!(support(&t.knot_omegas[2 * l]), Graph::from_edges(10, both).unwrap());
        }
        assert_eq!(support(&t.knot_omegas[0]), t.graphs[0]);
        assert_eq!(support(&t.knot_omegas[10]), t.graphs[4]);
        for m in &t.knot_omegas {
            for v in m.iter().filter(|v| **v != 0.0) {
                assert!((0.5..0.9).contains(v));
            }
        }
    }

    fn support(m: &DMatrix<f64>) -> Graph {
        crate::clime::support_of(m, 0.0)
    }

    #[test]
    fn interpolation_and_rescale() {
        let mut r = rng::stream(3, &[]);
        let mut t = truth_path(&desk(1), &mut r).unwrap();
        t.knot_omegas[1][(0, 1)] = 0.6;
        t.knot_omegas[1][(1, 0)] = 0.6;
        t.knot_omegas[2][(0, 1)] = 0.8;
        t.knot_omegas[2][(1, 0)] = 0.8;
        assert!((t.raw_omega_of(0.15).unwrap()[(0, 1)] - 0.7).abs() < 1e-12);
        for i in 0..=100 {
            let z = i as f64 / 100.0;
            let om = t.omega_of(z).unwrap();
            let lmin = SymmetricEigen::new(om).eigenvalues.min();
            assert!((lmin - 1.0).abs() < 1e-10);
            let s = t.sigma_of(z).unwrap();
            for j in 0..10 {
                assert_eq!(s.get(j, j), 1.0);
            }
        }
    }

    #[test]
    fn min_eigenvalue_on_block_sparse_matrix() {
        let mut m = DMatrix::<f64>::zeros(10, 10);
        for (i, j, v) in [
            (0, 9, 1.9117747069034402e-1),
            (4, 6, 1.7694478015202209e-1),
            (5, 7, 5.94408553772318e-1),
            (7, 9, 6.676474967299639e-1),
        ] {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        let lmin = min_eigenvalue(&m).unwrap();
        assert!((lmin + 0.905_468_353_238_804_4).abs() < 1e-12, "{lmin}");
    }

    #[test]
    fn graph_is_piecewise_constant() {
        let mut r = rng::stream(4, &[]);
        let t = truth_path(&desk(1), &mut r).unwrap();
        for (z, l) in [(0.0, 0), (0.19, 0), (0.2, 1), (0.55, 2), (0.79, 3), (0.8, 4), (1.0, 4)] {
            assert_eq!(t.graph_of(z).unwrap(), &t.graphs[l], "z = {z}");
        }
        for i in 0..200 {
            let z = (i as f64 + 0.5) / 200.0;
            assert!(t.support_of(z).unwrap().is_subgraph_of(t.graph_of(z).unwrap()));
        }
        assert!(t.graph_of(1.5).is_err());
    }

    #[test]
    fn fixed_edge_is_constant() {
        let mut cfg = desk(5);
        cfg.fixed_edge = Some(FixedEdge { j: 0, k: 1, value: 0.0 });
        let mut r = rng::stream(5, &[]);
        let t = truth_path(&cfg, &mut r).unwrap();
        assert!(t.graphs.iter().all(|g| !g.contains(0, 1)));
        assert!(t.knot_omegas.iter().all(|m| m[(0, 1)] == 0.0));
        cfg.fixed_edge = Some(FixedEdge { j: 0, k: 1, value: 0.9 });
        let t = truth_path(&cfg, &mut r).unwrap();
        assert!(t.graphs.iter().all(|g| g.contains(0, 1)));
        assert!(t.knot_omegas.iter().all(|m| m[(0, 1)] == 0.9));
    }

    #[test]
    fn schemes_and_contamination() {
        let cfg = SimConfig::desk(200, 11).with_scheme(Scheme::GaussianCopula);
        let (_, data) = simulate(&cfg).unwrap();
        assert!(data.x_flat().iter().all(|&v| v > 0.0 && v < 1.0));
        assert!(data.z().iter().all(|&z| z > 0.0 && z < 1.0));

        let cfg = SimConfig::desk(200, 11);
        let (_, clean) = simulate(&cfg).unwrap();
        let (_, dirty) = simulate(&cfg.clone().with_scheme(Scheme::Contaminated2Pct)).unwrap();
        assert_eq!(clean.z(), dirty.z());
        let changed = clean.x_flat().iter().zip(dirty.x_flat()).filter(|(a, b)| a != b).count();
        assert_eq!(changed, 40);
        assert!("contaminated-5pct".parse::<Scheme>().unwrap() == Scheme::Contaminated5Pct);
        assert!("bogus".parse::<Scheme>().is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = SimConfig::desk(100, 21);
        let (_, a) = simulate(&cfg).unwrap();
        let (_, b) = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        let (_, c) = par::sequential(|| simulate(&cfg).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn roc_endpoints() {
        let mut r = rng::stream(6, &[]);
        let t = truth_path(&desk(1), &mut r).unwrap();
        let z = 0.5;
        let truth = t.support_of(z).unwrap();
        let path = vec![
            vec![(z, truth.clone())],
            vec![(z, Graph::empty(10))],
            vec![(z, Graph::complete(10))],
        ];
        let pts = roc_points(&path, &t).unwrap();
        assert_eq!(pts[0], RocPoint { fpr: 0.0, tpr: 0.0 });
        assert_eq!(pts[1], RocPoint { fpr: 0.0, tpr: 1.0 });
        assert_eq!(pts[2], RocPoint { fpr: 1.0, tpr: 1.0 });
        assert!(matches!(rates(&truth, &Graph::empty(10), 0.3), Err(Error::DegenerateTruth { .. })));
    }

    #[test]
    fn tpr_interpolation() {
        let pts = [RocPoint { fpr: 0.1, tpr: 0.5 }, RocPoint { fpr: 0.3, tpr: 0.9 }];
        assert!((tpr_at_fpr(&pts, 0.2) - 0.7).abs() < 1e-12);
        assert!((tpr_at_fpr(&pts, 0.05) - 0.25).abs() < 1e-12);
        assert!((tpr_at_fpr(&pts, 0.65) - 0.95).abs() < 1e-12);
        assert!((tpr_at_fpr(&[], 0.2) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn sidecar_json_is_one_indexed() {
        let mut r = rng::stream(7, &[]);
        let t = truth_path(&desk(1), &mut r).unwrap();
        let v = t.to_json();
        assert_eq!(v["seed"], 1);
        assert_eq!(v["anchor_graphs"].as_array().unwrap().len(), 5);
        let entries = v["knots"][1]["entries"].as_array().unwrap();
        assert_eq!(entries.len(), t.graphs[0].len());
        for e in entries {
            let j = e[0].as_u64().unwrap();
            assert!(j >= 1);
        }
        assert_eq!(v["config"]["scheme"], "gaussian");
    }

    #[test]
    fn fixed_edge_serializes_one_indexed() {
        let mut cfg = desk(1);
        cfg.fixed_edge = Some(FixedEdge { j: 0, k: 3, value: 0.9 });
        let v = serde_json::to_value(&cfg).unwrap();
        assert_eq!(v["fixed_edge"]["j"], 1);
        assert_eq!(v["fixed_edge"]["k"], 4);
        let back: SimConfig = serde_json::from_value(v).unwrap();
        assert_eq!(back, cfg);
    }
}
