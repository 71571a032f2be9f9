//! Shared containers: observed data, kernels, evaluation grids, symmetric
//! matrices and graphs.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` samples of `(x, z)` with `x` in R^d and `z` in (0, 1).
///
/// `x` is stored row-major: sample `i`, variable `j` lives at `i * d + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    x: Vec<f64>,
    z: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, z: Vec<f64>, d: usize) -> Result<Self> {
        let n = z.len();
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need n >= 2 samples, got {n}")));
        }
        if d < 2 {
            return Err(Error::InvalidArgument(format!("need d >= 2 variables, got {d}")));
        }
        if x.len() != n * d {
            return Err(Error::InvalidArgument(format!(
                "x has {} entries, expected n*d = {}",
                x.len(),
                n * d
            )));
        }
        if let Some(i) = z.iter().position(|&v| !(v > 0.0 && v < 1.0)) {
            return Err(Error::Domain {
                line: i + 2,
                msg: format!("z = {} outside (0,1)", z[i]),
            });
        }
        if let Some(p) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain {
                line: p / d + 2,
                msg: "non-finite x entry".into(),
            });
        }
        Ok(Self { n, d, x, z })
    }

    /// Builds from per-sample rows.
    pub fn from_rows(rows: &[Vec<f64>], z: Vec<f64>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Self::new(rows.concat(), z, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.d + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn x_flat(&self) -> &[f64] {
        &self.x
    }

    /// Applies `f` to every entry of column `j`, revalidating finiteness.
    pub fn map_column(&self, j: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut x = self.x.clone();
        for i in 0..self.n {
            x[i * self.d + j] = f(x[i * self.d + j]);
        }
        Self::new(x, self.z.clone(), self.d)
    }

    /// Reads the `z,x1,...,xd` CSV format.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < 3 || &header[0] != "z" {
            return Err(Error::Parse {
                line: 1,
                msg: "header must be z,x1,...,xd with d >= 2".into(),
            });
        }
        let d = header.len() - 1;
        let mut x = Vec::new();
        let mut z = Vec::new();
        for (r, rec) in rdr.records().enumerate() {
            let line = r + 2;
            let rec = rec?;
            if rec.len() != d + 1 {
                return Err(Error::Dimension {
                    line,
                    expected: d + 1,
                    found: rec.len(),
                });
            }
            let mut vals = Vec::with_capacity(d + 1);
            for cell in rec.iter() {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("cannot parse {cell:?} as a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("non-finite value {cell:?}"),
                    });
                }
                vals.push(v);
            }
            if !(vals[0] > 0.0 && vals[0] < 1.0) {
                return Err(Error::Domain {
                    line,
                    msg: format!("z = {} outside (0,1)", vals[0]),
                });
            }
            z.push(vals[0]);
            x.extend_from_slice(&vals[1..]);
        }
        Self::new(x, z, d)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["z".to_string()];
        header.extend((1..=self.d).map(|j| format!("x{j}")));
        w.write_record(&header)?;
        for i in 0..self.n {
            let mut rec = Vec::with_capacity(self.d + 1);
            rec.push(self.z[i].to_string());
            rec.extend(self.row(i).iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// The closed set of admissible kernels: symmetric densities on [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Epanechnikov,
    Uniform,
    Triangular,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Epanechnikov, Kernel::Uniform, Kernel::Triangular];

    /// K(u); zero outside [-1, 1].
    pub fn eval(self, u: f64) -> f64 {
        let a = u.abs();
        if a > 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Epanechnikov => 0.75 * (1.0 - a * a),
            Kernel::Uniform => 0.5,
            Kernel::Triangular => 1.0 - a,
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "uniform" => Ok(Kernel::Uniform),
            "triangular" => Ok(Kernel::Triangular),
            other => Err(Error::InvalidArgument(format!("unknown kernel {other:?}"))),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Uniform => "uniform",
            Kernel::Triangular => "triangular",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kernel: Kernel,
    pub h: f64,
}

impl KernelSpec {
    pub fn new(kernel: Kernel, h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidArgument(format!("bandwidth h = {h} outside (0,1)")));
        }
        Ok(Self { kernel, h })
    }

    /// K_h(t) = K(t/h) / h.
    pub fn weight(&self, t: f64) -> f64 {
        self.kernel.eval(t / self.h) / self.h
    }
}

/// Evenly spaced index values on [lo, hi], endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalGrid {
    lo: f64,
    hi: f64,
    points: Vec<f64>,
}

impl EvalGrid {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
            return Err(Error::InvalidArgument(format!(
                "grid [{lo}, {hi}] must satisfy 0 < lo <= hi < 1"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidArgument("grid needs at least one point".into()));
        }
        if count == 1 && lo != hi {
            return Err(Error::InvalidArgument("a one-point grid needs lo == hi".into()));
        }
        if count > 1 && lo == hi {
            return Err(Error::InvalidArgument("lo == hi only for a one-point grid".into()));
        }
        let points = if count == 1 {
            vec![lo]
        } else {
            let step = (hi - lo) / (count - 1) as f64;
            let mut p: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
            p[count - 1] = hi;
            p
        };
        Ok(Self { lo, hi, points })
    }

    pub fn singleton(z0: f64) -> Result<Self> {
        Self::new(z0, z0, 1)
    }

    /// Parses `lo:hi:count`. An endpoint at 0 or 1 is treated as open: the
    /// `count` points are then the cell midpoints of [lo, hi].
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || Error::InvalidArgument(format!("grid spec {spec:?} is not lo:hi:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 || !(lo < hi || (lo == hi && count == 1)) {
            return Err(bad());
        }
        if lo <= 0.0 || hi >= 1.0 {
            if lo < 0.0 || hi > 1.0 {
                return Err(bad());
            }
            let cell = (hi - lo) / count as f64;
            let first = lo + 0.5 * cell;
            let last = hi - 0.5 * cell;
            return Self::new(first, if count == 1 { first } else { last }, count);
        }
        Self::new(lo, hi, count)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Dense symmetric matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub const SYMMETRY_TOL: f64 = 1e-12;

    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        let d = m.nrows();
        for j in 0..d {
            for k in 0..d {
                if !m[(j, k)].is_finite() {
                    return Err(Error::InvalidArgument("non-finite matrix entry".into()));
                }
                if (m[(j, k)] - m[(k, j)]).abs() > Self::SYMMETRY_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({j},{k})"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    /// Wraps a matrix the caller built symmetric by construction.
    pub(crate) fn from_symmetric_unchecked(m: DMatrix<f64>) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[(j, k)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        (&self.0 - &other.0).amax()
    }
}

/// Undirected simple graph on `d` vertices, edges stored as `(j, k)` with
/// `j < k` (0-indexed).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    d: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    d: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn empty(d: usize) -> Self {
        Self {
            d,
            edges: BTreeSet::new(),
        }
    }

    pub fn complete(d: usize) -> Self {
        let mut g = Self::empty(d);
        for j in 0..d {
            for k in j + 1..d {
                g.edges.insert((j, k));
            }
        }
        g
    }

    pub fn from_edges(d: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(d);
        for (j, k) in edges {
            g.insert(j, k)?;
        }
        Ok(g)
    }

    pub fn insert(&mut self, j: usize, k: usize) -> Result<bool> {
        if j == k {
            return Err(Error::InvalidArgument(format!("self-loop at vertex {j}")));
        }
        if j >= self.d || k >= self.d {
            return Err(Error::InvalidArgument(format!(
                "edge ({j},{k}) out of range for d = {}",
                self.d
            )));
        }
        Ok(self.edges.insert((j.min(k), j.max(k))))
    }

    pub fn remove(&mut self, j: usize, k: usize) -> bool {
        self.edges.remove(&(j.min(k), j.max(k)))
    }

    pub fn contains(&self, j: usize, k: usize) -> bool {
        j != k && self.edges.contains(&(j.min(k), j.max(k)))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Unordered pairs not in the graph, `j < k`.
    pub fn complement_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.d {
            for k in j + 1..self.d {
                if !self.edges.contains(&(j, k)) {
                    out.push((j, k));
                }
            }
        }
        out
    }

    pub fn intersection_len(&self, other: &Graph) -> usize {
        self.edges.intersection(&other.edges).count()
    }

    pub fn symmetric_difference_len(&self, other: &Graph) -> usize {
        self.edges.symmetric_difference(&other.edges).count()
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// Serializes with 1-indexed vertices.
    pub fn to_json(&self) -> serde_json::Value {
        let gj = GraphJson {
            d: self.d,
            edges: self.edges.iter().map(|&(j, k)| [j + 1, k + 1]).collect(),
        };
        serde_json::to_value(gj).expect("graph serializes")
    }

    /// Parses `{"d": int, "edges": [[j,k],...]}` with 1-indexed vertices.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let gj: GraphJson = serde_json::from_str(s)?;
        let mut g = Self::empty(gj.d);
        for [j, k] in gj.edges {
            if j == 0 || k == 0 {
                return Err(Error::InvalidArgument("graph JSON vertices are 1-indexed".into()));
            }
            g.insert(j - 1, k - 1)?;
        }
        Ok(g)
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}
