//! Column-wise CLIME and calibrated CLIME as linear programs.
//!
//! Column `j` of CLIME minimizes `|beta|_1` subject to
//! `|Sigma beta - e_j|_inf <= lambda`. The calibrated variant adds a scale
//! `kappa`, minimizing `|beta|_1 + gamma kappa` subject to
//! `|Sigma beta - e_j|_inf <= lambda kappa` and `|beta|_1 <= kappa`.
//! Both are written with `beta = beta_plus - beta_minus` and handed to
//! [`lp_solve`](crate::lp::lp_solve).

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::datamodel::SymMatrix;
use crate::error::{Error, Result};
use crate::lp::{lp_solve, LpStatus, RowSense};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClimeMethod {
    Clime,
    CalibratedClime,
}

impl FromStr for ClimeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clime" => Ok(Self::Clime),
            "calibrated-clime" | "calibrated_clime" => Ok(Self::CalibratedClime),
            other => Err(Error::InvalidArgument(format!("unknown CLIME method {other:?}"))),
        }
    }
}

impl fmt::Display for ClimeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Clime => "clime",
            Self::CalibratedClime => "calibrated-clime",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetrize {
    /// Keep the smaller-magnitude entry of each `(j,k)` / `(k,j)` pair.
    MinMagnitude,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClimeConfig {
    pub lambda: f64,
    pub gamma: f64,
    pub method: ClimeMethod,
    pub feasibility_tol: f64,
    pub symmetrize: Symmetrize,
}

impl ClimeConfig {
    pub const DEFAULT_GAMMA: f64 = 0.5;
    pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-8;

    pub fn new(method: ClimeMethod, lambda: f64) -> Self {
        Self {
            lambda,
            gamma: Self::DEFAULT_GAMMA,
            method,
            feasibility_tol: Self::DEFAULT_FEASIBILITY_TOL,
            symmetrize: Symmetrize::MinMagnitude,
        }
    }

    pub fn clime(lambda: f64) -> Self {
        Self::new(ClimeMethod::Clime, lambda)
    }

    pub fn calibrated(lambda: f64, gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::new(ClimeMethod::CalibratedClime, lambda)
        }
    }

    pub fn with_symmetrize(mut self, s: Symmetrize) -> Self {
        self.symmetrize = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda = {} must be > 0", self.lambda)));
        }
        if self.method == ClimeMethod::CalibratedClime && !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidArgument(format!("gamma = {} outside (0,1)", self.gamma)));
        }
        if !(self.feasibility_tol >= 0.0) {
            return Err(Error::InvalidArgument("feasibility_tol must be >= 0".into()));
        }
        Ok(())
    }
}

/// One solved column.
#[derive(Debug, Clone)]
pub struct ColumnFit {
    pub beta: DVector<f64>,
    /// Calibration scale; `None` for plain CLIME.
    pub kappa: Option<f64>,
    /// `|beta|_1` (plus `gamma kappa` when calibrated).
    pub objective: f64,
    /// `|Sigma beta - e_j|_inf`.
    pub residual: f64,
}

fn residual_inf(sigma: &DMatrix<f64>, beta: &DVector<f64>, j: usize) -> f64 {
    let mut r = sigma * beta;
    r[j] -= 1.0;
    r.amax()
}

fn check_column(sigma: &SymMatrix, j: usize, lambda: f64) -> Result<()> {
    if j >= sigma.dim() {
        return Err(Error::InvalidArgument(format!("column {j} out of range for d = {}", sigma.dim())));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be > 0")));
    }
    Ok(())
}

/// Plain CLIME for column `j` (0-indexed).
pub fn clime_column(sigma: &SymMatrix, j: usize, lambda: f64) -> Result<ColumnFit> {
    clime_column_tol(sigma, j, lambda, ClimeConfig::DEFAULT_FEASIBILITY_TOL)
}

fn clime_column_tol(sigma: &SymMatrix, j: usize, lambda: f64, tol: f64) -> Result<ColumnFit> {
    check_column(sigma, j, lambda)?;
    let d = sigma.dim();
    let s = sigma.as_matrix();
    // Rows 0..d:  Sigma(b+ - b-) <= lambda + e_j
    // Rows d..2d: -Sigma(b+ - b-) <= lambda - e_j
    let a = DMatrix::from_fn(2 * d, 2 * d, |r, c| {
        let (row, sgn_row) = if r < d { (r, 1.0) } else { (r - d, -1.0) };
        let (col, sgn_col) = if c < d { (c, 1.0) } else { (c - d, -1.0) };
        sgn_row * sgn_col * s[(row, col)]
    });
    let b: Vec<f64> = (0..2 * d)
        .map(|r| {
            let e = if r % d == j { 1.0 } else { 0.0 };
            if r < d {
                lambda + e
            } else {
                lambda - e
            }
        })
        .collect();
    let c = vec![1.0; 2 * d];
    let sol = lp_solve(&c, &a, &b, &vec![RowSense::Le; 2 * d]);
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp { column: j, status: sol.status });
    }
    let beta = DVector::from_fn(d, |i, _| sol.x[i] - sol.x[i + d]);
    let residual = residual_inf(s, &beta, j);
    let excess = residual - lambda;
    if excess > tol {
        return Err(Error::Certificate { column: j, excess });
    }
    Ok(ColumnFit {
        objective: beta.lp_norm(1),
        beta,
        kappa: None,
        residual,
    })
}

/// Calibrated CLIME for column `j` (0-indexed).
pub fn calibrated_clime_column(sigma: &SymMatrix, j: usize, lambda: f64, gamma: f64) -> Result<ColumnFit> {
    calibrated_clime_column_tol(sigma, j, lambda, gamma, ClimeConfig::DEFAULT_FEASIBILITY_TOL)
}

fn calibrated_clime_column_tol(
    sigma: &SymMatrix,
    j: usize,
    lambda: f64,
    gamma: f64,
    tol: f64,
) -> Result<ColumnFit> {
    check_column(sigma, j, lambda)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} outside (0,1)")));
    }
    let d = sigma.dim();
    let s = sigma.as_matrix();
    let nv = 2 * d + 1;
    let kappa_col = 2 * d;
    // Rows 0..d:  Sigma(b+ - b-) - lambda kappa <= e_j
    // Rows d..2d: -Sigma(b+ - b-) - lambda kappa <= -e_j
    // Row 2d:     sum(b+ + b-) - kappa <= 0
    let mut a = DMatrix::zeros(2 * d + 1, nv);
    for r in 0..2 * d {
        let (row, sgn_row) = if r < d { (r, 1.0) } else { (r - d, -1.0) };
        for c in 0..2 * d {
            let (col, sgn_col) = if c < d { (c, 1.0) } else { (c - d, -1.0) };
            a[(r, c)] = sgn_row * sgn_col * s[(row, col)];
        }
        a[(r, kappa_col)] = -lambda;
    }
    for c in 0..2 * d {
        a[(2 * d, c)] = 1.0;
    }
    a[(2 * d, kappa_col)] = -1.0;
    let b: Vec<f64> = (0..=2 * d)
        .map(|r| match r {
            _ if r == 2 * d => 0.0,
            _ if r < d => f64::from(u8::from(r == j)),
            _ => -f64::from(u8::from(r - d == j)),
        })
        .collect();
    let mut c = vec![1.0; nv];
    c[kappa_col] = gamma;
    let sol = lp_solve(&c, &a, &b, &vec![RowSense::Le; 2 * d + 1]);
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp { column: j, status: sol.status });
    }
    let beta = DVector::from_fn(d, |i, _| sol.x[i] - sol.x[i + d]);
    let kappa = sol.x[kappa_col];
    let residual = residual_inf(s, &beta, j);
    let l1 = beta.lp_norm(1);
    let excess = (residual - lambda * kappa).max(l1 - kappa);
    if excess > tol {
        return Err(Error::Certificate { column: j, excess });
    }
    Ok(ColumnFit {
        objective: l1 + gamma * kappa,
        beta,
        kappa: Some(kappa),
        residual,
    })
}

/// Full inverse-correlation estimate.
#[derive(Debug, Clone)]
pub struct InverseEstimate {
    pub z0: Option<f64>,
    /// Column `j` is the fitted `beta` for column `j`, before any symmetrization.
    pub raw: DMatrix<f64>,
    /// `raw` after the configured symmetrization (a copy of `raw` for `None`).
    pub omega: DMatrix<f64>,
    pub kappa: Option<Vec<f64>>,
    pub objective: Vec<f64>,
    pub residual: Vec<f64>,
    pub config: ClimeConfig,
}

impl InverseEstimate {
    pub fn at(mut self, z0: f64) -> Self {
        self.z0 = Some(z0);
        self
    }

    /// Edges `(j, k)`, `j < k`, with `|omega_jk| > tol`.
    pub fn support(&self, tol: f64) -> crate::datamodel::Graph {
        support_of(&self.omega, tol)
    }
}

pub(crate) fn support_of(m: &DMatrix<f64>, tol: f64) -> crate::datamodel::Graph {
    let d = m.nrows();
    let mut g = crate::datamodel::Graph::empty(d);
    for j in 0..d {
        for k in j + 1..d {
            if m[(j, k)].abs() > tol || m[(k, j)].abs() > tol {
                g.insert(j, k).expect("valid edge");
            }
        }
    }
    g
}

/// Threshold below which an LP output entry counts as zero.
pub const SUPPORT_TOL: f64 = 1e-9;

pub fn symmetrize_min_magnitude(raw: &DMatrix<f64>) -> DMatrix<f64> {
    let d = raw.nrows();
    DMatrix::from_fn(d, d, |j, k| {
        let (a, b) = (raw[(j, k)], raw[(k, j)]);
        if a.abs() <= b.abs() {
            a
        } else {
            b
        }
    })
}

/// Solves all `d` columns.
pub fn inverse_correlation(sigma: &SymMatrix, config: &ClimeConfig) -> Result<InverseEstimate> {
    config.validate()?;
    let d = sigma.dim();
    let fits = par::map_range(d, |j| match config.method {
        ClimeMethod::Clime => clime_column_tol(sigma, j, config.lambda, config.feasibility_tol),
        ClimeMethod::CalibratedClime => {
            calibrated_clime_column_tol(sigma, j, config.lambda, config.gamma, config.feasibility_tol)
        }
    });
    let failures: Vec<(usize, String)> = fits
        .iter()
        .enumerate()
        .filter_map(|(j, f)| f.as_ref().err().map(|e| (j, e.to_string())))
        .collect();
    if !failures.is_empty() {
        return Err(Error::Clime(failures));
    }
    let fits: Vec<ColumnFit> = fits.into_iter().map(|f| f.expect("checked")).collect();
    let raw = DMatrix::from_fn(d, d, |i, j| fits[j].beta[i]);
    let omega = match config.symmetrize {
        Symmetrize::MinMagnitude => symmetrize_min_magnitude(&raw),
        Symmetrize::None => raw.clone(),
    };
    let kappa = match config.method {
        ClimeMethod::Clime => None,
        ClimeMethod::CalibratedClime => Some(fits.iter().map(|f| f.kappa.unwrap_or(0.0)).collect()),
    };
    Ok(InverseEstimate {
        z0: None,
        objective: fits.iter().map(|f| f.objective).collect(),
        residual: fits.iter().map(|f| f.residual).collect(),
        raw,
        omega,
        kappa,
        config: *config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(d: usize, v: &[f64]) -> SymMatrix {
        SymMatrix::new(DMatrix::from_row_slice(d, d, v)).unwrap()
    }

    #[test]
    fn identity_small_lambda() {
        let fit = clime_column(&SymMatrix::identity(3), 1, 0.1).unwrap();
        let want = [0.0, 0.9, 0.0];
        for i in 0..3 {
            assert!((fit.beta[i] - want[i]).abs() < 1e-12);
        }
        let est = inverse_correlation(&SymMatrix::identity(4), &ClimeConfig::clime(0.25)).unwrap();
        assert!((est.omega.clone() - DMatrix::identity(4, 4) * 0.75).amax() < 1e-12);
    }

    #[test]
    fn identity_large_lambda_gives_zero() {
        for lambda in [1.0, 1.5, 10.0] {
            for j in 0..3 {
                let fit = clime_column(&SymMatrix::identity(3), j, lambda).unwrap();
                assert_eq!(fit.beta.amax(), 0.0);
            }
        }
    }

    #[test]
    fn calibrated_identity() {
        // For Sigma = I the program reduces to min b + gamma max(b, (1-b)/lambda).
        // lambda < gamma: b = kappa = 1/(1+lambda).
        let fit = calibrated_clime_column(&SymMatrix::identity(2), 0, 0.1, 0.5).unwrap();
        assert!((fit.beta[0] - 1.0 / 1.1).abs() < 1e-10);
        assert!(fit.beta[1].abs() < 1e-12);
        assert!((fit.kappa.unwrap() - 1.0 / 1.1).abs() < 1e-10);
        // lambda > gamma: b = 0, kappa = 1/lambda.
        let fit = calibrated_clime_column(&SymMatrix::identity(3), 2, 4.0, 0.5).unwrap();
        assert_eq!(fit.beta.amax(), 0.0);
        assert!((fit.kappa.unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn calibrated_l1_bound_holds_when_scaling_offdiagonals() {
        let base = [1.0, 0.3, -0.2, 0.3, 1.0, 0.1, -0.2, 0.1, 1.0];
        let doubled: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(i, &v)| if i % 4 == 0 { v } else { 2.0 * v })
            .collect();
        for m in [sym(3, &base), sym(3, &doubled)] {
            for j in 0..3 {
                let fit = calibrated_clime_column(&m, j, 0.1, 0.5).unwrap();
                assert!(fit.beta.lp_norm(1) <= fit.kappa.unwrap() + 1e-8);
                assert!(fit.residual <= 0.1 * fit.kappa.unwrap() + 1e-8);
            }
        }
    }

    #[test]
    fn feasibility_on_random_correlation() {
        let m = sym(3, &[1.0, 0.4, 0.1, 0.4, 1.0, -0.3, 0.1, -0.3, 1.0]);
        let est = inverse_correlation(&m, &ClimeConfig::clime(0.05)).unwrap();
        for r in &est.residual {
            assert!(*r <= 0.05 + 1e-8);
        }
    }

    #[test]
    fn chain_graph_support_recovery() {
        // Tridiagonal precision -> dense covariance; CLIME at small lambda
        // must recover the chain.
        let d = 4;
        let omega: DMatrix<f64> = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                1.0
            } else if i.abs_diff(j) == 1 {
                0.4
            } else {
                0.0
            }
        });
        let cov = omega.clone().try_inverse().unwrap();
        let scale: Vec<f64> = (0..d).map(|i| cov[(i, i)].sqrt()).collect();
        let corr = DMatrix::from_fn(d, d, |i, j| cov[(i, j)] / (scale[i] * scale[j]));
        let corr = DMatrix::from_fn(d, d, |i, j| 0.5 * (corr[(i, j)] + corr[(j, i)]));
        let est = inverse_correlation(&SymMatrix::new(corr).unwrap(), &ClimeConfig::clime(1e-3)).unwrap();
        let g = est.support(1e-6);
        let mut chain = crate::datamodel::Graph::empty(d);
        for i in 0..d - 1 {
            chain.insert(i, i + 1).unwrap();
        }
        assert_eq!(g, chain);
    }

    #[test]
    fn min_magnitude_rule() {
        let raw = DMatrix::from_row_slice(2, 2, &[1.0, -0.2, 0.5, 1.0]);
        let s = symmetrize_min_magnitude(&raw);
        assert_eq!(s[(0, 1)], -0.2);
        assert_eq!(s[(1, 0)], -0.2);
    }

    #[test]
    fn config_validation() {
        assert!(ClimeConfig::clime(0.0).validate().is_err());
        assert!(ClimeConfig::calibrated(0.1, 1.0).validate().is_err());
        assert!(ClimeConfig::calibrated(0.1, 0.5).validate().is_ok());
        assert!(clime_column(&SymMatrix::identity(2), 5, 0.1).is_err());
    }

    #[test]
    fn degenerate_tableau_regression() {
        // Kendall-based estimate on which an earlier ratio test let a basic
        // slack go negative.
        #[rustfmt::skip]
        let vals = [
            1.0, 0.001955131851007626, -0.041484699843205755, 0.022476915631875396, -0.030529071933268197, 0.09456072269546804, -0.05673471158108283, -0.022010548241182024, -0.15581033494414245, 0.04865152898099298,
            0.001955131851007626, 1.0, 0.0062969842631193295, -0.015315686006326757, -0.07549262353704903, 0.07328876573382467, -0.037219097114149925, 0.11419698541656395, 0.003967084526006668, 0.005975098872031641,
            -0.041484699843205755, 0.0062969842631193295, 1.0, 0.04829063374391018, -0.30017521247159273, 0.1745079181357765, 0.21310603393000116, 0.024839739401098328, 0.10126748739356048, 0.058299734669084474,
            0.022476915631875396, -0.015315686006326757, 0.04829063374391018, 1.0, -0.09225299131098685, 0.013281808950639589, -0.08527772469406211, 0.06903562083023354, -0.0688818447410713, -0.0583676682489585,
            -0.030529071933268197, -0.07549262353704903, -0.30017521247159273, -0.09225299131098685, 1.0, -0.10024033899519973, -0.32946410782483065, 0.024158187886834503, 0.013180178813998234, -0.08132411727255869,
            0.09456072269546804, 0.07328876573382467, 0.1745079181357765, 0.013281808950639589, -0.10024033899519973, 1.0, 0.19178579111223584, -0.030526518916331184, 0.12780661696115447, -0.07339517673973238,
            -0.05673471158108283, -0.037219097114149925, 0.21310603393000116, -0.08527772469406211, -0.32946410782483065, 0.19178579111223584, 1.0, 0.06829465433915055, -0.014487084217702648, 0.06219599545417139,
            -0.022010548241182024, 0.11419698541656395, 0.024839739401098328, 0.06903562083023354, 0.024158187886834503, -0.030526518916331184, 0.06829465433915055, 1.0, -0.05471578178456046, -0.16994974703080032,
            -0.15581033494414245, 0.003967084526006668, 0.10126748739356048, -0.0688818447410713, 0.013180178813998234, 0.12780661696115447, -0.014487084217702648, -0.05471578178456046, 1.0, -0.09633676450599724,
            0.04865152898099298, 0.005975098872031641, 0.058299734669084474, -0.0583676682489585, -0.08132411727255869, -0.07339517673973238, 0.06219599545417139, -0.16994974703080032, -0.09633676450599724, 1.0,
        ];
        let sigma = SymMatrix::new(DMatrix::from_row_slice(10, 10, &vals)).unwrap();
        let lambda = 0.043_871_927_814_037_65;
        for j in 0..10 {
            let fit = calibrated_clime_column(&sigma, j, lambda, 0.5).unwrap();
            assert!(fit.residual <= lambda * fit.kappa.unwrap() + 1e-8);
            assert!(fit.beta.lp_norm(1) <= fit.kappa.unwrap() + 1e-8);
            clime_column(&sigma, j, lambda).unwrap();
        }
    }

    #[test]
    fn phase_one_noise_column_regression() {
        // Left a reduced cost of -1e-10 with only sub-tolerance positive
        // entries in its column, which once read as an unbounded phase 1.
        let sigma: [f64; 100] = [
            1.0, 0.010327635644001906, -0.08832527875507704, 0.11114000955495724, 0.08657556692442273, -0.09849362473486448, -0.03076062668935632, 0.16467276163240716, 0.014477834504325129, -0.3737253132385762,
            0.010327635644001906, 1.0, -0.13321645444149813, 0.0016924056829592622, 0.020632839251510778, -0.07719039802381857, 0.04274621154474092, 0.04294827860107421, -0.019365344171792365, 0.07576219705458218,
            -0.08832527875507704, -0.13321645444149813, 1.0, -0.05868465988231119, 0.08104441076203023, -0.0473049583496181, 0.13751355406621601, -0.0664469532201154, 0.007585592177975034, -0.016976239765559065,
            0.11114000955495724, 0.0016924056829592622, -0.05868465988231119, 1.0, -0.1890075113528203, -0.012440243754681852, 0.042345645443523296, 0.030951152336623995, -0.05586598246830496, -0.038584217178699344,
            0.08657556692442273, 0.020632839251510778, 0.08104441076203023, -0.1890075113528203, 1.0, -0.05659604282416017, -0.007750364194116067, 0.055536078848088054, 0.013844241276179456, -0.07415150231986001,
            -0.09849362473486448, -0.07719039802381857, -0.0473049583496181, -0.012440243754681852, -0.05659604282416017, 1.0, -0.12289351957610364, -0.25991993347701775, 0.06660615891190703, 0.1624141132824418,
            -0.03076062668935632, 0.04274621154474092, 0.13751355406621601, 0.042345645443523296, -0.007750364194116067, -0.12289351957610364, 1.0, 0.08588967295958438, -0.3838991735433866, -0.09369853738936944,
            0.16467276163240716, 0.04294827860107421, -0.0664469532201154, 0.030951152336623995, 0.055536078848088054, -0.25991993347701775, 0.08588967295958438, 1.0, -0.19220623237605872, -0.43493714951308676,
            0.014477834504325129, -0.019365344171792365, 0.007585592177975034, -0.05586598246830496, 0.013844241276179456, 0.06660615891190703, -0.3838991735433866, -0.19220623237605872, 1.0, 0.12172461330163308,
            -0.3737253132385762, 0.07576219705458218, -0.016976239765559065, -0.038584217178699344, -0.07415150231986001, 0.1624141132824418, -0.09369853738936944, -0.43493714951308676, 0.12172461330163308, 1.0,
        ];
        let sigma = SymMatrix::new(DMatrix::from_row_slice(10, 10, &sigma)).unwrap();
        let lambda = 0.04387192781403765;
        for j in 0..10 {
            let fit = calibrated_clime_column(&sigma, j, lambda, 0.5).unwrap();
            let kappa = fit.kappa.unwrap();
            assert!(fit.residual <= lambda * kappa + 1e-8);
            assert!(fit.beta.lp_norm(1) <= kappa + 1e-8);
            clime_column(&sigma, j, lambda).unwrap();
        }
    }

    #[test]
    fn tiny_degenerate_pivot_regression() {
        // Bland's tie-break once chose a 3e-9 pivot here and the tableau lost
        // feasibility by 2.5.
        let sigma: [f64; 100] = [
            1.0, -0.30884725799842727, 0.12129743504339888, 0.1445099453200217, -0.24689581004692684, -0.03624841309817152, 0.23446572612625494, 0.09612444095339641, -0.10256409213379421, -0.016983048679017305,
            -0.30884725799842727, 1.0, -0.07516393943192544, -0.4159618991242064, 0.12375201336168713, 0.06568375880099174, 0.08942685664853214, -0.1019166896625105, -0.11662289364513163, -0.1404848819133396,
            0.12129743504339888, -0.07516393943192544, 1.0, -0.19460504507502252, -0.498963558745848, -0.08587665203567067, 0.2388413961886377, 0.05314362431342705, -0.08056844377060243, 0.03345568643407559,
            0.1445099453200217, -0.4159618991242064, -0.19460504507502252, 1.0, 0.15856464248627744, -0.11139032892848814, -0.08895349781948417, 0.21136451704812276, -0.0414622132955344, 0.008535888569536364,
            -0.24689581004692684, 0.12375201336168713, -0.498963558745848, 0.15856464248627744, 1.0, 0.036246923079426584, -0.12051399193664822, -0.01898986175422503, -0.13765347957249108, 0.0998325767768899,
            -0.03624841309817152, 0.06568375880099174, -0.08587665203567067, -0.11139032892848814, 0.036246923079426584, 1.0, -0.053574223809910684, 0.028115742638471372, 0.04637331416504662, 0.13918725626462308,
            0.23446572612625494, 0.08942685664853214, 0.2388413961886377, -0.08895349781948417, -0.12051399193664822, -0.053574223809910684, 1.0, -0.07949753462057198, -0.06902872146215684, -0.040025589832268484,
            0.09612444095339641, -0.1019166896625105, 0.05314362431342705, 0.21136451704812276, -0.01898986175422503, 0.028115742638471372, -0.07949753462057198, 1.0, -0.08732403570881929, 0.19467143156754133,
            -0.10256409213379421, -0.11662289364513163, -0.08056844377060243, -0.0414622132955344, -0.13765347957249108, 0.04637331416504662, -0.06902872146215684, -0.08732403570881929, 1.0, 0.14785985140816366,
            -0.016983048679017305, -0.1404848819133396, 0.03345568643407559, 0.008535888569536364, 0.0998325767768899, 0.13918725626462308, -0.040025589832268484, 0.19467143156754133, 0.14785985140816366, 1.0,
        ];
        let sigma = SymMatrix::new(DMatrix::from_column_slice(10, 10, &sigma)).unwrap();
        for lambda in [1.3738237958832627e-2, 1.7433288221999882e-2, 2.2122162910704495e-2] {
            let fit = calibrated_clime_column(&sigma, 8, lambda, 0.5).unwrap();
            let kappa = fit.kappa.unwrap();
            assert!(fit.residual <= lambda * kappa + 1e-8);
            assert!(fit.beta.lp_norm(1) <= kappa + 1e-8);
        }
    }
}
