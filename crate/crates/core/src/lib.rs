//! Estimation and post-regularization inference for time-varying
//! nonparanormal graphical models.
//!
//! The pipeline is: kernel-smoothed Kendall's tau at an index value
//! ([`kendall`]), the sine transform to a latent correlation matrix, a
//! column-wise (calibrated) CLIME inverse ([`clime`]), and the score-based
//! tests with their Jackknife variance and multiplier bootstrap
//! ([`inference`]). [`simgen`] reproduces the synthetic time-varying model used
//! to validate size and power, [`baselines`] holds the kernel Pearson and
//! kernel neighborhood-selection competitors, and [`study`] drives the
//! Monte-Carlo size/power and ROC experiments behind the `tvnpn` CLI.

pub mod baselines;
pub mod cli;
pub mod clime;
pub mod datamodel;
pub mod error;
pub mod inference;
pub mod kendall;
pub mod lp;
pub mod normal;
pub mod par;
pub mod rng;
pub mod simgen;
pub mod study;

pub use datamodel::{Dataset, EvalGrid, Graph, Kernel, KernelSpec, SymMatrix};
pub use error::{Error, Result};
