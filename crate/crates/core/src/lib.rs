//! Zeroth-order inexact proximal stochastic gradient method (Z-iProxSG) for
//! nonsmooth, nonconvex composite problems `min_x E{F(x, ξ)} + r(x)` where `F`
//! is only available through an inexact, noisy value oracle.
//!
//! The numeric core is generic over the [`Scalar`] type (`f32` or `f64`); the
//! aliases below fix the common double-precision instantiations.

// `!(v > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod linalg;
pub mod oracles;
pub mod problem;
pub mod problems;
pub mod prox;
pub mod rng;
pub mod scalar;
pub mod smoothing;
pub mod solver;
pub mod stationarity;

pub use error::{Error, OracleError, Result};
pub use scalar::Scalar;

pub type RunRecord = solver::RunRecord<f64>;
pub type RunRecord32 = solver::RunRecord<f32>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type SolverConfig32 = solver::SolverConfig<f32>;
pub type CompositeProblem = problem::CompositeProblem<f64>;
pub type CompositeProblem32 = problem::CompositeProblem<f32>;
pub type InexactOracle = oracles::InexactOracle<f64>;
pub type InexactOracle32 = oracles::InexactOracle<f32>;
pub type Certificate = stationarity::Certificate<f64>;
pub type Certificate32 = stationarity::Certificate<f32>;
