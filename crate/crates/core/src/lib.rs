//! Isotropic α-stable Lévy processes killed on leaving a cone.
//!
//! The crate is `no_std` (it needs `alloc`) and splits into:
//!
//! * [`stable`]: the free process (Lévy density, exact increment sampler,
//!   Cauchy transition density, two-sided envelope).
//! * [`cone`]: scale-invariant cones, Martin/Kelvin kernels and the
//!   killing intensity.
//! * [`exit`]: grid-observed exit simulation, survival probabilities,
//!   homogeneity-exponent regression and the Ikeda–Watanabe check.
//! * [`yaglom`]: Monte Carlo estimators for the Yaglom limit, the entrance
//!   law and quasi-stationarity.
//! * [`cauchy`]: closed-form and quadrature oracles for the Cauchy process
//!   on the half-line.
//!
//! Everything that touches files, threads or the command line lives in the
//! `cone-yaglom` crate.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cauchy;
pub mod cone;
pub mod error;
pub mod exec;
pub mod exit;
mod math;
pub mod quadrature;
pub mod rng;
pub mod stable;
pub mod stats;
pub mod yaglom;

pub use cauchy::{CauchyHalfLine, Constants};
pub use cone::{BetaSource, ConeSpec, HomogeneityExponent};
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use exit::{ExitRecord, PathParams, SurvivalEstimate};
pub use quadrature::{Integral, QuadratureSpec};
pub use rng::RngStream;
pub use stable::{Point, StableSpec};
pub use yaglom::{Binning, EmpiricalMeasure, EntranceLawEstimate};
