//! Simulation and density analysis for quotients of jump-diffusion supply/demand legs.
//!
//! The central object is a pair of correlated legs
//! `R_i = mu0_i + (sigma0_i / 2) dW_i + sum_{j<=k_i} Y_ij` with Poisson jump
//! counts `k_i` and normal jump sizes, together with the scaled quotient
//! `R_a = (D/S) R_1 / R_2` and the price transforms
//! `r(x) = x - 1/x` and `G_eps(x) = g_eps(r(x))`. The crate provides:
//!
//! - exact conditional-normal mixture densities for `R_a` and its transforms,
//!   evaluated by adaptive Gauss-Kronrod quadrature ([`density_series`]);
//! - closed forms for the perfectly anti-correlated case ([`density_exact`]);
//! - deterministic, chunk-parallel samplers ([`sampler`]);
//! - tail-exponent estimators ([`tail`]), correlation analysis
//!   ([`correlation`]), discrete price-path models ([`pricepath`]), and
//!   price-impact calibration ([`calibration`]).
//!
//! The crate is `no_std` (with `alloc`); all transcendental math goes through
//! [`libm`] so results are bit-reproducible across platforms. IO, file
//! formats, and thread pools live in the companion CLI crate.

#![no_std]
#![deny(unsafe_code)]
// Validation uses `!(x > 0.0)` so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod calibration;
pub mod correlation;
pub mod density_exact;
pub mod density_series;
pub mod error;
pub mod model;
pub mod pricepath;
pub mod quad;
pub mod rng;
pub mod sampler;
pub mod special;
pub mod tail;
pub mod transforms;

pub use error::{Error, Result};
pub use model::{
    ConditionalMoments, CorrelationSpec, JumpCountModel, LegParams, PriceFunction, QuotientModel,
};
