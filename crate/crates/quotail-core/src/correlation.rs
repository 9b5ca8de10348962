//! Aggregate correlation between the two legs under jump-level coupling.
//!
//! The per-window leg correlation can depend on the jump counts. Given a
//! jump-level correlation `rho(k1, k2)`, the aggregate correlation of the
//! legs is
//!
//! `rho_T = sum_{k1,k2} P(k1,k2) rho(k1,k2) sigma_R1(k1) sigma_R2(k2)
//!          / sqrt(Var R1 * Var R2)`,
//!
//! which by Cauchy-Schwarz is confined to a band strictly inside `[-1, 1]`
//! whenever the conditional spreads genuinely vary with the counts.

use crate::density_series::SeriesTruncation;
use crate::error::{Error, Result};
use crate::model::{CorrelationSpec, LegParams, QuotientModel};

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Correlation of the leg noises as a function of the jump counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpLevelCorrelation {
    /// The same correlation at every count pair.
    Constant(f64),
    /// A lookup table indexed `values[k1][k2]`, falling back to `default`
    /// beyond its bounds.
    Table { values: Vec<Vec<f64>>, default: f64 },
}

impl JumpLevelCorrelation {
    pub fn validate(&self) -> Result<()> {
        match self {
            JumpLevelCorrelation::Constant(r) => {
                if !r.is_finite() || r.abs() > 1.0 {
                    return Err(Error::Domain(
                        "JumpLevelCorrelation: constant must lie in [-1, 1]",
                    ));
                }
            }
            JumpLevelCorrelation::Table { values, default } => {
                if !default.is_finite() || default.abs() > 1.0 {
                    return Err(Error::Domain(
                        "JumpLevelCorrelation: default must lie in [-1, 1]",
                    ));
                }
                for row in values {
                    for v in row {
                        if !v.is_finite() || v.abs() > 1.0 {
                            return Err(Error::Domain(
                                "JumpLevelCorrelation: table entries must lie in [-1, 1]",
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Correlation at a given count pair.
    pub fn rho(&self, k1: u64, k2: u64) -> f64 {
        match self {
            JumpLevelCorrelation::Constant(r) => *r,
            JumpLevelCorrelation::Table { values, default } => values
                .get(k1 as usize)
                .and_then(|row| row.get(k2 as usize))
                .copied()
                .unwrap_or(*default),
        }
    }
}

/// Unconditional variance of one leg over a window,
/// `(sigma0 / 2)^2 + jump_sigma^2 * (mean jump count)`.
pub fn leg_variance(leg: &LegParams, mean_count: f64) -> Result<f64> {
    leg.validate()?;
    if !mean_count.is_finite() || mean_count < 0.0 {
        return Err(Error::Domain(
            "leg_variance: mean count must be nonnegative",
        ));
    }
    let half = leg.sigma0 / 2.0;
    Ok(half * half + leg.jump_sigma * leg.jump_sigma * mean_count)
}

/// Aggregate leg correlation under a jump-level correlation structure.
///
/// For anti-correlated models the legs are an exact decreasing affine pair,
/// so the result is `-1` regardless of `jlc`. Otherwise the truncated
/// count mixture is combined with the conditional spreads; the variance
/// normalization uses the per-window mean counts.
pub fn total_correlation(
    model: &QuotientModel,
    jlc: &JumpLevelCorrelation,
    trunc: SeriesTruncation,
) -> Result<f64> {
    model.validate()?;
    jlc.validate()?;
    if matches!(model.corr, CorrelationSpec::AntiCorrelated) {
        return Ok(-1.0);
    }
    let (mean1, mean2) = model.jumps.marginal_means(model.dt);
    let var1 = leg_variance(&model.demand, mean1)?;
    let var2 = leg_variance(&model.supply, mean2)?;
    if var1 <= 0.0 || var2 <= 0.0 {
        return Err(Error::Domain(
            "total_correlation: both legs need positive variance",
        ));
    }
    let norm = libm::sqrt(var1 * var2);
    let mut sum = 0.0;
    for k1 in 0..=trunc.k_max as u64 {
        for k2 in 0..=trunc.k_max as u64 {
            let w = model.jumps.joint_pmf(k1, k2, model.dt)?;
            if w < 1e-320 {
                continue;
            }
            let m = model.conditional_moments(k1, k2);
            sum += w * jlc.rho(k1, k2) * m.sigma_r1 * m.sigma_r2;
        }
    }
    Ok((sum / norm).clamp(-1.0, 1.0))
}

/// Attainable band of the aggregate correlation: the values reached by
/// `rho(k1,k2) = -1` and `+1` uniformly. Its half-width is strictly below
/// one exactly when the conditional spreads vary across counts.
pub fn rho_t_range(model: &QuotientModel, trunc: SeriesTruncation) -> Result<(f64, f64)> {
    let hi = total_correlation(model, &JumpLevelCorrelation::Constant(1.0), trunc)?;
    let lo = total_correlation(model, &JumpLevelCorrelation::Constant(-1.0), trunc)?;
    Ok((lo, hi))
}

/// Aggregate correlation implied by the model's own coupling: its constant
/// conditional `rho`, or `-1` for the anti-correlated pair.
pub fn model_total_correlation(model: &QuotientModel, trunc: SeriesTruncation) -> Result<f64> {
    match model.corr {
        CorrelationSpec::Conditional { rho } => {
            total_correlation(model, &JumpLevelCorrelation::Constant(rho), trunc)
        }
        CorrelationSpec::AntiCorrelated => Ok(-1.0),
    }
}
