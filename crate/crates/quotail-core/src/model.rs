//! Model types: supply/demand legs, jump-count models, correlation
//! structure, the price function, and their derived quantities.
//!
//! A leg is `R_i = mu0_i + (sigma0_i / 2) dW_i + sum_{j <= k_i} Y_ij` over a
//! window of length `dt`, with `k_i` Poisson jump counts and
//! `Y_ij ~ N(jump_mu_i, jump_sigma_i^2)`. Conditioned on the counts, each
//! leg is normal with the moments returned by
//! [`QuotientModel::conditional_moments`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_factorial, poisson_pmf};

/// Parameters of one supply or demand leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegParams {
    /// Deterministic drift contribution over the window.
    pub mu0: f64,
    /// Diffusive scale; the Brownian term is `(sigma0 / 2) dW`.
    pub sigma0: f64,
    /// Mean of a single jump.
    pub jump_mu: f64,
    /// Standard deviation of a single jump.
    pub jump_sigma: f64,
}

impl LegParams {
    /// Check finiteness and sign constraints.
    ///
    /// `sigma0 = 0` is allowed so exactly deterministic legs can be
    /// simulated; density operations separately require a positive
    /// conditional standard deviation.
    pub fn validate(&self) -> Result<()> {
        let vals = [self.mu0, self.sigma0, self.jump_mu, self.jump_sigma];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("leg parameters must be finite"));
        }
        if self.sigma0 < 0.0 {
            return Err(Error::Domain("sigma0 must be >= 0"));
        }
        if self.jump_sigma < 0.0 {
            return Err(Error::Domain("jump_sigma must be >= 0"));
        }
        Ok(())
    }
}

/// Joint law of the two jump counts over one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum JumpCountModel {
    /// Independent Poisson counts with per-unit-time rates; the window means
    /// are `lambda1 * dt` and `lambda2 * dt`.
    Independent { lambda1: f64, lambda2: f64 },
    /// Bivariate Poisson built from three independent factors with
    /// per-window means: `k1 = j01 + j12`, `k2 = j02 + j12` where
    /// `j0i ~ Poisson(lambda0i)` and `j12 ~ Poisson(lambda12)`.
    Bivariate {
        lambda01: f64,
        lambda02: f64,
        lambda12: f64,
    },
}

impl JumpCountModel {
    /// Check finiteness and nonnegativity of all rates.
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        match *self {
            JumpCountModel::Independent { lambda1, lambda2 } => {
                if !ok(lambda1) || !ok(lambda2) {
                    return Err(Error::Domain("jump rates must be finite and >= 0"));
                }
            }
            JumpCountModel::Bivariate {
                lambda01,
                lambda02,
                lambda12,
            } => {
                if !ok(lambda01) || !ok(lambda02) || !ok(lambda12) {
                    return Err(Error::Domain("jump rates must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }

    /// Mean jump counts `(E[k1], E[k2])` over a window of length `dt`.
    ///
    /// Independent rates are per unit time and scale with `dt`; bivariate
    /// rates are already per-window.
    pub fn marginal_means(&self, dt: f64) -> (f64, f64) {
        match *self {
            JumpCountModel::Independent { lambda1, lambda2 } => (lambda1 * dt, lambda2 * dt),
            JumpCountModel::Bivariate {
                lambda01,
                lambda02,
                lambda12,
            } => (lambda01 + lambda12, lambda02 + lambda12),
        }
    }

    /// Covariance of the two counts (`lambda12` for the bivariate model,
    /// zero for independent counts).
    pub fn count_covariance(&self) -> f64 {
        match *self {
            JumpCountModel::Independent { .. } => 0.0,
            JumpCountModel::Bivariate { lambda12, .. } => lambda12,
        }
    }

    /// Joint probability `P(k1, k2)` over a window of length `dt`.
    pub fn joint_pmf(&self, k1: u64, k2: u64, dt: f64) -> Result<f64> {
        match *self {
            JumpCountModel::Independent { lambda1, lambda2 } => {
                Ok(poisson_pmf(k1, lambda1 * dt)? * poisson_pmf(k2, lambda2 * dt)?)
            }
            JumpCountModel::Bivariate {
                lambda01,
                lambda02,
                lambda12,
            } => bivariate_pmf(k1, k2, lambda01, lambda02, lambda12),
        }
    }
}

/// How the Gaussian parts of the two legs are correlated given the counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum CorrelationSpec {
    /// Conditionally bivariate normal with correlation `rho`, `|rho| < 1`.
    Conditional { rho: f64 },
    /// Perfect anti-correlation: the supply leg carries the mirrored noise
    /// of the demand leg (`R2 = mu02 - (sigma0/2) dW - sum Y_j`), which
    /// requires mirrored leg parameters and a shared jump count.
    AntiCorrelated,
}

/// Complete model of the scaled quotient `R_a = (D/S) R_1 / R_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientModel {
    /// Numerator (demand) leg.
    pub demand: LegParams,
    /// Denominator (supply) leg.
    pub supply: LegParams,
    /// Joint law of the jump counts.
    pub jumps: JumpCountModel,
    /// Correlation structure of the Gaussian parts.
    pub corr: CorrelationSpec,
    /// Window length.
    pub dt: f64,
    /// Deterministic demand-to-supply ratio multiplying the quotient.
    pub d_over_s: f64,
}

/// Conditional mean and standard deviation of each leg given jump counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalMoments {
    pub mu_r1: f64,
    pub mu_r2: f64,
    pub sigma_r1: f64,
    pub sigma_r2: f64,
}

impl QuotientModel {
    /// Check every component and the cross-field constraints.
    pub fn validate(&self) -> Result<()> {
        self.demand.validate()?;
        self.supply.validate()?;
        self.jumps.validate()?;
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::Domain("dt must be finite and > 0"));
        }
        if !self.d_over_s.is_finite() || self.d_over_s <= 0.0 {
            return Err(Error::Domain("d_over_s must be finite and > 0"));
        }
        match self.corr {
            CorrelationSpec::Conditional { rho } => {
                if !rho.is_finite() || rho.abs() >= 1.0 {
                    return Err(Error::Domain("conditional rho must satisfy |rho| < 1"));
                }
            }
            CorrelationSpec::AntiCorrelated => {
                let d = &self.demand;
                let s = &self.supply;
                let mirrored =
                    d.sigma0 == s.sigma0 && d.jump_sigma == s.jump_sigma && d.jump_mu == -s.jump_mu;
                if !mirrored {
                    return Err(Error::Domain(
                        "anti-correlated legs must mirror: equal sigma0 and jump_sigma, negated jump_mu",
                    ));
                }
                match self.jumps {
                    JumpCountModel::Independent { lambda1, lambda2 } if lambda1 == lambda2 => {}
                    _ => {
                        return Err(Error::Domain(
                            "anti-correlated model requires independent jumps with lambda1 = lambda2 (one shared count)",
                        ))
                    }
                }
            }
        }
        Ok(())
    }

    /// Conditional moments of the legs given `k1` and `k2` jumps:
    /// `mu_Ri = mu0_i + k_i jump_mu_i` and
    /// `sigma_Ri^2 = (sigma0_i / 2)^2 dt + k_i jump_sigma_i^2`.
    pub fn conditional_moments(&self, k1: u64, k2: u64) -> ConditionalMoments {
        let half1 = self.demand.sigma0 / 2.0;
        let half2 = self.supply.sigma0 / 2.0;
        ConditionalMoments {
            mu_r1: self.demand.mu0 + k1 as f64 * self.demand.jump_mu,
            mu_r2: self.supply.mu0 + k2 as f64 * self.supply.jump_mu,
            sigma_r1: libm::sqrt(
                half1 * half1 * self.dt
                    + k1 as f64 * self.demand.jump_sigma * self.demand.jump_sigma,
            ),
            sigma_r2: libm::sqrt(
                half2 * half2 * self.dt
                    + k2 as f64 * self.supply.jump_sigma * self.supply.jump_sigma,
            ),
        }
    }

    /// Conditional correlation of the Gaussian parts (`-1` for the
    /// anti-correlated structure).
    pub fn conditional_rho(&self) -> f64 {
        match self.corr {
            CorrelationSpec::Conditional { rho } => rho,
            CorrelationSpec::AntiCorrelated => -1.0,
        }
    }

    /// 64-bit FNV-1a content hash over a canonical little-endian encoding of
    /// every field (enum tags included). Identifies a model configuration in
    /// sample batches and CLI sidecars; not a cryptographic digest.
    pub fn digest64(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut hash = OFFSET;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= b as u64;
                hash = hash.wrapping_mul(PRIME);
            }
        };
        eat(b"quotient-model-v1");
        for leg in [&self.demand, &self.supply] {
            eat(&leg.mu0.to_le_bytes());
            eat(&leg.sigma0.to_le_bytes());
            eat(&leg.jump_mu.to_le_bytes());
            eat(&leg.jump_sigma.to_le_bytes());
        }
        match self.jumps {
            JumpCountModel::Independent { lambda1, lambda2 } => {
                eat(&[1u8]);
                eat(&lambda1.to_le_bytes());
                eat(&lambda2.to_le_bytes());
            }
            JumpCountModel::Bivariate {
                lambda01,
                lambda02,
                lambda12,
            } => {
                eat(&[2u8]);
                eat(&lambda01.to_le_bytes());
                eat(&lambda02.to_le_bytes());
                eat(&lambda12.to_le_bytes());
            }
        }
        match self.corr {
            CorrelationSpec::Conditional { rho } => {
                eat(&[1u8]);
                eat(&rho.to_le_bytes());
            }
            CorrelationSpec::AntiCorrelated => eat(&[2u8]),
        }
        eat(&self.dt.to_le_bytes());
        eat(&self.d_over_s.to_le_bytes());
        hash
    }
}

/// Price-change transform parameters: `G_eps(x) = g_eps(x - 1/x)` with
/// `g_eps(u) = u (u^2 + eps^2)^{(1-q)/(2q)}`, reducing to
/// `sgn(u) |u|^{1/q}` at `eps = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceFunction {
    /// Tail exponent parameter; the price function has exponent `1/q`.
    pub q: f64,
    /// Smoothing scale at the origin.
    pub epsilon: f64,
    /// Reference time normalization carried with the transform.
    pub tau0: f64,
}

impl PriceFunction {
    /// Check `q >= 1`, `epsilon >= 0`, `tau0 > 0`, all finite.
    pub fn validate(&self) -> Result<()> {
        if !self.q.is_finite() || self.q < 1.0 {
            return Err(Error::Domain("price function requires finite q >= 1"));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::Domain("price function requires finite epsilon >= 0"));
        }
        if !self.tau0.is_finite() || self.tau0 <= 0.0 {
            return Err(Error::Domain("price function requires finite tau0 > 0"));
        }
        Ok(())
    }
}

/// Bivariate Poisson pmf
/// `p(k, l) = sum_{j=0}^{min(k,l)} l01^{k-j} l02^{l-j} l12^j
///            e^{-(l01+l02+l12)} / ((k-j)! (l-j)! j!)`.
///
/// Evaluated by log-sum-exp; zero rates contribute only through terms whose
/// corresponding exponent is zero.
pub fn bivariate_pmf(k: u64, l: u64, lambda01: f64, lambda02: f64, lambda12: f64) -> Result<f64> {
    for v in [lambda01, lambda02, lambda12] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Domain(
                "bivariate_pmf: rates must be finite and >= 0",
            ));
        }
    }
    // log(rate^n / n!) respecting 0^0 = 1.
    let log_pow = |rate: f64, n: u64| -> Option<f64> {
        if rate == 0.0 {
            if n == 0 {
                Some(0.0)
            } else {
                None
            }
        } else {
            Some(n as f64 * libm::log(rate) - ln_factorial(n))
        }
    };
    let mut max_log = f64::NEG_INFINITY;
    let mut logs = alloc::vec::Vec::with_capacity((k.min(l) + 1) as usize);
    for j in 0..=k.min(l) {
        let t = match (
            log_pow(lambda01, k - j),
            log_pow(lambda02, l - j),
            log_pow(lambda12, j),
        ) {
            (Some(a), Some(b), Some(c)) => a + b + c,
            _ => continue,
        };
        if t > max_log {
            max_log = t;
        }
        logs.push(t);
    }
    if logs.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for t in logs {
        sum += libm::exp(t - max_log);
    }
    Ok(libm::exp(max_log - (lambda01 + lambda02 + lambda12)) * sum)
}

/// Pearson correlation of the two jump counts:
/// `lambda12 / sqrt((lambda01 + lambda12)(lambda02 + lambda12))` for the
/// bivariate model, `0` for independent counts.
pub fn jump_correlation(jumps: &JumpCountModel) -> Result<f64> {
    match *jumps {
        JumpCountModel::Independent { lambda1, lambda2 } => {
            if lambda1 == 0.0 && lambda2 == 0.0 {
                return Err(Error::Domain(
                    "jump_correlation: undefined when both counts are degenerate at zero",
                ));
            }
            Ok(0.0)
        }
        JumpCountModel::Bivariate {
            lambda01,
            lambda02,
            lambda12,
        } => {
            let m1 = lambda01 + lambda12;
            let m2 = lambda02 + lambda12;
            if m1 == 0.0 || m2 == 0.0 {
                return Err(Error::Domain(
                    "jump_correlation: undefined when a marginal count is degenerate at zero",
                ));
            }
            Ok(lambda12 / (libm::sqrt(m1) * libm::sqrt(m2)))
        }
    }
}
