//! Closed-form densities for the perfectly anti-correlated model.
//!
//! When the two legs share one jump count and one noise source with
//! opposite signs, the pair is `R1 = mu1 + sigma Z`, `R2 = mu2 - sigma Z`
//! conditional on the count, and the quotient density has an elementary
//! closed form: the map `z -> (mu1 + sigma1 z) / (mu2 - sigma2 z)` is
//! monotone wherever `mu1 sigma2 + mu2 sigma1 > 0`, so a single change of
//! variables gives the density and CDF exactly. The jump-count mixture and
//! its small-time-step power-law approximation build on that kernel.

use crate::density_series::{DensityEvaluation, DensityMethod, SeriesTruncation};
use crate::error::{Error, Result};
use crate::model::{CorrelationSpec, JumpCountModel, QuotientModel};
use crate::special::{normal_cdf, poisson_pmf, poisson_quantile, poisson_tail_mass, SQRT_TWO_PI};

use serde::{Deserialize, Serialize};

/// Parameters of the anti-correlated pair, after mirroring is checked.
///
/// Conditional on `k` jumps the legs are
/// `R1 = dt + k jump_mu + sigma(k) Z` and `R2 = dt - k jump_mu - sigma(k) Z`
/// with `sigma(k)^2 = (sigma0^2 / 4) dt + k jump_sigma^2`, and the observed
/// quotient is `R_a = d_over_s * R1 / R2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntiCorrParams {
    /// Shared diffusive scale of both legs.
    pub sigma0: f64,
    /// Demand-side jump mean; the supply side carries its negative.
    pub jump_mu: f64,
    /// Jump spread shared by both legs.
    pub jump_sigma: f64,
    /// Rate of the shared jump count per unit time.
    pub lambda: f64,
    /// Window length.
    pub dt: f64,
    /// Demand-to-supply scale applied to the quotient.
    pub d_over_s: f64,
}

impl AntiCorrParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.sigma0,
            self.jump_mu,
            self.jump_sigma,
            self.lambda,
            self.dt,
            self.d_over_s,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("AntiCorrParams: all fields must be finite"));
        }
        if self.sigma0 < 0.0 || self.jump_sigma < 0.0 || self.lambda < 0.0 {
            return Err(Error::Domain(
                "AntiCorrParams: spreads and rate must be nonnegative",
            ));
        }
        if self.dt <= 0.0 {
            return Err(Error::Domain("AntiCorrParams: dt must be positive"));
        }
        if self.d_over_s <= 0.0 {
            return Err(Error::Domain("AntiCorrParams: d_over_s must be positive"));
        }
        Ok(())
    }

    /// Extract the closed-form parameters from a mirrored model.
    ///
    /// Requires the anti-correlated coupling, equal jump rates, mirrored leg
    /// parameters, and drift pinned to the window length (`mu0 == dt` on
    /// both legs), which is the normalization the closed forms assume.
    pub fn from_model(model: &QuotientModel) -> Result<Self> {
        model.validate()?;
        if !matches!(model.corr, CorrelationSpec::AntiCorrelated) {
            return Err(Error::Contract(
                "AntiCorrParams::from_model: model must use anti-correlated coupling",
            ));
        }
        let lambda = match model.jumps {
            JumpCountModel::Independent { lambda1, .. } => lambda1,
            JumpCountModel::Bivariate { .. } => {
                return Err(Error::Contract(
                    "AntiCorrParams::from_model: shared-count mixtures need independent equal rates",
                ));
            }
        };
        if model.demand.mu0 != model.dt || model.supply.mu0 != model.dt {
            return Err(Error::Contract(
                "AntiCorrParams::from_model: closed forms assume mu0 == dt on both legs",
            ));
        }
        let p = AntiCorrParams {
            sigma0: model.demand.sigma0,
            jump_mu: model.demand.jump_mu,
            jump_sigma: model.demand.jump_sigma,
            lambda,
            dt: model.dt,
            d_over_s: model.d_over_s,
        };
        p.validate()?;
        Ok(p)
    }

    /// Conditional mean of the demand leg given `k` jumps.
    pub fn mu1(&self, k: u32) -> f64 {
        self.dt + f64::from(k) * self.jump_mu
    }

    /// Conditional mean of the supply leg given `k` jumps.
    pub fn mu2(&self, k: u32) -> f64 {
        self.dt - f64::from(k) * self.jump_mu
    }

    /// Conditional spread shared by both legs given `k` jumps.
    pub fn sigma(&self, k: u32) -> f64 {
        let var = (self.sigma0 * self.sigma0 / 4.0) * self.dt
            + f64::from(k) * self.jump_sigma * self.jump_sigma;
        libm::sqrt(var)
    }

    /// Truncation of the shared-count mixture at the `1 - 1e-12` Poisson
    /// quantile, with the exact excluded mass.
    pub fn truncation(&self) -> Result<SeriesTruncation> {
        self.validate()?;
        let mean = self.lambda * self.dt;
        let k_max = poisson_quantile(mean, 1.0 - 1e-12)? as u32;
        let tail = poisson_tail_mass(mean, u64::from(k_max))?;
        Ok(SeriesTruncation {
            k_max,
            tail_mass_bound: tail,
        })
    }
}

/// Density at `x` of `(mu1 + sigma1 Z) / (mu2 - sigma2 Z)` for standard
/// normal `Z`:
///
/// `f(x) = (mu1 sigma2 + mu2 sigma1) / sqrt(2 pi)
///         * exp{ -((mu2 x - mu1) / (sigma2 x + sigma1))^2 / 2 }
///         / (sigma2 x + sigma1)^2`.
///
/// Requires `sigma1, sigma2 > 0` and `mu1 sigma2 + mu2 sigma1 > 0` (the
/// change of variables is monotone exactly then). The density vanishes in
/// the limit at the pole `x = -sigma1 / sigma2`.
pub fn anticorr_quotient_density(
    x: f64,
    mu1: f64,
    sigma1: f64,
    mu2: f64,
    sigma2: f64,
) -> Result<f64> {
    check_pair(mu1, sigma1, mu2, sigma2)?;
    if !x.is_finite() {
        return Err(Error::Domain("anticorr_quotient_density: x must be finite"));
    }
    let jac = mu1 * sigma2 + mu2 * sigma1;
    let s = sigma2 * x + sigma1;
    if s == 0.0 {
        return Ok(0.0);
    }
    let t = (mu2 * x - mu1) / s;
    let log_f = libm::log(jac) - libm::log(SQRT_TWO_PI) - 0.5 * t * t - 2.0 * libm::log(s.abs());
    Ok(libm::exp(log_f))
}

/// CDF at `x` of the same anti-correlated quotient. With
/// `T(x) = (mu2 x - mu1) / (sigma2 x + sigma1)` and `z* = mu2 / sigma2`:
/// `Phi(T(x)) + 1 - Phi(z*)` right of the pole, `Phi(T(x)) - Phi(z*)` left
/// of it.
pub fn anticorr_quotient_cdf(x: f64, mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Result<f64> {
    check_pair(mu1, sigma1, mu2, sigma2)?;
    if x.is_nan() {
        return Err(Error::Domain("anticorr_quotient_cdf: x must not be NaN"));
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let z_star = mu2 / sigma2;
    let s = sigma2 * x + sigma1;
    if s == 0.0 {
        return Ok(1.0 - normal_cdf(z_star));
    }
    let t = (mu2 * x - mu1) / s;
    let f = if s > 0.0 {
        normal_cdf(t) + 1.0 - normal_cdf(z_star)
    } else {
        normal_cdf(t) - normal_cdf(z_star)
    };
    Ok(f.clamp(0.0, 1.0))
}

fn check_pair(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Result<()> {
    if ![mu1, sigma1, mu2, sigma2].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain(
            "anticorr quotient: parameters must be finite",
        ));
    }
    if sigma1 <= 0.0 || sigma2 <= 0.0 {
        return Err(Error::Domain("anticorr quotient: spreads must be positive"));
    }
    if mu1 * sigma2 + mu2 * sigma1 <= 0.0 {
        return Err(Error::Domain(
            "anticorr quotient: requires mu1 sigma2 + mu2 sigma1 > 0",
        ));
    }
    Ok(())
}

/// Density of `R_a = d_over_s * R1 / R2` at `x` given `k` shared jumps.
pub fn per_jump_density(x: f64, k: u32, params: &AntiCorrParams) -> Result<f64> {
    params.validate()?;
    let sigma = params.sigma(k);
    if sigma <= 0.0 {
        return Err(Error::Domain(
            "per_jump_density: conditional spread must be positive",
        ));
    }
    let ds = params.d_over_s;
    Ok(anticorr_quotient_density(x / ds, params.mu1(k), sigma, params.mu2(k), sigma)? / ds)
}

/// CDF of `R_a` at `x` given `k` shared jumps.
pub fn per_jump_cdf(x: f64, k: u32, params: &AntiCorrParams) -> Result<f64> {
    params.validate()?;
    let sigma = params.sigma(k);
    if sigma <= 0.0 {
        return Err(Error::Domain(
            "per_jump_cdf: conditional spread must be positive",
        ));
    }
    let ds = params.d_over_s;
    anticorr_quotient_cdf(x / ds, params.mu1(k), sigma, params.mu2(k), sigma)
}

/// Probability that both legs are positive given `k` shared jumps:
/// `Phi(mu2 / sigma) - Phi(-mu1 / sigma)`.
pub fn per_jump_positive_probability(k: u32, params: &AntiCorrParams) -> Result<f64> {
    params.validate()?;
    let sigma = params.sigma(k);
    if sigma <= 0.0 {
        return Err(Error::Domain(
            "per_jump_positive_probability: conditional spread must be positive",
        ));
    }
    let q = normal_cdf(params.mu2(k) / sigma) - normal_cdf(-params.mu1(k) / sigma);
    Ok(q.max(0.0))
}

/// Density of `R_a` at `x` given `k` jumps, conditioned on both legs
/// positive. The conditioning event maps exactly onto `R_a > 0`, so the
/// result is `f_k(x) / Q_k` on the positive axis and zero elsewhere.
pub fn conditional_positive_density(x: f64, k: u32, params: &AntiCorrParams) -> Result<f64> {
    let q = per_jump_positive_probability(k, params)?;
    if q <= 1e-300 {
        return Err(Error::Domain(
            "conditional_positive_density: positivity event has negligible probability",
        ));
    }
    if !x.is_finite() {
        return Err(Error::Domain(
            "conditional_positive_density: x must be finite",
        ));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(per_jump_density(x, k, params)? / q)
}

/// Shared-count mixture density `sum_k P(N = k) f_k(x)` truncated per
/// `trunc`, with the excluded mass times the largest retained term as the
/// error estimate.
pub fn full_mixture_density(
    x: f64,
    params: &AntiCorrParams,
    trunc: SeriesTruncation,
) -> Result<DensityEvaluation> {
    params.validate()?;
    let mean = params.lambda * params.dt;
    let mut value = 0.0;
    let mut max_term = 0.0_f64;
    for k in 0..=trunc.k_max {
        let w = poisson_pmf(u64::from(k), mean)?;
        if w < 1e-320 {
            continue;
        }
        let f = per_jump_density(x, k, params)?;
        value += w * f;
        max_term = max_term.max(f);
    }
    Ok(DensityEvaluation {
        w: x,
        value,
        abs_error_estimate: trunc.tail_mass_bound * max_term,
        method: DensityMethod::Exact,
    })
}

/// Shared-count mixture CDF, truncated per `trunc`; the truncation error is
/// at most `trunc.tail_mass_bound`.
pub fn full_mixture_cdf(x: f64, params: &AntiCorrParams, trunc: SeriesTruncation) -> Result<f64> {
    params.validate()?;
    let mean = params.lambda * params.dt;
    let mut cdf = 0.0;
    for k in 0..=trunc.k_max {
        let w = poisson_pmf(u64::from(k), mean)?;
        if w < 1e-320 {
            continue;
        }
        cdf += w * per_jump_cdf(x, k, params)?;
    }
    Ok(cdf.clamp(0.0, 1.0))
}

/// Mixture density conditioned on both legs positive:
/// `sum_k P(N = k) f_k(x) 1{x > 0} / sum_k P(N = k) Q_k`.
pub fn mixture_conditional_positive_density(
    x: f64,
    params: &AntiCorrParams,
    trunc: SeriesTruncation,
) -> Result<DensityEvaluation> {
    params.validate()?;
    if !x.is_finite() {
        return Err(Error::Domain(
            "mixture_conditional_positive_density: x must be finite",
        ));
    }
    let mean = params.lambda * params.dt;
    let mut q_tot = 0.0;
    for k in 0..=trunc.k_max {
        let w = poisson_pmf(u64::from(k), mean)?;
        if w < 1e-320 {
            continue;
        }
        q_tot += w * per_jump_positive_probability(k, params)?;
    }
    if q_tot <= 1e-12 {
        return Err(Error::Domain(
            "mixture_conditional_positive_density: positivity event has negligible probability",
        ));
    }
    let full = if x > 0.0 {
        full_mixture_density(x, params, trunc)?
    } else {
        DensityEvaluation {
            w: x,
            value: 0.0,
            abs_error_estimate: 0.0,
            method: DensityMethod::Exact,
        }
    };
    Ok(DensityEvaluation {
        w: x,
        value: full.value / q_tot,
        abs_error_estimate: full.abs_error_estimate / q_tot,
        method: DensityMethod::Exact,
    })
}

/// Small-time-step tail approximation of the `k`-jump term (`k >= 1`):
///
/// `f_k(x) ~ (2 dt d_over_s / (sqrt(2 pi) sqrt(k) jump_sigma))
///           * exp{ -k jump_mu^2 / (2 jump_sigma^2) } / x^2`.
///
/// Valid for `dt << 1` and `|x| >> 1`; enforced as `dt <= 1e-2`, `|x| >= 1`,
/// `k >= 1`, `jump_mu > 0`, `jump_sigma > 0`.
pub fn small_dt_term(x: f64, k: u32, params: &AntiCorrParams) -> Result<f64> {
    params.validate()?;
    if k == 0 {
        return Err(Error::Domain("small_dt_term: requires k >= 1"));
    }
    if params.dt > 1e-2 {
        return Err(Error::Domain("small_dt_term: requires dt <= 1e-2"));
    }
    if params.jump_sigma <= 0.0 || params.jump_mu <= 0.0 {
        return Err(Error::Domain(
            "small_dt_term: requires positive jump mean and spread",
        ));
    }
    if !x.is_finite() || x.abs() < 1.0 {
        return Err(Error::Domain("small_dt_term: requires finite |x| >= 1"));
    }
    let kf = f64::from(k);
    let front =
        2.0 * params.dt * params.d_over_s / (SQRT_TWO_PI * libm::sqrt(kf) * params.jump_sigma);
    let decay = libm::exp(
        -kf * params.jump_mu * params.jump_mu / (2.0 * params.jump_sigma * params.jump_sigma),
    );
    Ok(front * decay / (x * x))
}

/// Poisson-weighted sum of [`small_dt_term`] over `1 <= k <= trunc.k_max`.
pub fn small_dt_series(x: f64, params: &AntiCorrParams, trunc: SeriesTruncation) -> Result<f64> {
    params.validate()?;
    let mean = params.lambda * params.dt;
    let mut sum = 0.0;
    for k in 1..=trunc.k_max.max(1) {
        let w = poisson_pmf(u64::from(k), mean)?;
        if w < 1e-320 {
            continue;
        }
        sum += w * small_dt_term(x, k, params)?;
    }
    Ok(sum)
}

/// Closed sandwich around the jump part of the small-time-step tail:
///
/// `C a / 2 <= sum_{k >= 1} P(N = k) f~_k(x) <= C (e^a - 1)`
///
/// with `C = (2 / sqrt(2 pi)) (dt / jump_sigma) d_over_s e^{-lambda dt} / x^2`
/// and `a = lambda dt e^{-jump_mu^2 / (2 jump_sigma^2)}`. Returns
/// `(lower, upper)`.
pub fn small_dt_bounds(x: f64, params: &AntiCorrParams) -> Result<(f64, f64)> {
    params.validate()?;
    if params.dt > 1e-2 {
        return Err(Error::Domain("small_dt_bounds: requires dt <= 1e-2"));
    }
    if params.jump_sigma <= 0.0 || params.jump_mu <= 0.0 {
        return Err(Error::Domain(
            "small_dt_bounds: requires positive jump mean and spread",
        ));
    }
    if !x.is_finite() || x.abs() < 1.0 {
        return Err(Error::Domain("small_dt_bounds: requires finite |x| >= 1"));
    }
    let c = (2.0 / SQRT_TWO_PI)
        * (params.dt / params.jump_sigma)
        * params.d_over_s
        * libm::exp(-params.lambda * params.dt)
        / (x * x);
    let a = params.lambda
        * params.dt
        * libm::exp(
            -params.jump_mu * params.jump_mu / (2.0 * params.jump_sigma * params.jump_sigma),
        );
    Ok((c * a / 2.0, c * libm::expm1(a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CorrelationSpec, JumpCountModel, LegParams, QuotientModel};
    use crate::quad;

    fn params() -> AntiCorrParams {
        AntiCorrParams {
            sigma0: 1.0,
            jump_mu: 0.4,
            jump_sigma: 0.8,
            lambda: 1.2,
            dt: 1.0,
            d_over_s: 1.5,
        }
    }

    fn small_dt_params() -> AntiCorrParams {
        AntiCorrParams {
            sigma0: 1.0,
            jump_mu: 0.5,
            jump_sigma: 1.0,
            lambda: 5.0,
            dt: 1e-3,
            d_over_s: 1.0,
        }
    }

    #[test]
    fn per_jump_density_integrates_to_one() {
        let p = params();
        for k in [0_u32, 1, 3] {
            let pole = -p.d_over_s;
            let f = |x: f64| per_jump_density(x, k, &p).unwrap();
            let grid = [-2e4, -100.0, -10.0, pole, 0.0, 1.0, 5.0, 10.0, 100.0, 2e4];
            let inner = quad::integrate(f, &grid, 1e-10, 0.0).unwrap();
            let tails =
                per_jump_cdf(-2e4, k, &p).unwrap() + (1.0 - per_jump_cdf(2e4, k, &p).unwrap());
            let mass = inner.value + tails;
            assert!((mass - 1.0).abs() < 1e-7, "k={k}: mass {mass}");
        }
    }

    #[test]
    fn cdf_derivative_matches_density_across_the_pole() {
        let p = params();
        for &x in &[-5.0_f64, -1.6, -1.4, 0.0, 0.7, 3.0, 40.0] {
            let h = 1e-6 * x.abs().max(1.0);
            let fd = (per_jump_cdf(x + h, 2, &p).unwrap() - per_jump_cdf(x - h, 2, &p).unwrap())
                / (2.0 * h);
            let f = per_jump_density(x, 2, &p).unwrap();
            assert!(
                (fd - f).abs() <= 1e-5 * f.max(1e-8),
                "x={x}: finite diff {fd} vs {f}"
            );
        }
    }

    #[test]
    fn cdf_is_continuous_and_consistent_at_the_pole() {
        let p = params();
        let k = 1;
        let pole = -p.d_over_s * 1.0;
        let below = per_jump_cdf(pole - 1e-9, k, &p).unwrap();
        let at = per_jump_cdf(pole, k, &p).unwrap();
        let above = per_jump_cdf(pole + 1e-9, k, &p).unwrap();
        assert!((below - at).abs() < 1e-6 && (above - at).abs() < 1e-6);
        let sigma = p.sigma(k);
        let expected = 1.0 - normal_cdf(p.mu2(k) / sigma);
        assert!((at - expected).abs() < 1e-15);
    }

    #[test]
    fn positive_probability_equals_one_minus_cdf_at_zero() {
        let p = params();
        for k in [0_u32, 1, 4] {
            let q = per_jump_positive_probability(k, &p).unwrap();
            let via_cdf = 1.0 - per_jump_cdf(0.0, k, &p).unwrap();
            assert!((q - via_cdf).abs() < 1e-15, "k={k}: {q} vs {via_cdf}");
        }
    }

    #[test]
    fn conditional_density_is_scaled_restriction() {
        let p = params();
        let q = per_jump_positive_probability(2, &p).unwrap();
        let f = per_jump_density(0.9, 2, &p).unwrap();
        let c = conditional_positive_density(0.9, 2, &p).unwrap();
        assert!((c - f / q).abs() < 1e-15);
        assert_eq!(conditional_positive_density(-0.9, 2, &p).unwrap(), 0.0);
    }

    #[test]
    fn mixture_matches_weighted_terms_and_tracks_truncation() {
        let p = params();
        let t = p.truncation().unwrap();
        assert!(t.tail_mass_bound < 1e-11);
        let x = 1.3;
        let mean = p.lambda * p.dt;
        let mut manual = 0.0;
        for k in 0..=t.k_max {
            manual +=
                poisson_pmf(u64::from(k), mean).unwrap() * per_jump_density(x, k, &p).unwrap();
        }
        let got = full_mixture_density(x, &p, t).unwrap();
        assert!((got.value - manual).abs() < 1e-15);
        assert_eq!(got.method, DensityMethod::Exact);

        let q_tot: f64 = (0..=t.k_max)
            .map(|k| {
                poisson_pmf(u64::from(k), mean).unwrap()
                    * per_jump_positive_probability(k, &p).unwrap()
            })
            .sum();
        let cond = mixture_conditional_positive_density(x, &p, t).unwrap();
        assert!((cond.value * q_tot - got.value).abs() < 1e-15);
        assert_eq!(
            mixture_conditional_positive_density(-x, &p, t)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn small_dt_term_tracks_exact_per_jump_density() {
        let p = small_dt_params();
        for &x in &[50.0, 100.0, 500.0] {
            for k in [1_u32, 2] {
                let approx = small_dt_term(x, k, &p).unwrap();
                let exact = per_jump_density(x, k, &p).unwrap();
                let ratio = approx / exact;
                assert!(
                    (ratio - 1.0).abs() < 0.05,
                    "x={x} k={k}: approx {approx} exact {exact} ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn series_sits_inside_the_closed_bounds() {
        let p = small_dt_params();
        let t = p.truncation().unwrap();
        for &x in &[20.0, 100.0, 1000.0] {
            let s = small_dt_series(x, &p, t).unwrap();
            let (lo, hi) = small_dt_bounds(x, &p).unwrap();
            assert!(lo <= s && s <= hi, "x={x}: {lo} <= {s} <= {hi} violated");
        }
    }

    #[test]
    fn small_dt_guards_reject_out_of_scope_inputs() {
        let p = params();
        assert!(small_dt_term(100.0, 1, &p).is_err());
        let sp = small_dt_params();
        assert!(small_dt_term(100.0, 0, &sp).is_err());
        assert!(small_dt_term(0.5, 1, &sp).is_err());
    }

    #[test]
    fn from_model_requires_mirrored_drift_pinned_to_dt() {
        let mut model = QuotientModel {
            demand: LegParams {
                mu0: 1.0,
                sigma0: 1.0,
                jump_mu: 0.4,
                jump_sigma: 0.8,
            },
            supply: LegParams {
                mu0: 1.0,
                sigma0: 1.0,
                jump_mu: -0.4,
                jump_sigma: 0.8,
            },
            jumps: JumpCountModel::Independent {
                lambda1: 1.2,
                lambda2: 1.2,
            },
            corr: CorrelationSpec::AntiCorrelated,
            dt: 1.0,
            d_over_s: 1.5,
        };
        let p = AntiCorrParams::from_model(&model).unwrap();
        assert_eq!(p, params());

        model.dt = 0.5;
        model.demand.mu0 = 0.4;
        model.supply.mu0 = 0.4;
        assert!(matches!(
            AntiCorrParams::from_model(&model),
            Err(Error::Contract(_))
        ));

        model.demand.mu0 = 0.5;
        model.supply.mu0 = 0.5;
        assert!(AntiCorrParams::from_model(&model).is_ok());

        model.corr = CorrelationSpec::Conditional { rho: 0.0 };
        model.demand.jump_mu = 0.4;
        model.supply.jump_mu = 0.4;
        assert!(matches!(
            AntiCorrParams::from_model(&model),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn density_rejects_degenerate_and_nonmonotone_parameters() {
        assert!(anticorr_quotient_density(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(anticorr_quotient_density(1.0, -3.0, 1.0, -3.0, 1.0).is_err());
        assert!(anticorr_quotient_density(f64::INFINITY, 1.0, 1.0, 1.0, 1.0).is_err());
    }
}
