//! Calibrating the price-impact exponent from observed order-book data.
//!
//! Under the model the relative price change responds to the demand/supply
//! imbalance `u = d/s - s/d` as `scale * sign(u) |u|^{1/q}`, so a log-log
//! regression of `|rel_change|` on `|u|` recovers `1/q` as its slope. The
//! fitted exponent directly predicts the tail exponent of relative price
//! changes, and feeds a drawdown-probability estimate through the model
//! density.

use alloc::vec::Vec;

use crate::density_series::{density_of_rc, SeriesTruncation};
use crate::error::{Error, Result};
use crate::model::{PriceFunction, QuotientModel};
use crate::quad;
use crate::tail::ols_line;

use serde::{Deserialize, Serialize};

/// One order-book observation: standing demand and supply, and the
/// relative price change over the following window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observation {
    pub demand: f64,
    pub supply: f64,
    pub rel_change: f64,
}

/// Result of fitting the price-impact power law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationResult {
    /// Fitted price-function exponent (`rel ~ scale * u^{1/q_hat}`).
    pub q_hat: f64,
    /// Fitted multiplicative scale.
    pub scale_hat: f64,
    /// Coefficient of determination of the log-log regression.
    pub r_squared: f64,
    /// Predicted survival exponent of relative price changes, equal to
    /// `q_hat`.
    pub predicted_zeta: f64,
    /// Fraction of used observations whose price change and imbalance
    /// agree in sign.
    pub sign_consistency: f64,
    /// Number of observations that entered the fit.
    pub n: usize,
}

/// Minimum absolute imbalance for an observation to enter the fit; below
/// this the log regressor is dominated by rounding.
const MIN_IMBALANCE: f64 = 1e-6;

/// Fit `rel_change = scale * sign(u) |u|^{1/q}` by ordinary least squares
/// in log-log coordinates. Observations with nonpositive book sides,
/// vanishing price change, or negligible imbalance are skipped; at least
/// 20 usable observations are required.
pub fn fit_price_function(observations: &[Observation]) -> Result<CalibrationResult> {
    let mut log_u = Vec::new();
    let mut log_rel = Vec::new();
    let mut signs_agree = 0_usize;
    for obs in observations {
        if ![obs.demand, obs.supply, obs.rel_change]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::Domain(
                "fit_price_function: observations must be finite",
            ));
        }
        if obs.demand <= 0.0 || obs.supply <= 0.0 {
            continue;
        }
        let ratio = obs.demand / obs.supply;
        let u = ratio - 1.0 / ratio;
        if u.abs() <= MIN_IMBALANCE || obs.rel_change == 0.0 {
            continue;
        }
        if (u > 0.0) == (obs.rel_change > 0.0) {
            signs_agree += 1;
        }
        log_u.push(libm::log(u.abs()));
        log_rel.push(libm::log(obs.rel_change.abs()));
    }
    let n = log_u.len();
    if n < 20 {
        return Err(Error::Domain(
            "fit_price_function: needs at least 20 usable observations",
        ));
    }
    let line = ols_line(&log_u, &log_rel)?;
    if !(line.slope > 0.0) {
        return Err(Error::Domain(
            "fit_price_function: price changes do not grow with imbalance",
        ));
    }
    let q_hat = 1.0 / line.slope;
    Ok(CalibrationResult {
        q_hat,
        scale_hat: libm::exp(line.intercept),
        r_squared: line.r_squared,
        predicted_zeta: q_hat,
        sign_consistency: signs_agree as f64 / n as f64,
        n,
    })
}

/// Probability that the relative price change falls below a negative
/// `threshold`, under `model` with the fitted price function.
///
/// The observed change is `scale_hat * R_c`, so the event is
/// `R_c <= threshold / scale_hat`. The density of `R_c` (with exponent
/// `q_hat` and no smoothing) is integrated over `[-W, threshold']` with
/// `W = max(100, 10 |threshold'|)`, plus the closed power-law correction
/// `f(-W) W / q_hat` for the mass beyond the window.
pub fn drawdown_probability(
    result: &CalibrationResult,
    model: &QuotientModel,
    trunc: SeriesTruncation,
    threshold: f64,
) -> Result<f64> {
    if !threshold.is_finite() || threshold >= 0.0 {
        return Err(Error::Domain(
            "drawdown_probability: threshold must be negative",
        ));
    }
    if !(result.scale_hat > 0.0) || !result.scale_hat.is_finite() {
        return Err(Error::Domain(
            "drawdown_probability: scale_hat must be positive",
        ));
    }
    model.validate()?;
    let pf = PriceFunction {
        q: result.q_hat,
        epsilon: 0.0,
        tau0: 1.0,
    };
    pf.validate()?;
    let t = threshold / result.scale_hat;
    let w = 100.0_f64.max(10.0 * t.abs());

    let mut points = Vec::new();
    points.push(-w);
    let mut y = w;
    while y / 2.0 > -t {
        y /= 2.0;
        points.push(-y);
    }
    points.push(t);

    let density = |x: f64| density_of_rc(x, model, &pf, trunc, false).unwrap_or(f64::NAN);
    let window = if t > -w {
        quad::integrate(density, &points, 1e-8, 1e-15)?.value
    } else {
        0.0
    };
    let tail = density(-w);
    if !tail.is_finite() {
        return Err(Error::Numeric(
            "drawdown_probability: density evaluation failed",
        ));
    }
    let beyond = tail * w / result.q_hat;
    Ok((window + beyond).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CorrelationSpec, JumpCountModel, LegParams};

    /// Noiseless observations generated from a known power law.
    fn synthetic(q: f64, scale: f64, n: usize) -> Vec<Observation> {
        (0..n)
            .map(|i| {
                let demand = 0.5 + 1.5 * (i as f64 + 1.0) / n as f64;
                let supply = 1.0;
                let ratio = demand / supply;
                let u = ratio - 1.0 / ratio;
                let rel = scale * u.signum() * libm::pow(u.abs(), 1.0 / q);
                Observation {
                    demand,
                    supply,
                    rel_change: rel,
                }
            })
            .collect()
    }

    #[test]
    fn noiseless_power_law_is_recovered_exactly() {
        let obs = synthetic(3.0, 0.05, 60);
        let fit = fit_price_function(&obs).unwrap();
        assert!((fit.q_hat - 3.0).abs() < 1e-10, "q_hat {}", fit.q_hat);
        assert!(
            (fit.scale_hat - 0.05).abs() < 1e-10,
            "scale {}",
            fit.scale_hat
        );
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.predicted_zeta, fit.q_hat);
        assert_eq!(fit.sign_consistency, 1.0);
        assert_eq!(fit.n, 59);
    }

    #[test]
    fn unusable_observations_are_skipped_not_fitted() {
        let mut obs = synthetic(2.0, 0.1, 40);
        obs.push(Observation {
            demand: -1.0,
            supply: 1.0,
            rel_change: 0.5,
        });
        obs.push(Observation {
            demand: 1.0,
            supply: 1.0,
            rel_change: 0.5,
        });
        obs.push(Observation {
            demand: 2.0,
            supply: 1.0,
            rel_change: 0.0,
        });
        let fit = fit_price_function(&obs).unwrap();
        assert_eq!(fit.n, 40);
        assert!((fit.q_hat - 2.0).abs() < 1e-10);
    }

    #[test]
    fn sign_disagreement_is_reported() {
        let mut obs = synthetic(2.0, 0.1, 40);
        for o in obs.iter_mut().take(4) {
            o.rel_change = -o.rel_change;
        }
        let fit = fit_price_function(&obs).unwrap();
        assert!((fit.sign_consistency - 0.9).abs() < 1e-12);
    }

    #[test]
    fn fit_guards_small_and_degenerate_inputs() {
        let obs = synthetic(3.0, 0.05, 10);
        assert!(fit_price_function(&obs).is_err());
        let falling: Vec<Observation> = synthetic(3.0, 0.05, 30)
            .into_iter()
            .map(|o| {
                let ratio = o.demand / o.supply;
                let u: f64 = ratio - 1.0 / ratio;
                Observation {
                    rel_change: 0.1 * libm::pow(u.abs(), -0.5),
                    ..o
                }
            })
            .collect();
        assert!(fit_price_function(&falling).is_err());
    }

    #[test]
    fn drawdown_matches_cauchy_closed_form() {
        // Centered no-jump legs make the quotient standard Cauchy; with
        // q = 1 the relative change is Cauchy with scale 2.
        let model = QuotientModel {
            demand: LegParams {
                mu0: 0.0,
                sigma0: 2.0,
                jump_mu: 0.0,
                jump_sigma: 0.0,
            },
            supply: LegParams {
                mu0: 0.0,
                sigma0: 2.0,
                jump_mu: 0.0,
                jump_sigma: 0.0,
            },
            jumps: JumpCountModel::Independent {
                lambda1: 0.0,
                lambda2: 0.0,
            },
            corr: CorrelationSpec::Conditional { rho: 0.0 },
            dt: 1.0,
            d_over_s: 1.0,
        };
        let trunc = SeriesTruncation::for_model(&model).unwrap();
        let result = CalibrationResult {
            q_hat: 1.0,
            scale_hat: 1.0,
            r_squared: 1.0,
            predicted_zeta: 1.0,
            sign_consistency: 1.0,
            n: 100,
        };
        for &threshold in &[-5.0, -0.8] {
            let got = drawdown_probability(&result, &model, trunc, threshold).unwrap();
            let exact = 0.5 + libm::atan(threshold / 2.0) / core::f64::consts::PI;
            assert!(
                (got - exact).abs() < 1e-4,
                "threshold {threshold}: {got} vs {exact}"
            );
        }
        assert!(drawdown_probability(&result, &model, trunc, 0.5).is_err());
    }
}
