//! Tail-exponent estimation for heavy-tailed samples and densities.
//!
//! The survival function of interest decays like `x^{-zeta}` (density
//! `x^{-zeta-1}`). Three estimators are provided: the Hill estimator on the
//! largest order statistics, a log-log regression on the empirical survival
//! function over a threshold window, and a log-log regression on a density
//! callable for checking analytic tails.

use alloc::vec::Vec;

use crate::error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Which estimator produced a [`TailFit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailEstimator {
    Hill,
    LoglogSurvival,
    LoglogDensity,
}

/// How the tail region was selected: by the number of upper order
/// statistics, or by a value threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cutoff {
    OrderStatistic(usize),
    Threshold(f64),
}

/// A fitted tail exponent with its standard error and provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Estimated survival exponent: `P(X > x) ~ x^{-zeta_hat}`.
    pub zeta_hat: f64,
    /// Standard error of `zeta_hat`.
    pub std_err: f64,
    pub estimator: TailEstimator,
    pub cutoff: Cutoff,
    /// Number of points that entered the fit.
    pub n_used: usize,
}

/// Ordinary least squares of `y` on `x`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OlsLine {
    pub slope: f64,
    pub intercept: f64,
    /// Residual-based standard error of the slope (zero when the fit is
    /// exact or has no spare degrees of freedom).
    pub slope_std_err: f64,
    /// Coefficient of determination; one when the fit is exact.
    pub r_squared: f64,
}

pub(crate) fn ols_line(xs: &[f64], ys: &[f64]) -> Result<OlsLine> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Domain("line fit needs at least two paired points"));
    }
    if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("line fit requires finite coordinates"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 {
        return Err(Error::Domain("line fit requires spread in the abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let slope_std_err = if xs.len() > 2 {
        libm::sqrt(ss_res / (n - 2.0) / sxx)
    } else {
        0.0
    };
    Ok(OlsLine {
        slope,
        intercept,
        slope_std_err,
        r_squared,
    })
}

/// Hill estimator of the survival exponent from the `k` largest samples:
///
/// `zeta_hat = k / sum_{i<=k} log(x_(i) / x_(k+1))`,  `std_err = zeta_hat / sqrt(k)`.
///
/// `top_k` defaults to `max(50, n / 1000)`. The `(k+1)`-th largest sample
/// must be strictly positive and the top samples must not all coincide.
pub fn hill_estimator(samples: &[f64], top_k: Option<usize>) -> Result<TailFit> {
    let n = samples.len();
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain(
            "hill_estimator: samples must not contain NaN",
        ));
    }
    let k = top_k.unwrap_or_else(|| (n / 1000).max(50));
    if k < 50 {
        return Err(Error::Domain(
            "hill_estimator: needs at least 50 tail points",
        ));
    }
    if k + 1 > n {
        return Err(Error::Domain(
            "hill_estimator: needs more samples than tail points",
        ));
    }
    let mut v: Vec<f64> = samples.to_vec();
    let (top, threshold, _) =
        v.select_nth_unstable_by(k, |a, b| b.partial_cmp(a).expect("NaN screened"));
    let threshold = *threshold;
    if threshold <= 0.0 {
        return Err(Error::Domain(
            "hill_estimator: the (k+1)-th largest sample must be positive",
        ));
    }
    let log_threshold = libm::log(threshold);
    let sum: f64 = top.iter().map(|&x| libm::log(x) - log_threshold).sum();
    if sum <= 0.0 {
        return Err(Error::Domain(
            "hill_estimator: tail has no spread above the threshold",
        ));
    }
    let zeta_hat = k as f64 / sum;
    Ok(TailFit {
        zeta_hat,
        std_err: zeta_hat / libm::sqrt(k as f64),
        estimator: TailEstimator::Hill,
        cutoff: Cutoff::OrderStatistic(k),
        n_used: k,
    })
}

/// Log-log regression of the empirical survival function over
/// `[x_min, x_max]`:
///
/// sorted samples get midpoint survival levels `S_(i) = (n - i - 1/2) / n`;
/// the slope of `log S` on `log x` over the window estimates `-zeta`.
/// The standard error is `zeta_hat / sqrt(#{x > x_min})`, matching the
/// information actually carried by the tail.
pub fn loglog_survival_fit(samples: &[f64], x_min: f64, x_max: f64) -> Result<TailFit> {
    if !(x_min > 0.0) || !(x_max > x_min) || !x_max.is_finite() {
        return Err(Error::Domain(
            "loglog_survival_fit: requires 0 < x_min < x_max < inf",
        ));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain(
            "loglog_survival_fit: samples must not contain NaN",
        ));
    }
    let mut v: Vec<f64> = samples.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN screened"));
    let n = v.len() as f64;
    let mut log_x = Vec::new();
    let mut log_s = Vec::new();
    let mut n_above = 0_usize;
    for (i, &x) in v.iter().enumerate() {
        if x > x_min {
            n_above += 1;
        }
        if x >= x_min && x <= x_max {
            let s = (n - i as f64 - 0.5) / n;
            if s > 0.0 {
                log_x.push(libm::log(x));
                log_s.push(libm::log(s));
            }
        }
    }
    if log_x.len() < 20 {
        return Err(Error::Domain(
            "loglog_survival_fit: needs at least 20 samples inside the window",
        ));
    }
    let line = ols_line(&log_x, &log_s)?;
    let zeta_hat = -line.slope;
    if !(zeta_hat > 0.0) {
        return Err(Error::Domain(
            "loglog_survival_fit: no power-law decay detected",
        ));
    }
    Ok(TailFit {
        zeta_hat,
        std_err: zeta_hat / libm::sqrt(n_above.max(1) as f64),
        estimator: TailEstimator::LoglogSurvival,
        cutoff: Cutoff::Threshold(x_min),
        n_used: log_x.len(),
    })
}

/// Log-log regression on a density callable over a geometric grid of
/// `n_points` in `[y_min, y_max]`. A density slope of `-(zeta + 1)` means a
/// survival exponent of `zeta`; the standard error is the regression slope
/// error. Grid points where the density underflows to zero are skipped.
pub fn loglog_density_fit<F>(density: F, y_min: f64, y_max: f64, n_points: usize) -> Result<TailFit>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(y_min > 0.0) || !(y_max > y_min) || !y_max.is_finite() {
        return Err(Error::Domain(
            "loglog_density_fit: requires 0 < y_min < y_max < inf",
        ));
    }
    if n_points < 5 {
        return Err(Error::Domain(
            "loglog_density_fit: needs at least 5 grid points",
        ));
    }
    let log_lo = libm::log(y_min);
    let log_hi = libm::log(y_max);
    let mut log_y = Vec::with_capacity(n_points);
    let mut log_f = Vec::with_capacity(n_points);
    for j in 0..n_points {
        let t = j as f64 / (n_points - 1) as f64;
        let y = libm::exp(log_lo + t * (log_hi - log_lo));
        let f = density(y)?;
        if !f.is_finite() || f < 0.0 {
            return Err(Error::Numeric(
                "loglog_density_fit: density evaluation was not finite",
            ));
        }
        if f > 0.0 {
            log_y.push(libm::log(y));
            log_f.push(libm::log(f));
        }
    }
    if log_y.len() < 5 {
        return Err(Error::Domain(
            "loglog_density_fit: density vanished on the grid",
        ));
    }
    let line = ols_line(&log_y, &log_f)?;
    let zeta_hat = -line.slope - 1.0;
    Ok(TailFit {
        zeta_hat,
        std_err: line.slope_std_err,
        estimator: TailEstimator::LoglogDensity,
        cutoff: Cutoff::Threshold(y_min),
        n_used: log_y.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Deterministic Pareto(alpha) samples via inverse CDF.
    fn pareto_samples(alpha: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                libm::pow(1.0 - u, -1.0 / alpha)
            })
            .collect()
    }

    #[test]
    fn hill_recovers_pareto_exponent() {
        let samples = pareto_samples(3.0, 100_000, 7);
        let fit = hill_estimator(&samples, None).unwrap();
        assert_eq!(fit.n_used, 100);
        assert!(matches!(fit.cutoff, Cutoff::OrderStatistic(100)));
        assert!(
            (fit.zeta_hat - 3.0).abs() < 3.0 * fit.std_err + 0.3,
            "zeta {} se {}",
            fit.zeta_hat,
            fit.std_err
        );
        let wide = hill_estimator(&samples, Some(2000)).unwrap();
        assert!((wide.zeta_hat - 3.0).abs() < 0.25, "zeta {}", wide.zeta_hat);
        assert!(wide.std_err < fit.std_err);
    }

    #[test]
    fn hill_rejects_degenerate_inputs() {
        assert!(hill_estimator(&[1.0; 40], Some(30)).is_err());
        let short = vec![2.0; 60];
        assert!(hill_estimator(&short, Some(60)).is_err());
        let negative: Vec<f64> = (0..200).map(|i| -1.0 - i as f64).collect();
        assert!(hill_estimator(&negative, Some(50)).is_err());
        let flat = vec![5.0; 200];
        assert!(hill_estimator(&flat, Some(50)).is_err());
    }

    #[test]
    fn survival_fit_is_exact_on_pareto_quantiles() {
        // Samples placed exactly at the midpoint quantiles of a Pareto law
        // make the log-log survival plot exactly linear.
        let alpha = 2.5;
        let n = 5000;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64;
                libm::pow(1.0 - u, -1.0 / alpha)
            })
            .collect();
        let fit = loglog_survival_fit(&samples, 2.0, 50.0).unwrap();
        assert!(
            (fit.zeta_hat - alpha).abs() < 1e-10,
            "zeta {}",
            fit.zeta_hat
        );
        assert!(matches!(fit.cutoff, Cutoff::Threshold(t) if t == 2.0));
        assert!(fit.n_used >= 20);
    }

    #[test]
    fn survival_fit_guards_window_and_count() {
        let samples: Vec<f64> = (0..30).map(|i| 1.0 + i as f64).collect();
        assert!(loglog_survival_fit(&samples, -1.0, 10.0).is_err());
        assert!(loglog_survival_fit(&samples, 5.0, 2.0).is_err());
        assert!(loglog_survival_fit(&samples, 25.0, 29.0).is_err());
    }

    #[test]
    fn density_fit_reads_off_exact_power_laws() {
        let fit = loglog_density_fit(|y| Ok(0.7 * libm::pow(y, -4.0)), 10.0, 1e4, 40).unwrap();
        assert!((fit.zeta_hat - 3.0).abs() < 1e-12, "zeta {}", fit.zeta_hat);
        assert!(fit.std_err < 1e-12);

        let cauchy = |y: f64| Ok(1.0 / (core::f64::consts::PI * (1.0 + y * y)));
        let fit = loglog_density_fit(cauchy, 50.0, 5000.0, 60).unwrap();
        assert!((fit.zeta_hat - 1.0).abs() < 1e-3, "zeta {}", fit.zeta_hat);
    }

    #[test]
    fn fits_serialize_with_plain_cutoffs() {
        let fit = TailFit {
            zeta_hat: 2.0,
            std_err: 0.1,
            estimator: TailEstimator::Hill,
            cutoff: Cutoff::OrderStatistic(200),
            n_used: 200,
        };
        let json = serde_json::to_string(&fit).unwrap();
        assert!(json.contains("\"estimator\":\"hill\""), "{json}");
        assert!(json.contains("\"cutoff\":200"), "{json}");
        let back: TailFit = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fit);

        let fit = TailFit {
            cutoff: Cutoff::Threshold(2.5),
            ..fit
        };
        let json = serde_json::to_string(&fit).unwrap();
        assert!(json.contains("\"cutoff\":2.5"), "{json}");
    }
}
