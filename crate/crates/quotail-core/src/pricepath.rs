//! Discrete price paths driven by supply/demand quotients.
//!
//! Each step turns a demand/supply pair into a relative price change
//! through `G_eps`, so `P_{j+1} = (1 + G_eps(R_a)) P_j`. Two drivers are
//! provided: one drawing leg pairs from a [`QuotientModel`], and one
//! drawing whole demand and supply curves on a price grid from a joint
//! normal law, reading the pair off at the grid node nearest the current
//! price. A geometric random-walk baseline with the same update shape is
//! included for tail comparisons.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{PriceFunction, QuotientModel};
use crate::rng::{RngStream, DOMAIN_PATH_BASIC, DOMAIN_PATH_GBM, DOMAIN_PATH_GRID};
use crate::sampler::PairSampler;
use crate::transforms::g_eps;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Budget of redraws per step before the simulation gives up.
const MAX_REDRAWS_PER_STEP: u32 = 1000;

/// Configuration of a price-path simulation.
///
/// Exactly one driver must be set: `model` for leg-pair steps, or the
/// triple `grid`/`means`/`covariance` for curve steps. In the curve driver
/// the first `grid.len()` coordinates of the normal vector are demand
/// values at the grid prices and the rest are supply values, so `means`
/// has length `2 * grid.len()` and `covariance` is square of that size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    /// Starting price.
    pub p0: f64,
    /// Number of steps to simulate.
    pub steps: u32,
    /// Price transform applied to each quotient.
    pub pf: PriceFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<QuotientModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<Vec<f64>>>,
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.p0.is_finite() || self.p0 <= 0.0 {
            return Err(Error::Domain("PathConfig: p0 must be positive and finite"));
        }
        if self.steps == 0 {
            return Err(Error::Domain("PathConfig: steps must be at least 1"));
        }
        self.pf.validate()?;
        let has_grid = self.grid.is_some() || self.means.is_some() || self.covariance.is_some();
        match (&self.model, has_grid) {
            (Some(model), false) => model.validate(),
            (None, true) => {
                let grid = self.grid.as_ref().ok_or(Error::Contract(
                    "PathConfig: curve driver needs grid, means, and covariance together",
                ))?;
                let means = self.means.as_ref().ok_or(Error::Contract(
                    "PathConfig: curve driver needs grid, means, and covariance together",
                ))?;
                let cov = self.covariance.as_ref().ok_or(Error::Contract(
                    "PathConfig: curve driver needs grid, means, and covariance together",
                ))?;
                if grid.is_empty() || grid.iter().any(|g| !g.is_finite()) {
                    return Err(Error::Domain(
                        "PathConfig: grid must be nonempty and finite",
                    ));
                }
                let dim = 2 * grid.len();
                if means.len() != dim || means.iter().any(|m| !m.is_finite()) {
                    return Err(Error::Domain(
                        "PathConfig: means must be finite with length 2 * grid.len()",
                    ));
                }
                if cov.len() != dim {
                    return Err(Error::Domain(
                        "PathConfig: covariance must be square with side 2 * grid.len()",
                    ));
                }
                for (i, row) in cov.iter().enumerate() {
                    if row.len() != dim {
                        return Err(Error::Domain(
                            "PathConfig: covariance must be square with side 2 * grid.len()",
                        ));
                    }
                    for (j, v) in row.iter().enumerate() {
                        if !v.is_finite() {
                            return Err(Error::Domain("PathConfig: covariance must be finite"));
                        }
                        if (v - cov[j][i]).abs() > 1e-12 * v.abs().max(1.0) {
                            return Err(Error::Domain("PathConfig: covariance must be symmetric"));
                        }
                    }
                }
                Ok(())
            }
            (Some(_), true) => Err(Error::Contract(
                "PathConfig: set either model or the grid triple, not both",
            )),
            (None, false) => Err(Error::Contract(
                "PathConfig: set either model or the grid triple",
            )),
        }
    }
}

/// A simulated price path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricePath {
    /// Prices `P_0 ..= P_steps` (length `steps + 1`).
    pub prices: Vec<f64>,
    /// Per-price flag: whether the step that produced this price read the
    /// curves at a grid node different from the then-current price. Always
    /// `false` for the leg-pair driver and at index zero.
    pub snapped: Vec<bool>,
    /// Total redraws spent on steps whose draw was unusable (nonpositive
    /// leg, zero denominator, or a price that would not stay positive).
    pub rejections: u32,
}

/// Step factor `1 + G_eps(ratio)`, or `None` when the draw is unusable.
fn step_factor(d: f64, s: f64, scale: f64, pf: &PriceFunction) -> Result<Option<f64>> {
    if !(d > 0.0) || !(s > 0.0) {
        return Ok(None);
    }
    let ratio = scale * d / s;
    if !ratio.is_finite() || ratio == 0.0 {
        return Ok(None);
    }
    let change = g_eps(ratio, pf)?;
    let factor = 1.0 + change;
    if !factor.is_finite() || factor <= 0.0 {
        return Ok(None);
    }
    Ok(Some(factor))
}

/// Simulate a path whose steps draw one leg pair each from `model`.
pub fn simulate_basic(
    model: &QuotientModel,
    pf: &PriceFunction,
    p0: f64,
    steps: u32,
    stream: RngStream,
) -> Result<PricePath> {
    model.validate()?;
    pf.validate()?;
    if !p0.is_finite() || p0 <= 0.0 {
        return Err(Error::Domain(
            "simulate_basic: p0 must be positive and finite",
        ));
    }
    if steps == 0 {
        return Err(Error::Domain("simulate_basic: steps must be at least 1"));
    }
    let sampler = PairSampler::new(model)?;
    let mut rng = stream.chunk_rng(DOMAIN_PATH_BASIC, 0);
    let mut prices = Vec::with_capacity(steps as usize + 1);
    prices.push(p0);
    let mut rejections = 0_u32;
    for _ in 0..steps {
        let mut accepted = None;
        for _ in 0..MAX_REDRAWS_PER_STEP {
            let (r1, r2, _, _) = sampler.draw(model, &mut rng);
            if let Some(factor) = step_factor(r1, r2, model.d_over_s, pf)? {
                accepted = Some(factor);
                break;
            }
            rejections += 1;
        }
        let factor = accepted.ok_or(Error::Numeric(
            "simulate_basic: exhausted the redraw budget for one step",
        ))?;
        let last = *prices.last().expect("seeded with p0");
        prices.push(last * factor);
    }
    let snapped = vec![false; prices.len()];
    Ok(PricePath {
        prices,
        snapped,
        rejections,
    })
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite
/// matrix.
pub(crate) fn cholesky(matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = matrix.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = matrix[i][j];
            for (a, b) in l[i][..j].iter().zip(&l[j][..j]) {
                sum -= a * b;
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::Domain("covariance must be positive definite"));
                }
                l[i][j] = libm::sqrt(sum);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Index of the grid node nearest to `price`; ties resolve to the lower
/// index.
fn nearest_node(grid: &[f64], price: f64) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, &g) in grid.iter().enumerate() {
        let d = (g - price).abs();
        if d < best_dist {
            best_dist = d;
            best = i;
        }
    }
    best
}

/// Simulate a path whose steps draw full demand and supply curves on a
/// price grid and read them off at the node nearest the current price.
pub fn simulate_grid(config: &PathConfig, stream: RngStream) -> Result<PricePath> {
    config.validate()?;
    let (grid, means, cov) = match (&config.grid, &config.means, &config.covariance) {
        (Some(g), Some(m), Some(c)) => (g, m, c),
        _ => {
            return Err(Error::Contract(
                "simulate_grid: config must carry the grid triple",
            ))
        }
    };
    let n = grid.len();
    let dim = 2 * n;
    let l = cholesky(cov)?;
    let mut rng = stream.chunk_rng(DOMAIN_PATH_GRID, 0);
    let mut prices = Vec::with_capacity(config.steps as usize + 1);
    let mut snapped = Vec::with_capacity(config.steps as usize + 1);
    prices.push(config.p0);
    snapped.push(false);
    let mut rejections = 0_u32;
    let mut z = vec![0.0_f64; dim];
    let mut x = vec![0.0_f64; dim];
    for _ in 0..config.steps {
        let price = *prices.last().expect("seeded with p0");
        let node = nearest_node(grid, price);
        let off_grid = grid[node] != price;
        let mut accepted = None;
        for _ in 0..MAX_REDRAWS_PER_STEP {
            for zi in z.iter_mut() {
                *zi = StandardNormal.sample(&mut rng);
            }
            for i in 0..dim {
                let mut acc = means[i];
                for k in 0..=i {
                    acc += l[i][k] * z[k];
                }
                x[i] = acc;
            }
            if let Some(factor) = step_factor(x[node], x[n + node], 1.0, &config.pf)? {
                accepted = Some(factor);
                break;
            }
            rejections += 1;
        }
        let factor = accepted.ok_or(Error::Numeric(
            "simulate_grid: exhausted the redraw budget for one step",
        ))?;
        prices.push(price * factor);
        snapped.push(off_grid);
    }
    Ok(PricePath {
        prices,
        snapped,
        rejections,
    })
}

/// Geometric random-walk baseline `P_{j+1} = P_j (1 + mu dt + sigma sqrt(dt) Z)`.
///
/// The step factor is not clipped, so the baseline genuinely has normal
/// (thin-tailed) relative changes; with `mu` near zero a negative price
/// requires a `1 / (sigma sqrt(dt))` standard-deviation event.
pub fn gbm_baseline(
    p0: f64,
    mu: f64,
    sigma: f64,
    dt: f64,
    steps: u32,
    stream: RngStream,
) -> Result<Vec<f64>> {
    if !p0.is_finite() || p0 <= 0.0 {
        return Err(Error::Domain(
            "gbm_baseline: p0 must be positive and finite",
        ));
    }
    if !mu.is_finite() || !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::Domain(
            "gbm_baseline: mu must be finite and sigma nonnegative",
        ));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Domain("gbm_baseline: dt must be positive"));
    }
    if steps == 0 {
        return Err(Error::Domain("gbm_baseline: steps must be at least 1"));
    }
    let mut rng = stream.chunk_rng(DOMAIN_PATH_GBM, 0);
    let drift = mu * dt;
    let spread = sigma * libm::sqrt(dt);
    let mut prices = Vec::with_capacity(steps as usize + 1);
    prices.push(p0);
    for _ in 0..steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        let last = *prices.last().expect("seeded with p0");
        prices.push(last * (1.0 + drift + spread * z));
    }
    Ok(prices)
}

/// How many standard deviations a single baseline step must move to turn
/// the price negative: `1 / (sigma sqrt(dt))`.
pub fn negative_price_sd_event(sigma: f64, dt: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(
            "negative_price_sd_event: sigma must be positive",
        ));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(
            "negative_price_sd_event: dt must be positive",
        ));
    }
    Ok(1.0 / (sigma * libm::sqrt(dt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CorrelationSpec, JumpCountModel, LegParams};

    fn model() -> QuotientModel {
        QuotientModel {
            demand: LegParams {
                mu0: 1.0,
                sigma0: 0.5,
                jump_mu: 0.05,
                jump_sigma: 0.2,
            },
            supply: LegParams {
                mu0: 1.0,
                sigma0: 0.5,
                jump_mu: -0.05,
                jump_sigma: 0.2,
            },
            jumps: JumpCountModel::Independent {
                lambda1: 0.4,
                lambda2: 0.4,
            },
            corr: CorrelationSpec::Conditional { rho: 0.1 },
            dt: 1.0,
            d_over_s: 1.0,
        }
    }

    fn pf() -> PriceFunction {
        PriceFunction {
            q: 3.0,
            epsilon: 1e-3,
            tau0: 1.0,
        }
    }

    fn grid_config() -> PathConfig {
        PathConfig {
            p0: 100.0,
            steps: 40,
            pf: pf(),
            model: None,
            grid: Some(alloc::vec![90.0, 100.0, 110.0]),
            means: Some(alloc::vec![1.2, 1.0, 0.8, 0.8, 1.0, 1.2]),
            covariance: Some({
                let mut c = alloc::vec![alloc::vec![0.0; 6]; 6];
                for i in 0..6 {
                    c[i][i] = 0.05;
                    if i + 1 < 6 {
                        c[i][i + 1] = 0.01;
                        c[i + 1][i] = 0.01;
                    }
                }
                c
            }),
        }
    }

    #[test]
    fn basic_paths_replay_and_stay_positive() {
        let stream = RngStream {
            seed: 11,
            stream_id: 0,
        };
        let a = simulate_basic(&model(), &pf(), 50.0, 200, stream).unwrap();
        let b = simulate_basic(&model(), &pf(), 50.0, 200, stream).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.prices.len(), 201);
        assert_eq!(a.prices[0], 50.0);
        assert!(a.prices.iter().all(|p| *p > 0.0));
        assert!(a.snapped.iter().all(|s| !s));
        let c = simulate_basic(
            &model(),
            &pf(),
            50.0,
            200,
            RngStream {
                seed: 11,
                stream_id: 1,
            },
        )
        .unwrap();
        assert_ne!(a.prices, c.prices);
    }

    #[test]
    fn noiseless_step_applies_the_exact_transform() {
        // Deterministic legs 1.5 and 0.5 with d_over_s = 2 give R_a = 6;
        // with q = 3 and no smoothing the step factor is 1 + (6 - 1/6)^(1/3).
        let model = QuotientModel {
            demand: LegParams {
                mu0: 1.5,
                sigma0: 0.0,
                jump_mu: 0.0,
                jump_sigma: 0.0,
            },
            supply: LegParams {
                mu0: 0.5,
                sigma0: 0.0,
                jump_mu: 0.0,
                jump_sigma: 0.0,
            },
            jumps: JumpCountModel::Independent {
                lambda1: 0.0,
                lambda2: 0.0,
            },
            corr: CorrelationSpec::Conditional { rho: 0.0 },
            dt: 1.0,
            d_over_s: 2.0,
        };
        let pf = PriceFunction {
            q: 3.0,
            epsilon: 0.0,
            tau0: 1.0,
        };
        let path = simulate_basic(
            &model,
            &pf,
            50.0,
            2,
            RngStream {
                seed: 1,
                stream_id: 0,
            },
        )
        .unwrap();
        let factor = 1.0 + libm::cbrt(6.0 - 1.0 / 6.0);
        assert!((path.prices[1] - 50.0 * factor).abs() < 1e-12);
        assert!((path.prices[2] - 50.0 * factor * factor).abs() < 1e-10);
        assert_eq!(path.rejections, 0);
    }

    #[test]
    fn cholesky_reproduces_known_factor_and_rejects_indefinite() {
        let m = alloc::vec![alloc::vec![4.0, 2.0], alloc::vec![2.0, 3.0]];
        let l = cholesky(&m).unwrap();
        assert!((l[0][0] - 2.0).abs() < 1e-15);
        assert!((l[1][0] - 1.0).abs() < 1e-15);
        assert!((l[1][1] - libm::sqrt(2.0)).abs() < 1e-15);
        let bad = alloc::vec![alloc::vec![1.0, 2.0], alloc::vec![2.0, 1.0]];
        assert!(matches!(cholesky(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn nearest_node_breaks_ties_low() {
        let grid = [1.0, 3.0, 5.0];
        assert_eq!(nearest_node(&grid, 2.0), 0);
        assert_eq!(nearest_node(&grid, 4.2), 2);
        assert_eq!(nearest_node(&grid, 3.0), 1);
        assert_eq!(nearest_node(&grid, -10.0), 0);
    }

    #[test]
    fn grid_paths_replay_and_flag_snapping() {
        let cfg = grid_config();
        let stream = RngStream {
            seed: 3,
            stream_id: 9,
        };
        let a = simulate_grid(&cfg, stream).unwrap();
        let b = simulate_grid(&cfg, stream).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.prices.len(), 41);
        assert!(!a.snapped[0]);
        // p0 sits exactly on a grid node, so the first step is not snapped;
        // later prices fall off-grid and every subsequent step snaps.
        assert!(!a.snapped[1]);
        assert!(a.snapped[2..].iter().all(|s| *s));
        assert!(a.prices.iter().all(|p| *p > 0.0));
    }

    #[test]
    fn config_validation_demands_exactly_one_driver() {
        let mut cfg = grid_config();
        cfg.validate().unwrap();
        cfg.model = Some(model());
        assert!(matches!(cfg.validate(), Err(Error::Contract(_))));
        cfg.grid = None;
        cfg.means = None;
        cfg.covariance = None;
        cfg.validate().unwrap();
        cfg.model = None;
        assert!(matches!(cfg.validate(), Err(Error::Contract(_))));
    }

    #[test]
    fn gbm_baseline_compounds_exactly_without_noise() {
        let stream = RngStream {
            seed: 0,
            stream_id: 0,
        };
        let p = gbm_baseline(100.0, 0.01, 0.0, 1.0, 3, stream).unwrap();
        assert_eq!(p.len(), 4);
        assert!((p[3] - 100.0 * 1.01_f64.powi(3)).abs() < 1e-9);
        let q = gbm_baseline(100.0, 0.0, 0.2, 0.01, 500, stream).unwrap();
        assert_eq!(q.len(), 501);
        assert!(q.windows(2).all(|w| (w[1] / w[0] - 1.0).abs() < 1.0));
    }

    #[test]
    fn sd_event_scale_matches_hand_value() {
        let z = negative_price_sd_event(0.2, 0.01).unwrap();
        assert!((z - 50.0).abs() < 1e-12);
        assert!(negative_price_sd_event(0.0, 1.0).is_err());
    }
}
