//! Mixture-series densities for the quotient `R1 / R2` under conditional
//! bivariate-normal legs.
//!
//! Conditioned on the jump counts, the legs are bivariate normal, so the
//! quotient density is the jump-count mixture
//!
//! `f(w) = sum_{k1,k2} P(k1,k2) Integral |y| f^{(k1,k2)}(w y, y) dy`.
//!
//! Each term's integrand is `|y|` times a Gaussian in `y`; the integral is
//! evaluated by adaptive Gauss-Kronrod quadrature on a window centered at
//! the Gaussian's vertex, with breakpoints at the vertex, the origin kink,
//! and a few widths out. The mixture is truncated at a Poisson quantile
//! carried by [`SeriesTruncation`] together with the exact excluded mass.

use alloc::vec::Vec;

use crate::density_exact;
use crate::error::{Error, Result};
use crate::model::{CorrelationSpec, PriceFunction, QuotientModel};
use crate::quad;
use crate::special::{bvn_cdf, normal_cdf, poisson_quantile};
use crate::transforms::{pushforward_density, PushforwardMap};

use serde::{Deserialize, Serialize};

/// Which evaluation route produced a density value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    /// Adaptive quadrature of the mixture series.
    Quadrature,
    /// Large-`|w|` closed form with `O(|w|^-3)` remainder.
    Asymptotic,
    /// Closed form for the perfectly anti-correlated model.
    Exact,
}

impl core::fmt::Display for DensityMethod {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            DensityMethod::Quadrature => "quadrature",
            DensityMethod::Asymptotic => "asymptotic",
            DensityMethod::Exact => "exact",
        })
    }
}

/// A density value with provenance and an honest error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEvaluation {
    /// Evaluation point.
    pub w: f64,
    /// Density value.
    pub value: f64,
    /// Estimated absolute error: summed quadrature errors plus the excluded
    /// mixture mass times the largest per-term density seen.
    pub abs_error_estimate: f64,
    /// Evaluation route.
    pub method: DensityMethod,
}

/// Where to cut the jump-count mixture and how much mass that discards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    /// Terms `k1, k2 <= k_max` are kept.
    pub k_max: u32,
    /// Exact probability of the discarded index set,
    /// `max(0, 1 - sum_{k1,k2 <= k_max} P(k1,k2))`.
    pub tail_mass_bound: f64,
}

impl SeriesTruncation {
    /// Truncate at the `1 - 1e-12` quantile of the larger marginal count.
    pub fn for_model(model: &QuotientModel) -> Result<Self> {
        model.validate()?;
        let (m1, m2) = model.jumps.marginal_means(model.dt);
        let p = 1.0 - 1e-12;
        let k = poisson_quantile(m1, p)?.max(poisson_quantile(m2, p)?);
        Self::with_k_max(model, k as u32)
    }

    /// Truncate at a caller-chosen `k_max`, computing the exact excluded mass.
    pub fn with_k_max(model: &QuotientModel, k_max: u32) -> Result<Self> {
        model.validate()?;
        let mut kept = 0.0;
        for k1 in 0..=k_max as u64 {
            for k2 in 0..=k_max as u64 {
                kept += model.jumps.joint_pmf(k1, k2, model.dt)?;
            }
        }
        Ok(SeriesTruncation {
            k_max,
            tail_mass_bound: (1.0 - kept).max(0.0),
        })
    }
}

/// One retained mixture term.
struct Term {
    weight: f64,
    mu1: f64,
    mu2: f64,
    s1: f64,
    s2: f64,
}

/// Materialize the retained mixture terms, checking that every term has
/// strictly positive conditional spreads.
fn series_terms(model: &QuotientModel, trunc: SeriesTruncation) -> Result<Vec<Term>> {
    let mut terms = Vec::with_capacity(((trunc.k_max + 1) * (trunc.k_max + 1)) as usize);
    for k1 in 0..=trunc.k_max as u64 {
        for k2 in 0..=trunc.k_max as u64 {
            let weight = model.jumps.joint_pmf(k1, k2, model.dt)?;
            if weight < 1e-320 {
                continue;
            }
            let m = model.conditional_moments(k1, k2);
            if m.sigma_r1 <= 0.0 || m.sigma_r2 <= 0.0 {
                return Err(Error::Domain(
                    "density series requires positive conditional spread in every term",
                ));
            }
            terms.push(Term {
                weight,
                mu1: m.mu_r1,
                mu2: m.mu_r2,
                s1: m.sigma_r1,
                s2: m.sigma_r2,
            });
        }
    }
    Ok(terms)
}

fn require_conditional(model: &QuotientModel) -> Result<f64> {
    model.validate()?;
    match model.corr {
        CorrelationSpec::Conditional { rho } => Ok(rho),
        CorrelationSpec::AntiCorrelated => Err(Error::Contract(
            "series density applies to conditional-correlation models; use the exact anti-correlated forms",
        )),
    }
}

/// `Integral |y| f(w y, y) dy` (or over `y > 0` only) for one bivariate
/// normal term, by vertex-centered adaptive quadrature.
///
/// Returns the integral and an absolute error estimate.
fn ray_integral(w: f64, t: &Term, rho: f64, positive_only: bool) -> Result<(f64, f64)> {
    let c2 = 1.0 / (2.0 * (1.0 - rho * rho));
    let a = w / t.s1;
    let b = 1.0 / t.s2;
    let m1 = t.mu1 / t.s1;
    let m2 = t.mu2 / t.s2;

    // Exponent as alpha (y - y*)^2 + d0 with d0 = min_y Q(y) >= 0.
    let alpha = c2 * (a * a - 2.0 * rho * a * b + b * b);
    let beta = c2 * (a * m1 + b * m2 - rho * (a * m2 + b * m1));
    let gamma = c2 * (m1 * m1 - 2.0 * rho * m1 * m2 + m2 * m2);
    let vertex = beta / alpha;
    let d0 = (gamma - beta * beta / alpha).max(0.0);
    let c1 = 1.0 / (2.0 * core::f64::consts::PI * t.s1 * t.s2 * libm::sqrt(1.0 - rho * rho));

    let half_window = libm::sqrt(760.0 / alpha);
    let sigma_y = 1.0 / libm::sqrt(2.0 * alpha);

    // Everything under the window is below exp(-760): the term vanishes at
    // double precision.
    let log_scale = libm::log(c1) - d0 + libm::log1p(vertex.abs() + half_window);
    if log_scale < -745.0 {
        return Ok((0.0, 0.0));
    }

    let mut lo = vertex - half_window;
    let mut hi = vertex + half_window;
    if positive_only {
        lo = lo.max(0.0);
        hi = hi.max(0.0);
        if lo >= hi {
            return Ok((0.0, 0.0));
        }
    }
    let mut points = [
        lo,
        vertex - 5.0 * sigma_y,
        vertex - sigma_y,
        vertex,
        vertex + sigma_y,
        vertex + 5.0 * sigma_y,
        hi,
        0.0,
    ];
    points.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    let mut clipped: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        if p >= lo && p <= hi {
            clipped.push(p);
        }
    }

    let integrand = move |y: f64| {
        let dy = y - vertex;
        y.abs() * c1 * libm::exp(-(alpha * dy * dy + d0))
    };
    let r = quad::integrate(integrand, &clipped, 1e-10, 0.0)?;
    Ok((r.value, r.abs_error))
}

/// Joint conditional density `f^{(k1,k2)}(x1, x2)` of the legs given the
/// jump counts (conditional-correlation models only).
pub fn joint_conditional_density(
    x1: f64,
    x2: f64,
    model: &QuotientModel,
    k1: u64,
    k2: u64,
) -> Result<f64> {
    let rho = require_conditional(model)?;
    if !x1.is_finite() || !x2.is_finite() {
        return Err(Error::Domain(
            "joint_conditional_density: arguments must be finite",
        ));
    }
    let m = model.conditional_moments(k1, k2);
    if m.sigma_r1 <= 0.0 || m.sigma_r2 <= 0.0 {
        return Err(Error::Domain(
            "joint_conditional_density: conditional spread must be positive",
        ));
    }
    let z1 = (x1 - m.mu_r1) / m.sigma_r1;
    let z2 = (x2 - m.mu_r2) / m.sigma_r2;
    let c2 = 1.0 / (2.0 * (1.0 - rho * rho));
    let norm = 2.0 * core::f64::consts::PI * m.sigma_r1 * m.sigma_r2 * libm::sqrt(1.0 - rho * rho);
    Ok(libm::exp(-c2 * (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2)) / norm)
}

/// Density of the raw quotient `R1 / R2` at `w`, by adaptive quadrature of
/// the truncated mixture series.
pub fn quotient_density(
    w: f64,
    model: &QuotientModel,
    trunc: SeriesTruncation,
) -> Result<DensityEvaluation> {
    let rho = require_conditional(model)?;
    if !w.is_finite() {
        return Err(Error::Domain("quotient_density: w must be finite"));
    }
    let terms = series_terms(model, trunc)?;
    let mut value = 0.0;
    let mut err = 0.0;
    let mut max_term = 0.0_f64;
    for t in &terms {
        let (v, e) = ray_integral(w, t, rho, false)?;
        value += t.weight * v;
        err += t.weight * e;
        max_term = max_term.max(v);
    }
    err += trunc.tail_mass_bound * max_term;
    Ok(DensityEvaluation {
        w,
        value,
        abs_error_estimate: err,
        method: DensityMethod::Quadrature,
    })
}

/// Large-`|w|` asymptotic density of `R1 / R2`:
///
/// `f(w) ~ sum_{k1,k2} P(k1,k2) sqrt(pi/2) (mu_R1 / sigma_R1)
///         exp{ -c2 (mu_R2 / sigma_R2)^2 } / w^2`,   `c2 = 1/(2(1 - rho^2))`.
///
/// The closed form is taken as written; it presumes positive conditional
/// drift in the numerator (terms with negative `mu_R1` contribute with
/// their sign). Its constant generally differs from the true tail constant
/// by a fixed, `w`-independent factor, so quadrature-to-asymptotic
/// comparisons should test ratio constancy rather than ratio unity.
/// Requires `|w| >= 10`; the remainder estimate is `|value| / |w|`.
pub fn quotient_density_asymptotic(
    w: f64,
    model: &QuotientModel,
    trunc: SeriesTruncation,
) -> Result<DensityEvaluation> {
    const W_MIN: f64 = 10.0;
    let rho = require_conditional(model)?;
    if !w.is_finite() || w.abs() < W_MIN {
        return Err(Error::Domain(
            "quotient_density_asymptotic: requires finite |w| >= 10",
        ));
    }
    let c2 = 1.0 / (2.0 * (1.0 - rho * rho));
    let half_pi_sqrt = libm::sqrt(core::f64::consts::PI / 2.0);
    let terms = series_terms(model, trunc)?;
    let mut constant = 0.0;
    for t in &terms {
        let m2 = t.mu2 / t.s2;
        constant += t.weight * half_pi_sqrt * (t.mu1 / t.s1) * libm::exp(-c2 * m2 * m2);
    }
    let value = constant / (w * w);
    Ok(DensityEvaluation {
        w,
        value,
        abs_error_estimate: value.abs() / w.abs(),
        method: DensityMethod::Asymptotic,
    })
}

/// Probability that both legs are positive, `sum P(k1,k2) P(R1 > 0, R2 > 0 | k1, k2)`.
pub fn positive_quadrant_probability(
    model: &QuotientModel,
    trunc: SeriesTruncation,
) -> Result<f64> {
    let rho = require_conditional(model)?;
    let terms = series_terms(model, trunc)?;
    let mut q = 0.0;
    for t in &terms {
        let m1 = t.mu1 / t.s1;
        let m2 = t.mu2 / t.s2;
        // P(Z1 > -m1, Z2 > -m2) for standard correlated normals.
        let p = 1.0 - normal_cdf(-m1) - normal_cdf(-m2) + bvn_cdf(-m1, -m2, rho)?;
        q += t.weight * p.clamp(0.0, 1.0);
    }
    Ok(q)
}

/// Density of the quotient conditioned on both legs positive, supported on
/// `(0, inf)`:
///
/// `f(u | R1 > 0, R2 > 0) = Q1^{-1} sum P(k1,k2) Integral_0^inf y f^{(k1,k2)}(u y, y) dy`.
pub fn quotient_density_conditional(
    u: f64,
    model: &QuotientModel,
    trunc: SeriesTruncation,
) -> Result<DensityEvaluation> {
    let rho = require_conditional(model)?;
    if !u.is_finite() {
        return Err(Error::Domain(
            "quotient_density_conditional: u must be finite",
        ));
    }
    let q1 = positive_quadrant_probability(model, trunc)?;
    if q1 <= 1e-12 {
        return Err(Error::Domain(
            "quotient_density_conditional: positivity event has negligible probability",
        ));
    }
    if u <= 0.0 {
        return Ok(DensityEvaluation {
            w: u,
            value: 0.0,
            abs_error_estimate: 0.0,
            method: DensityMethod::Quadrature,
        });
    }
    let terms = series_terms(model, trunc)?;
    let mut value = 0.0;
    let mut err = 0.0;
    let mut max_term = 0.0_f64;
    for t in &terms {
        let (v, e) = ray_integral(u, t, rho, true)?;
        value += t.weight * v;
        err += t.weight * e;
        max_term = max_term.max(v);
    }
    err += trunc.tail_mass_bound * max_term;
    Ok(DensityEvaluation {
        w: u,
        value: value / q1,
        abs_error_estimate: err / q1,
        method: DensityMethod::Quadrature,
    })
}

/// Exact mixture CDF `P(R1 / R2 <= w)` via orthant probabilities: with
/// `U = R1 - w R2` and `V = R2`,
///
/// `P = Phi(-u~) + Phi(-v~) - 2 Phi2(-u~, -v~; rho_UV)`,
///
/// whose `w`-derivative is the quadrature density (they are tied together
/// by a finite-difference test).
pub fn quotient_cdf(w: f64, model: &QuotientModel, trunc: SeriesTruncation) -> Result<f64> {
    let rho = require_conditional(model)?;
    if w.is_nan() {
        return Err(Error::Domain("quotient_cdf: w must not be NaN"));
    }
    if w == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if w == f64::INFINITY {
        return Ok(1.0);
    }
    let terms = series_terms(model, trunc)?;
    let mut cdf = 0.0;
    for t in &terms {
        let mu_u = t.mu1 - w * t.mu2;
        let var_u = t.s1 * t.s1 - 2.0 * w * rho * t.s1 * t.s2 + w * w * t.s2 * t.s2;
        let sigma_u = libm::sqrt(var_u);
        let u_t = mu_u / sigma_u;
        let v_t = t.mu2 / t.s2;
        let rho_uv = ((rho * t.s1 - w * t.s2) / sigma_u).clamp(-1.0, 1.0);
        let f = normal_cdf(-u_t) + normal_cdf(-v_t) - 2.0 * bvn_cdf(-u_t, -v_t, rho_uv)?;
        cdf += t.weight * f.clamp(0.0, 1.0);
    }
    Ok(cdf.clamp(0.0, 1.0))
}

/// Density of the scaled quotient `R_a = (D/S) R1 / R2` at `x`, either
/// unconditional or conditioned on positive legs. Dispatches to the series
/// (conditional models) or the closed anti-correlated forms.
fn scaled_quotient_density(
    x: f64,
    model: &QuotientModel,
    trunc: SeriesTruncation,
    conditioned: bool,
) -> Result<f64> {
    let ds = model.d_over_s;
    match model.corr {
        CorrelationSpec::Conditional { .. } => {
            if conditioned {
                Ok(quotient_density_conditional(x / ds, model, trunc)?.value / ds)
            } else {
                Ok(quotient_density(x / ds, model, trunc)?.value / ds)
            }
        }
        CorrelationSpec::AntiCorrelated => {
            let params = density_exact::AntiCorrParams::from_model(model)?;
            if conditioned {
                Ok(density_exact::mixture_conditional_positive_density(x, &params, trunc)?.value)
            } else {
                Ok(density_exact::full_mixture_density(x, &params, trunc)?.value)
            }
        }
    }
}

/// Density of `R_b = r(R_a) = R_a - 1/R_a` at `y`, by pushing the scaled
/// quotient density through both branches of `r` (right branch only when
/// `conditioned` restricts the support to positive quotients).
pub fn density_of_rb(
    y: f64,
    model: &QuotientModel,
    trunc: SeriesTruncation,
    conditioned: bool,
) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain("density_of_rb: y must be finite"));
    }
    model.validate()?;
    pushforward_density(
        |x| scaled_quotient_density(x, model, trunc, conditioned),
        PushforwardMap::RTransform,
        y,
        conditioned,
    )
}

/// Density of `R_c = G_eps(R_a)` at `y`, by pushing the scaled quotient
/// density through both branches of `G_eps`.
pub fn density_of_rc(
    y: f64,
    model: &QuotientModel,
    pf: &PriceFunction,
    trunc: SeriesTruncation,
    conditioned: bool,
) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain("density_of_rc: y must be finite"));
    }
    model.validate()?;
    pf.validate()?;
    pushforward_density(
        |x| scaled_quotient_density(x, model, trunc, conditioned),
        PushforwardMap::GEps(pf),
        y,
        conditioned,
    )
}
