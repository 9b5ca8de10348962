//! Scalar special functions: log-factorial, normal pdf/cdf, bivariate
//! normal cdf, and Poisson tail utilities.
//!
//! Everything routes through [`libm`] so evaluation is identical on every
//! platform regardless of the host math library.

use crate::error::{Error, Result};
use crate::quad;

/// sqrt(2 pi), used by every normal density in the crate.
pub const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

/// Natural log of `k!`, exact table for small `k`, `lgamma` beyond.
pub fn ln_factorial(k: u64) -> f64 {
    const TABLE: [f64; 21] = [
        0.0,
        0.0,
        core::f64::consts::LN_2,
        1.791_759_469_228_055,
        3.178_053_830_347_946,
        4.787_491_742_782_046,
        6.579_251_212_010_101,
        8.525_161_361_065_415,
        10.604_602_902_745_25,
        12.801_827_480_081_469,
        15.104_412_573_075_516,
        17.502_307_845_873_887,
        19.987_214_495_661_885,
        22.552_163_853_123_42,
        25.191_221_182_738_68,
        27.899_271_383_840_894,
        30.671_860_106_080_675,
        33.505_073_450_136_89,
        36.395_445_208_033_05,
        39.339_884_187_199_495,
        42.335_616_460_753_485,
    ];
    if k <= 20 {
        TABLE[k as usize]
    } else {
        libm::lgamma_r((k + 1) as f64).0
    }
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    libm::exp(-0.5 * z * z) / SQRT_TWO_PI
}

/// Standard normal cumulative distribution, accurate deep into both tails.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

/// Standard normal survival function `1 - Phi(z)` without cancellation.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

/// Poisson probability mass `P(K = k)` for `K ~ Poisson(mean)`.
///
/// Evaluated in log space; `mean = 0` is the point mass at zero.
pub fn poisson_pmf(k: u64, mean: f64) -> Result<f64> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::Domain("poisson_pmf: mean must be finite and >= 0"));
    }
    if mean == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    Ok(libm::exp(
        k as f64 * libm::log(mean) - mean - ln_factorial(k),
    ))
}

/// Smallest `K` with `P(Poisson(mean) <= K) >= p`.
///
/// Uses the exact pmf recurrence, which stays in normal float range for
/// `mean <= 700`; larger means are rejected rather than silently
/// approximated.
pub fn poisson_quantile(mean: f64, p: f64) -> Result<u64> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::Domain(
            "poisson_quantile: mean must be finite and >= 0",
        ));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Domain("poisson_quantile: p must lie in [0, 1)"));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    if mean > 700.0 {
        return Err(Error::Domain(
            "poisson_quantile: mean above exact-recurrence range (700)",
        ));
    }
    let mut pmf = libm::exp(-mean);
    let mut cdf = pmf;
    let mut k: u64 = 0;
    while cdf < p {
        k += 1;
        pmf *= mean / k as f64;
        cdf += pmf;
        if k > 100_000 {
            return Err(Error::Numeric(
                "poisson_quantile: recurrence failed to reach p",
            ));
        }
    }
    Ok(k)
}

/// Exact upper-tail mass `P(Poisson(mean) > k_max)`.
pub fn poisson_tail_mass(mean: f64, k_max: u64) -> Result<f64> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::Domain(
            "poisson_tail_mass: mean must be finite and >= 0",
        ));
    }
    if mean == 0.0 {
        return Ok(0.0);
    }
    if mean > 700.0 {
        return Err(Error::Domain(
            "poisson_tail_mass: mean above exact-recurrence range (700)",
        ));
    }
    let mut pmf = libm::exp(-mean);
    let mut cdf = pmf;
    for k in 1..=k_max {
        pmf *= mean / k as f64;
        cdf += pmf;
    }
    Ok((1.0 - cdf).max(0.0))
}

/// Bivariate standard normal cumulative distribution
/// `P(X <= h, Y <= k)` for correlation `rho`.
///
/// Uses Plackett's identity with Drezner's sine substitution,
///
/// `Phi2(h, k; rho) = Phi(h) Phi(k)
///   + (1/2pi) Integral_0^{asin rho} exp(-(h^2 - 2 h k sin t + k^2) / (2 cos^2 t)) dt`,
///
/// where the substituted integrand is smooth on the whole interval, so the
/// adaptive Gauss-Kronrod core resolves it to near machine precision even
/// for `|rho|` close to 1. The result is clamped to the Frechet bounds.
pub fn bvn_cdf(h: f64, k: f64, rho: f64) -> Result<f64> {
    if h.is_nan() || k.is_nan() || rho.is_nan() {
        return Err(Error::Domain("bvn_cdf: NaN argument"));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::Domain("bvn_cdf: rho must lie in [-1, 1]"));
    }
    if h.is_infinite() || k.is_infinite() {
        // Infinite arguments reduce to univariate limits.
        if h == f64::NEG_INFINITY || k == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        if h == f64::INFINITY {
            return Ok(normal_cdf(k));
        }
        return Ok(normal_cdf(h));
    }
    if rho == 1.0 {
        return Ok(normal_cdf(h.min(k)));
    }
    if rho == -1.0 {
        return Ok((normal_cdf(h) + normal_cdf(k) - 1.0).max(0.0));
    }
    let phh = normal_cdf(h);
    let phk = normal_cdf(k);
    if rho == 0.0 {
        return Ok(phh * phk);
    }
    let upper = libm::asin(rho);
    let integrand = |t: f64| {
        let s = libm::sin(t);
        let c = libm::cos(t);
        let c2 = c * c;
        if c2 == 0.0 {
            return 0.0;
        }
        libm::exp(-(h * h - 2.0 * h * k * s + k * k) / (2.0 * c2))
    };
    let (a, b) = if upper >= 0.0 {
        (0.0, upper)
    } else {
        (upper, 0.0)
    };
    let quad = quad::integrate(integrand, &[a, b], 1e-13, 1e-16)?;
    let signed = if upper >= 0.0 {
        quad.value
    } else {
        -quad.value
    };
    let raw = phh * phk + signed / (2.0 * core::f64::consts::PI);
    let hi = phh.min(phk);
    // The rounded lower Frechet bound can exceed the upper one when a
    // marginal saturates to 1.0, so order the bounds before clamping.
    let lo = (phh + phk - 1.0).max(0.0).min(hi);
    Ok(raw.clamp(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_products() {
        let mut acc = 0.0_f64;
        for k in 1..=30u64 {
            acc += libm::log(k as f64);
            assert!(
                (ln_factorial(k) - acc).abs() <= 1e-12 * acc.max(1.0),
                "ln {k}! mismatch: {} vs {acc}",
                ln_factorial(k)
            );
        }
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        // Phi(1.96) from standard tables.
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-12);
        assert!((normal_cdf(-8.0) - 6.220_960_574_271_786e-16).abs() < 1e-28);
        assert!((normal_cdf(5.0) + normal_sf(5.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_pmf_matches_closed_forms() {
        // P(K = 1) for mean 1 is e^{-1}.
        let e_inv = 0.367_879_441_171_442_33;
        assert!((poisson_pmf(1, 1.0).unwrap() - e_inv).abs() < 1e-16);
        assert!((poisson_pmf(0, 2.5).unwrap() - libm::exp(-2.5)).abs() < 1e-16);
        assert_eq!(poisson_pmf(0, 0.0).unwrap(), 1.0);
        assert_eq!(poisson_pmf(3, 0.0).unwrap(), 0.0);
        assert!(poisson_pmf(1, -0.5).is_err());
    }

    #[test]
    fn poisson_quantile_brackets_target_mass() {
        let mean = 3.7;
        let p = 1.0 - 1e-12;
        let k = poisson_quantile(mean, p).unwrap();
        assert!(poisson_tail_mass(mean, k).unwrap() <= 1e-12);
        assert!(poisson_tail_mass(mean, k - 1).unwrap() > 1e-12);
    }

    #[test]
    fn bvn_cdf_closed_form_at_origin() {
        // Phi2(0, 0; rho) = 1/4 + asin(rho) / (2 pi).
        for &rho in &[-0.99, -0.6, -0.3, 0.0, 0.2, 0.5, 0.925, 0.999] {
            let expect = 0.25 + libm::asin(rho) / (2.0 * core::f64::consts::PI);
            let got = bvn_cdf(0.0, 0.0, rho).unwrap();
            assert!(
                (got - expect).abs() < 1e-13,
                "rho={rho}: got {got}, expected {expect}"
            );
        }
    }

    #[test]
    fn bvn_cdf_degenerate_correlations() {
        assert!((bvn_cdf(0.3, 1.2, 1.0).unwrap() - normal_cdf(0.3)).abs() < 1e-15);
        let m = bvn_cdf(0.3, 0.1, -1.0).unwrap();
        assert!((m - (normal_cdf(0.3) + normal_cdf(0.1) - 1.0)).abs() < 1e-15);
        assert_eq!(bvn_cdf(-2.0, 2.0, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn bvn_cdf_reduces_to_product_when_independent() {
        let got = bvn_cdf(0.7, -1.1, 0.0).unwrap();
        assert!((got - normal_cdf(0.7) * normal_cdf(-1.1)).abs() < 1e-15);
    }
}
