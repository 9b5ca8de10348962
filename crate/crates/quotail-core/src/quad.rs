//! Adaptive Gauss-Kronrod quadrature on a union of panels.
//!
//! A 7-point Gauss / 15-point Kronrod pair gives the value and a local error
//! estimate on each panel; the panel with the worst error is bisected until
//! the summed error meets the requested tolerance. The node table is the
//! QUADPACK one, so a single panel already integrates polynomials up to
//! degree 22 exactly.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Kronrod abscissae for the 15-point rule (positive half, descending).
/// Full published QUADPACK digits, beyond f64 resolution.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Weights of the 7-point Gauss rule (paired with the odd XGK entries).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Weights of the 15-point Kronrod rule.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    /// Estimated value of the integral.
    pub value: f64,
    /// Estimated absolute error (sum of per-panel QUADPACK estimates).
    pub abs_error: f64,
    /// Number of integrand evaluations performed.
    pub evaluations: u32,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// One 15-point Kronrod pass over `[a, b]`, returning the integral estimate
/// and the QUADPACK-scaled error estimate.
fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];
    let mut res_gauss = WG[3] * fc;
    let mut res_kronrod = WGK[7] * fc;
    let mut res_abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * sum;
        }
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half;
    if !value.is_finite() {
        return Err(Error::Numeric(
            "quadrature: integrand produced a non-finite value",
        ));
    }
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        let scaled = libm::pow(200.0 * err / res_asc, 1.5);
        err = if scaled < 1.0 {
            res_asc * scaled
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

/// Integrate `f` over the union of panels delimited by `points`, refining
/// adaptively until `sum(errors) <= max(abs_tol, rel_tol * |value|)`.
///
/// `points` must be finite, sorted ascending, with at least two entries;
/// zero-width panels are permitted and contribute nothing. The tolerance may
/// fail to be met only when panel widths reach floating-point resolution or
/// the panel budget is exhausted; the returned `abs_error` is honest either
/// way, so callers can propagate it.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    const MAX_PANELS: usize = 4096;

    if points.len() < 2 {
        return Err(Error::Domain("quadrature: need at least two breakpoints"));
    }
    if !(rel_tol >= 0.0) || !(abs_tol >= 0.0) || rel_tol + abs_tol == 0.0 {
        return Err(Error::Domain(
            "quadrature: tolerances must be nonnegative, one positive",
        ));
    }
    for w in points.windows(2) {
        if !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::Domain("quadrature: breakpoints must be finite"));
        }
        if w[0] > w[1] {
            return Err(Error::Domain("quadrature: breakpoints must be ascending"));
        }
    }

    let mut panels: Vec<Panel> = Vec::with_capacity(points.len() + 16);
    let mut evaluations: u32 = 0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (value, error) = kronrod_panel(&f, w[0], w[1])?;
        evaluations += 15;
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    if panels.is_empty() {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }

    loop {
        let mut total = 0.0;
        let mut err_total = 0.0;
        for p in &panels {
            total += p.value;
            err_total += p.error;
        }
        if err_total <= abs_tol.max(rel_tol * total.abs()) || panels.len() >= MAX_PANELS {
            return Ok(QuadResult {
                value: total,
                abs_error: err_total,
                evaluations,
            });
        }

        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            // The worst panel is at floating-point resolution; accept it.
            return Ok(QuadResult {
                value: panels.iter().map(|p| p.value).sum(),
                abs_error: panels.iter().map(|p| p.error).sum(),
                evaluations,
            });
        }
        let (lv, le) = kronrod_panel(&f, a, mid)?;
        let (rv, re) = kronrod_panel(&f, mid, b)?;
        evaluations += 30;
        panels[worst] = Panel {
            a,
            b: mid,
            value: lv,
            error: le,
        };
        panels.push(Panel {
            a: mid,
            b,
            value: rv,
            error: re,
        });
    }
}
