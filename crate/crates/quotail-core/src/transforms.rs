//! The shape transform `r(x) = x - 1/x`, the smoothed price map
//! `G_eps(x) = g_eps(r(x))`, their branch inverses, and density
//! pushforwards through either map.
//!
//! `r` maps each of `(-inf, 0)` and `(0, inf)` bijectively onto the real
//! line, so every level `y` has exactly two preimages: the right branch
//! `h_plus(y) = (y + sqrt(y^2 + 4)) / 2 > 0` and the left branch
//! `h_minus(y) = (y - sqrt(y^2 + 4)) / 2 < 0`. `g_eps` is an odd, strictly
//! increasing bijection of the line, so `G_eps` inherits the same two-branch
//! structure.

use crate::error::{Error, Result};
use crate::model::PriceFunction;

/// Which preimage of `r` (or `G_eps`) an inverse refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Preimage in `(0, inf)`.
    Right,
    /// Preimage in `(-inf, 0)`.
    Left,
}

/// One branch of an inverse map, with its derivative `dx/dy` (positive for
/// both branches since each is strictly increasing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchInverse {
    pub branch: Branch,
    /// Preimage `x` with `map(x) = y`.
    pub x: f64,
    /// Derivative of the preimage with respect to `y`.
    pub dx_dy: f64,
}

/// `r(x) = x - 1/x`; requires finite nonzero `x`.
pub fn r_transform(x: f64) -> Result<f64> {
    if !x.is_finite() || x == 0.0 {
        return Err(Error::Domain("r_transform: x must be finite and nonzero"));
    }
    Ok(x - 1.0 / x)
}

/// Branch inverse `h` of `r`, in cancellation-free form on both signs of `y`.
pub fn r_inverse(y: f64, branch: Branch) -> f64 {
    let s = libm::hypot(y, 2.0);
    match branch {
        Branch::Right => {
            if y >= 0.0 {
                0.5 * (y + s)
            } else {
                2.0 / (s - y)
            }
        }
        Branch::Left => {
            if y <= 0.0 {
                0.5 * (y - s)
            } else {
                -2.0 / (s + y)
            }
        }
    }
}

/// Derivative `h'(y) = |h(y)| / sqrt(y^2 + 4)`, positive on both branches.
pub fn r_inverse_deriv(y: f64, branch: Branch) -> f64 {
    r_inverse(y, branch).abs() / libm::hypot(y, 2.0)
}

/// Both preimages of `y` under `r`, right branch first.
pub fn r_inverse_branches(y: f64) -> [BranchInverse; 2] {
    let s = libm::hypot(y, 2.0);
    let xr = r_inverse(y, Branch::Right);
    let xl = r_inverse(y, Branch::Left);
    [
        BranchInverse {
            branch: Branch::Right,
            x: xr,
            dx_dy: xr.abs() / s,
        },
        BranchInverse {
            branch: Branch::Left,
            x: xl,
            dx_dy: xl.abs() / s,
        },
    ]
}

/// Odd smoothing map `g_eps(u) = u (u^2 + eps^2)^{(1-q)/(2q)}`; at
/// `eps = 0` this is `sgn(u) |u|^{1/q}`.
pub fn g_fun(u: f64, pf: &PriceFunction) -> f64 {
    if pf.epsilon == 0.0 {
        if u == 0.0 {
            return 0.0;
        }
        return libm::copysign(libm::pow(u.abs(), 1.0 / pf.q), u);
    }
    let base = u * u + pf.epsilon * pf.epsilon;
    u * libm::pow(base, (1.0 - pf.q) / (2.0 * pf.q))
}

/// Derivative `g_eps'(u) = (u^2 + eps^2)^{(1-3q)/(2q)} (eps^2 + u^2 / q)`.
///
/// Strictly positive for `eps > 0`. At `eps = 0` it is
/// `(1/q) |u|^{1/q - 1}`, which diverges at `u = 0` when `q > 1`; the
/// divergence is returned as `+inf` so downstream inverse derivatives
/// collapse to zero rather than erroring.
pub fn g_fun_deriv(u: f64, pf: &PriceFunction) -> f64 {
    if pf.epsilon == 0.0 {
        if u == 0.0 {
            return if pf.q == 1.0 { 1.0 } else { f64::INFINITY };
        }
        return libm::pow(u.abs(), 1.0 / pf.q - 1.0) / pf.q;
    }
    let base = u * u + pf.epsilon * pf.epsilon;
    libm::pow(base, (1.0 - 3.0 * pf.q) / (2.0 * pf.q)) * (pf.epsilon * pf.epsilon + u * u / pf.q)
}

/// Inverse of `g_eps`. Closed form when `eps = 0`; otherwise bisection on
/// the strictly increasing odd map, run to floating-point resolution.
pub fn g_fun_inverse(y: f64, pf: &PriceFunction) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain("g_fun_inverse: y must be finite"));
    }
    if pf.epsilon == 0.0 {
        if y == 0.0 {
            return Ok(0.0);
        }
        return Ok(libm::copysign(libm::pow(y.abs(), pf.q), y));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let target = y.abs();
    // g(u) >= u (u^2 + eps^2)^{...} with exponent <= 0 decays below the
    // identity, so the preimage is at least max(target, target^q)-ish;
    // double an initial guess until it brackets.
    let mut hi = libm::pow(target, pf.q).max(target).max(pf.epsilon);
    let mut grow = 0;
    while g_fun(hi, pf) < target {
        hi *= 2.0;
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::Numeric(
                "g_fun_inverse: failed to bracket the preimage",
            ));
        }
    }
    let mut lo = 0.0_f64;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g_fun(mid, pf) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(libm::copysign(hi, y))
}

/// `G_eps(x) = g_eps(r(x))`.
pub fn g_eps(x: f64, pf: &PriceFunction) -> Result<f64> {
    Ok(g_fun(r_transform(x)?, pf))
}

/// Derivative of `G_eps` by the chain rule, `g_eps'(r(x)) (1 + 1/x^2)`.
pub fn g_eps_deriv(x: f64, pf: &PriceFunction) -> Result<f64> {
    let u = r_transform(x)?;
    Ok(g_fun_deriv(u, pf) * (1.0 + 1.0 / (x * x)))
}

/// Both preimages of `y` under `G_eps`, right branch first. The two
/// preimages share the intermediate value `u = g_eps^{-1}(y)`, so the
/// inversion factorizes as `x = h_branch(u)`,
/// `dx/dy = h_branch'(u) / g_eps'(u)`.
pub fn g_eps_inverse_branches(y: f64, pf: &PriceFunction) -> Result<[BranchInverse; 2]> {
    let u = g_fun_inverse(y, pf)?;
    let slope = g_fun_deriv(u, pf);
    let du_dy = if slope.is_infinite() {
        0.0
    } else {
        1.0 / slope
    };
    let [right, left] = r_inverse_branches(u);
    Ok([
        BranchInverse {
            branch: Branch::Right,
            x: right.x,
            dx_dy: right.dx_dy * du_dy,
        },
        BranchInverse {
            branch: Branch::Left,
            x: left.x,
            dx_dy: left.dx_dy * du_dy,
        },
    ])
}

/// Which forward map a pushforward refers to.
#[derive(Debug, Clone, Copy)]
pub enum PushforwardMap<'a> {
    /// `y = r(x) = x - 1/x`.
    RTransform,
    /// `y = G_eps(x)`.
    GEps(&'a PriceFunction),
}

/// Density of the image of a random variable under a two-branch map:
/// `f_out(y) = sum_branches f_in(x_b(y)) dx_b/dy`.
///
/// With `conditioned = true` the input density is taken to be supported on
/// `(0, inf)` (a quotient conditioned on positive legs), so only the right
/// branch contributes.
pub fn pushforward_density<F>(
    density: F,
    map: PushforwardMap<'_>,
    y: f64,
    conditioned: bool,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let branches = match map {
        PushforwardMap::RTransform => r_inverse_branches(y),
        PushforwardMap::GEps(pf) => g_eps_inverse_branches(y, pf)?,
    };
    let mut total = 0.0;
    for b in branches {
        if conditioned && b.branch == Branch::Left {
            continue;
        }
        total += density(b.x)? * b.dx_dy;
    }
    Ok(total)
}
