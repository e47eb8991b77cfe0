use crate::error::{Error, Result};
use crate::solver::{admissibility, Regime, CALIBRATION_LAMBDA};

use super::ode::{first_zero, integrate, State};
use super::{RadialProfile, RadialSample};

/// Fixed RK4 step for every profile integration.
pub const RK4_STEP: f64 = 1e-4;

/// Largest radius searched for the first zero of a ball shot.
const BALL_R_MAX: f64 = 100.0;

const MAX_BRACKET_DOUBLINGS: usize = 200;

/// `|u|^{p−2}u`, the odd extension of `u^{p−1}`. For `p = 1` the value at
/// zero is taken as 1, matching a solution that leaves zero upward.
pub(crate) fn odd_power(u: f64, p: f64) -> f64 {
    if p == 1.0 {
        if u >= 0.0 {
            1.0
        } else {
            -1.0
        }
    } else if u == 0.0 {
        0.0
    } else if p == 2.0 {
        u
    } else {
        u.signum() * u.abs().powf(p - 1.0)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("p must be a finite real >= 1, got {p}")))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")))
    }
}

/// Bisection on a monotone sign change of `g`, expanding geometrically from
/// `x0`. `g` returns `None` when its shot has no zero, which counts as
/// overshooting in the direction given by `none_is_positive`.
fn bisect<G: Fn(f64) -> Option<f64>>(g: G, x0: f64, none_is_positive: bool, tol: f64) -> Result<f64> {
    let sign = |x: f64| g(x).map_or(none_is_positive, |v| v > 0.0);
    let s0 = sign(x0);
    let (mut lo, mut hi) = (x0, x0);
    let mut found = false;
    for _ in 0..MAX_BRACKET_DOUBLINGS {
        lo *= 0.5;
        hi *= 2.0;
        if sign(lo) != s0 {
            hi = 2.0 * lo;
            found = true;
            break;
        }
        if sign(hi) != s0 {
            lo = 0.5 * hi;
            found = true;
            break;
        }
    }
    if !found {
        return Err(Error::NoBracket);
    }
    let s_lo = sign(lo);
    for _ in 0..400 {
        if hi - lo <= tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if sign(mid) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// State one step `ξ` after leaving zero with slope `s`, from the local series
/// `u = sξ − Λs^{p−1}ξ^{p+1}/(p(p+1)) + Λ²(p−1)s^{2p−3}ξ^{2p+1}/(2p²(p+1)(2p+1))`.
/// RK4 loses accuracy on that first step when `1 < p < 2`, where `u^{p−1}` is
/// not differentiable at zero.
fn slab_start(slope: f64, lam: f64, p: f64, xi: f64) -> State {
    let a = lam * slope.powf(p - 1.0) / p;
    let b = lam * lam * (p - 1.0) * slope.powf(2.0 * p - 3.0) / (2.0 * p * p * (p + 1.0));
    [
        slope * xi - a * xi.powf(p + 1.0) / (p + 1.0) + b * xi.powf(2.0 * p + 1.0) / (2.0 * p + 1.0),
        slope - a * xi.powf(p) + b * xi.powf(2.0 * p),
    ]
}

/// Solves `u'' + Λu^{p−1} = 0`, `u(±1) = 0`, `u > 0` by shooting from `x = −1`.
///
/// For `p ≠ 2` the slope `u'(−1)` is bisected until the first zero lands at
/// `x = 1`. For `p = 2` the problem is linear, so `Λ` is bisected instead
/// (starting from the supplied value) and the profile is normalized to
/// `max u = 1`. The returned profile has `n = 1`; its right half is the
/// mirror image of the left, as uniqueness for the ODE forces.
pub fn solve_slab(p: f64, lambda: f64, tol: f64) -> Result<RadialProfile> {
    check_p(p)?;
    check_tol(tol)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    let zero_tol = 1e-15;
    let zero_at = |slope: f64, lam: f64, dt: f64| {
        let f = move |_x: f64, y: State| [y[1], -lam * odd_power(y[0], p)];
        first_zero(&f, -1.0 + dt, slab_start(slope, lam, p, dt), dt, 3.0, zero_tol)
    };
    let (slope, lam) = if p == 2.0 {
        // the zero moves left as Λ grows
        let lam = bisect(|l| zero_at(1.0, l, RK4_STEP).map(|z| 1.0 - z), lambda, false, tol)?;
        (1.0, lam)
    } else {
        let increasing = p < 2.0;
        let g = |s: f64| zero_at(s, lambda, RK4_STEP).map(|z| if increasing { z - 1.0 } else { 1.0 - z });
        (bisect(g, lambda.sqrt(), increasing, tol)?, lambda)
    };
    let z = zero_at(slope, lam, RK4_STEP).ok_or(Error::NoZeroFound { r_max: 3.0 })?;
    let z_half = zero_at(slope, lam, 0.5 * RK4_STEP).ok_or(Error::NoZeroFound { r_max: 3.0 })?;

    // left half from the series start, then mirrored about the maximum at x = 0;
    // this also keeps the nonsmooth arrival at u = 0 out of the samples
    let f = move |_x: f64, y: State| [y[1], -lam * odd_power(y[0], p)];
    let half = (1.0 / RK4_STEP).round() as usize;
    let dx = 1.0 / half as f64;
    let path = integrate(&f, 0.0, slab_start(slope, lam, p, dx), dx, half - 1);
    let mut left = vec![RadialSample { r: -1.0, u: 0.0, u_prime: slope }];
    left.extend(path.iter().enumerate().map(|(k, &(_, y))| RadialSample {
        r: -1.0 + (k + 1) as f64 * dx,
        u: y[0],
        u_prime: y[1],
    }));
    left[half].r = 0.0;
    let mut samples = left.clone();
    samples.extend(left.iter().rev().skip(1).map(|s| RadialSample { r: -s.r, u: s.u, u_prime: -s.u_prime }));
    if p == 2.0 {
        let m = samples.iter().map(|s| s.u).fold(f64::NEG_INFINITY, f64::max);
        for s in &mut samples {
            s.u /= m;
            s.u_prime /= m;
        }
    }
    Ok(RadialProfile { n: 1, p, lambda: lam, samples, first_zero: z, step_error: (z - z_half).abs() })
}

/// Positive radial solution on the unit ball in `R^n`.
///
/// Shoots `u'' + ((n−1)/r)u' + u^{p−1} = 0` from `u(0) = 1`, `u'(0) = 0` to
/// its first zero `r₀`, then rescales `r ↦ r₀r`, which gives the multiplier
/// `Λ = r₀²` with the zero at `r = 1`. For `p = 2` this is the principal
/// eigenvalue with `max u = 1`; otherwise the profile is calibrated to
/// `Λ = 2`. Critical and supercritical exponents are refused.
pub fn shoot_ball(n: usize, p: f64, tol: f64) -> Result<RadialProfile> {
    check_p(p)?;
    check_tol(tol)?;
    if n < 2 {
        return Err(Error::InvalidInput(format!("ball dimension must be at least 2, got {n}")));
    }
    let adm = admissibility(n, p);
    if adm.regime != Regime::Subcritical {
        return Err(Error::SupercriticalRefused { n, p, regime: adm.regime });
    }
    let m = (n - 1) as f64;
    let nf = n as f64;
    let rhs = move |lam: f64| {
        move |r: f64, y: State| {
            let force = lam * odd_power(y[0], p);
            // regular start: u''(0) = −Λu(0)^{p−1}/n
            let acc = if r == 0.0 { -force / nf } else { -m / r * y[1] - force };
            [y[1], acc]
        }
    };
    let r0 = first_zero(&rhs(1.0), 0.0, [1.0, 0.0], RK4_STEP, BALL_R_MAX, tol.min(1e-15))
        .ok_or(Error::NoZeroFound { r_max: BALL_R_MAX })?;
    let r0_half = first_zero(&rhs(1.0), 0.0, [1.0, 0.0], 0.5 * RK4_STEP, BALL_R_MAX, tol.min(1e-15))
        .ok_or(Error::NoZeroFound { r_max: BALL_R_MAX })?;
    let lam = r0 * r0;

    let f = rhs(lam);
    let steps = (1.0 / RK4_STEP).round() as usize;
    let path = integrate(&f, 0.0, [1.0, 0.0], 1.0 / steps as f64, steps);
    let z = first_zero(&f, 0.0, [1.0, 0.0], RK4_STEP, 2.0, tol.min(1e-15)).ok_or(Error::NoZeroFound { r_max: 2.0 })?;
    let samples = path.iter().map(|&(r, y)| RadialSample { r, u: y[0], u_prime: y[1] }).collect();
    let profile =
        RadialProfile { n, p, lambda: lam, samples, first_zero: z, step_error: (r0_half * r0_half - lam).abs() };
    Ok(if p == 2.0 { profile } else { profile.calibrated(CALIBRATION_LAMBDA) })
}
