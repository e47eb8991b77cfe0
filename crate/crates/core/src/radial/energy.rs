//! Energy functions of the slab and critical-ball planar systems, with RK4
//! trajectories for checking conservation.

use serde::{Deserialize, Serialize};

use super::ode::{integrate, State};
use super::shooting::odd_power;

/// Which form of the critical-ball energy to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Quadratic coefficient `−(n−2)²/2`, as the energy is commonly printed.
    Printed,
    /// Quadratic coefficient `−(n−2)²/8`, the first integral of
    /// `v̈ − ((n−2)/2)² v + Λ v^{(n+2)/(n−2)} = 0`.
    Conserved,
}

/// `E = (u')² + (2Λ/p)|u|^p`. For `u ≥ 0` this is the printed formula; the
/// absolute value extends it evenly so portraits can include `u < 0`.
pub fn energy_slab(u: f64, u_prime: f64, p: f64, lambda: f64) -> f64 {
    u_prime * u_prime + 2.0 * lambda / p * u.abs().powf(p)
}

/// Energy of the critical ball system in the variable `v(t)`, `t = −log r`.
///
/// # Panics
/// When `n < 3`, where the critical exponent is infinite.
pub fn energy_ball_critical(v: f64, v_dot: f64, n: usize, lambda: f64, variant: Variant) -> f64 {
    assert!(n >= 3, "critical ball energy needs n >= 3");
    let k = n as f64 - 2.0;
    let q = 2.0 * n as f64 / k;
    let quad = match variant {
        Variant::Printed => k * k / 2.0,
        Variant::Conserved => k * k / 8.0,
    };
    0.5 * v_dot * v_dot - quad * v * v + k * lambda / (2.0 * n as f64) * v.abs().powf(q)
}

/// `(x, u, u')` along `u'' = −Λ|u|^{p−2}u`.
pub fn slab_trajectory(u0: f64, u_prime0: f64, p: f64, lambda: f64, length: f64, step: f64) -> Vec<[f64; 3]> {
    let f = move |_x: f64, y: State| [y[1], -lambda * odd_power(y[0], p)];
    let steps = (length / step).round().max(1.0) as usize;
    integrate(&f, 0.0, [u0, u_prime0], length / steps as f64, steps)
        .into_iter()
        .map(|(x, y)| [x, y[0], y[1]])
        .collect()
}

/// `(t, v, v̇)` along `v̈ = ((n−2)/2)² v − Λ|v|^{4/(n−2)} v`.
pub fn ball_critical_trajectory(v0: f64, v_dot0: f64, n: usize, lambda: f64, length: f64, step: f64) -> Vec<[f64; 3]> {
    let k = (n as f64 - 2.0) / 2.0;
    let q = 2.0 * n as f64 / (n as f64 - 2.0);
    let f = move |_t: f64, y: State| [y[1], k * k * y[0] - lambda * odd_power(y[0], q)];
    let steps = (length / step).round().max(1.0) as usize;
    integrate(&f, 0.0, [v0, v_dot0], length / steps as f64, steps)
        .into_iter()
        .map(|(t, y)| [t, y[0], y[1]])
        .collect()
}

/// `max E − min E` of an energy evaluated along `(·, a, b)` samples.
pub fn trajectory_drift(path: &[[f64; 3]], energy: impl Fn(f64, f64) -> f64) -> f64 {
    let (lo, hi) = path
        .iter()
        .map(|s| energy(s[1], s[2]))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)));
    hi - lo
}
