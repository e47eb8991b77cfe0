//! Fixed-step RK4 for planar first-order systems and first-zero location.

pub type State = [f64; 2];

/// One classical Runge–Kutta step of `y' = f(t, y)`.
pub fn rk4_step<F: Fn(f64, State) -> State>(f: &F, t: f64, y: State, dt: f64) -> State {
    let add = |y: State, k: State, s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * dt, add(y, k1, 0.5 * dt));
    let k3 = f(t + 0.5 * dt, add(y, k2, 0.5 * dt));
    let k4 = f(t + dt, add(y, k3, dt));
    [
        y[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Samples `(t, y)` on `t0, t0 + dt, …, t0 + steps·dt`. Grid points are
/// computed as `t0 + k·dt` so the last one is exact.
pub fn integrate<F: Fn(f64, State) -> State>(f: &F, t0: f64, y0: State, dt: f64, steps: usize) -> Vec<(f64, State)> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push((t0, y));
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        y = rk4_step(f, t, y, dt);
        out.push((t0 + (k + 1) as f64 * dt, y));
    }
    out
}

/// Position where `y[0]` first changes sign from positive to nonpositive.
///
/// Integrates with step `dt` up to `t_max`; inside the bracketing step the
/// zero is refined by bisection on the length of a single RK4 substep, so the
/// result carries only the integrator error. `None` when no zero occurs.
pub fn first_zero<F: Fn(f64, State) -> State>(f: &F, t0: f64, y0: State, dt: f64, t_max: f64, tol: f64) -> Option<f64> {
    let mut t = t0;
    let mut y = y0;
    let mut k = 0usize;
    while t < t_max {
        let next = rk4_step(f, t, y, dt);
        if next[0] <= 0.0 {
            let (mut lo, mut hi) = (0.0, dt);
            for _ in 0..200 {
                if hi - lo <= tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if rk4_step(f, t, y, mid)[0] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(t + 0.5 * (lo + hi));
        }
        y = next;
        k += 1;
        t = t0 + k as f64 * dt;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_zero_is_half_pi() {
        let f = |_t: f64, y: State| [y[1], -y[0]];
        let z = first_zero(&f, 0.0, [1.0, 0.0], 1e-3, 10.0, 1e-14).unwrap();
        assert!((z - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn integrate_hits_endpoint_exactly() {
        let f = |_t: f64, y: State| [y[1], 0.0];
        let path = integrate(&f, -1.0, [0.0, 1.0], 1e-4, 20000);
        assert_eq!(path.last().unwrap().0, 1.0);
        assert!((path.last().unwrap().1[0] - 2.0).abs() < 1e-12);
    }
}
