//! Gamma function, unit-ball volumes, quadrature, and the constant `A_p`.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation (g = 7, nine terms), with
/// reflection below 1/2. Relative accuracy is about 1e-15 on the positive axis.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        let series = LANCZOS_COEFFS[1..]
            .iter()
            .enumerate()
            .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64));
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * series
    }
}

/// Volume of the unit ball in `R^n`, `π^{n/2} / Γ(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    PI.powf(half) / gamma(half + 1.0)
}

/// Surface area of the unit sphere in `R^n` (`n·ω_n`).
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Composite Simpson rule on uniformly spaced samples (an even number of intervals).
///
/// Falls back to a trapezoid on the last interval when the count is odd.
pub fn simpson_uniform(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut sum = 0.0;
    if even > 0 {
        sum += values[0] + values[even];
        for (k, v) in values.iter().enumerate().take(even).skip(1) {
            sum += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        sum *= dx / 3.0;
    }
    if even < intervals {
        sum += 0.5 * dx * (values[n - 2] + values[n - 1]);
    }
    sum
}

/// `A_p = ∫₀¹ dt / √(1 − t^p)` by quadrature after the substitution `t = 1 − s²`,
/// which turns the endpoint singularity into a bounded integrand.
pub fn a_p_quadrature(p: f64) -> f64 {
    let integrand = |s: f64| {
        if s == 0.0 {
            return 2.0 / p.sqrt();
        }
        // 1 − (1 − s²)^p without cancellation
        let gap = -(p * (-s * s).ln_1p()).exp_m1();
        2.0 * s / gap.sqrt()
    };
    adaptive_simpson(integrand, 0.0, 1.0, 1e-14)
}

/// `A_p = √π · Γ(1 + 1/p) / Γ(1/2 + 1/p)`.
pub fn a_p_gamma(p: f64) -> f64 {
    PI.sqrt() * gamma(1.0 + 1.0 / p) / gamma(0.5 + 1.0 / p)
}

/// The constant `A_p` entering the inradius bound, by quadrature.
///
/// ```
/// let a2 = ptorsion::special::a_p(2.0);
/// assert!((a2 - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
/// ```
pub fn a_p(p: f64) -> f64 {
    a_p_quadrature(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-13);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn a_p_closed_forms() {
        assert!((a_p(1.0) - 2.0).abs() < 1e-10);
        assert!((a_p(2.0) - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn a_p_routes_agree() {
        for p in [1.0, 1.5, 2.0, 3.0, 4.0, 10.0] {
            let q = a_p_quadrature(p);
            let g = a_p_gamma(p);
            assert!((q - g).abs() < 1e-9, "p = {p}: {q} vs {g}");
        }
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let n = 11;
        let dx = 1.0 / (n - 1) as f64;
        let v: Vec<f64> = (0..n).map(|k| (k as f64 * dx).powi(3)).collect();
        assert!((simpson_uniform(&v, dx) - 0.25).abs() < 1e-15);
    }
}
