//! Slab and ball reductions solved as ODEs, the energy functions of the
//! associated planar systems, and their level-set portraits.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::special::{simpson_uniform, unit_sphere_area};

pub mod energy;
pub mod ode;
pub mod portrait;
mod shooting;

pub use crate::special::a_p;
pub use energy::{
    ball_critical_trajectory, energy_ball_critical, energy_slab, slab_trajectory, trajectory_drift, Variant,
};
pub use portrait::{phase_portrait, LevelSetData, PortraitParams, PortraitSystem, Window};
pub use shooting::{shoot_ball, solve_slab, RK4_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSample {
    pub r: f64,
    pub u: f64,
    pub u_prime: f64,
}

/// A positive solution of `u'' + ((n−1)/r)u' + Λu^{p−1} = 0` on the unit
/// ball, or of `u'' + Λu^{p−1} = 0` on `[−1, 1]` when `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
    /// Uniform samples on `[0, 1]` (ball) or `[−1, 1]` (slab).
    pub samples: Vec<RadialSample>,
    /// First zero of the computed profile, located by root refinement; 1 up to the tolerance.
    pub first_zero: f64,
    /// Change in the shooting result when the RK4 step is halved.
    pub step_error: f64,
}

impl RadialProfile {
    pub fn u_max(&self) -> f64 {
        self.samples.iter().map(|s| s.u).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_slab(&self) -> bool {
        self.n == 1
    }

    /// The same solution rescaled to satisfy `Δv + target·v^{p−1} = 0`.
    /// For `p = 2` the equation is linear and the profile is returned unchanged.
    pub fn calibrated(&self, target: f64) -> RadialProfile {
        if self.p == 2.0 {
            return self.clone();
        }
        let k = (target / self.lambda).powf(1.0 / (2.0 - self.p));
        RadialProfile {
            lambda: target,
            samples: self
                .samples
                .iter()
                .map(|s| RadialSample { r: s.r, u: k * s.u, u_prime: k * s.u_prime })
                .collect(),
            ..self.clone()
        }
    }

    /// `∫u^p dV` over the unit ball (or the interval for a slab).
    pub fn lp_integral(&self) -> f64 {
        let dr = self.samples[1].r - self.samples[0].r;
        let p = self.p;
        if self.is_slab() {
            let v: Vec<f64> = self.samples.iter().map(|s| s.u.max(0.0).powf(p)).collect();
            simpson_uniform(&v, dr)
        } else {
            let m = self.n as i32 - 1;
            let v: Vec<f64> = self.samples.iter().map(|s| s.u.max(0.0).powf(p) * s.r.powi(m)).collect();
            unit_sphere_area(self.n) * simpson_uniform(&v, dr)
        }
    }

    /// Writes `r,u,u_prime` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,u,u_prime")?;
        for s in &self.samples {
            writeln!(out, "{:.17e},{:.17e},{:.17e}", s.r, s.u, s.u_prime)?;
        }
        Ok(())
    }
}

/// `Λ (∫u^p dV)^{(p−2)/p}` from the stored samples by composite Simpson.
pub fn radial_c_p(profile: &RadialProfile) -> f64 {
    let p = profile.p;
    profile.lambda * profile.lp_integral().powf((p - 2.0) / p)
}

/// `(4/Λ) (∫u^p dV)^{(2−p)/p}`.
pub fn radial_r_p(profile: &RadialProfile) -> f64 {
    let p = profile.p;
    4.0 / profile.lambda * profile.lp_integral().powf((2.0 - p) / p)
}
