//! Discrete decreasing rearrangement onto a lattice disk.
//!
//! Values are sorted and laid out along a center-out spiral, so the result
//! has the same value multiset as the input and every superlevel set has the
//! same cell count as the original one.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::GridField;
use crate::geometry::GridMask;

/// `h² · #{cells with u > t}`.
pub fn distribution_volume(u: &GridField, t: f64) -> f64 {
    let h = u.h();
    h * h * u.values().iter().filter(|&&v| v > t).count() as f64
}

/// A decreasing rearrangement and the disk it lives on.
#[derive(Debug, Clone)]
pub struct RearrangedField {
    /// Interior cell count of the source (and of the target disk).
    pub cell_count: usize,
    pub h: f64,
    /// `(radius, value)` in spiral order; values are nonincreasing.
    pub radial_values: Vec<(f64, f64)>,
    /// The rearranged values on the lattice disk.
    pub field: GridField,
}

impl RearrangedField {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "radius,value")?;
        for (r, v) in &self.radial_values {
            writeln!(out, "{r:.17e},{v:.17e}")?;
        }
        Ok(())
    }
}

/// The `count` lattice points closest to the origin, ordered by radius and
/// then by angle in `[0, 2π)`.
pub fn spiral_cells(count: usize) -> Vec<(i64, i64)> {
    let reach = ((count as f64 / std::f64::consts::PI).sqrt()).ceil() as i64 + 2;
    let mut cells: Vec<(i64, i64)> = (-reach..=reach).flat_map(|i| (-reach..=reach).map(move |j| (i, j))).collect();
    let angle = |&(i, j): &(i64, i64)| (j as f64).atan2(i as f64).rem_euclid(std::f64::consts::TAU);
    cells.sort_by(|a, b| {
        (a.0 * a.0 + a.1 * a.1)
            .cmp(&(b.0 * b.0 + b.1 * b.1))
            .then(angle(a).total_cmp(&angle(b)))
    });
    cells.truncate(count);
    cells
}

/// Decreasing rearrangement of a nonnegative field.
pub fn rearrange(u: &GridField) -> Result<RearrangedField> {
    let min = u.min();
    if min < 0.0 {
        return Err(Error::NegativeField { min });
    }
    let h = u.h();
    let count = u.values().len();
    let cells = spiral_cells(count);
    let m = cells.iter().map(|&(i, j)| i.abs().max(j.abs())).max().unwrap_or(0) + 1;
    let side = (2 * m + 1) as usize;
    let mut occupancy = vec![false; side * side];
    for &(i, j) in &cells {
        occupancy[(j + m) as usize * side + (i + m) as usize] = true;
    }
    let mask = Arc::new(GridMask::new(h, (-m, -m), side, side, occupancy)?);

    let mut sorted = u.values().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut values = vec![0.0; count];
    let mut radial_values = Vec::with_capacity(count);
    for (&(i, j), &v) in cells.iter().zip(&sorted) {
        let k = mask.lattice_index(i, j).expect("spiral cell lies in the mask");
        values[k] = v;
        radial_values.push((h * ((i * i + j * j) as f64).sqrt(), v));
    }
    Ok(RearrangedField { cell_count: count, h, radial_values, field: GridField::new(mask, values)? })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;
    use crate::field::{dirichlet_energy, lp_norm_p, poisson_solve};
    use crate::geometry::{rasterize, DomainSpec};
    use crate::solver::{solve_eigen, SolveOptions};

    fn disk(h: f64) -> Arc<GridMask> {
        Arc::new(rasterize(&DomainSpec::Disk { radius: 1.0 }, h).unwrap())
    }

    #[test]
    fn distribution_volume_edges() {
        let u = GridField::from_fn(disk(1.0 / 32.0), |x, y| 1.0 + x * x + y * y);
        let full = u.values().len() as f64 / 1024.0;
        assert_eq!(distribution_volume(&u, -1.0), full);
        assert_eq!(distribution_volume(&u, u.max()), 0.0);
    }

    #[test]
    fn torsion_level_set_volume() {
        // the discrete torsion function behaves like an effective radius 1 + 0.3h
        let mask = disk(1.0 / 128.0);
        let u = poisson_solve(&GridField::constant(Arc::clone(&mask), 2.0), 1e-12).unwrap();
        let v = distribution_volume(&u, 0.25);
        assert!((v - PI / 2.0).abs() < 0.02 * PI / 2.0, "{v}");
    }

    #[test]
    fn radial_field_is_a_fixed_point() {
        let mask = disk(1.0 / 32.0);
        let u = GridField::from_fn(Arc::clone(&mask), |x, y| 1.0 - x * x - y * y);
        let r = rearrange(&u).unwrap();
        assert_eq!(r.field.mask().len(), mask.len());
        for k in 0..mask.len() {
            let (li, lj) = mask.lattice(k);
            let j = r.field.mask().lattice_index(li, lj).expect("same disk");
            assert!((r.field.values()[j] - u.values()[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn polya_szego_on_square_eigenfunction() {
        let h = 1.0 / 64.0;
        let square = Arc::new(rasterize(&DomainSpec::Rectangle { half_widths: [1.0, 1.0] }, h).unwrap());
        let u = solve_eigen(&square, 2.0, &SolveOptions::default()).unwrap().u;
        let r = rearrange(&u).unwrap();
        let before = dirichlet_energy(&u) / lp_norm_p(&u, 2.0).unwrap();
        let after = dirichlet_energy(&r.field) / lp_norm_p(&r.field, 2.0).unwrap();
        assert!(after <= before * 1.05, "{after} vs {before}");
        // the rearranged field is a test function on its disk
        let disk_eig = solve_eigen(r.field.mask(), 2.0, &SolveOptions::default()).unwrap().lambda;
        assert!(after >= disk_eig * (1.0 - 1e-9));
    }

    #[test]
    fn negative_fields_are_rejected() {
        let u = GridField::from_fn(disk(1.0 / 16.0), |x, _| x);
        assert!(matches!(rearrange(&u), Err(Error::NegativeField { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn rearrangement_preserves_norms_and_order(seed in 0u64..1000) {
            let mask = disk(1.0 / 16.0);
            let u = crate::solver::random_positive_field(&mask, seed);
            let r = rearrange(&u).unwrap();
            prop_assert_eq!(r.cell_count, mask.len());
            prop_assert!(r.radial_values.windows(2).all(|w| w[0].1 >= w[1].1));
            prop_assert!(r.radial_values.windows(2).all(|w| w[0].0 <= w[1].0));
            for q in [1.0, 1.5, 2.0, 3.0] {
                let a = lp_norm_p(&u, q).unwrap();
                let b = lp_norm_p(&r.field, q).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a);
            }
            for t in [0.2, 0.5, 0.9] {
                prop_assert_eq!(distribution_volume(&u, t), distribution_volume(&r.field, t));
            }
        }
    }
}
