// `!(x > 0.0)` guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod error;
pub mod exitwalk;
pub mod field;
pub mod geometry;
pub mod inequalities;
pub mod radial;
pub mod solver;
pub mod special;
pub mod symmetrize;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grid-solves.md")]
    mod grid_solves {}
    #[doc = include_str!("../../../book/src/radial.md")]
    mod radial {}
    #[doc = include_str!("../../../book/src/phase-portraits.md")]
    mod phase_portraits {}
    #[doc = include_str!("../../../book/src/rearrangement.md")]
    mod rearrangement {}
    #[doc = include_str!("../../../book/src/exit-times.md")]
    mod exit_times {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
