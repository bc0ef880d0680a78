// `!(x <= tol)` is used on purpose so that NaN deviations fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod cli;
pub mod dirac_chiral;
pub mod ensembles;
pub mod error;
pub mod groups;
pub mod io;
pub mod linalg;
pub mod nambu;
pub mod spectra;
pub mod symmetric_space;
pub mod verify;

pub use error::{Error, Result};
