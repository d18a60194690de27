#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimator;
pub mod io;
pub mod lasso;
pub mod moment;
pub mod nuisance;
pub mod simulate;
pub mod stats;
pub mod transform;

pub use error::{Error, Result};
