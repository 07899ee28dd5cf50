#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::type_complexity)]

pub mod algebra;
pub mod error;
pub mod family;
pub mod heights;
pub mod homog;
pub mod maps;
pub mod metrics;
pub mod p2family;
pub mod par;
pub mod proj;

pub use error::{Error, Result};
