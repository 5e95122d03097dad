// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anfis;
pub mod harness;
pub mod metrics;
pub mod simnet;
pub mod trust;
