//! Test-only oracles and fixtures, kept independent of the library's own
//! solver, counting, and metric code.
#![allow(dead_code)]

pub mod bws_sim;
pub mod fixtures;
pub mod kkt;
pub mod pearson;
pub mod qp;
