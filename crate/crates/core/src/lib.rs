#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod boosting;
pub mod cover;
pub mod cuts;
pub mod decompose;
pub mod demand;
pub mod error;
pub mod flow;
pub mod graph;
pub mod lowstep;
pub mod maxflow;
pub mod num;
pub mod oracle;
pub mod round;

pub use error::{Error, Result};
pub use num::Rational;
