//! Std front end for `lcflow-core`: text and JSON formats, instance
//! generators, solver dispatch and the corpus runner used by the `lcflow`
//! binary.

pub mod commands;
pub mod format;
pub mod gen;
pub mod json;
pub mod suite;
