//! Length-constrained multi-commodity maxflow: expanded DAG, blocking
//! flows, path blockers and the multiplicative-weights driver.

pub mod blocker;
pub mod blocking;
pub mod dag;
pub mod mwu;
