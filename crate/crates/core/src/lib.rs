//! Verification of reasoning chains against first-order premises.

pub mod batch;
pub mod engine;
pub mod fol;
pub mod harness;
pub mod metrics;
pub mod mutator;
pub mod nl2fol;
pub mod tptp;
pub mod verifier;
