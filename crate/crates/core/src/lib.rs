//! Reachability core: an LP solver, star and zonotope sets, ReLU network
//! reachability, safety checking, and closed-loop analysis of neural network
//! control systems with discrete linear plants.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exec;
pub mod linalg;
pub mod lp;
pub mod nn;
pub mod nncs;
pub mod reach;
pub mod safety;
pub mod set;

pub use error::{Error, Result};
