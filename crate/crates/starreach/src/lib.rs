//! File formats, plotting output, a thread-pool executor and the
//! command-line front end for `starreach-core`.

pub mod cli;
pub mod error;
pub mod nnet;
pub mod output;
pub mod parallel;
pub mod polygon;
pub mod schema;
pub mod trajectory;

pub use error::{Error, Result};
pub use starreach_core as core;
