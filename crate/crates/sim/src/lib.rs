//! Command-line driver, file formats and a threaded executor for
//! [`allreduce_core`].

pub mod bench;
pub mod error;
pub mod format;
pub mod ops;
pub mod threaded;

pub use allreduce_core as core;
pub use error::SimError;
