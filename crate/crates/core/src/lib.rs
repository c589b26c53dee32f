//! Doubly pipelined, dual-root binary-tree allreduce.
//!
//! The crate is `no_std` (it needs `alloc`) and holds everything that is pure
//! computation: the dual post-order tree topology, the block partition, the
//! reduction operators and their sequential oracle, the per-rank protocol
//! state machines, a deterministic lock-step transport simulator, and the
//! closed-form alpha-beta cost model.
//!
//! IO, file formats, the command line and the threaded executor live in the
//! `allreduce-sim` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blocks;
pub mod costmodel;
pub mod error;
pub mod protocol;
pub mod reducer;
pub mod topology;
pub mod transport;

pub use blocks::BlockPartition;
pub use costmodel::CostParams;
pub use error::{Error, Result};
pub use protocol::{Algorithm, DualOrientation, RunOptions, RunOutcome, RunReport};
pub use reducer::{Affine, Mat2, Max, Reducer, WrappingSum};
pub use topology::{Rank, TreeId, TreeTopology};
pub use transport::{RankProgram, Simulator};
