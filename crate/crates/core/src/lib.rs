//! Control-pulse synthesis and forward simulation for a single emitter
//! coupled to a surface-plasmon waveguide, and quantum-state transfer
//! between two such nodes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod network;
pub mod sensitivity;
pub mod synthesis;
pub mod wavepacket;

pub use error::{Error, Result};
