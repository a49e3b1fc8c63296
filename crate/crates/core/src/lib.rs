//! Finite-blocklength codes for simultaneous information and energy
//! transmission (SIET) over a complex AWGN channel.
//!
//! Codes are built on layered circular constellations with constant
//! composition codewords and product-of-disks decoding regions. The crate
//! evaluates the necessary conditions and achievability bounds relating
//! rate, decoding error probability (DEP), energy requirement and energy
//! outage probability (EOP), and checks them against Monte-Carlo simulation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod codebook;
pub mod constellation;
pub mod energy;
pub mod error;
pub mod simulator;
pub mod sweep;

pub use error::{Error, Result};
