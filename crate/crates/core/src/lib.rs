//! Optimal authentication codes with perfect multi-fold secrecy, built
//! from Steiner designs.
//!
//! The pipeline: construct a Steiner t-design ([`designs`], [`exactcover`]),
//! order its blocks into an encoding matrix whose column statistics are
//! uniform ([`ordering`]), wrap the matrix into an authentication code
//! with uniform encoding strategy ([`authcode`]), and verify every
//! security claim by exact rational computation ([`audit`]): deception
//! probabilities against the combinatorial lower bound, rule-count
//! optimality, and perfect multi-fold secrecy.

pub mod audit;
pub mod authcode;
pub mod designs;
pub mod error;
pub mod exactcover;
pub mod ordering;
pub mod util;

pub use error::{Error, Result};
