//! Exact enumeration of rational plane tropical curves through point and
//! line conditions, and a recursion for relative broccoli invariants.

pub mod ch;
pub mod cli;
pub mod curve;
pub mod enumerate;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod seq;
pub mod svg;

pub use error::Error;
