//! Planar dynamics laboratory: exact algebra, certified intervals, adaptive
//! integration, return maps, stability statistics and integer sequences.

pub mod algebra;
pub mod error;
pub mod flow;
pub mod interval;
pub mod numeric;
pub mod cycles;
pub mod dulac;
pub mod scalar;
pub mod pwl;
pub mod stability;
pub mod geometry;
pub mod seq;
pub mod builtins;
pub mod verify;

pub use error::{Error, Result};
