//! Exact certification pipeline showing that the planar equal-mass
//! three-body problem has no partially rigid motions.

pub mod checkpoint;
pub mod dynamics;
pub mod elimination;
pub mod oracle;
pub mod pipeline;
pub mod poly;
pub mod polygon;
pub mod puiseux;
pub mod solve;
