//! Curves of prescribed gonality and genus with many rational points,
//! built from lattice polygons and certified by exact arithmetic.

pub mod algebra;
pub mod construct;
pub mod curve;
pub mod density;
pub mod lattice;
pub mod verify;
