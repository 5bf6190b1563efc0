//! Exact computations around the deformation classification of empty real
//! Enriques surfaces: integral lattices with involutions, (ℤ/2)²-actions on
//! quadrics, and certified membership in the space of symmetric branch
//! curves of bidegree (4,4).

pub mod json;
pub mod lattice;
pub mod involution;
pub mod matrix;
pub mod model;
pub mod poly;
pub mod quadric;
