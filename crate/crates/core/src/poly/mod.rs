//! Exact polynomial algebra: univariate and bivariate polynomials over ℚ,
//! resultants, computation in products of number fields with dynamic
//! splitting, and classification of plane curve germs.

pub mod bipoly;
pub mod field;
pub mod germ;
pub mod milnor;
pub mod resultant;
pub mod upoly;
