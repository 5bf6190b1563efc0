pub mod branch;
pub mod certify;
pub mod singular;
pub mod space;
