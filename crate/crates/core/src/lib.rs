pub mod elliptic;
pub mod error;
pub mod identities;
pub mod mesh;
pub mod period;
pub mod quadrature;
pub mod symmetry;
pub mod verify;
pub mod weierstrass;

pub use error::{Error, Result};
pub use num_complex::Complex64;
