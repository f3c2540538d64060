pub mod broadcast;
pub mod classicality;
pub mod corpus;
pub mod error;
pub mod frames;
pub mod linalg;
pub mod measures;
pub mod objects;
pub mod random;
pub mod recovery;
pub mod sdp;

pub use error::{Error, Result};
pub use num_complex::Complex64;
