#![no_std]

extern crate alloc;

pub mod error;
pub mod factorization;
pub mod kernel;
pub mod mat;
pub mod optim;
pub mod param;
pub mod sample;
pub mod symplectic;

pub use error::{Error, Result};
pub use mat::{mat_mul, Mat};
