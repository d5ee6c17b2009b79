pub mod app;
pub mod error;
pub mod functional;
pub mod lattice;
pub mod numerics;
pub mod operators;
pub mod solver;
pub mod spectral;
pub mod store;
pub mod verify;

pub use error::{Error, Result};
