pub mod bloch;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod hankel;
pub mod integrate;
pub mod oscillation;
pub mod report;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
