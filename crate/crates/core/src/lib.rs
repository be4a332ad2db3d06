pub mod cli;
pub mod error;
pub mod dtp;
pub mod family;
pub mod inference;
pub mod measures;
pub mod numerics;
pub mod priors;

pub use error::{Error, Result};
