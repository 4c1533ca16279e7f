pub mod disorder;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod geometry;
pub mod glauber;
pub mod graph;
pub mod groundstate;
pub mod loopdyn;
pub mod rng;
pub mod spin;

pub use error::{Error, Result};
