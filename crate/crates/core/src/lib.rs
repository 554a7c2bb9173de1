pub mod activation;
pub mod error;
pub mod harness;
pub mod link_budget;
pub mod propagation;
pub mod rng;
pub mod route_planner;
pub mod scenario;

pub use error::{Error, Result};
