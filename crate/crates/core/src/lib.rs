pub mod cli;
pub mod error;
pub mod evolution;
pub mod ledger;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod photostat;
pub mod propagator;
pub mod special_fn;
pub mod validation;

pub use error::{Error, Result};
