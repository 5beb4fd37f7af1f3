pub mod cli;
pub mod diagram;
pub mod error;
pub mod ext;
pub mod linalg;
pub mod module_cat;
pub mod rng;
pub mod ses;
pub mod subfunctor;
pub mod suite;

pub use error::{Error, Result};
