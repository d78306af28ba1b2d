pub mod error;
pub mod linalg;
pub mod measures;

pub use error::{Error, Result};
pub mod rates;
pub mod gates;
pub mod powers;
pub mod cgp;
pub mod bounds;
pub mod random;
