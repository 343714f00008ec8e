pub mod amp;
pub mod corpus;
pub mod detect;
pub mod error;
pub mod linalg;
pub mod qsat;
pub mod report;
pub mod sweep;
pub mod walks;
pub mod xy;

pub use error::{Error, Result};
