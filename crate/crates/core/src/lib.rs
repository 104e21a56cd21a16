pub mod corpus;
pub mod error;
pub mod index;
pub mod oracle;
pub mod parsing;
pub mod patricia;
pub mod selftest;
mod serial;
pub mod succinct;
mod suffix;

pub use error::{Error, LoadError, Result};
