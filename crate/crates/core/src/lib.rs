pub mod codebuild;
pub mod decode;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod keyagree;
pub mod reliability;
pub mod sim;

pub use error::{Error, Result};
