pub mod algebra;
pub mod bench;
pub mod bernstein;
pub mod error;
pub mod krivine;
pub mod lp;
pub mod par;
pub mod report;
pub mod round_model;

pub use error::{Error, Result};
