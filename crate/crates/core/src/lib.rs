pub mod analysis;
pub mod cli;
pub mod artinhasse;
pub mod cyclo;
pub mod dwork;
pub mod error;
pub mod field;
pub mod lfun;
pub mod linalg;
pub mod scalar;
pub mod series;
pub mod tower;

pub use cyclo::{ExactCyclo, TruncCyclo};
pub use dwork::DworkSeries;
pub use error::{Error, Result};
pub use scalar::{Scalar, Valuation, Zpm};

/// Power series in `s` over `Q`, truncated.
pub type RatSeries = series::TruncSeries<num_rational::BigRational>;
