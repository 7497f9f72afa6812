//! Numerical laboratory for semiclassical parametrices of gravity-capillary
//! water waves and the Strichartz estimates they imply.

pub mod dispersive;
pub mod error;
pub mod paradiff;
pub mod parametrix;
pub mod semiclassical;
pub mod spectral;
pub mod util;
pub mod ww_symbols;

pub use error::{Error, Result};
