pub mod error;
pub mod limitlaw;
pub mod lommel;
mod mp;
pub mod scaled;
pub mod specfun;
pub mod spectra;
pub mod validate;

pub use error::{Error, Result};
pub use scaled::ScaledValue;
pub use specfun::{Alpha, ComplexValue};
