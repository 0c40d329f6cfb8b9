pub mod distributions;
pub mod divergence;
pub mod error;
pub mod experiments;
pub mod forecasting;
pub mod mcmc;
pub mod prior;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod special;

pub use distributions::{Family, TwoPieceParams};
pub use error::{Error, Result};
pub use prior::TailPrior;
