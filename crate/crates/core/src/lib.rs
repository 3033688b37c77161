//! Time-resolved boson sampling with spectrally distinct photons.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod correlation;
pub mod error;
pub mod grid;
pub mod matrix;
pub mod network;
pub mod permanent;
pub mod protocol;
pub mod sampler;
pub mod wavepacket;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64 as C64;
