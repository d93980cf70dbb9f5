//! Kirkwood-Dirac (KD) frame representations of finite-dimensional quantum
//! processes.
//!
//! A KD frame is built from two orthonormal bases with nowhere-vanishing
//! cross overlaps. States, measurement effects and channels map to complex
//! quasiprobability vectors/matrices over pairs of basis indices; the crate
//! provides the forward maps, their reconstructions, numerical checks of the
//! structural identities (composition, normalization, substochasticity),
//! nonnegativity certification of process fragments, and derivative-free
//! search over basis choices.
//!
//! Everything is dense `nalgebra` algebra at small dimension, deterministic
//! under explicit seeds, and immutable after construction.

pub mod config;
pub mod error;
pub mod frame;
pub mod qops;
pub mod repr;
pub mod search;
pub mod verify;

pub use config::Config;
pub use error::{KdError, Result};
