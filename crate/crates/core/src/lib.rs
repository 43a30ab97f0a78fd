//! Coherent information and quantum-capacity lower bounds for the
//! generalized erasure channel with polarization-dependent losses.
//!
//! Entropies and rates are in bits throughout.

pub mod channel;
pub mod cli;
pub mod closedform;
pub mod error;
pub mod qmatrix;
pub mod region;
pub mod states;

pub use channel::{classify, ChannelParams, Classification};
pub use closedform::{solve_q1, Q1Solution, SuperadditivityReport};
pub use error::{Error, Result};
pub use qmatrix::{Basis, DensityMatrix, Level};
pub use states::{DiagonalQubitState, Polarization};
