//! Amplitudes of fermionic Gaussian pure states in arbitrary local Pauli
//! bases.
//!
//! A Gaussian pure state on `L` sites is stored as a complex skew-symmetric
//! matrix `R`; its amplitude on any product-basis outcome string is a single
//! Pfaffian of an `L x L` (or `(L+1) x (L+1)` for odd `L`) matrix. On top of
//! that kernel the crate provides outcome probabilities, Shannon-Renyi
//! entropies, post-measurement entanglement of unmeasured regions, transverse
//! field Ising ground states, and a dense brute-force oracle for testing.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod amplitude;
pub mod basis;
pub mod error;
mod linalg;
pub mod models;
pub mod oracle;
pub mod postmeasure;
pub mod probentropy;
pub mod recursion;
pub mod skewlin;
pub mod state;

pub use amplitude::{
    amplitude, amplitude_m_form, amplitude_tan_form, domain_wall_amplitude, AmplitudeRequest,
    EvalPath,
};
pub use basis::{parse_configuration, PauliBasis, SiteAngles, Spin, SpinConfiguration};
pub use error::{Error, Result};
pub use skewlin::{pfaffian, SkewMatrix};
pub use state::{random_state, FermionConfiguration, GaussianPureState};

pub use num_complex::Complex64;
