//! Finite second-order perturbation theory for relativistic two-body Coulomb
//! scattering in partial waves.
//!
//! The crate computes phase shifts to second order in the coupling, with the
//! momentum integrals taken as Cauchy principal values, and sums them into a
//! wavepacket-regularised differential cross section that can be compared with
//! the Rutherford and Møller formulas.

pub mod cross_section;
pub mod error;
pub mod kinematics;
pub mod phase_shifts;
pub mod potential;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use kinematics::Kinematics;
