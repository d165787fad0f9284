//! Simulation kernel for resonance fluorescence of laser-driven highly charged
//! ions: exact Dirac-Coulomb bound states, relativistic multipole couplings in
//! two gauges, a three-level Lindblad master equation in the double rotating
//! frame, and fluorescence power spectra via the quantum regression theorem.
//!
//! Units: energies and rates are in eV unless a name says otherwise; radial
//! quantities are in atomic units (Bohr radii); time arguments are in hbar/eV.

pub mod angular;
pub mod bessel;
pub mod constants;
pub mod dynamics;
pub mod linalg;
pub mod quad;
pub mod spectrum;
pub mod structure;

pub use num_complex::Complex64 as C64;
