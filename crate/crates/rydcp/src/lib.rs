//! Thermal Casimir-Polder potentials of ⁸⁷Rb Rydberg nS atoms above planar
//! stacks of graphene sheets, dielectric slabs and metal layers.
//!
//! The crate is split along the physics:
//! * [`atomic`] — Rydberg structure: quantum-defect energies, Numerov radial
//!   wavefunctions, dipole matrix elements, polarizability, photon numbers;
//! * [`materials`] — frequency- and wavevector-dependent response: Kubo and
//!   full non-local graphene conductivity, Drude metals, dielectrics;
//! * [`em`] — layered-media electromagnetics: transfer-matrix reflection with
//!   conducting sheets, equal-position scattering Green's tensor;
//! * [`cp`] — assembly of the thermal Casimir-Polder potential with its
//!   non-resonant / evanescent-resonant / propagating-resonant breakdown;
//! * [`analysis`] — the fitting layer: power laws, dispersion-coefficient
//!   fits, the empirical potential formula, oscillation wavelengths.
//!
//! Everything is SI at public boundaries; energies are reported as U/h in Hz.

pub mod analysis;
pub mod atomic;
pub mod constants;
pub mod cp;
pub mod em;
pub mod materials;
pub mod quad;

pub use atomic::{Atom, AtomicState, BasisWindow, HalfInt};
pub use cp::{CpBreakdown, CpSolver, RegimeReport};
pub use em::{Frequency, Layer, LayerStack, Sheet};
pub use materials::{GrapheneParams, MaterialModel};
