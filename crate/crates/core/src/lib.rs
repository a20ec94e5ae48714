//! Zero-curvature eigenstates of the one-dimensional Schrödinger equation.
//!
//! The crate designs delta-function potentials inside infinite square wells
//! that make an arbitrary straight-line waveform an exact `E = 0`
//! eigenstate, computes the observables of those states, builds their
//! supersymmetric partners, solves the asymmetric well, and checks all of it
//! against an in-crate finite-difference eigensolver.

pub mod analysis;
pub mod asym;
pub mod design;
pub mod error;
pub mod io;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod susy;

pub use error::{Result, ZcError};
pub use model::{
    Boundary, DeltaArrayPotential, DeltaSpike, Knot, PiecewiseLinearWave, UnitSystem, WellDomain,
};
