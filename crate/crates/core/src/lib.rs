//! Morse index and nullity of two-sided minimal surfaces with triple-junction
//! (Y-type) singularities.
//!
//! The crate is organised as a pipeline:
//!
//! * [`geometry`] represents Y-surfaces as triangulated faces glued along
//!   junction curves, generates the canonical examples (plane, catenoid, flat
//!   Y-cone, Y-catenoid) and computes curvature, Gauss–Bonnet and density data.
//! * [`quadform`] assembles the second variation of area as sparse matrices,
//!   eliminates the junction compatibility constraint and provides the
//!   log-cutoff and weighted-norm machinery used with constant test functions.
//! * [`spectra`] counts negative and zero directions (inertia), computes low
//!   eigenpairs, runs truncation sweeps and the Fourier-mode reduction for
//!   surfaces of revolution.
//! * [`classify`] computes the per-face invariants `α`, `β`, `θ`, the reduced
//!   2×2 constant-mode form and the index-one decision tree.
//! * [`cli`] ties everything together for the `ysurface` binary: configuration,
//!   mesh exchange files, reports and the invariant suite.

pub mod classify;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod mesh_io;
pub mod quadform;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
pub use geometry::{FacePatch, JunctionCurve, YSurface};
