//! Exact-dynamics engines used to check the closed forms.
//!
//! [`grid`] propagates a two-component wave function on a periodic 1D grid
//! by Strang splitting; [`dense`] evolves finite-dimensional states by
//! Hermitian eigendecomposition and traces out subsystems.

pub mod dense;
pub mod grid;

pub use dense::{dense_evolve, partial_trace, DenseState};
pub use grid::{grid_propagate, large_mass_phase_check, Grid1D, GridPropagator, SpinorField};
