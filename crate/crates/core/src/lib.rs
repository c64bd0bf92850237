//! Steady periodic gravity water waves with vorticity, computed in hodograph
//! variables h(q, p) on the fixed rectangle (-π, π) × (p0, 0), together with
//! streamline and particle-path kinematics and numerical checks of the
//! monotonicity, drift and surface bounds these waves satisfy.

pub mod diff;
pub mod error;
pub mod fields;
pub mod grid;
pub mod interp;
pub mod kinematics;
pub mod laminar;
pub mod solver;
pub mod verify;
pub mod vorticity;

pub use error::{Result, WaveError};
pub use fields::{derive_frame, PhysicalFrame};
pub use grid::{GridFunction, HeightField, HodographGrid, WaveParameters};
pub use laminar::{Bifurcation, LaminarProfile};
pub use solver::{BranchState, NewtonOptions, WaveSolution};
pub use vorticity::VorticitySpec;
