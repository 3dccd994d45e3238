//! Polarisation states of light on the unit half disk, their GKLS dynamics,
//! polariser gates and gate-assisted geodesic tracking.

pub mod circuit;
pub mod error;
pub mod gkls;
pub mod linalg;
pub mod metric;
pub mod polariser;
pub mod state;
pub mod verify;

pub use circuit::{run_circuit, sweep_accuracy, CircuitConfig, CircuitResult, SweepResult, TableExample};
pub use error::{Error, Result};
pub use gkls::{integrate, GklsParams, Trajectory};
pub use linalg::{Matrix2, Matrix4};
pub use polariser::{born_probabilities, ideal_gate_apply, PolariserGate};
pub use state::{DensityState, Observable, StokesVector};
pub use metric::{geodesic_between, trace_distance, GeodesicSegment};
