//! Density-matrix simulation and zero-noise-extrapolation (ZNE) estimation
//! for DC magnetometry.
//!
//! The crate simulates Ramsey and GHZ sensing circuits under phase and
//! amplitude damping, amplifies the noise by unitary folding, estimates the
//! sensed field from finite-shot measurement records, and extrapolates the
//! estimates back to the zero-noise limit. Closed-form and average-Liouvillian
//! references are provided as independent cross-checks of the simulator.

pub mod analytic;
pub mod channels;
pub mod circuits;
pub mod densmat;
pub mod experiments;
pub mod fitters;
pub mod sampling;

pub use channels::{NoiseKind, NoiseSpec};
pub use circuits::{CircuitElement, Detection, Folding, ProtocolSpec, SensingCircuit};
pub use densmat::{ComplexMatrix, DensityMatrix, GateMatrix};
