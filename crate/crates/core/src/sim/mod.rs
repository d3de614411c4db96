//! Statevector and density-matrix execution of gate circuits.

pub mod circuit;
pub mod estimate;
pub mod noise;
pub mod state;

pub use circuit::{Angle, Angles, Circuit, Gate, GateKind};
pub use estimate::{estimate_cross, sample_expect, sample_expect_with, CrossEstimator, Prepared};
pub use noise::{apply_readout, run_noisy, NoiseModel};
pub use state::{expect, run_circuit, DensityMatrix, QuantumState, Statevector, DENSITY_CAP, STATEVECTOR_CAP};
