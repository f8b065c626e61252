//! Simulation of a singlet qubit pair measured sequentially by two
//! observers per side with tunable-sharpness dichotomic measurements.
//!
//! The crate has three layers:
//!
//! * [`linalg`] — dense 2x2 / 4x4 complex matrix kernels (products, tensor
//!   products, partial traces, Hermitian eigenvalues);
//! * [`measurement`] — Bloch directions, the standard Platonic direction
//!   sets, and the sharpness-parameterized branch operators and effects;
//! * [`steering`] — conditional states, assemblages, steering parameters,
//!   local-hidden-state bounds, averaged post-measurement states and the
//!   four-observer-pair scenario.
//!
//! The headline computation is [`steering::scenario`]: for sharpness
//! eta_a, eta_b of the first observers it returns the steering parameters
//! of all four observer pairs along with the bound the set allows, from
//! which one finds the sharpness region (around 0.76 for n >= 3) where all
//! four pairs certify steering simultaneously.
//!
//! ```
//! let result = seqsteer::scenario(0.766, 0.766, 3)?;
//! assert!(result.violations().iter().all(|&v| v));
//! assert!((result.s11 - 0.766 * 0.766).abs() < 1e-12);
//! # Ok::<(), seqsteer::SteeringError>(())
//! ```

pub mod linalg;
pub mod measurement;
pub mod steering;

pub use linalg::{Complex64, ComplexMatrix, LinalgError, Tolerances};
pub use measurement::{BlochVector, KrausPair, MeasurementError, MeasurementSet, Outcome};
pub use steering::{
    assemblage, averaged_state, conditional_state, lhs_bound, scenario, scenario_on_set,
    steering_parameter, steering_parameter_with, Assemblage, CorrSign, ObserverConfig,
    ScenarioResult, Side, SteeringError, TwoQubitState,
};
