//! Simulator for a pulsed single-photon source based on quantum-interference
//! photon antibunching in a weakly nonlinear driven parametric nanocavity.

pub mod error;
pub mod fock;
pub mod linalg;
pub mod lindblad;
pub mod model;
pub mod scalar;
pub mod tolerances;

pub use error::{Error, Result};
pub use scalar::{Real, C};
pub use tolerances::Tolerances;

/// Complex double-precision scalar, the default instantiation.
pub type C64 = C<f64>;

pub type StateVector64 = fock::StateVector<f64>;
pub type DensityMatrix64 = fock::DensityMatrix<f64>;
pub type OperatorMatrix64 = fock::OperatorMatrix<f64>;
pub type SystemParams64 = model::SystemParams<f64>;
pub type PumpParams64 = model::PumpParams<f64>;
pub type PulseTrain64 = model::PulseTrain<f64>;
pub type Superoperator64 = lindblad::Superoperator<f64>;
