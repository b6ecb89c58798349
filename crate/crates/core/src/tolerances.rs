//! Central numeric tolerance record.
//!
//! Every invariant check in the library reads its threshold from here, so the
//! contract is defined in one place. Defaults are calibrated for `f64`.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances<T> {
    /// State-vector norm after a normalization step.
    pub state_norm: T,
    /// Elementwise Hermiticity of density matrices and observables.
    pub hermiticity: T,
    /// Unit-trace deviation of density matrices.
    pub unit_trace: T,
    /// Most negative admissible density-matrix eigenvalue.
    pub positivity: T,
    /// Residual norm of the steady-state solve.
    pub steady_residual: T,
    /// Trace drift allowed per propagation call.
    pub propagation_trace: T,
    /// Imaginary part allowed in expectations of Hermitian operators.
    pub real_expectation: T,
    /// Hermiticity of constructed Hamiltonians.
    pub hamiltonian_hermiticity: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            state_norm: T::of(1e-12),
            hermiticity: T::of(1e-10),
            unit_trace: T::of(1e-10),
            positivity: T::of(1e-8),
            steady_residual: T::of(1e-10),
            propagation_trace: T::of(1e-9),
            real_expectation: T::of(1e-10),
            hamiltonian_hermiticity: T::of(1e-12),
        }
    }
}
