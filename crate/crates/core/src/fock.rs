//! Truncated Fock-space linear algebra: states, density matrices, operators,
//! expectation values, and the truncation-convergence scan.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::SystemParams;
use crate::scalar::{re, Real, C};
use crate::tolerances::Tolerances;

/// Pure state over the truncated Fock basis; index `n` is the coefficient of |n>.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amplitudes: Array1<C<T>>,
}

impl<T: Real> StateVector<T> {
    /// The vacuum state |0>.
    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::fock(dim, 0)
    }

    /// The number state |n>.
    pub fn fock(dim: usize, n: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidDimension {
                dim,
                reason: "state needs at least one basis level",
            });
        }
        if n >= dim {
            return Err(Error::InvalidState(format!(
                "Fock level {n} outside truncation {dim}"
            )));
        }
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[n] = re(T::one());
        Ok(Self { amplitudes })
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amplitudes: impl Into<Array1<C<T>>>) -> Result<Self> {
        let amplitudes = amplitudes.into();
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "state needs at least one basis level",
            });
        }
        let mut state = Self { amplitudes };
        let norm = state.norm();
        if !norm.is_finite() || norm == T::zero() {
            return Err(Error::InvalidState(
                "amplitudes have zero or non-finite norm".into(),
            ));
        }
        state.normalize();
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C<T>> {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> C<T> {
        self.amplitudes[n]
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Rescales to unit norm.
    pub fn normalize(&mut self) {
        let norm = self.norm();
        let inv = re(T::one() / norm);
        self.amplitudes.mapv_inplace(|z| z * inv);
    }

    /// |psi><psi| as a density matrix.
    pub fn density(&self) -> DensityMatrix<T> {
        let d = self.dim();
        let mut elements = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                elements[[i, j]] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix { elements }
    }

    pub(crate) fn from_normalized(amplitudes: Array1<C<T>>) -> Self {
        Self { amplitudes }
    }
}

/// Operator on the truncated Fock space (not necessarily Hermitian).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    elements: Array2<C<T>>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn from_elements(elements: Array2<C<T>>) -> Result<Self> {
        if elements.nrows() != elements.ncols() {
            return Err(Error::DimensionMismatch {
                left: elements.nrows(),
                right: elements.ncols(),
            });
        }
        Ok(Self { elements })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            elements: Array2::zeros((dim, dim)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            elements: linalg::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &Array2<C<T>> {
        &self.elements
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self {
            elements: linalg::dagger(&self.elements.view()),
        }
    }

    pub fn hermiticity_deviation(&self) -> T {
        linalg::hermiticity_deviation(&self.elements.view())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            elements: self.elements.dot(&other.elements),
        })
    }

    pub fn scaled(&self, factor: C<T>) -> Self {
        Self {
            elements: self.elements.mapv(|z| z * factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            elements: &self.elements + &other.elements,
        })
    }

    /// Applies the operator to raw amplitudes.
    pub fn apply(&self, amplitudes: &Array1<C<T>>) -> Result<Array1<C<T>>> {
        self.check_dim(amplitudes.len())?;
        Ok(self.elements.dot(amplitudes))
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() != other {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other,
            });
        }
        Ok(())
    }
}

/// Mixed state over the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    elements: Array2<C<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity before accepting.
    pub fn from_matrix(elements: Array2<C<T>>, tol: &Tolerances<T>) -> Result<Self> {
        if elements.nrows() != elements.ncols() {
            return Err(Error::DimensionMismatch {
                left: elements.nrows(),
                right: elements.ncols(),
            });
        }
        let rho = Self { elements };
        rho.validate(tol)?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(elements: Array2<C<T>>) -> Self {
        Self { elements }
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Ok(StateVector::vacuum(dim)?.density())
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &Array2<C<T>> {
        &self.elements
    }

    pub fn trace(&self) -> C<T> {
        linalg::trace(&self.elements.view())
    }

    /// Smallest eigenvalue (Hermitian part).
    pub fn min_eigenvalue(&self) -> T {
        let eig = linalg::hermitian_eigenvalues(&self.elements.view());
        eig[0]
    }

    /// Checks the density-matrix invariants: Hermitian, unit trace, positive.
    pub fn validate(&self, tol: &Tolerances<T>) -> Result<()> {
        let herm = linalg::hermiticity_deviation(&self.elements.view());
        if herm > tol.hermiticity {
            return Err(Error::NotHermitian {
                deviation: herm.as_f64(),
            });
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() > tol.unit_trace || tr.im.abs() > tol.unit_trace {
            return Err(Error::InvalidState(format!(
                "trace {:.3e}+{:.3e}i deviates from 1",
                tr.re.as_f64(),
                tr.im.as_f64()
            )));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -tol.positivity {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                min_eig.as_f64()
            )));
        }
        Ok(())
    }
}

/// Something an expectation value can be taken over.
pub trait QuantumState<T: Real> {
    fn dim(&self) -> usize;
    /// <op> over this state; no Hermiticity assumption on `op`.
    fn expectation_of(&self, op: &OperatorMatrix<T>) -> Result<C<T>>;
}

impl<T: Real> QuantumState<T> for StateVector<T> {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn expectation_of(&self, op: &OperatorMatrix<T>) -> Result<C<T>> {
        let applied = op.apply(&self.amplitudes)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(applied.iter())
            .map(|(a, b)| a.conj() * *b)
            .sum())
    }
}

impl<T: Real> QuantumState<T> for DensityMatrix<T> {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn expectation_of(&self, op: &OperatorMatrix<T>) -> Result<C<T>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: op.dim(),
                right: self.dim(),
            });
        }
        // Tr(op rho) without forming the product
        let mut acc = C::new(T::zero(), T::zero());
        let o = op.elements();
        for i in 0..self.dim() {
            for k in 0..self.dim() {
                acc = acc + o[[i, k]] * self.elements[[k, i]];
            }
        }
        Ok(acc)
    }
}

/// Expectation value `<psi|op|psi>` or `Tr(op rho)`.
pub fn expectation<T: Real, S: QuantumState<T>>(op: &OperatorMatrix<T>, state: &S) -> Result<C<T>> {
    state.expectation_of(op)
}

/// Annihilation operator: `a[n-1, n] = sqrt(n)`.
pub fn annihilation_operator<T: Real>(dim: usize) -> Result<OperatorMatrix<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "annihilation operator needs at least two levels",
        });
    }
    let mut elements = Array2::zeros((dim, dim));
    for n in 1..dim {
        elements[[n - 1, n]] = re(T::of(n as f64).sqrt());
    }
    Ok(OperatorMatrix { elements })
}

/// Creation operator, the adjoint of [`annihilation_operator`].
pub fn creation_operator<T: Real>(dim: usize) -> Result<OperatorMatrix<T>> {
    Ok(annihilation_operator(dim)?.dagger())
}

/// Number operator `diag(0, 1, ..., dim-1)`; equals a†a exactly.
pub fn number_operator<T: Real>(dim: usize) -> Result<OperatorMatrix<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "number operator needs at least two levels",
        });
    }
    let mut elements = Array2::zeros((dim, dim));
    for n in 0..dim {
        elements[[n, n]] = re(T::of(n as f64));
    }
    Ok(OperatorMatrix { elements })
}

/// Steady-state observable used by the truncation scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    MeanPhotonNumber,
    G2Zero,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::MeanPhotonNumber => "mean_photon_number",
            Observable::G2Zero => "g2_zero",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TruncationScan<T> {
    /// (dimension, observable value) for every scanned dimension.
    pub rows: Vec<(usize, T)>,
    /// Smallest dimension whose value agrees with the next scanned one within `tol`.
    pub converged_dim: usize,
    pub tol: T,
}

impl<T: Real> TruncationScan<T> {
    pub fn table(&self) -> String {
        format_scan_table(&self.rows)
    }
}

fn format_scan_table<T: Real>(rows: &[(usize, T)]) -> String {
    let mut out = String::from("  dim  value\n");
    for (d, v) in rows {
        out.push_str(&format!("  {d:4}  {:+.12e}\n", v.as_f64()));
    }
    out
}

/// Scans steady-state observables over increasing truncation dimensions and
/// reports the smallest dimension converged within `tol` against the next one.
///
/// The scan refuses to accept silently: if no adjacent pair of dimensions
/// agrees within `tol`, the full table is returned inside the error.
pub fn truncation_scan<T: Real>(
    model: &SystemParams<T>,
    observable: Observable,
    dims: &[usize],
    tol: T,
) -> Result<TruncationScan<T>> {
    if dims.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "dims",
            reason: "need at least three dimensions to scan".into(),
        });
    }
    if dims.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "dims",
            reason: "dimensions must be strictly increasing".into(),
        });
    }
    let mut rows = Vec::with_capacity(dims.len());
    for &d in dims {
        let value = match observable {
            Observable::MeanPhotonNumber => {
                let rho = crate::lindblad::steady_state_for(model, d)?;
                let n_op = number_operator::<T>(d)?;
                expectation(&n_op, &rho)?.re
            }
            Observable::G2Zero => crate::lindblad::g2_zero_cw(model, d)?,
        };
        rows.push((d, value));
    }
    for i in 0..rows.len() - 1 {
        if (rows[i].1 - rows[i + 1].1).abs() < tol {
            return Ok(TruncationScan {
                converged_dim: rows[i].0,
                rows,
                tol,
            });
        }
    }
    Err(Error::TruncationNotConverged {
        table: format_scan_table(&rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type F = f64;

    #[test]
    fn annihilation_matrix_elements() {
        let a = annihilation_operator::<F>(2).unwrap();
        assert_eq!(a.elements()[[0, 1]].re, 1.0);
        assert_eq!(a.elements()[[0, 0]].re, 0.0);
        assert_eq!(a.elements()[[1, 0]].re, 0.0);
        assert_eq!(a.elements()[[1, 1]].re, 0.0);

        let a3 = annihilation_operator::<F>(3).unwrap();
        assert_abs_diff_eq!(a3.elements()[[0, 1]].re, 1.0);
        assert_abs_diff_eq!(a3.elements()[[1, 2]].re, 1.41421356, epsilon = 1e-8);
        let nonzero = a3
            .elements()
            .iter()
            .filter(|z| z.norm() > 0.0)
            .count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn annihilation_rejects_dim_below_two() {
        assert!(matches!(
            annihilation_operator::<F>(1),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn number_operator_is_diagonal_and_equals_adag_a() {
        let n = number_operator::<F>(4).unwrap();
        for i in 0..4 {
            assert_eq!(n.elements()[[i, i]].re, i as f64);
        }
        let n2 = number_operator::<F>(2).unwrap();
        assert_eq!(n2.elements()[[0, 0]].re, 0.0);
        assert_eq!(n2.elements()[[1, 1]].re, 1.0);

        let a = annihilation_operator::<F>(4).unwrap();
        let adag_a = a.dagger().matmul(&a).unwrap();
        let dev = (adag_a.elements() - n.elements())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        // sqrt(n)^2 rounds to n within one ulp
        assert!(dev <= 1e-15, "deviation {dev}");
    }

    #[test]
    fn commutator_on_subspace_below_truncation() {
        // (a a† − a† a)|n> = |n> exactly for n < D−1
        let d = 7;
        let a = annihilation_operator::<F>(d).unwrap();
        let comm = a
            .matmul(&a.dagger())
            .unwrap()
            .add(&a.dagger().matmul(&a).unwrap().scaled(re(-1.0)))
            .unwrap();
        for n in 0..d - 1 {
            let basis = StateVector::<F>::fock(d, n).unwrap();
            let applied = comm.apply(basis.amplitudes()).unwrap();
            for (k, z) in applied.iter().enumerate() {
                let want = if k == n { 1.0 } else { 0.0 };
                assert!((z.re - want).abs() <= 1e-15, "({k},{n}): {z}");
                assert_eq!(z.im, 0.0);
            }
        }
    }

    #[test]
    fn expectation_of_number_operator() {
        let d = 5;
        let n = number_operator::<F>(d).unwrap();
        let vac = StateVector::<F>::vacuum(d).unwrap();
        assert_eq!(expectation(&n, &vac).unwrap().re, 0.0);
        let two = StateVector::<F>::fock(d, 2).unwrap();
        assert_eq!(expectation(&n, &two).unwrap().re, 2.0);

        let amps: Vec<C<F>> = vec![
            re(1.0 / 2f64.sqrt()),
            re(1.0 / 2f64.sqrt()),
            re(0.0),
            re(0.0),
            re(0.0),
        ];
        let sup = StateVector::from_amplitudes(Array1::from(amps)).unwrap();
        assert_abs_diff_eq!(expectation(&n, &sup).unwrap().re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn expectation_dimension_mismatch_errors() {
        let n = number_operator::<F>(4).unwrap();
        let psi = StateVector::<F>::vacuum(5).unwrap();
        assert!(matches!(
            expectation(&n, &psi),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn density_matrix_from_pure_state_is_valid() {
        let tol = Tolerances::default();
        let psi = StateVector::<F>::fock(6, 1).unwrap();
        let rho = psi.density();
        rho.validate(&tol).unwrap();
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
        let n = number_operator::<F>(6).unwrap();
        assert_abs_diff_eq!(expectation(&n, &rho).unwrap().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn density_matrix_rejects_bad_trace() {
        let tol = Tolerances::default();
        let mut m: Array2<C<F>> = Array2::zeros((3, 3));
        m[[0, 0]] = re(0.7);
        assert!(DensityMatrix::from_matrix(m, &tol).is_err());
    }

    #[test]
    fn normalization_holds_to_1e12() {
        let amps: Vec<C<F>> = (0..8)
            .map(|k| C::new(0.3 * (k as f64 + 1.0), -0.1 * k as f64))
            .collect();
        let psi = StateVector::from_amplitudes(Array1::from(amps)).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }
}
