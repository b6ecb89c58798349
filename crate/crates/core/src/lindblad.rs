//! Master-equation layer: Liouvillian construction, steady state, propagation,
//! and the quantum-regression delayed correlation function.
//!
//! Density matrices are flattened row-major, so `vec(A rho B) = (A kron B^T) vec(rho)`.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::fock::{
    annihilation_operator, expectation, number_operator, DensityMatrix, OperatorMatrix,
};
use crate::linalg;
use crate::model::{build_hamiltonian, SystemParams};
use crate::scalar::{im, re, Real, C};
use crate::tolerances::Tolerances;

/// Mean photon numbers below this are treated as a vanishing denominator.
const NBAR_FLOOR: f64 = 1e-14;

/// Vectorized Liouvillian acting on row-major-flattened density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator<T: Real> {
    dim: usize,
    matrix: Array2<C<T>>,
}

impl<T: Real> Superoperator<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The D^2 x D^2 matrix.
    pub fn matrix(&self) -> &Array2<C<T>> {
        &self.matrix
    }

    /// L applied to a (not necessarily normalized) operator.
    pub fn apply_matrix(&self, m: &Array2<C<T>>) -> Result<Array2<C<T>>> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: m.nrows(),
            });
        }
        let v = flatten(m);
        let out = self.matrix.dot(&v);
        Ok(unflatten(&out, self.dim))
    }
}

pub(crate) fn flatten<T: Real>(m: &Array2<C<T>>) -> Array1<C<T>> {
    Array1::from_iter(m.iter().copied())
}

pub(crate) fn unflatten<T: Real>(v: &Array1<C<T>>, dim: usize) -> Array2<C<T>> {
    Array2::from_shape_vec((dim, dim), v.to_vec()).expect("vector length is dim^2")
}

/// Builds the Liouvillian `L rho = -i [H, rho] + kappa (a rho a† - {a†a, rho}/2)`,
/// i.e. Lindblad dissipation at total jump rate kappa (jump operator sqrt(kappa) a).
pub fn build_liouvillian<T: Real>(h: &OperatorMatrix<T>, kappa: T) -> Result<Superoperator<T>> {
    let tol = Tolerances::<T>::default();
    let herm = h.hermiticity_deviation();
    if herm > tol.hamiltonian_hermiticity {
        return Err(Error::NotHermitian {
            deviation: herm.as_f64(),
        });
    }
    if !(kappa > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "kappa",
            reason: "decay rate must be positive".into(),
        });
    }
    let dim = h.dim();
    let a = annihilation_operator::<T>(dim)?;
    let n = number_operator::<T>(dim)?;
    let eye = linalg::identity::<T>(dim);

    let hm = h.elements();
    let am = a.elements();
    let nm = n.elements();

    let minus_i = im(-T::one());
    let commutator = linalg::kron(&hm.view(), &eye.view()) - linalg::kron(&eye.view(), &hm.t());
    let jump = linalg::kron(&am.view(), &am.mapv(|z| z.conj()).view());
    let decay = linalg::kron(&nm.view(), &eye.view()) + linalg::kron(&eye.view(), &nm.t());

    let half_kappa = re(kappa / T::of(2.0));
    let matrix = commutator.mapv(|z| z * minus_i) + jump.mapv(|z| z * re(kappa))
        - decay.mapv(|z| z * half_kappa);
    Ok(Superoperator { dim, matrix })
}

/// Solves `L rho_ss = 0, Tr rho_ss = 1` as a linear system with the trace
/// condition replacing the first (redundant) row.
pub fn steady_state<T: Real>(liouvillian: &Superoperator<T>) -> Result<DensityMatrix<T>> {
    let d = liouvillian.dim;
    let n2 = d * d;
    let mut m = liouvillian.matrix.clone();
    for j in 0..n2 {
        m[[0, j]] = C::new(T::zero(), T::zero());
    }
    for i in 0..d {
        m[[0, i * d + i]] = re(T::one());
    }
    let mut b: Array1<C<T>> = Array1::zeros(n2);
    b[0] = re(T::one());

    let x = linalg::lu_solve(&m.view(), &b.view()).map_err(|e| match e {
        Error::SingularMatrix { pivot } => Error::DegenerateSteadyState(format!(
            "stationarity system is rank-deficient beyond the expected null vector (pivot {pivot})"
        )),
        other => other,
    })?;

    let residual = linalg::frobenius_norm(&unflatten(&liouvillian.matrix.dot(&x), d).view());
    let tol = Tolerances::<T>::default();
    if residual > tol.steady_residual {
        return Err(Error::DegenerateSteadyState(format!(
            "steady-state residual {:.3e} above {:.1e}",
            residual.as_f64(),
            tol.steady_residual.as_f64()
        )));
    }

    let raw = unflatten(&x, d);
    // clean the numerical anti-Hermitian dust before validating
    let herm = (&raw + &linalg::dagger(&raw.view())).mapv(|z| z * re(T::of(0.5)));
    DensityMatrix::from_matrix(herm, &tol)
}

/// Convenience: Hamiltonian, Liouvillian and steady state for given parameters.
pub fn steady_state_for<T: Real>(params: &SystemParams<T>, dim: usize) -> Result<DensityMatrix<T>> {
    let h = build_hamiltonian(params, dim)?;
    let l = build_liouvillian(&h, params.kappa)?;
    steady_state(&l)
}

/// Propagates a density matrix by `exp(L tau)` (time-independent Liouvillian).
pub fn propagate<T: Real>(
    liouvillian: &Superoperator<T>,
    rho0: &DensityMatrix<T>,
    tau: T,
) -> Result<DensityMatrix<T>> {
    let out = propagate_matrix(liouvillian, rho0.elements(), tau)?;
    let tol = Tolerances::<T>::default();
    let tr = linalg::trace(&out.view());
    let drift = ((tr.re - rho0.trace().re).abs()).max(tr.im.abs());
    if drift > tol.propagation_trace {
        return Err(Error::InvalidState(format!(
            "propagation trace drift {:.3e}",
            drift.as_f64()
        )));
    }
    let herm = (&out + &linalg::dagger(&out.view())).mapv(|z| z * re(T::of(0.5)));
    Ok(DensityMatrix::from_matrix_unchecked(herm))
}

/// Propagates a raw operator (no trace normalization, no validation); this is
/// the form the quantum-regression theorem needs for seeded matrices.
pub fn propagate_matrix<T: Real>(
    liouvillian: &Superoperator<T>,
    m: &Array2<C<T>>,
    tau: T,
) -> Result<Array2<C<T>>> {
    if tau < T::zero() {
        return Err(Error::NegativeDelay { tau: tau.as_f64() });
    }
    if m.nrows() != liouvillian.dim {
        return Err(Error::DimensionMismatch {
            left: liouvillian.dim,
            right: m.nrows(),
        });
    }
    if tau == T::zero() {
        return Ok(m.clone());
    }
    let scaled = liouvillian.matrix.mapv(|z| z * re(tau));
    let propagator = linalg::expm(&scaled.view());
    let v = flatten(m);
    Ok(unflatten(&propagator.dot(&v), liouvillian.dim))
}

/// Equal-time second-order correlation of the CW steady state:
/// `g2(0) = Tr(a†a†aa rho_ss) / <n>^2`.
pub fn g2_zero_cw<T: Real>(params: &SystemParams<T>, dim: usize) -> Result<T> {
    let rho = steady_state_for(params, dim)?;
    g2_zero_of(&rho)
}

/// `g2(0)` of an explicit density matrix.
pub fn g2_zero_of<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let dim = rho.dim();
    let a = annihilation_operator::<T>(dim)?;
    let n = number_operator::<T>(dim)?;
    let nbar = expectation(&n, rho)?.re;
    if nbar <= T::of(NBAR_FLOOR) {
        return Err(Error::UndefinedCorrelation {
            nbar: nbar.as_f64(),
        });
    }
    let aa = a.matmul(&a)?;
    let pair = aa.dagger().matmul(&aa)?;
    let num = expectation(&pair, rho)?.re;
    Ok(num / (nbar * nbar))
}

/// Delayed second-order correlation from the quantum regression theorem:
/// `g2(tau) = Tr(a†a e^{L tau}[a rho_ss a†]) / Tr(a†a rho_ss)^2`.
///
/// The seeded matrix `a rho_ss a†` is propagated without renormalization; the
/// normalization sits entirely in the denominator. For a uniform `tau_grid`
/// the single-gap propagator is built once and applied repeatedly.
pub fn g2_delay<T: Real>(
    params: &SystemParams<T>,
    tau_grid: &[T],
    dim: usize,
) -> Result<Vec<(T, T)>> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "tau_grid",
            reason: "need at least one delay".into(),
        });
    }
    if tau_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            name: "tau_grid",
            reason: "delays must be non-decreasing".into(),
        });
    }
    if tau_grid[0] < T::zero() {
        return Err(Error::NegativeDelay {
            tau: tau_grid[0].as_f64(),
        });
    }

    let h = build_hamiltonian(params, dim)?;
    let l = build_liouvillian(&h, params.kappa)?;
    let rho = steady_state(&l)?;
    let a = annihilation_operator::<T>(dim)?;
    let n = number_operator::<T>(dim)?;
    let nbar = expectation(&n, &rho)?.re;
    if nbar <= T::of(NBAR_FLOOR) {
        return Err(Error::UndefinedCorrelation {
            nbar: nbar.as_f64(),
        });
    }
    let denom = nbar * nbar;

    let seed = a
        .elements()
        .dot(rho.elements())
        .dot(a.dagger().elements());
    let mut state = flatten(&seed);
    let mut out = Vec::with_capacity(tau_grid.len());
    let mut current_tau = T::zero();
    let mut cached: Option<(T, Array2<C<T>>)> = None;
    let gap_tol = T::of(1e-12);

    for &tau in tau_grid {
        let gap = tau - current_tau;
        if gap > T::zero() {
            let reuse = matches!(&cached, Some((g, _)) if (*g - gap).abs() <= gap_tol * gap.max(*g));
            if !reuse {
                let scaled = l.matrix.mapv(|z| z * re(gap));
                cached = Some((gap, linalg::expm(&scaled.view())));
            }
            let (_, propagator) = cached.as_ref().expect("propagator cached above");
            state = propagator.dot(&state);
            current_tau = tau;
        }
        let mat = unflatten(&state, dim);
        let mut tr = C::new(T::zero(), T::zero());
        for i in 0..dim {
            tr = tr + n.elements()[[i, i]] * mat[[i, i]];
        }
        out.push((tau, tr.re / denom));
    }
    Ok(out)
}

/// Delay positions of local maxima of a sampled g2(tau) curve.
///
/// A maximum counts only if it rises at least `min_prominence` above the
/// running minimum since the previous accepted peak, which keeps numerical
/// noise on the flat tail from producing spurious peaks. Positions are
/// refined by a parabolic fit through the three surrounding samples.
pub fn g2_peak_delays<T: Real>(curve: &[(T, T)], min_prominence: T) -> Vec<T> {
    let mut peaks = Vec::new();
    if curve.len() < 3 {
        return peaks;
    }
    let mut running_min = curve[0].1;
    for i in 1..curve.len() - 1 {
        let (_, y0) = curve[i - 1];
        let (tau, y1) = curve[i];
        let (_, y2) = curve[i + 1];
        running_min = running_min.min(y1);
        if y1 >= y0 && y1 > y2 && y1 - running_min >= min_prominence {
            let denom = y0 - T::of(2.0) * y1 + y2;
            let offset = if denom == T::zero() {
                T::zero()
            } else {
                T::of(0.5) * (y0 - y2) / denom
            };
            let h = (curve[i + 1].0 - curve[i - 1].0) / T::of(2.0);
            peaks.push(tau + offset * h);
            running_min = y1;
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::QuantumState;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn optimum_params() -> SystemParams<f64> {
        SystemParams::new(0.0, 1.0, 0.05, 0.005, FRAC_PI_2).unwrap()
    }

    fn zero_hamiltonian(dim: usize) -> OperatorMatrix<f64> {
        OperatorMatrix::zeros(dim)
    }

    #[test]
    fn vacuum_is_dark() {
        let l = build_liouvillian(&zero_hamiltonian(4), 1.0).unwrap();
        let rho = DensityMatrix::<f64>::vacuum(4).unwrap();
        let out = l.apply_matrix(rho.elements()).unwrap();
        let norm = linalg::frobenius_norm(&out.view());
        assert!(norm < 1e-15);
    }

    #[test]
    fn single_photon_decay_rate() {
        let kappa = 0.7;
        let l = build_liouvillian(&zero_hamiltonian(3), kappa).unwrap();
        let one = crate::fock::StateVector::<f64>::fock(3, 1).unwrap().density();
        let out = l.apply_matrix(one.elements()).unwrap();
        assert_abs_diff_eq!(out[[0, 0]].re, kappa, epsilon = 1e-15);
        assert_abs_diff_eq!(out[[1, 1]].re, -kappa, epsilon = 1e-15);
        assert_abs_diff_eq!(out[[2, 2]].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn liouvillian_preserves_trace() {
        let p = optimum_params();
        let h = build_hamiltonian(&p, 6).unwrap();
        let l = build_liouvillian(&h, p.kappa).unwrap();
        // a handful of Hermitian test matrices
        for k in 0..5 {
            let mut m: Array2<C<f64>> = Array2::zeros((6, 6));
            for i in 0..6 {
                for j in 0..6 {
                    let x = ((i * 7 + j * 3 + k * 11) % 13) as f64 / 13.0 - 0.5;
                    let y = ((i * 5 + j * 11 + k * 2) % 17) as f64 / 17.0 - 0.5;
                    m[[i, j]] = C::new(x, y);
                }
            }
            let herm = (&m + &linalg::dagger(&m.view())).mapv(|z| z * re(0.5));
            let out = l.apply_matrix(&herm).unwrap();
            let tr = linalg::trace(&out.view());
            assert!(tr.norm() < 1e-10, "trace {tr} not preserved");
        }
    }

    #[test]
    fn liouvillian_rejects_non_hermitian() {
        let a = annihilation_operator::<f64>(4).unwrap();
        assert!(matches!(
            build_liouvillian(&a, 1.0),
            Err(Error::NotHermitian { .. })
        ));
        assert!(build_liouvillian(&zero_hamiltonian(4), 0.0).is_err());
    }

    #[test]
    fn empty_cavity_decays_to_vacuum() {
        let p = SystemParams::new(0.4, 1.0, 0.0, 0.0, 0.0).unwrap();
        let rho = steady_state_for(&p, 6).unwrap();
        assert_abs_diff_eq!(rho.elements()[[0, 0]].re, 1.0, epsilon = 1e-12);
        let n = number_operator::<f64>(6).unwrap();
        assert!(expectation(&n, &rho).unwrap().re.abs() < 1e-12);
    }

    #[test]
    fn steady_state_scale_invariance() {
        let p1 = optimum_params();
        let scale = 3.7;
        let p2 = SystemParams::new(
            p1.delta * scale,
            p1.kappa * scale,
            p1.drive_e * scale,
            p1.parametric_u * scale,
            p1.theta,
        )
        .unwrap();
        let r1 = steady_state_for(&p1, 10).unwrap();
        let r2 = steady_state_for(&p2, 10).unwrap();
        let dev = (r1.elements() - r2.elements())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-11, "scale deviation {dev}");
    }

    #[test]
    fn steady_state_satisfies_density_invariants() {
        let rho = steady_state_for(&optimum_params(), 10).unwrap();
        rho.validate(&Tolerances::default()).unwrap();
    }

    #[test]
    fn propagate_identity_at_zero_delay() {
        let p = optimum_params();
        let h = build_hamiltonian(&p, 8).unwrap();
        let l = build_liouvillian(&h, p.kappa).unwrap();
        let rho = steady_state(&l).unwrap();
        let out = propagate(&l, &rho, 0.0).unwrap();
        let dev = (out.elements() - rho.elements())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert_eq!(dev, 0.0);
        assert!(propagate(&l, &rho, -0.1).is_err());
    }

    #[test]
    fn propagate_exponential_decay_law() {
        let kappa = 1.0;
        let l = build_liouvillian(&zero_hamiltonian(4), kappa).unwrap();
        let one = crate::fock::StateVector::<f64>::fock(4, 1).unwrap().density();
        let n = number_operator::<f64>(4).unwrap();
        for tau in [0.1, 0.5, 1.0, 3.0] {
            let rho_t = propagate(&l, &one, tau).unwrap();
            let nbar = rho_t.expectation_of(&n).unwrap().re;
            assert_abs_diff_eq!(nbar, (-kappa * tau).exp(), epsilon = 1e-12);
            assert_abs_diff_eq!(rho_t.trace().re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn propagate_semigroup_property() {
        let p = optimum_params();
        let h = build_hamiltonian(&p, 8).unwrap();
        let l = build_liouvillian(&h, p.kappa).unwrap();
        let rho0 = DensityMatrix::<f64>::vacuum(8).unwrap();
        let one_shot = propagate(&l, &rho0, 2.9).unwrap();
        let two_step = propagate(&l, &propagate(&l, &rho0, 1.2).unwrap(), 1.7).unwrap();
        let dev = (one_shot.elements() - two_step.elements())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-9, "semigroup deviation {dev}");
    }

    #[test]
    fn g2_zero_coherent_drive_is_poissonian() {
        let p = SystemParams::new(0.0, 1.0, 0.05, 0.0, 0.0).unwrap();
        let g2 = g2_zero_cw(&p, 12).unwrap();
        assert_abs_diff_eq!(g2, 1.0, epsilon = 1e-2);
    }

    // Reference values fixed by an independent long-time RK4 integration of
    // the master equation from vacuum (see tests/oracles.rs, which recomputes
    // them): <n>_ss = 9.811767844393e-3, g2(0) = 8.233443927507e-2.
    #[test]
    fn g2_zero_at_optimum_matches_oracle_value() {
        let g2 = g2_zero_cw(&optimum_params(), 12).unwrap();
        assert_abs_diff_eq!(g2, 8.233443927507e-2, epsilon = 1e-9);
        assert!(g2 < 0.1, "strong antibunching expected");
    }

    #[test]
    fn g2_zero_with_theta_flipped_shows_bunching() {
        let p = SystemParams::new(0.0, 1.0, 0.05, 0.005, FRAC_PI_2 + std::f64::consts::PI).unwrap();
        let g2 = g2_zero_cw(&p, 12).unwrap();
        assert!(g2 > 1.0, "constructive interference must bunch, got {g2}");
    }

    #[test]
    fn g2_undefined_for_empty_cavity() {
        let p = SystemParams::new(0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            g2_zero_cw(&p, 8),
            Err(Error::UndefinedCorrelation { .. })
        ));
    }

    #[test]
    fn g2_delay_matches_equal_time_limit_and_long_delay() {
        let p = optimum_params();
        let taus: Vec<f64> = (0..=100).map(|k| 0.2 * k as f64).collect();
        let curve = g2_delay(&p, &taus, 10).unwrap();
        let g2_zero = g2_zero_cw(&p, 10).unwrap();
        assert_abs_diff_eq!(curve[0].1, g2_zero, epsilon = 1e-10);
        assert_abs_diff_eq!(curve.last().unwrap().1, 1.0, epsilon = 1e-3);
        assert!(curve.iter().all(|&(_, g)| g < 1.0), "g2 < 1 at zero detuning");
    }

    #[test]
    fn g2_delay_rejects_bad_grids() {
        let p = optimum_params();
        assert!(g2_delay(&p, &[], 8).is_err());
        assert!(g2_delay(&p, &[0.5, 0.1], 8).is_err());
        assert!(g2_delay(&p, &[-0.5, 0.1], 8).is_err());
    }

    #[test]
    fn peak_finding_on_damped_cosine() {
        let omega = 0.5;
        let curve: Vec<(f64, f64)> = (0..4000)
            .map(|k| {
                let t = 0.01 * k as f64;
                (t, 1.0 - (-(0.5 * t)).exp() * (omega * t).cos())
            })
            .collect();
        let peaks = g2_peak_delays(&curve, 1e-9);
        assert!(peaks.len() >= 2, "found {} peaks", peaks.len());
        // damped cosine maxima are spaced by exactly 2 pi / omega
        let spacing = peaks[1] - peaks[0];
        assert_abs_diff_eq!(spacing, std::f64::consts::TAU / omega, epsilon = 0.05);
    }
}
