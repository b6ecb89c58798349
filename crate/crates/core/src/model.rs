//! Physical model: parameter records, unit helpers, adiabatic elimination of
//! the pump mode, optimum antibunching conditions, pulse envelopes, and the
//! effective Hamiltonian.
//!
//! Unit convention: all frequencies and rates are angular, in rad/ns, so a
//! rate quoted as "x GHz" enters as `x` and "y MHz" as `y * 1e-3`. Times are
//! in ns. This matches the parameter values quoted throughout the crate
//! (kappa = 1, E = 0.05 for a 1 GHz linewidth and 50 MHz drive).

use crate::error::{Error, Result};
use crate::fock::{annihilation_operator, number_operator, OperatorMatrix};
use crate::scalar::{im, re, Real};

/// Speed of light in m/ns.
const C_LIGHT_M_PER_NS: f64 = 0.299792458;

/// A rate quoted in GHz under the rad/ns convention (identity by convention).
pub fn gigahertz<T: Real>(x: T) -> T {
    x
}

/// A rate quoted in MHz under the rad/ns convention.
pub fn megahertz<T: Real>(x: T) -> T {
    x * T::of(1e-3)
}

/// Converts a rate per ns to a rate per second.
pub fn per_ns_to_per_s<T: Real>(rate: T) -> T {
    rate * T::of(1e9)
}

/// Reduces an angle to (-pi, pi].
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::TAU();
    let mut t = theta % two_pi;
    if t > T::PI() {
        t -= two_pi;
    } else if t <= -T::PI() {
        t += two_pi;
    }
    t
}

/// Parameters of the effective single-mode model: detuning, linewidth,
/// coherent drive, parametric gain, and relative phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    /// Detuning between the fundamental mode and the drive (rad/ns).
    pub delta: T,
    /// Fundamental-mode decay rate kappa (rad/ns).
    pub kappa: T,
    /// Coherent drive strength E (rad/ns).
    pub drive_e: T,
    /// Effective parametric gain U (rad/ns).
    pub parametric_u: T,
    /// Relative phase theta between the parametric and coherent terms (rad).
    pub theta: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(delta: T, kappa: T, drive_e: T, parametric_u: T, theta: T) -> Result<Self> {
        if !(kappa > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: format!("decay rate must be positive, got {kappa}"),
            });
        }
        Ok(Self {
            delta,
            kappa,
            drive_e,
            parametric_u,
            theta,
        })
    }

    /// Non-fatal flags for parameters outside the weak-driving regime the
    /// optimum conditions assume (E << kappa, U << kappa).
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let tenth = self.kappa / T::of(10.0);
        if self.drive_e >= tenth {
            warnings.push(format!(
                "drive E = {} is not small against kappa/10 = {}; optimum conditions assume weak driving",
                self.drive_e, tenth
            ));
        }
        if self.parametric_u >= tenth {
            warnings.push(format!(
                "parametric gain U = {} is not small against kappa/10 = {}; optimum conditions assume low gain",
                self.parametric_u, tenth
            ));
        }
        warnings
    }
}

/// Parameters of the strongly pumped second-harmonic mode before adiabatic
/// elimination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpParams<T> {
    /// Pump strength F (rad/ns).
    pub pump_f: T,
    /// Bare parametric coupling chi (rad/ns).
    pub chi: T,
    /// Second-harmonic-mode decay rate gamma (rad/ns).
    pub gamma: T,
    /// Pump-drive phase difference theta_0 (rad).
    pub theta0: T,
}

impl<T: Real> PumpParams<T> {
    pub fn new(pump_f: T, chi: T, gamma: T, theta0: T) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("second-harmonic decay must be positive, got {gamma}"),
            });
        }
        if pump_f < T::zero() {
            return Err(Error::InvalidParameter {
                name: "pump_f",
                reason: "pump strength must be non-negative".into(),
            });
        }
        if chi < T::zero() {
            return Err(Error::InvalidParameter {
                name: "chi",
                reason: "parametric coupling must be non-negative".into(),
            });
        }
        Ok(Self {
            pump_f,
            chi,
            gamma,
            theta0,
        })
    }
}

/// Gaussian pulse train E(t) = E0 exp[-(t - c_n)^2 / dt^2] with centers
/// c_n = center_t0 + n * period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrain<T> {
    /// Peak drive strength E0 (rad/ns).
    pub amplitude_e0: T,
    /// Pulse width Delta-t (ns); the Gaussian 1/e half-width.
    pub width_dt: T,
    /// Pulse-to-pulse spacing (ns).
    pub period: T,
    /// Number of pulses in the train.
    pub pulse_count: usize,
    /// Center of the first pulse (ns).
    pub center_t0: T,
}

impl<T: Real> PulseTrain<T> {
    pub fn new(
        amplitude_e0: T,
        width_dt: T,
        period: T,
        pulse_count: usize,
        center_t0: T,
    ) -> Result<Self> {
        if !(width_dt > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "width_dt",
                reason: "pulse width must be positive".into(),
            });
        }
        if amplitude_e0 < T::zero() {
            return Err(Error::InvalidParameter {
                name: "amplitude_e0",
                reason: "pulse amplitude must be non-negative".into(),
            });
        }
        if period < T::of(4.0) * width_dt {
            return Err(Error::InvalidParameter {
                name: "period",
                reason: format!(
                    "period {period} must be at least 4 pulse widths ({}) so adjacent pulses do not overlap",
                    T::of(4.0) * width_dt
                ),
            });
        }
        if pulse_count < 1 {
            return Err(Error::InvalidParameter {
                name: "pulse_count",
                reason: "need at least one pulse".into(),
            });
        }
        Ok(Self {
            amplitude_e0,
            width_dt,
            period,
            pulse_count,
            center_t0,
        })
    }

    /// The paper's spacing rule: period = 12 pulse widths, first pulse
    /// centered half a period in.
    pub fn with_default_spacing(amplitude_e0: T, width_dt: T, pulse_count: usize) -> Result<Self> {
        let period = T::of(12.0) * width_dt;
        Self::new(
            amplitude_e0,
            width_dt,
            period,
            pulse_count,
            period / T::of(2.0),
        )
    }

    /// Total train duration: one full period per pulse.
    pub fn duration(&self) -> T {
        self.period * T::of(self.pulse_count as f64)
    }

    /// Drive amplitude at time `t`: the sum over pulses of the Gaussian
    /// envelope. Only the nearest pulse and its two neighbours contribute
    /// above machine precision thanks to the period >= 4 width invariant.
    pub fn drive_envelope(&self, t: T) -> T {
        let rel = (t - self.center_t0) / self.period;
        let nearest = rel.round().as_f64() as i64;
        let mut total = T::zero();
        for k in [nearest - 1, nearest, nearest + 1] {
            if k < 0 || k >= self.pulse_count as i64 {
                continue;
            }
            let center = self.center_t0 + T::of(k as f64) * self.period;
            let arg = (t - center) / self.width_dt;
            total += self.amplitude_e0 * (-arg * arg).exp();
        }
        total
    }

    /// Time-dependent parametric gain matched to the optimum condition:
    /// U(t) = E(t)^2 / sqrt(delta^2 + kappa^2/4), so the pump follows the
    /// square of the excitation envelope.
    pub fn parametric_envelope(&self, delta: T, kappa: T, t: T) -> T {
        let e = self.drive_envelope(t);
        e * e / (delta * delta + kappa * kappa / T::of(4.0)).sqrt()
    }
}

/// Adiabatic elimination of the strongly pumped second-harmonic mode:
/// effective gain `U = F chi / sqrt(4 delta^2 + gamma^2/4)` and phase
/// `theta = atan2(gamma, 4 delta) - theta0`, wrapped to (-pi, pi].
pub fn effective_pump_params<T: Real>(pump: &PumpParams<T>, delta: T) -> (T, T) {
    let denom = (T::of(4.0) * delta * delta + pump.gamma * pump.gamma / T::of(4.0)).sqrt();
    let u = pump.pump_f * pump.chi / denom;
    let theta = wrap_angle(pump.gamma.atan2(T::of(4.0) * delta) - pump.theta0);
    (u, theta)
}

/// Optimum antibunching conditions for given parametric gain:
/// `E = sqrt(U sqrt(delta^2 + kappa^2/4))` and `theta = atan2(kappa, 2 delta)`.
pub fn optimal_drive_conditions<T: Real>(u: T, delta: T, kappa: T) -> (T, T) {
    let e = (u * (delta * delta + kappa * kappa / T::of(4.0)).sqrt()).sqrt();
    let theta = kappa.atan2(T::of(2.0) * delta);
    (e, theta)
}

/// Effective Hamiltonian `H = delta n + E (a† + a) + U (e^{i theta} a†² + e^{-i theta} a²)`.
pub fn build_hamiltonian<T: Real>(params: &SystemParams<T>, dim: usize) -> Result<OperatorMatrix<T>> {
    if dim < 3 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "the two-photon term needs at least three levels",
        });
    }
    let a = annihilation_operator::<T>(dim)?;
    let adag = a.dagger();
    let n = number_operator::<T>(dim)?;

    let drive = a.add(&adag)?.scaled(re(params.drive_e));
    let phase = (im(params.theta)).exp();
    let two_photon_up = adag.matmul(&adag)?.scaled(phase * re(params.parametric_u));
    let two_photon_down = a.matmul(&a)?.scaled(phase.conj() * re(params.parametric_u));

    n.scaled(re(params.delta))
        .add(&drive)?
        .add(&two_photon_up)?
        .add(&two_photon_down)
}

/// Cavity linewidth from wavelength and quality factor:
/// `kappa = (2 pi c / lambda) / Q` in rad/ns.
pub fn cavity_linewidth<T: Real>(wavelength_m: T, quality_factor: T) -> T {
    let omega = T::TAU() * T::of(C_LIGHT_M_PER_NS) / wavelength_m;
    omega / quality_factor
}
