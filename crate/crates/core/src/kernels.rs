//! The two time-domain kernels that carry all of the dynamics.
//!
//! Every distribution this library produces is Gaussian, and every Gaussian
//! parameter is built from two scalar functions of the time lag:
//!
//! * the mean square displacement
//!   `s(t) = (2ħ/π) ∫₀^∞ dω Im α(ω) · coth(ħω/2kT) · (1 − cos ωt)`, and
//! * the commutator amplitude `c(t)`, the real function with
//!   `[x(t₁), x(t₁+t)] = i·c(t)`, given by the same integral with the
//!   thermal factor dropped and `(1 − cos ωt)` replaced by `sin ωt`.
//!
//! Both integrands are even under `t → −t` up to sign conventions, so the
//! API restricts to `t ≥ 0`. The integrals are oscillatory with an
//! algebraically decaying envelope; they are evaluated by half-period panel
//! splitting with series acceleration (see [`crate::quad`]). Closed forms
//! are provided for the two cases where the integral collapses: the Ohmic
//! bath at high temperature (kT ≫ ħγ) and the dissipation-free particle.

use std::f64::consts::PI;

use crate::bath::{BathSpec, TabulatedBath, Temperature, UnitSystem};
use crate::error::{Error, Result};
use crate::quad::{integrate_oscillatory, integrate_segmented, QuadratureConfig};

/// Thermal occupation factor applied to the displacement integrand.
///
/// `Quantum` is the physical weight coth(ħω/2kT), with the T → 0 limit
/// handled as coth → 1. `Classical` replaces it by its high-temperature
/// (equipartition) limit 2kT/ħω — the weight that the Ohmic closed forms
/// resum exactly, and therefore the right choice when validating the
/// quadrature against them. At any finite temperature the two differ by a
/// genuine zero-point contribution of relative size ~(ħω/kT)²/12, so the
/// quantum weight can never match the closed forms to better than that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalWeight {
    Quantum,
    Classical,
}

/// s(t) and c(t) evaluated at a common lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPair {
    pub t: f64,
    /// Mean square displacement ⟨{x(t₁) − x(t₁+t)}²⟩.
    pub s: f64,
    /// Commutator amplitude, temperature independent by construction.
    pub c: f64,
}

/// Equilibrium position variance ⟨x²⟩. Unbound baths (Ohmic, dissipation
/// free) have no finite value; only a tabulated response with compact
/// support yields one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variance {
    Finite(f64),
    Divergent,
}

impl Variance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Variance::Finite(v) => Some(v),
            Variance::Divergent => None,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!(
            "time lag must be finite and >= 0, got {t}"
        )));
    }
    Ok(())
}

/// coth for strictly positive argument, stable at both ends.
fn coth(x: f64) -> f64 {
    if x < 1e-4 {
        // Laurent series; the x³ term keeps the error below 1e-16 here.
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else if x > 20.0 {
        1.0
    } else {
        let e = (-2.0 * x).exp();
        (1.0 + e) / (1.0 - e)
    }
}

fn weight_value(hbar: f64, kt: f64, weight: ThermalWeight, omega: f64) -> f64 {
    match weight {
        ThermalWeight::Quantum => {
            if kt == 0.0 {
                1.0
            } else {
                coth(hbar * omega / (2.0 * kt))
            }
        }
        ThermalWeight::Classical => 2.0 * kt / (hbar * omega),
    }
}

/// (1 − cos ωt)/ω written as 2 sin²(ωt/2)/ω: positive, cancellation free,
/// and with the correct ω t²/2 behavior at small ω.
fn pulse_over_omega(omega: f64, t: f64) -> f64 {
    let sh = (0.5 * omega * t).sin();
    2.0 * sh * sh / omega
}

/// Segment boundaries for a tabulated-bath kernel integral: the grid nodes
/// themselves plus the half-period multiples of π/t falling inside the
/// support, so no panel spans more than one oscillation lobe. If the lag is
/// so long that the half-period count explodes, the extra points are
/// omitted and plain adaptive refinement (bounded by the panel budget)
/// takes over.
fn oscillation_breaks(tab: &TabulatedBath, t: f64) -> Vec<f64> {
    let mut breaks = tab.omegas().to_vec();
    let (lo, hi) = tab.support();
    if t > 0.0 {
        let half_period = PI / t;
        let count = (hi - lo) / half_period;
        if count >= 1.0 && count <= 100_000.0 {
            let mut k = (lo / half_period).floor() + 1.0;
            while k * half_period < hi {
                breaks.push(k * half_period);
                k += 1.0;
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// Mean square displacement s(t).
///
/// Ohmic and tabulated baths are integrated numerically to the requested
/// tolerances; the dissipation-free particle short-circuits to its analytic
/// limit s = kT t²/m, which is independent of the thermal weight (the
/// spectral mass concentrates at ω → 0 where the two weights coincide).
pub fn mean_square_displacement(
    bath: &BathSpec,
    units: &UnitSystem,
    temp: Temperature,
    weight: ThermalWeight,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let kt = units.thermal_energy(temp);
    let hbar = units.hbar;
    match bath {
        BathSpec::NoDissipation => Ok(kt * t * t / units.mass),
        BathSpec::Ohmic { gamma } => {
            let (g, m) = (*gamma, units.mass);
            let f = move |w: f64| {
                // Im α·ω stays bounded and the thermal factor is paired
                // with the 1/ω pulse so no intermediate can overflow.
                let envelope = g / (m * (w * w + g * g));
                let thermal_pulse = weight_value(hbar, kt, weight, w) * pulse_over_omega(w, t);
                (2.0 * hbar / PI) * envelope * thermal_pulse
            };
            Ok(integrate_oscillatory(&f, PI / t, quad)?.value)
        }
        BathSpec::Tabulated(tab) => {
            // Compact support away from ω = 0, so the plain product is safe.
            let f = |w: f64| {
                let sh = (0.5 * w * t).sin();
                (2.0 * hbar / PI)
                    * tab.value_at(w)
                    * weight_value(hbar, kt, weight, w)
                    * 2.0
                    * sh
                    * sh
            };
            let breaks = oscillation_breaks(tab, t);
            Ok(integrate_segmented(&f, &breaks, quad)?.value)
        }
    }
}

/// Commutator amplitude c(t); purely quantum (∝ ħ) and independent of
/// temperature, which the signature enforces by not taking one.
pub fn commutator_amplitude(
    bath: &BathSpec,
    units: &UnitSystem,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let hbar = units.hbar;
    match bath {
        BathSpec::NoDissipation => Ok(hbar * t / units.mass),
        BathSpec::Ohmic { gamma } => {
            let (g, m) = (*gamma, units.mass);
            let f = move |w: f64| {
                let envelope = g / (m * (w * w + g * g));
                (2.0 * hbar / PI) * envelope * (w * t).sin() / w
            };
            Ok(integrate_oscillatory(&f, PI / t, quad)?.value)
        }
        BathSpec::Tabulated(tab) => {
            let f = |w: f64| (2.0 * hbar / PI) * tab.value_at(w) * (w * t).sin();
            let breaks = oscillation_breaks(tab, t);
            Ok(integrate_segmented(&f, &breaks, quad)?.value)
        }
    }
}

/// Both kernels at one lag.
pub fn kernel_pair(
    bath: &BathSpec,
    units: &UnitSystem,
    temp: Temperature,
    weight: ThermalWeight,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<KernelPair> {
    Ok(KernelPair {
        t,
        s: mean_square_displacement(bath, units, temp, weight, t, quad)?,
        c: commutator_amplitude(bath, units, t, quad)?,
    })
}

/// Closed-form Ohmic kernels in the high-temperature regime kT ≫ ħγ:
///
/// ```text
/// s(t) = (2kT/mγ)(t − (1 − e^{−γt})/γ)
/// c(t) = (ħ/mγ)(1 − e^{−γt})
/// ```
///
/// The regime condition is the caller's responsibility (see
/// [`is_high_temperature`] for a soft check); c(t) as written is in fact
/// exact for the Ohmic bath at any temperature. For γt ≪ 1 both reduce to
/// the dissipation-free limits kT t²/m and ħt/m.
pub fn ohmic_high_t_kernels(
    gamma: f64,
    units: &UnitSystem,
    temp: Temperature,
    t: f64,
) -> Result<KernelPair> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!(
            "ohmic gamma must be positive and finite, got {gamma}"
        )));
    }
    check_time(t)?;
    let u = gamma * t;
    // u + expm1(−u) = u²/2 − u³/6 + …; the direct form loses relative
    // accuracy like 2ε/u, so switch to the series for small arguments.
    let ramp = if u < 1e-4 {
        u * u * (0.5 - u / 6.0 + u * u / 24.0 - u * u * u / 120.0)
    } else {
        u + (-u).exp_m1()
    };
    let kt = units.thermal_energy(temp);
    Ok(KernelPair {
        t,
        s: 2.0 * kt / (units.mass * gamma * gamma) * ramp,
        c: units.hbar / (units.mass * gamma) * -(-u).exp_m1(),
    })
}

/// Soft regime check for [`ohmic_high_t_kernels`]: kT ≥ 10 ħγ.
pub fn is_high_temperature(gamma: f64, units: &UnitSystem, temp: Temperature) -> bool {
    units.thermal_energy(temp) >= 10.0 * units.hbar * gamma
}

/// Equilibrium variance ⟨x²⟩ = (ħ/π) ∫ dω Im α(ω) coth(ħω/2kT).
///
/// For the unbound cases the integral diverges at ω → 0 and the result
/// reports that rather than attempting a cutoff; a tabulated bath with its
/// compact, ω > 0 support is the one way to a finite value.
pub fn equilibrium_variance(
    bath: &BathSpec,
    units: &UnitSystem,
    temp: Temperature,
    quad: &QuadratureConfig,
) -> Result<Variance> {
    match bath {
        BathSpec::Ohmic { .. } | BathSpec::NoDissipation => Ok(Variance::Divergent),
        BathSpec::Tabulated(tab) => {
            let kt = units.thermal_energy(temp);
            let hbar = units.hbar;
            let f = |w: f64| {
                hbar / PI * tab.value_at(w) * if kt == 0.0 { 1.0 } else { coth(hbar * w / (2.0 * kt)) }
            };
            let est = integrate_segmented(&f, tab.omegas(), quad)?;
            Ok(Variance::Finite(est.value))
        }
    }
}
