//! Heat-bath couplings, unit conventions and thermal scales.
//!
//! The particle couples to its environment through the imaginary part of a
//! susceptibility Im α(ω + i0⁺); everything downstream (displacement and
//! commutator kernels, equilibrium variance) is an integral of Im α against
//! a thermal weight. Three couplings are supported: the Ohmic form
//! γ/(mω(ω² + γ²)), a free particle with no dissipation at all (closed
//! forms, no spectral integral), and a tabulated response interpolated
//! linearly on a frequency grid.

use crate::error::{Error, Result};

/// Values of ħ, k_B and the particle mass. The default sets all three to
/// one, which is the unit system used throughout the tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub boltzmann: f64,
    pub mass: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            boltzmann: 1.0,
            mass: 1.0,
        }
    }
}

impl UnitSystem {
    pub fn new(hbar: f64, boltzmann: f64, mass: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("boltzmann", boltzmann), ("mass", mass)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            hbar,
            boltzmann,
            mass,
        })
    }

    /// k_B·T in energy units.
    pub fn thermal_energy(&self, temp: Temperature) -> f64 {
        self.boltzmann * temp.value()
    }
}

/// Absolute temperature, T ≥ 0. Zero is meaningful: the thermal weight
/// coth(ħω/2kT) degenerates to 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Temperature(f64);

impl Temperature {
    pub const ZERO: Temperature = Temperature(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::domain(format!(
                "temperature must be finite and >= 0, got {value}"
            )));
        }
        Ok(Temperature(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

/// Mean thermal de Broglie wavelength λ̄ = ħ/√(mkT) and thermal velocity
/// v̄ = √(kT/m); their product with the mass recovers ħ identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalScales {
    pub wavelength: f64,
    pub velocity: f64,
}

pub fn thermal_scales(units: &UnitSystem, temp: Temperature) -> Result<ThermalScales> {
    if temp.is_zero() {
        return Err(Error::domain(
            "thermal scales are undefined at zero temperature",
        ));
    }
    let kt = units.thermal_energy(temp);
    Ok(ThermalScales {
        wavelength: units.hbar / (units.mass * kt).sqrt(),
        velocity: (kt / units.mass).sqrt(),
    })
}

/// Linearly interpolated Im α on a strictly ascending frequency grid; the
/// response is taken to vanish outside the tabulated support.
///
/// The grid must start at a strictly positive frequency: interpolating to a
/// nonzero value at ω = 0 would make the equilibrium-variance integrand
/// (which carries a 1/ω from the thermal weight) non-integrable.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedBath {
    omegas: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedBath {
    pub fn new(omegas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if omegas.len() < 2 {
            return Err(Error::domain("tabulated bath needs at least two points"));
        }
        if omegas.len() != values.len() {
            return Err(Error::domain(format!(
                "frequency and value columns differ in length: {} vs {}",
                omegas.len(),
                values.len()
            )));
        }
        if !(omegas[0] > 0.0) {
            return Err(Error::domain(
                "tabulated grid must start at a strictly positive frequency",
            ));
        }
        for w in omegas.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::domain(
                    "tabulated frequencies must be finite and strictly ascending",
                ));
            }
        }
        for &v in &values {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(
                    "tabulated Im alpha values must be finite and nonnegative",
                ));
            }
        }
        Ok(Self { omegas, values })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.omegas[0], *self.omegas.last().expect("len >= 2"))
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn value_at(&self, omega: f64) -> f64 {
        let (lo, hi) = self.support();
        if omega < lo || omega > hi {
            return 0.0;
        }
        // Binary search for the enclosing cell.
        let idx = match self
            .omegas
            .binary_search_by(|probe| probe.total_cmp(&omega))
        {
            Ok(i) => return self.values[i],
            Err(i) => i,
        };
        let (w0, w1) = (self.omegas[idx - 1], self.omegas[idx]);
        let (v0, v1) = (self.values[idx - 1], self.values[idx]);
        v0 + (v1 - v0) * (omega - w0) / (w1 - w0)
    }
}

/// The supported system-bath couplings.
#[derive(Debug, Clone, PartialEq)]
pub enum BathSpec {
    /// Im α(ω) = γ/(mω(ω² + γ²)), the Ohmic (velocity-damping) coupling.
    Ohmic { gamma: f64 },
    /// Free particle: the kernels take their exact dissipation-free limits
    /// and no spectral integral exists.
    NoDissipation,
    Tabulated(TabulatedBath),
}

impl BathSpec {
    pub fn ohmic(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain(format!(
                "ohmic gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(BathSpec::Ohmic { gamma })
    }

    pub fn tabulated(omegas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(BathSpec::Tabulated(TabulatedBath::new(omegas, values)?))
    }
}

/// Im α(ω + i0⁺) at a single positive frequency.
pub fn im_alpha(bath: &BathSpec, units: &UnitSystem, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!(
            "im_alpha requires omega > 0, got {omega}"
        )));
    }
    match bath {
        BathSpec::Ohmic { gamma } => {
            Ok(gamma / (units.mass * omega * (omega * omega + gamma * gamma)))
        }
        BathSpec::NoDissipation => Err(Error::UnsupportedBath(
            "a dissipation-free particle has no frequency-resolved response; use the closed-form kernels".into(),
        )),
        BathSpec::Tabulated(tab) => Ok(tab.value_at(omega)),
    }
}
