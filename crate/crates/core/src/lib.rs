//! Exact measurement statistics of a Brownian particle coupled to a linear
//! passive bath.
//!
//! The library computes, from a bath response function, the two correlation
//! kernels that fix every observable of repeated position measurements —
//! the mean square displacement s(t) and the commutator amplitude c(t) —
//! and from them the closed-form results: wave-packet spreading, two-slit
//! interference profiles, fringe attenuation and decoherence times. A
//! characteristic-function route (`measurement`) provides an independent
//! oracle for the same distributions via numerical Fourier inversion.
//!
//! Layout:
//!
//! * [`bath`] — bath response models and thermal scales,
//! * [`quad`] — adaptive Gauss–Kronrod quadrature,
//! * [`kernels`] — s(t), c(t) and the equilibrium variance,
//! * [`measurement`] — slit functions, characteristic functions, inversion,
//! * [`observables`] — the closed formulas.
//!
//! All quantities are in the caller's unit system ([`UnitSystem`]); the
//! defaults put ħ = k_B = m = 1.

pub mod bath;
pub mod error;
pub mod kernels;
pub mod measurement;
pub mod observables;
pub mod quad;

pub use bath::{thermal_scales, BathSpec, TabulatedBath, Temperature, ThermalScales, UnitSystem};
pub use num_complex::Complex64;
pub use error::{Error, Result};
pub use kernels::{
    commutator_amplitude, equilibrium_variance, is_high_temperature, kernel_pair,
    mean_square_displacement, ohmic_high_t_kernels, KernelPair, ThermalWeight, Variance,
};
pub use measurement::{
    invert_characteristic, invert_characteristic_2d, xi_joint, xi_single, CharacteristicSample,
    Inversion, MeasuringFunction,
};
pub use observables::{
    attenuation, attenuation_no_dissipation, conditional_spread, decoherence_time,
    interference_profile, joint_distribution, joint_gaussian_params, long_time_attenuation_rate,
    measured_decoherence_time, packet_width, single_distribution, DecoherenceEstimate,
    InterferenceProfile, JointGaussian, SpreadResult,
};
pub use quad::{Estimate, QuadratureConfig};
