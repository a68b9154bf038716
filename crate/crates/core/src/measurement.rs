//! Measuring functions, their Fourier transforms, and the
//! characteristic-function oracle.
//!
//! A measurement with instrument profile α(x) turns the particle state into
//! a probability distribution whose characteristic function has a closed
//! integral representation over the profile's Fourier transform ᾶ(q). The
//! oracle evaluates those integrals numerically — one fold per measurement —
//! and inverts the result on a grid, providing an end-to-end check of every
//! closed-form distribution in [`crate::observables`] that shares no code
//! with them beyond the kernel values themselves.
//!
//! Phase convention: the two-time characteristic function carries the
//! commutator of the two position operators, which is the purely imaginary
//! c-number i·c₁₂. It enters here as the phase factor exp{+i q₁ k₂ c₁₂};
//! the sign was fixed by requiring agreement with the closed bivariate
//! Gaussian. For slit profiles whose |ᾶ| is even in q (every amplitude
//! centered profile, including both variants here regardless of center
//! offset) the opposite sign yields the same distribution, so the
//! convention only becomes observable for asymmetric profiles outside the
//! current vocabulary.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::Variance;
use crate::quad::{integrate, QuadratureConfig};

/// Required decay of |ξ| at the k-grid boundary before a discrete Fourier
/// inversion is trusted.
const BOUNDARY_DECAY: f64 = 1e-12;

/// Instrument profile α(x) of a position measurement. Both variants are
/// normalized so that ∫|α(x)|² dx = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasuringFunction {
    /// (2πσ²)^{-1/4} exp{−(x−c)²/4σ²}
    GaussianSlit { sigma: f64, center: f64 },
    /// Two Gaussian packets of common width σ at c ± d/2, with the
    /// overlap-aware normalization [8πσ²(1 + e^{−d²/8σ²})²]^{1/4}.
    DoubleSlit {
        separation: f64,
        sigma: f64,
        center: f64,
    },
}

impl MeasuringFunction {
    pub fn gaussian_slit(sigma: f64, center: f64) -> Result<Self> {
        check_width(sigma)?;
        check_finite("center", center)?;
        Ok(MeasuringFunction::GaussianSlit { sigma, center })
    }

    pub fn double_slit(separation: f64, sigma: f64, center: f64) -> Result<Self> {
        check_width(sigma)?;
        check_finite("center", center)?;
        if !(separation > 0.0) || !separation.is_finite() {
            return Err(Error::domain(format!(
                "slit separation must be positive and finite, got {separation}"
            )));
        }
        Ok(MeasuringFunction::DoubleSlit {
            separation,
            sigma,
            center,
        })
    }

    pub fn sigma(&self) -> f64 {
        match *self {
            MeasuringFunction::GaussianSlit { sigma, .. }
            | MeasuringFunction::DoubleSlit { sigma, .. } => sigma,
        }
    }
}

fn check_width(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!(
            "slit width must be positive and finite, got {sigma}"
        )));
    }
    Ok(())
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::domain(format!("{name} must be finite, got {v}")));
    }
    Ok(())
}

/// Pointwise profile value α(x).
pub fn alpha_value(mf: &MeasuringFunction, x: f64) -> f64 {
    match *mf {
        MeasuringFunction::GaussianSlit { sigma, center } => {
            let u = x - center;
            (2.0 * PI * sigma * sigma).powf(-0.25) * (-u * u / (4.0 * sigma * sigma)).exp()
        }
        MeasuringFunction::DoubleSlit {
            separation,
            sigma,
            center,
        } => {
            let u = x - center;
            let s2 = sigma * sigma;
            let overlap = (-separation * separation / (8.0 * s2)).exp();
            let norm = (8.0 * PI * s2).powf(0.25) * (1.0 + overlap).sqrt();
            let lobe = |z: f64| (-z * z / (4.0 * s2)).exp();
            (lobe(u - 0.5 * separation) + lobe(u + 0.5 * separation)) / norm
        }
    }
}

/// Analytic Fourier transform ᾶ(q) = ∫ dx α(x) e^{−iqx}.
pub fn alpha_fourier(mf: &MeasuringFunction, q: f64) -> Complex64 {
    match *mf {
        MeasuringFunction::GaussianSlit { sigma, center } => {
            let s2 = sigma * sigma;
            let magnitude = (8.0 * PI * s2).powf(0.25) * (-s2 * q * q).exp();
            magnitude * Complex64::from_polar(1.0, -q * center)
        }
        MeasuringFunction::DoubleSlit {
            separation,
            sigma,
            center,
        } => {
            let s2 = sigma * sigma;
            let overlap = (-separation * separation / (8.0 * s2)).exp();
            let norm = (8.0 * PI * s2).powf(0.25) * (1.0 + overlap).sqrt();
            let magnitude =
                2.0 * (4.0 * PI * s2).sqrt() * (0.5 * q * separation).cos() * (-s2 * q * q).exp()
                    / norm;
            magnitude * Complex64::from_polar(1.0, -q * center)
        }
    }
}

/// One sampled characteristic-function value; `k2` is absent for the
/// single-measurement case. ξ at k = 0 is 1 by normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicSample {
    pub k1: f64,
    pub k2: Option<f64>,
    pub value: Complex64,
}

/// Truncation half-width for the q-fold of one profile: beyond ~4/σ the
/// Gaussian envelope of ᾶ*ᾶ is below 10⁻¹³, so 8/σ plus the shift is
/// decisively past any contribution.
fn fold_half_width(mf: &MeasuringFunction, k: f64) -> f64 {
    8.0 / mf.sigma() + 0.5 * k.abs()
}

fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    let re = integrate(&|q| f(q).re, a, b, quad)?.value;
    let im = integrate(&|q| f(q).im, a, b, quad)?.value;
    Ok(Complex64::new(re, im))
}

/// Single-measurement characteristic function
///
/// ```text
/// ξ(k₁) = exp{−½k₁²⟨x²⟩} · (1/2π) ∫ dq₁ ᾶ(q₁−k₁/2)* ᾶ(q₁+k₁/2)
/// ```
///
/// evaluated by adaptive quadrature. Requires the finite-variance case;
/// free-particle scenarios are validated through conditional spreads
/// instead, where the divergent Gaussian prefactor cancels.
pub fn xi_single(
    mf: &MeasuringFunction,
    x2_mean: Variance,
    k1: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    check_finite("k1", k1)?;
    let v = finite_variance(x2_mean)?;
    let fold = |q: f64| alpha_fourier(mf, q - 0.5 * k1).conj() * alpha_fourier(mf, q + 0.5 * k1);
    let half = fold_half_width(mf, k1);
    let integral = integrate_complex(fold, -half, half, quad)?;
    Ok((-0.5 * k1 * k1 * v).exp() * integral / (2.0 * PI))
}

/// Two-measurement characteristic function
///
/// ```text
/// ξ(k₁,k₂) = exp{−½ Σ_{jl} S_{jl} k_j k_l}
///          · ∫∫ (dq₁ dq₂/4π²) ᾶ₁(q₁−k₁/2)* ᾶ₁(q₁+k₁/2)
///                             ᾶ₂(q₂−k₂/2)* ᾶ₂(q₂+k₂/2) e^{i q₁ k₂ c₁₂}
/// ```
///
/// with S the symmetric position covariance of the two times and c₁₂ the
/// commutator amplitude. The double integral factorizes exactly — the
/// commutator phase couples q₁ to the number k₂, not to q₂ — so each
/// factor is folded adaptively on its own and the tensor product is taken,
/// which is the same quadrature at a fraction of the evaluations.
pub fn xi_joint(
    mf1: &MeasuringFunction,
    mf2: &MeasuringFunction,
    covariance: [[f64; 2]; 2],
    c12: f64,
    k1: f64,
    k2: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    check_finite("k1", k1)?;
    check_finite("k2", k2)?;
    check_finite("c12", c12)?;
    let [[s11, s12], [s21, s22]] = covariance;
    let scale = s11.abs().max(s22.abs()).max(1e-300);
    if (s12 - s21).abs() > 1e-12 * scale {
        return Err(Error::domain(
            "covariance matrix must be symmetric",
        ));
    }
    if s11 < 0.0 || s22 < 0.0 || s11 * s22 - s12 * s12 < -1e-12 * scale * scale {
        return Err(Error::domain(
            "covariance matrix must be positive semidefinite",
        ));
    }

    let phase = k2 * c12;
    let fold1 = |q: f64| {
        alpha_fourier(mf1, q - 0.5 * k1).conj()
            * alpha_fourier(mf1, q + 0.5 * k1)
            * Complex64::from_polar(1.0, q * phase)
    };
    let fold2 = |q: f64| alpha_fourier(mf2, q - 0.5 * k2).conj() * alpha_fourier(mf2, q + 0.5 * k2);

    let h1 = fold_half_width(mf1, k1);
    let h2 = fold_half_width(mf2, k2);
    let i1 = integrate_complex(fold1, -h1, h1, quad)?;
    let i2 = integrate_complex(fold2, -h2, h2, quad)?;

    let exponent = -0.5 * (s11 * k1 * k1 + 2.0 * s12 * k1 * k2 + s22 * k2 * k2);
    Ok(exponent.exp() * i1 * i2 / (4.0 * PI * PI))
}

fn finite_variance(v: Variance) -> Result<f64> {
    match v {
        Variance::Finite(v) if v >= 0.0 => Ok(v),
        Variance::Finite(v) => Err(Error::domain(format!(
            "equilibrium variance must be nonnegative, got {v}"
        ))),
        Variance::Divergent => Err(Error::domain(
            "characteristic-function oracle requires a finite equilibrium variance; \
             unbound baths are validated through conditional spreads instead",
        )),
    }
}

/// A discretely inverted characteristic function: real densities over the
/// requested x grid(s), stored row major with `shape = (n_x1, n_x2)`; the
/// single-variable case has shape `(n, 1)`. `max_imag` is the largest
/// imaginary residue discarded when taking the real part.
#[derive(Debug, Clone)]
pub struct Inversion {
    pub density: Vec<f64>,
    pub shape: (usize, usize),
    pub max_imag: f64,
}

impl Inversion {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.density[i * self.shape.1 + j]
    }
}

fn check_k_grid(k: &[f64], n_xi: usize) -> Result<()> {
    if k.len() < 2 {
        return Err(Error::domain("k grid needs at least two points"));
    }
    if k.len() != n_xi {
        return Err(Error::domain(format!(
            "k grid and sample count differ: {} vs {}",
            k.len(),
            n_xi
        )));
    }
    for w in k.windows(2) {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::domain("k grid must be finite and strictly ascending"));
        }
    }
    Ok(())
}

/// Trapezoid weights of a (possibly non-uniform) ascending grid.
fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut w = vec![0.0; n];
    for i in 0..n {
        let left = if i == 0 { grid[0] } else { grid[i - 1] };
        let right = if i == n - 1 { grid[n - 1] } else { grid[i + 1] };
        w[i] = 0.5 * (right - left);
    }
    w
}

/// Discrete inversion W(x) = (1/2π) ∫ dk ξ(k) e^{−ikx} by trapezoid sum.
///
/// The sampled ξ must have decayed below 10⁻¹² at both grid ends; a
/// violation means the x-space result wraps around (aliasing), and the
/// computed — aliased — densities are returned inside the error for
/// inspection rather than silently.
pub fn invert_characteristic(
    k_grid: &[f64],
    xi: &[Complex64],
    x_grid: &[f64],
) -> Result<Inversion> {
    check_k_grid(k_grid, xi.len())?;
    if x_grid.is_empty() {
        return Err(Error::domain("x grid must be non-empty"));
    }
    let weights = trapezoid_weights(k_grid);
    let mut density = Vec::with_capacity(x_grid.len());
    let mut max_imag: f64 = 0.0;
    for &x in x_grid {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&k, &w), &v) in k_grid.iter().zip(&weights).zip(xi) {
            acc += w * v * Complex64::from_polar(1.0, -k * x);
        }
        acc /= 2.0 * PI;
        density.push(acc.re);
        max_imag = max_imag.max(acc.im.abs());
    }
    let partial = Inversion {
        density,
        shape: (x_grid.len(), 1),
        max_imag,
    };
    let max_boundary = xi[0].norm().max(xi[xi.len() - 1].norm());
    if max_boundary > BOUNDARY_DECAY {
        return Err(Error::Aliasing {
            max_boundary,
            partial,
        });
    }
    Ok(partial)
}

/// Two-dimensional inversion W(x₁,x₂) = (1/4π²) ∬ dk₁ dk₂ ξ e^{−ik₁x₁−ik₂x₂}.
///
/// `xi` is row major over (k₁, k₂). The sum is organized as two successive
/// matrix contractions, so the cost is O(n·m·(n_x1 + n_x2)) rather than the
/// naive four-index product. The boundary-decay requirement applies to the
/// entire rim of the k rectangle.
pub fn invert_characteristic_2d(
    k1_grid: &[f64],
    k2_grid: &[f64],
    xi: &[Complex64],
    x1_grid: &[f64],
    x2_grid: &[f64],
) -> Result<Inversion> {
    if k1_grid.len() < 2 || k2_grid.len() < 2 {
        return Err(Error::domain("k grids need at least two points"));
    }
    if xi.len() != k1_grid.len() * k2_grid.len() {
        return Err(Error::domain(format!(
            "expected {} row-major samples, got {}",
            k1_grid.len() * k2_grid.len(),
            xi.len()
        )));
    }
    check_k_grid(k1_grid, k1_grid.len())?;
    check_k_grid(k2_grid, k2_grid.len())?;
    if x1_grid.is_empty() || x2_grid.is_empty() {
        return Err(Error::domain("x grids must be non-empty"));
    }

    let (n1, n2) = (k1_grid.len(), k2_grid.len());
    let w1 = trapezoid_weights(k1_grid);
    let w2 = trapezoid_weights(k2_grid);

    // First contraction: fold k₁ against each x₁.
    let mut half = vec![Complex64::new(0.0, 0.0); x1_grid.len() * n2];
    for (i, &x1) in x1_grid.iter().enumerate() {
        for (a, &k1) in k1_grid.iter().enumerate() {
            let rot = w1[a] * Complex64::from_polar(1.0, -k1 * x1);
            let row = &xi[a * n2..(a + 1) * n2];
            let out = &mut half[i * n2..(i + 1) * n2];
            for (o, &v) in out.iter_mut().zip(row) {
                *o += rot * v;
            }
        }
    }

    // Second contraction: fold k₂ against each x₂.
    let mut density = Vec::with_capacity(x1_grid.len() * x2_grid.len());
    let mut max_imag: f64 = 0.0;
    for i in 0..x1_grid.len() {
        let row = &half[i * n2..(i + 1) * n2];
        for &x2 in x2_grid {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&k2, &w), &v) in k2_grid.iter().zip(&w2).zip(row) {
                acc += w * v * Complex64::from_polar(1.0, -k2 * x2);
            }
            acc /= 4.0 * PI * PI;
            density.push(acc.re);
            max_imag = max_imag.max(acc.im.abs());
        }
    }
    let partial = Inversion {
        density,
        shape: (x1_grid.len(), x2_grid.len()),
        max_imag,
    };

    let mut max_boundary: f64 = 0.0;
    for a in 0..n1 {
        for b in 0..n2 {
            if a == 0 || a == n1 - 1 || b == 0 || b == n2 - 1 {
                max_boundary = max_boundary.max(xi[a * n2 + b].norm());
            }
        }
    }
    if max_boundary > BOUNDARY_DECAY {
        return Err(Error::Aliasing {
            max_boundary,
            partial,
        });
    }
    Ok(partial)
}
