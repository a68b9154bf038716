//! Thin browser-facing wrappers around `qbm-core`. Each export takes plain
//! scalars, runs one sweep, and returns the curve as a flat array of
//! interleaved coordinate pairs so the page can plot it without any glue
//! objects crossing the boundary. Errors surface as thrown strings.
//!
//! A coupling rate of exactly zero selects the dissipation-free bath;
//! anything positive is the Ohmic bath at that rate. Temperatures are in
//! the natural units of the library (ħ = k_B = m = 1).

use wasm_bindgen::prelude::*;

use qbm_core::{
    attenuation, interference_profile, kernel_pair, packet_width, BathSpec, QuadratureConfig,
    Temperature, ThermalWeight, UnitSystem,
};

/// Interactive-use quadrature budget: looser than the library default but
/// still far below plotting resolution, and bounded so a pathological
/// slider position cannot hang the page.
fn quad() -> QuadratureConfig {
    QuadratureConfig::new(1e-7, 1e-10, 20_000).expect("static tolerances")
}

fn bath_for(gamma: f64) -> Result<BathSpec, String> {
    if gamma == 0.0 {
        Ok(BathSpec::NoDissipation)
    } else if gamma > 0.0 && gamma.is_finite() {
        Ok(BathSpec::Ohmic { gamma })
    } else {
        Err(format!("coupling rate must be zero or positive, got {gamma}"))
    }
}

fn time_grid(t_end: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(format!("t_end must be positive and finite, got {t_end}"));
    }
    if !(2..=100_000).contains(&points) {
        return Err(format!("points must be in 2..=100000, got {points}"));
    }
    let step = t_end / (points - 1) as f64;
    Ok((0..points).map(|i| i as f64 * step).collect())
}

/// Packet width w(t) on a linear grid from 0 to `t_end`, returned as
/// interleaved `[t0, w0, t1, w1, ...]`.
#[wasm_bindgen]
pub fn packet_width_curve(
    sigma1: f64,
    sigma2: f64,
    gamma: f64,
    temp: f64,
    t_end: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let bath = bath_for(gamma)?;
    let units = UnitSystem::default();
    let temp = Temperature::new(temp).map_err(|e| e.to_string())?;
    let grid = time_grid(t_end, points)?;
    let q = quad();
    let mut out = Vec::with_capacity(2 * grid.len());
    for t in grid {
        let kp = kernel_pair(&bath, &units, temp, ThermalWeight::Quantum, t, &q)
            .map_err(|e| e.to_string())?;
        let sr = packet_width(sigma1, sigma2, &kp).map_err(|e| e.to_string())?;
        out.push(t);
        out.push(sr.w2.sqrt());
    }
    Ok(out)
}

/// Fringe attenuation a(t) for slit separation `d`, returned as
/// interleaved `[t0, a0, t1, a1, ...]`.
#[wasm_bindgen]
pub fn attenuation_curve(
    d: f64,
    sigma1: f64,
    sigma2: f64,
    gamma: f64,
    temp: f64,
    t_end: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let bath = bath_for(gamma)?;
    let units = UnitSystem::default();
    let temp = Temperature::new(temp).map_err(|e| e.to_string())?;
    let grid = time_grid(t_end, points)?;
    let q = quad();
    let mut out = Vec::with_capacity(2 * grid.len());
    for t in grid {
        let kp = kernel_pair(&bath, &units, temp, ThermalWeight::Quantum, t, &q)
            .map_err(|e| e.to_string())?;
        let a = attenuation(d, sigma1, sigma2, &kp).map_err(|e| e.to_string())?;
        out.push(t);
        out.push(a);
    }
    Ok(out)
}

/// Detection-probability profile P(x) at a fixed lag `t`, sampled on
/// `points` equally spaced positions across `[-x_half, x_half]` and
/// returned as interleaved `[x0, P0, x1, P1, ...]`.
#[wasm_bindgen]
pub fn interference_curve(
    d: f64,
    sigma1: f64,
    sigma2: f64,
    gamma: f64,
    temp: f64,
    t: f64,
    x_half: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let bath = bath_for(gamma)?;
    let units = UnitSystem::default();
    let temp = Temperature::new(temp).map_err(|e| e.to_string())?;
    if !(x_half > 0.0) || !x_half.is_finite() {
        return Err(format!("x_half must be positive and finite, got {x_half}"));
    }
    if !(2..=100_000).contains(&points) {
        return Err(format!("points must be in 2..=100000, got {points}"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(format!("t must be finite and >= 0, got {t}"));
    }
    let kp = kernel_pair(&bath, &units, temp, ThermalWeight::Quantum, t, &quad())
        .map_err(|e| e.to_string())?;
    let step = 2.0 * x_half / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|i| -x_half + i as f64 * step).collect();
    let profile =
        interference_profile(&xs, d, sigma1, sigma2, &kp).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(2 * xs.len());
    for (x, p) in xs.iter().zip(profile.density.iter()) {
        out.push(*x);
        out.push(*p);
    }
    Ok(out)
}
