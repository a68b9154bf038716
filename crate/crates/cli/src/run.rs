//! The sweep drivers behind each subcommand. Rows are computed in parallel
//! and assembled in grid order; per-row numerical failures land in the
//! `status` column as a short tag with `nan` numeric cells, so a sweep
//! always produces its full row count.

use rayon::prelude::*;

use qbm_core::{
    attenuation, attenuation_no_dissipation, decoherence_time, equilibrium_variance,
    interference_profile, joint_distribution, joint_gaussian_params, kernel_pair,
    long_time_attenuation_rate, ohmic_high_t_kernels, packet_width, xi_joint, BathSpec, Error,
    KernelPair, MeasuringFunction, Variance,
};

use crate::scenario::{ConfigError, Scenario};
use crate::sweep::{format_sig, Cell, SweepOutput};

/// Result of one subcommand run: the table to write, plus how many rows
/// (if any) carry a failure tag. A nonzero count maps to exit code 1.
pub struct RunOutcome {
    pub sweep: SweepOutput,
    pub failed_rows: usize,
}

fn status_tag(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::UnsupportedBath(_) => "unsupported-bath",
        Error::Convergence { .. } => "convergence",
        Error::InconsistentInputs(_) => "inconsistent-inputs",
        Error::Aliasing { .. } => "aliasing",
    }
}

fn base_metadata(subcommand: &str, sc: &Scenario) -> Vec<(String, String)> {
    let mut meta = vec![
        ("qbm-version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("subcommand".to_string(), subcommand.to_string()),
    ];
    meta.extend(sc.metadata());
    meta
}

/// Numerical failure that prevented any rows from being produced; the
/// caller still writes the (empty) table so the metadata survives.
pub struct NumericFailure {
    pub sweep: SweepOutput,
    pub message: String,
}

pub enum RunError {
    Config(ConfigError),
    Numeric(Box<NumericFailure>),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

fn numeric_failure(
    meta: Vec<(String, String)>,
    columns: Vec<&'static str>,
    e: &Error,
) -> RunError {
    RunError::Numeric(Box::new(NumericFailure {
        sweep: SweepOutput {
            metadata: meta,
            columns,
            rows: Vec::new(),
        },
        message: e.to_string(),
    }))
}

/// Closed-form kernel reference, where one exists: the free-particle pair
/// is its own reference and the Ohmic pair has the exponential-ramp
/// high-temperature formulas (c exact at any temperature).
fn closed_pair(sc: &Scenario, t: f64) -> Option<KernelPair> {
    match &sc.bath {
        BathSpec::NoDissipation => {
            let kt = sc.units.thermal_energy(sc.temp);
            Some(KernelPair {
                t,
                s: kt * t * t / sc.units.mass,
                c: sc.units.hbar * t / sc.units.mass,
            })
        }
        BathSpec::Ohmic { gamma } => ohmic_high_t_kernels(*gamma, &sc.units, sc.temp, t).ok(),
        BathSpec::Tabulated(_) => None,
    }
}

pub fn run_kernels(sc: &Scenario) -> Result<RunOutcome, RunError> {
    let grid = sc.time_grid()?;
    let with_closed = !matches!(sc.bath, BathSpec::Tabulated(_));
    let columns: Vec<&'static str> = if with_closed {
        vec!["t", "s", "c", "s_closed", "c_closed", "status"]
    } else {
        vec!["t", "s", "c", "status"]
    };

    let rows: Vec<(Vec<Cell>, bool)> = grid
        .par_iter()
        .map(|&t| {
            match kernel_pair(&sc.bath, &sc.units, sc.temp, sc.weight, t, &sc.quad) {
                Ok(kp) => {
                    let mut row: Vec<Cell> = vec![t.into(), kp.s.into(), kp.c.into()];
                    if with_closed {
                        match closed_pair(sc, t) {
                            Some(cp) => {
                                row.push(cp.s.into());
                                row.push(cp.c.into());
                            }
                            None => {
                                row.push(f64::NAN.into());
                                row.push(f64::NAN.into());
                            }
                        }
                    }
                    row.push("ok".into());
                    (row, false)
                }
                Err(e) => {
                    let mut row: Vec<Cell> = vec![t.into()];
                    let numeric = if with_closed { 4 } else { 2 };
                    row.extend(std::iter::repeat_with(|| Cell::Num(f64::NAN)).take(numeric));
                    row.push(status_tag(&e).into());
                    (row, true)
                }
            }
        })
        .collect();
    let failed_rows = rows.iter().filter(|(_, failed)| *failed).count();

    Ok(RunOutcome {
        sweep: SweepOutput {
            metadata: base_metadata("kernels", sc),
            columns,
            rows: rows.into_iter().map(|(row, _)| row).collect(),
        },
        failed_rows,
    })
}

pub fn run_spread(sc: &Scenario) -> Result<RunOutcome, RunError> {
    let grid = sc.time_grid()?;
    let columns = vec!["t", "s", "c", "w2", "status"];
    let rows: Vec<(Vec<Cell>, bool)> = grid
        .par_iter()
        .map(|&t| {
            match kernel_pair(&sc.bath, &sc.units, sc.temp, sc.weight, t, &sc.quad)
                .and_then(|kp| Ok((kp, packet_width(sc.sigma1, sc.sigma2, &kp)?)))
            {
                Ok((kp, spread)) => (
                    vec![t.into(), kp.s.into(), kp.c.into(), spread.w2.into(), "ok".into()],
                    false,
                ),
                Err(e) => (
                    vec![
                        t.into(),
                        f64::NAN.into(),
                        f64::NAN.into(),
                        f64::NAN.into(),
                        status_tag(&e).into(),
                    ],
                    true,
                ),
            }
        })
        .collect();
    let failed_rows = rows.iter().filter(|(_, failed)| *failed).count();
    Ok(RunOutcome {
        sweep: SweepOutput {
            metadata: base_metadata("spread", sc),
            columns,
            rows: rows.into_iter().map(|(row, _)| row).collect(),
        },
        failed_rows,
    })
}

pub fn run_attenuation(sc: &Scenario) -> Result<RunOutcome, RunError> {
    let grid = sc.time_grid()?;
    let d = sc.separation()?;
    let columns = vec!["t", "w2", "a", "a_no_dissipation", "status"];
    let rows: Vec<(Vec<Cell>, bool)> = grid
        .par_iter()
        .map(|&t| {
            let result = kernel_pair(&sc.bath, &sc.units, sc.temp, sc.weight, t, &sc.quad)
                .and_then(|kp| {
                    let w2 = packet_width(sc.sigma1, sc.sigma2, &kp)?.w2;
                    let a = attenuation(d, sc.sigma1, sc.sigma2, &kp)?;
                    // The σ₂ = 0 free-particle reference curve.
                    let a_nd =
                        attenuation_no_dissipation(t, d, sc.sigma1, &sc.units, sc.temp)?;
                    Ok((w2, a, a_nd))
                });
            match result {
                Ok((w2, a, a_nd)) => (
                    vec![t.into(), w2.into(), a.into(), a_nd.into(), "ok".into()],
                    false,
                ),
                Err(e) => (
                    vec![
                        t.into(),
                        f64::NAN.into(),
                        f64::NAN.into(),
                        f64::NAN.into(),
                        status_tag(&e).into(),
                    ],
                    true,
                ),
            }
        })
        .collect();
    let failed_rows = rows.iter().filter(|(_, failed)| *failed).count();
    Ok(RunOutcome {
        sweep: SweepOutput {
            metadata: base_metadata("attenuation", sc),
            columns,
            rows: rows.into_iter().map(|(row, _)| row).collect(),
        },
        failed_rows,
    })
}

pub fn run_interference(sc: &Scenario) -> Result<RunOutcome, RunError> {
    let xs = sc.x_grid()?;
    let d = sc.separation()?;
    let t = sc.t_end;
    let mut meta = base_metadata("interference", sc);
    let columns = vec!["x", "P"];

    let kp = match kernel_pair(&sc.bath, &sc.units, sc.temp, sc.weight, t, &sc.quad) {
        Ok(kp) => kp,
        Err(e) => return Err(numeric_failure(meta, columns, &e)),
    };
    let profile = match interference_profile(&xs, d, sc.sigma1, sc.sigma2, &kp) {
        Ok(p) => p,
        Err(e) => return Err(numeric_failure(meta, columns, &e)),
    };
    meta.push(("t".into(), format_sig(profile.t, sc.digits)));
    meta.push(("w2".into(), format_sig(profile.w2, sc.digits)));
    meta.push((
        "attenuation".into(),
        format_sig(profile.attenuation, sc.digits),
    ));

    let rows = xs
        .iter()
        .zip(&profile.density)
        .map(|(&x, &p)| vec![Cell::from(x), Cell::from(p)])
        .collect();
    Ok(RunOutcome {
        sweep: SweepOutput {
            metadata: meta,
            columns,
            rows,
        },
        failed_rows: 0,
    })
}

pub fn run_oracle(sc: &Scenario) -> Result<RunOutcome, RunError> {
    let xs = sc.x_grid()?;
    let t = sc.t_end;
    let columns = vec!["x1", "x2", "W_closed", "W_oracle", "abs_err"];
    let mut meta = base_metadata("oracle", sc);

    if sc.sigma2 <= 0.0 {
        return Err(ConfigError(
            "oracle needs --sigma2 > 0: the second measurement must have a width \
             for the joint distribution to be sampled"
                .into(),
        )
        .into());
    }
    let variance = match equilibrium_variance(&sc.bath, &sc.units, sc.temp, &sc.quad) {
        Ok(Variance::Finite(v)) => v,
        Ok(Variance::Divergent) => {
            return Err(ConfigError(
                "oracle unsupported for this scenario: the bath has a divergent equilibrium \
                 variance (ohmic and dissipation-free responses); use a tabulated bath, or \
                 validate through the interference profile instead"
                    .into(),
            )
            .into())
        }
        Err(e) => return Err(numeric_failure(meta, columns, &e)),
    };

    let kp = match kernel_pair(&sc.bath, &sc.units, sc.temp, sc.weight, t, &sc.quad) {
        Ok(kp) => kp,
        Err(e) => return Err(numeric_failure(meta, columns, &e)),
    };
    let jg = match joint_gaussian_params(sc.sigma1, sc.sigma2, Variance::Finite(variance), &kp) {
        Ok(jg) => jg,
        Err(e) => return Err(numeric_failure(meta, columns, &e)),
    };

    // k rectangle sized from the smallest covariance eigenvalue of the
    // characteristic function's Gaussian: the rim then decays below the
    // aliasing threshold on every edge.
    let sg2 = jg.sigma * jg.sigma;
    let tau2 = jg.tau * jg.tau;
    let cov = variance - 0.5 * kp.s;
    let lam_min = 0.5 * (sg2 + tau2 - ((sg2 - tau2).powi(2) + 4.0 * cov * cov).sqrt());
    let kmax = (2.0 * 30.0 / lam_min).sqrt();
    let reach = xs.iter().fold(0.0f64, |m, &x| m.max(x.abs())) + 10.0 * jg.sigma.max(jg.tau);
    let n_k = ((kmax * reach / std::f64::consts::PI).ceil() as usize + 1).clamp(64, 2048);
    let k_grid: Vec<f64> = (0..n_k)
        .map(|i| -kmax + 2.0 * kmax * i as f64 / (n_k - 1) as f64)
        .collect();
    meta.push(("k-max".into(), format_sig(kmax, sc.digits)));
    meta.push(("k-points".into(), format!("{n_k}")));

    let mf1 = match MeasuringFunction::gaussian_slit(sc.sigma1, 0.0) {
        Ok(mf) => mf,
        Err(e) => return Err(numeric_failure(meta, columns, &e)),
    };
    let mf2 = match MeasuringFunction::gaussian_slit(sc.sigma2, 0.0) {
        Ok(mf) => mf,
        Err(e) => return Err(numeric_failure(meta, columns, &e)),
    };
    let covariance = [[variance, cov], [cov, variance]];

    let xi_rows: Result<Vec<Vec<qbm_core::Complex64>>, Error> = k_grid
        .par_iter()
        .map(|&k1| {
            k_grid
                .iter()
                .map(|&k2| xi_joint(&mf1, &mf2, covariance, kp.c, k1, k2, &sc.quad))
                .collect()
        })
        .collect();
    let xi: Vec<qbm_core::Complex64> = match xi_rows {
        Ok(rows) => rows.into_iter().flatten().collect(),
        Err(e) => return Err(numeric_failure(meta, columns, &e)),
    };

    let inversion =
        match qbm_core::invert_characteristic_2d(&k_grid, &k_grid, &xi, &xs, &xs) {
            Ok(inv) => inv,
            Err(e) => return Err(numeric_failure(meta, columns, &e)),
        };

    let mut rows = Vec::with_capacity(xs.len() * xs.len());
    let mut linf = 0.0f64;
    for (i, &x1) in xs.iter().enumerate() {
        for (j, &x2) in xs.iter().enumerate() {
            let closed = joint_distribution(&jg, x1, x2);
            let oracle = inversion.at(i, j);
            let err = (closed - oracle).abs();
            linf = linf.max(err);
            rows.push(vec![
                Cell::from(x1),
                Cell::from(x2),
                Cell::from(closed),
                Cell::from(oracle),
                Cell::from(err),
            ]);
        }
    }
    meta.push(("linf".into(), format_sig(linf, sc.digits)));

    Ok(RunOutcome {
        sweep: SweepOutput {
            metadata: meta,
            columns,
            rows,
        },
        failed_rows: 0,
    })
}

pub fn run_decoherence_time(sc: &Scenario) -> Result<RunOutcome, RunError> {
    let d = sc.separation()?;
    let columns = vec!["tau_d", "rate", "separation_ok", "thermal_ok", "weak_coupling"];
    let meta = base_metadata("decoherence-time", sc);
    let est = match decoherence_time(d, sc.sigma1, &sc.units, sc.temp, &sc.bath) {
        Ok(est) => est,
        Err(e) => return Err(numeric_failure(meta, columns, &e)),
    };
    // Long-time attenuation slope: defined by the bath's single decay rate,
    // so zero without dissipation and undefined for a tabulated response.
    let rate = match &sc.bath {
        BathSpec::Ohmic { gamma } => {
            match long_time_attenuation_rate(d, *gamma, &sc.units, sc.temp) {
                Ok(r) => r,
                Err(e) => return Err(numeric_failure(meta, columns, &e)),
            }
        }
        BathSpec::NoDissipation => 0.0,
        BathSpec::Tabulated(_) => f64::NAN,
    };
    let weak = match est.weak_coupling {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    };
    let row = vec![
        Cell::from(est.tau_d),
        Cell::from(rate),
        Cell::from(est.separation_ok),
        Cell::from(est.thermal_ok),
        Cell::from(weak),
    ];
    Ok(RunOutcome {
        sweep: SweepOutput {
            metadata: meta,
            columns,
            rows: vec![row],
        },
        failed_rows: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{OutputFormat, Scale};
    use qbm_core::{QuadratureConfig, Temperature, ThermalWeight, UnitSystem};

    fn starved_scenario() -> Scenario {
        Scenario {
            bath: BathSpec::Ohmic { gamma: 1.0 },
            bath_label: "ohmic".into(),
            gamma: Some(1.0),
            units: UnitSystem::default(),
            temp: Temperature::new(1.0).unwrap(),
            sigma1: 1.0,
            sigma2: 0.0,
            d: None,
            t_start: 0.5,
            t_end: 2.0,
            t_points: 4,
            t_scale: Scale::Linear,
            x_min: -10.0,
            x_max: 10.0,
            x_points: 201,
            // One panel cannot meet a 1e-9 tolerance on the quantum-weight
            // integrand, so every row must fail with a convergence tag.
            quad: QuadratureConfig::new(1e-9, 1e-12, 1).unwrap(),
            weight: ThermalWeight::Quantum,
            digits: 12,
            format: OutputFormat::Csv,
        }
    }

    #[test]
    fn starved_quadrature_tags_every_row() {
        let sc = starved_scenario();
        let Ok(outcome) = run_kernels(&sc) else {
            panic!("per-row failures must not abort the sweep");
        };
        assert_eq!(outcome.failed_rows, 4);
        assert_eq!(outcome.sweep.rows.len(), 4);
        for row in &outcome.sweep.rows {
            assert!(matches!(&row[1], Cell::Num(x) if x.is_nan()));
            assert!(matches!(&row[5], Cell::Text(tag) if tag == "convergence"));
        }
    }

    #[test]
    fn spread_keeps_grid_order_under_partial_failure() {
        let sc = starved_scenario();
        let Ok(outcome) = run_spread(&sc) else {
            panic!("per-row failures must not abort the sweep");
        };
        assert_eq!(outcome.failed_rows, 4);
        let t_first = match outcome.sweep.rows[0][0] {
            Cell::Num(t) => t,
            _ => unreachable!(),
        };
        assert_eq!(t_first, 0.5);
    }
}
