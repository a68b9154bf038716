//! `qbm` — sweeps over the measurement statistics of quantum Brownian
//! motion: correlation kernels, wave-packet spreading, two-slit
//! interference, fringe attenuation, decoherence times, and an oracle
//! cross-check of the closed-form joint distribution.

mod run;
mod scenario;
mod sweep;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use run::{RunError, RunOutcome};
use scenario::{ConfigError, Draft, Scenario};

#[derive(Parser)]
#[command(
    name = "qbm",
    version,
    about = "Measurement statistics of a Brownian particle in a thermal bath",
    long_about = "Computes the two correlation kernels of repeated position measurements \
                  and everything built on them: packet spreading, two-slit interference \
                  profiles, fringe attenuation, and decoherence times. Outputs CSV (with a \
                  `#` metadata block) or JSON; identical inputs give byte-identical output."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the displacement kernel s(t) and commutator amplitude c(t)
    /// over the time grid; closed-form reference columns where available.
    Kernels(CommonArgs),
    /// Sweep the mean square packet width w²(t) over the time grid.
    Spread(CommonArgs),
    /// Two-slit interference profile P(x) at the fixed lag --t-end.
    Interference(CommonArgs),
    /// Sweep the fringe attenuation a(t) over the time grid, with the
    /// dissipation-free reference curve alongside.
    Attenuation(CommonArgs),
    /// Cross-check the closed-form joint distribution against numerical
    /// inversion of the characteristic function (finite-variance baths).
    Oracle(CommonArgs),
    /// Decoherence time, regime flags and the long-time attenuation rate.
    DecoherenceTime(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file of `key = value` lines mirroring these flags;
    /// flags override file values.
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,

    /// Bath response: ohmic, none, or tabulated:<file>.
    #[arg(long)]
    bath: Option<String>,
    /// Ohmic relaxation rate γ (required for --bath ohmic).
    #[arg(long)]
    gamma: Option<f64>,
    /// Bath temperature.
    #[arg(long)]
    temp: Option<f64>,
    /// First slit width σ₁.
    #[arg(long)]
    sigma1: Option<f64>,
    /// Second measurement width σ₂.
    #[arg(long)]
    sigma2: Option<f64>,
    /// Slit separation d.
    #[arg(long)]
    d: Option<f64>,

    /// Time grid start.
    #[arg(long)]
    t_start: Option<f64>,
    /// Time grid end; also the fixed lag for interference and oracle.
    #[arg(long)]
    t_end: Option<f64>,
    /// Time grid points.
    #[arg(long)]
    t_points: Option<usize>,
    /// Time grid spacing: linear or log.
    #[arg(long)]
    t_scale: Option<String>,

    /// Position grid minimum.
    #[arg(long, allow_negative_numbers = true)]
    x_min: Option<f64>,
    /// Position grid maximum.
    #[arg(long, allow_negative_numbers = true)]
    x_max: Option<f64>,
    /// Position grid points.
    #[arg(long)]
    x_points: Option<usize>,

    /// Planck constant ħ.
    #[arg(long)]
    hbar: Option<f64>,
    /// Particle mass m.
    #[arg(long)]
    mass: Option<f64>,
    /// Boltzmann constant k_B.
    #[arg(long)]
    kb: Option<f64>,

    /// Relative quadrature tolerance (also QBM_REL_TOL).
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute quadrature tolerance (also QBM_ABS_TOL).
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Thermal weight in the displacement integral: quantum (coth) or
    /// classical (its high-temperature limit).
    #[arg(long)]
    coth: Option<String>,

    /// Significant digits in numeric output.
    #[arg(long)]
    digits: Option<usize>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout if omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn to_draft(&self) -> Draft {
        Draft {
            bath: self.bath.clone(),
            gamma: self.gamma,
            temp: self.temp,
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            d: self.d,
            t_start: self.t_start,
            t_end: self.t_end,
            t_points: self.t_points,
            t_scale: self.t_scale.clone(),
            x_min: self.x_min,
            x_max: self.x_max,
            x_points: self.x_points,
            hbar: self.hbar,
            mass: self.mass,
            kb: self.kb,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            coth: self.coth.clone(),
            digits: self.digits,
            format: self.format.clone(),
        }
    }
}

fn resolve_scenario(args: &CommonArgs) -> Result<Scenario, ConfigError> {
    let mut draft = Draft::default();
    if let Some(path) = &args.scenario {
        draft.overlay(&Draft::from_file(path)?);
    }
    draft.overlay(&Draft::from_env()?);
    draft.overlay(&args.to_draft());
    Scenario::resolve(&draft)
}

fn write_output(
    out: &Option<PathBuf>,
    sweep: &sweep::SweepOutput,
    sc: &Scenario,
) -> Result<(), ConfigError> {
    let result = match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| ConfigError(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            sweep::write(&mut w, sweep, sc.format, sc.digits).and_then(|()| w.flush())
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            sweep::write(&mut w, sweep, sc.format, sc.digits).and_then(|()| w.flush())
        }
    };
    result.map_err(|e| ConfigError(format!("cannot write output: {e}")))
}

fn execute(
    args: &CommonArgs,
    runner: fn(&Scenario) -> Result<RunOutcome, RunError>,
) -> ExitCode {
    let sc = match resolve_scenario(args) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("qbm: {e}");
            return ExitCode::from(2);
        }
    };
    match runner(&sc) {
        Ok(outcome) => {
            if let Err(e) = write_output(&args.out, &outcome.sweep, &sc) {
                eprintln!("qbm: {e}");
                return ExitCode::from(2);
            }
            if outcome.failed_rows > 0 {
                eprintln!(
                    "qbm: {} of {} rows failed; see the status column",
                    outcome.failed_rows,
                    outcome.sweep.rows.len()
                );
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(RunError::Config(e)) => {
            eprintln!("qbm: {e}");
            ExitCode::from(2)
        }
        Err(RunError::Numeric(failure)) => {
            // Metadata and headers still go out so the failed run leaves a
            // reproducible trace.
            if let Err(e) = write_output(&args.out, &failure.sweep, &sc) {
                eprintln!("qbm: {e}");
                return ExitCode::from(2);
            }
            eprintln!("qbm: {}", failure.message);
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Kernels(args) => execute(args, run::run_kernels),
        Command::Spread(args) => execute(args, run::run_spread),
        Command::Interference(args) => execute(args, run::run_interference),
        Command::Attenuation(args) => execute(args, run::run_attenuation),
        Command::Oracle(args) => execute(args, run::run_oracle),
        Command::DecoherenceTime(args) => execute(args, run::run_decoherence_time),
    }
}
