//! Scenario resolution: defaults, then a key-value scenario file, then
//! environment tolerance overrides, then command-line flags — later layers
//! win. The resolved scenario is echoed verbatim into every output's
//! metadata block so a run can be reproduced from its own artifact.

use std::fmt;
use std::fs;
use std::path::Path;

use qbm_core::{BathSpec, QuadratureConfig, TabulatedBath, Temperature, ThermalWeight, UnitSystem};

/// A configuration or usage problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Unresolved scenario: every field optional so that layers can merge.
#[derive(Debug, Clone, Default)]
pub struct Draft {
    pub bath: Option<String>,
    pub gamma: Option<f64>,
    pub temp: Option<f64>,
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
    pub d: Option<f64>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub t_points: Option<usize>,
    pub t_scale: Option<String>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub x_points: Option<usize>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub kb: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub coth: Option<String>,
    pub digits: Option<usize>,
    pub format: Option<String>,
}

impl Draft {
    /// Overlay `other` on top of `self`: set fields of `other` win.
    pub fn overlay(&mut self, other: &Draft) {
        macro_rules! take {
            ($($f:ident),*) => {
                $(if other.$f.is_some() { self.$f = other.$f.clone(); })*
            };
        }
        take!(
            bath, gamma, temp, sigma1, sigma2, d, t_start, t_end, t_points, t_scale, x_min,
            x_max, x_points, hbar, mass, kb, rel_tol, abs_tol, coth, digits, format
        );
    }

    /// Parse a scenario file: one `key = value` pair per line, `#` starts a
    /// comment, keys match the long command-line flags with `-` or `_`.
    pub fn from_file(path: &Path) -> Result<Draft, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read scenario {}: {e}", path.display())))?;
        let mut draft = Draft::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = match line.split_once('=') {
                Some((k, v)) => (k.trim().replace('-', "_").to_lowercase(), v.trim()),
                None => {
                    return err(format!(
                        "{}:{}: expected `key = value`, got `{line}`",
                        path.display(),
                        lineno + 1
                    ))
                }
            };
            draft.set(&key, value).map_err(|e| {
                ConfigError(format!("{}:{}: {}", path.display(), lineno + 1, e.0))
            })?;
        }
        Ok(draft)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn f64_of(key: &str, v: &str) -> Result<f64, ConfigError> {
            v.parse()
                .map_err(|_| ConfigError(format!("{key}: not a number: `{v}`")))
        }
        fn usize_of(key: &str, v: &str) -> Result<usize, ConfigError> {
            v.parse()
                .map_err(|_| ConfigError(format!("{key}: not a nonnegative integer: `{v}`")))
        }
        match key {
            "bath" => self.bath = Some(value.to_string()),
            "gamma" => self.gamma = Some(f64_of(key, value)?),
            "temp" => self.temp = Some(f64_of(key, value)?),
            "sigma1" => self.sigma1 = Some(f64_of(key, value)?),
            "sigma2" => self.sigma2 = Some(f64_of(key, value)?),
            "d" => self.d = Some(f64_of(key, value)?),
            "t_start" => self.t_start = Some(f64_of(key, value)?),
            "t_end" => self.t_end = Some(f64_of(key, value)?),
            "t_points" => self.t_points = Some(usize_of(key, value)?),
            "t_scale" => self.t_scale = Some(value.to_string()),
            "x_min" => self.x_min = Some(f64_of(key, value)?),
            "x_max" => self.x_max = Some(f64_of(key, value)?),
            "x_points" => self.x_points = Some(usize_of(key, value)?),
            "hbar" => self.hbar = Some(f64_of(key, value)?),
            "mass" => self.mass = Some(f64_of(key, value)?),
            "kb" => self.kb = Some(f64_of(key, value)?),
            "rel_tol" => self.rel_tol = Some(f64_of(key, value)?),
            "abs_tol" => self.abs_tol = Some(f64_of(key, value)?),
            "coth" => self.coth = Some(value.to_string()),
            "digits" => self.digits = Some(usize_of(key, value)?),
            "format" => self.format = Some(value.to_string()),
            other => {
                return err(format!(
                    "unknown scenario key `{other}` (keys match the long flags: bath, gamma, \
                     temp, sigma1, sigma2, d, t-start, t-end, t-points, t-scale, x-min, x-max, \
                     x-points, hbar, mass, kb, rel-tol, abs-tol, coth, digits, format)"
                ))
            }
        }
        Ok(())
    }

    /// Tolerance overrides from the environment (QBM_REL_TOL, QBM_ABS_TOL).
    /// Deliberately limited to the quadrature knobs.
    pub fn from_env() -> Result<Draft, ConfigError> {
        let mut draft = Draft::default();
        for (var, slot) in [
            ("QBM_REL_TOL", &mut draft.rel_tol),
            ("QBM_ABS_TOL", &mut draft.abs_tol),
        ] {
            if let Ok(v) = std::env::var(var) {
                match v.parse::<f64>() {
                    Ok(x) => *slot = Some(x),
                    Err(_) => return err(format!("{var}: not a number: `{v}`")),
                }
            }
        }
        Ok(draft)
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub bath: BathSpec,
    pub bath_label: String,
    pub gamma: Option<f64>,
    pub units: UnitSystem,
    pub temp: Temperature,
    pub sigma1: f64,
    pub sigma2: f64,
    pub d: Option<f64>,
    pub t_start: f64,
    pub t_end: f64,
    pub t_points: usize,
    pub t_scale: Scale,
    pub x_min: f64,
    pub x_max: f64,
    pub x_points: usize,
    pub quad: QuadratureConfig,
    pub weight: ThermalWeight,
    pub digits: usize,
    pub format: OutputFormat,
}

fn parse_tabulated(path: &str) -> Result<TabulatedBath, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read bath table {path}: {e}")))?;
    let mut omegas = Vec::new();
    let mut values = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return err(format!(
                "{path}:{}: expected two columns (omega, im_alpha), got {}",
                lineno + 1,
                fields.len()
            ));
        }
        let w: f64 = fields[0]
            .parse()
            .map_err(|_| ConfigError(format!("{path}:{}: bad omega `{}`", lineno + 1, fields[0])))?;
        let v: f64 = fields[1]
            .parse()
            .map_err(|_| ConfigError(format!("{path}:{}: bad value `{}`", lineno + 1, fields[1])))?;
        omegas.push(w);
        values.push(v);
    }
    TabulatedBath::new(omegas, values).map_err(|e| ConfigError(format!("{path}: {e}")))
}

impl Scenario {
    pub fn resolve(draft: &Draft) -> Result<Scenario, ConfigError> {
        let hbar = draft.hbar.unwrap_or(1.0);
        let kb = draft.kb.unwrap_or(1.0);
        let mass = draft.mass.unwrap_or(1.0);
        let units = UnitSystem::new(hbar, kb, mass).map_err(|e| ConfigError(e.to_string()))?;

        let temp = Temperature::new(draft.temp.unwrap_or(1.0))
            .map_err(|e| ConfigError(e.to_string()))?;

        let bath_label = draft.bath.clone().unwrap_or_else(|| "none".to_string());
        let (bath, gamma) = match bath_label.as_str() {
            "none" => (BathSpec::NoDissipation, None),
            "ohmic" => {
                let g = match draft.gamma {
                    Some(g) => g,
                    None => return err("bath `ohmic` needs --gamma"),
                };
                (
                    BathSpec::ohmic(g).map_err(|e| ConfigError(e.to_string()))?,
                    Some(g),
                )
            }
            other => match other.strip_prefix("tabulated:") {
                Some(path) if !path.is_empty() => {
                    (BathSpec::Tabulated(parse_tabulated(path)?), None)
                }
                _ => {
                    return err(format!(
                        "unknown bath `{other}` (expected ohmic, none, or tabulated:<file>)"
                    ))
                }
            },
        };

        let sigma1 = draft.sigma1.unwrap_or(1.0);
        if !(sigma1 > 0.0) || !sigma1.is_finite() {
            return err(format!("sigma1 must be positive and finite, got {sigma1}"));
        }
        let sigma2 = draft.sigma2.unwrap_or(0.0);
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return err(format!("sigma2 must be finite and >= 0, got {sigma2}"));
        }
        if let Some(d) = draft.d {
            if !(d > 0.0) || !d.is_finite() {
                return err(format!("d must be positive and finite, got {d}"));
            }
        }

        let t_scale = match draft.t_scale.as_deref().unwrap_or("linear") {
            "linear" => Scale::Linear,
            "log" => Scale::Log,
            other => return err(format!("t-scale must be linear or log, got `{other}`")),
        };

        let rel_tol = draft.rel_tol.unwrap_or(1e-9);
        let abs_tol = draft.abs_tol.unwrap_or(1e-12);
        let quad = QuadratureConfig::new(rel_tol, abs_tol, 1_000_000)
            .map_err(|e| ConfigError(e.to_string()))?;

        let weight = match draft.coth.as_deref().unwrap_or("quantum") {
            "quantum" => ThermalWeight::Quantum,
            "classical" => ThermalWeight::Classical,
            other => return err(format!("coth must be quantum or classical, got `{other}`")),
        };

        let digits = draft.digits.unwrap_or(12);
        if digits == 0 || digits > 17 {
            return err(format!("digits must be between 1 and 17, got {digits}"));
        }

        let format = match draft.format.as_deref().unwrap_or("csv") {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            other => return err(format!("format must be csv or json, got `{other}`")),
        };

        Ok(Scenario {
            bath,
            bath_label,
            gamma,
            units,
            temp,
            sigma1,
            sigma2,
            d: draft.d,
            t_start: draft.t_start.unwrap_or(0.0),
            t_end: draft.t_end.unwrap_or(10.0),
            t_points: draft.t_points.unwrap_or(101),
            t_scale,
            x_min: draft.x_min.unwrap_or(-10.0),
            x_max: draft.x_max.unwrap_or(10.0),
            x_points: draft.x_points.unwrap_or(201),
            quad,
            weight,
            digits,
            format,
        })
    }

    /// Time grid for sweep subcommands.
    pub fn time_grid(&self) -> Result<Vec<f64>, ConfigError> {
        if self.t_points < 2 {
            return err(format!(
                "time grid needs at least 2 points, got {}",
                self.t_points
            ));
        }
        if !(self.t_end > self.t_start) {
            return err(format!(
                "time grid needs t-end > t-start, got [{}, {}]",
                self.t_start, self.t_end
            ));
        }
        if !self.t_start.is_finite() || !self.t_end.is_finite() || self.t_start < 0.0 {
            return err("time grid bounds must be finite and nonnegative");
        }
        let n = self.t_points;
        match self.t_scale {
            Scale::Linear => Ok((0..n)
                .map(|i| {
                    self.t_start + (self.t_end - self.t_start) * i as f64 / (n - 1) as f64
                })
                .collect()),
            Scale::Log => {
                if !(self.t_start > 0.0) {
                    return err("log time grid needs t-start > 0");
                }
                let (a, b) = (self.t_start.ln(), self.t_end.ln());
                Ok((0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect())
            }
        }
    }

    /// Position grid for profile/oracle subcommands.
    pub fn x_grid(&self) -> Result<Vec<f64>, ConfigError> {
        if self.x_points < 2 {
            return err(format!(
                "x grid needs at least 2 points, got {}",
                self.x_points
            ));
        }
        if !(self.x_max > self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return err(format!(
                "x grid needs finite x-max > x-min, got [{}, {}]",
                self.x_min, self.x_max
            ));
        }
        let n = self.x_points;
        Ok((0..n)
            .map(|i| self.x_min + (self.x_max - self.x_min) * i as f64 / (n - 1) as f64)
            .collect())
    }

    /// Separation, for the subcommands that require one.
    pub fn separation(&self) -> Result<f64, ConfigError> {
        self.d
            .ok_or_else(|| ConfigError("this subcommand needs --d (slit separation)".into()))
    }

    /// The resolved configuration as ordered key-value pairs for metadata.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut meta = vec![
            ("bath".to_string(), self.bath_label.clone()),
        ];
        if let Some(g) = self.gamma {
            meta.push(("gamma".into(), format!("{g:?}")));
        }
        meta.push(("temp".into(), format!("{:?}", self.temp.value())));
        meta.push(("sigma1".into(), format!("{:?}", self.sigma1)));
        meta.push(("sigma2".into(), format!("{:?}", self.sigma2)));
        if let Some(d) = self.d {
            meta.push(("d".into(), format!("{d:?}")));
        }
        meta.push(("t-start".into(), format!("{:?}", self.t_start)));
        meta.push(("t-end".into(), format!("{:?}", self.t_end)));
        meta.push(("t-points".into(), format!("{}", self.t_points)));
        meta.push((
            "t-scale".into(),
            match self.t_scale {
                Scale::Linear => "linear".into(),
                Scale::Log => "log".into(),
            },
        ));
        meta.push(("x-min".into(), format!("{:?}", self.x_min)));
        meta.push(("x-max".into(), format!("{:?}", self.x_max)));
        meta.push(("x-points".into(), format!("{}", self.x_points)));
        meta.push(("hbar".into(), format!("{:?}", self.units.hbar)));
        meta.push(("mass".into(), format!("{:?}", self.units.mass)));
        meta.push(("kb".into(), format!("{:?}", self.units.boltzmann)));
        meta.push(("rel-tol".into(), format!("{:?}", self.quad.rel_tol)));
        meta.push(("abs-tol".into(), format!("{:?}", self.quad.abs_tol)));
        meta.push((
            "coth".into(),
            match self.weight {
                ThermalWeight::Quantum => "quantum".into(),
                ThermalWeight::Classical => "classical".into(),
            },
        ));
        meta.push(("digits".into(), format!("{}", self.digits)));
        meta
    }
}
