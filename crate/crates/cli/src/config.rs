use std::fmt;
use std::path::{Path, PathBuf};

use so4_core::verify::Fault;
use so4_core::{InertiaSpectrum, OrbitParams, So4State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Certify,
    Simulate,
    Sweep,
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Certify => "certify",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Verify => "verify",
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "classify" => Ok(Command::Classify),
            "certify" => Ok(Command::Certify),
            "simulate" => Ok(Command::Simulate),
            "sweep" => Ok(Command::Sweep),
            "verify" => Ok(Command::Verify),
            _ => Err(format!("unknown command `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Where the simulation starts.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Explicit(So4State),
    /// Uniform entries in `[-2, 2]` drawn from `seed`.
    Random,
}

/// Everything a run needs. Built from defaults, then the config file, then
/// command-line flags, each layer overriding the previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub lam: [f64; 4],
    pub orbit: Option<(f64, f64)>,
    pub ab: Option<(f64, f64)>,
    pub r: Option<f64>,
    /// Orbit size used with `r`: `c1 = (a² + b²) / 2`.
    pub c1: f64,
    /// `a` for the sweep rows; `b = a √r`.
    pub a: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub steps: usize,
    pub step: f64,
    pub horizon: f64,
    pub sample_every: usize,
    pub state: Option<InitialState>,
    /// Equilibrium label such as `M1(b,a)` to start a simulation from.
    pub point: Option<String>,
    pub seed: u64,
    pub samples: usize,
    pub p: Option<f64>,
    pub probe: bool,
    pub fault: Option<Fault>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            lam: [4.0, 3.0, 2.0, 1.0],
            orbit: None,
            ab: None,
            r: None,
            c1: 1.0,
            a: 1.0,
            r_min: 0.0,
            r_max: 0.99,
            steps: 100,
            step: 0.01,
            horizon: 100.0,
            sample_every: 1,
            state: None,
            point: None,
            seed: 2024,
            samples: 200,
            p: None,
            probe: false,
            fault: None,
            format: None,
            output: None,
        }
    }
}

/// Keys accepted in config files; flags use the same names with `-` for `_`.
pub const KEYS: &[&str] = &[
    "command",
    "lam",
    "orbit",
    "ab",
    "r",
    "c1",
    "a",
    "r_min",
    "r_max",
    "steps",
    "step",
    "horizon",
    "sample_every",
    "state",
    "point",
    "seed",
    "samples",
    "p",
    "probe",
    "inject_fault",
    "format",
    "output",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn floats<const N: usize>(key: &str, value: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("{key} needs {N} comma-separated numbers, got `{value}`"));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = float(key, part)?;
    }
    Ok(out)
}

fn float(key: &str, value: &str) -> Result<f64, String> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{key}: `{value}` is not a finite number"))
}

fn integer<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.trim().parse().map_err(|_| format!("{key}: `{value}` is not a non-negative integer"))
}

fn boolean(key: &str, value: &str) -> Result<bool, String> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("{key}: `{value}` is not a boolean")),
    }
}

fn fault(value: &str) -> Result<Fault, String> {
    let (k, rel) = value
        .split_once(':')
        .ok_or_else(|| format!("inject_fault: expected `k:rel`, got `{value}`"))?;
    let k: u8 = integer("inject_fault", k)?;
    if !(1..=4).contains(&k) {
        return Err(format!("inject_fault: k must be 1..4, got {k}"));
    }
    Ok(Fault::PerturbMu2 { k, rel: float("inject_fault", rel)? })
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.set_inner(key, value.trim()).map_err(ConfigError)
    }

    fn set_inner(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "command" => self.command = Some(Command::parse(value)?),
            "lam" => self.lam = floats::<4>(key, value)?,
            "orbit" => {
                let [c1, c2] = floats::<2>(key, value)?;
                self.orbit = Some((c1, c2));
            }
            "ab" => {
                let [a, b] = floats::<2>(key, value)?;
                self.ab = Some((a, b));
            }
            "r" => self.r = Some(float(key, value)?),
            "c1" => self.c1 = float(key, value)?,
            "a" => self.a = float(key, value)?,
            "r_min" => self.r_min = float(key, value)?,
            "r_max" => self.r_max = float(key, value)?,
            "steps" => self.steps = integer(key, value)?,
            "step" => self.step = float(key, value)?,
            "horizon" => self.horizon = float(key, value)?,
            "sample_every" => self.sample_every = integer(key, value)?,
            "state" => {
                self.state = Some(if value == "random" {
                    InitialState::Random
                } else {
                    InitialState::Explicit(So4State(floats::<6>(key, value)?))
                })
            }
            "point" => self.point = Some(value.to_string()),
            "seed" => self.seed = integer(key, value)?,
            "samples" => self.samples = integer(key, value)?,
            "p" => self.p = Some(float(key, value)?),
            "probe" => self.probe = boolean(key, value)?,
            "inject_fault" => self.fault = Some(fault(value)?),
            "format" => {
                self.format = Some(match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(format!("format must be json or csv, got `{value}`")),
                })
            }
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown key `{key}`; known keys: {}", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Reads a flat `key = value` file. `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| ConfigError(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn spectrum(&self) -> so4_core::Result<InertiaSpectrum> {
        InertiaSpectrum::from_array(self.lam)
    }

    /// The orbit from exactly one of `orbit`, `ab` or `r` (with `c1`).
    pub fn orbit_params(&self) -> Result<OrbitParams, CliFailure> {
        let given = [self.orbit.is_some(), self.ab.is_some(), self.r.is_some()];
        match given.iter().filter(|&&g| g).count() {
            0 => return Err(CliFailure::input("one of orbit, ab or r is required")),
            1 => {}
            _ => return Err(CliFailure::input("give only one of orbit, ab or r")),
        }
        let orbit = if let Some((c1, c2)) = self.orbit {
            OrbitParams::new(c1, c2)
        } else if let Some((a, b)) = self.ab {
            OrbitParams::from_ab(a, b)
        } else {
            let r = self.r.expect("checked above");
            if !(0.0..1.0).contains(&r) {
                return Err(CliFailure::input(format!("r = {r} is outside [0, 1)")));
            }
            if !(self.c1 > 0.0) {
                return Err(CliFailure::input(format!("c1 = {} must be positive", self.c1)));
            }
            let a = (2.0 * self.c1 / (1.0 + r)).sqrt();
            OrbitParams::from_ab(a, a * r.sqrt())
        };
        orbit.map_err(CliFailure::from)
    }
}

/// Exit code contract: 1 invalid input, 2 verification failure, 3 numerical
/// failure.
#[derive(Debug, Clone, PartialEq)]
pub enum CliFailure {
    Input(String),
    Verification(String),
    Numerical(String),
}

impl CliFailure {
    pub fn input(msg: impl Into<String>) -> Self {
        CliFailure::Input(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliFailure::Input(_) => 1,
            CliFailure::Verification(_) => 2,
            CliFailure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliFailure::Input(m) | CliFailure::Verification(m) | CliFailure::Numerical(m) => m,
        }
    }
}

impl From<so4_core::Error> for CliFailure {
    fn from(e: so4_core::Error) -> Self {
        if e.is_numerical() {
            CliFailure::Numerical(e.to_string())
        } else {
            CliFailure::Input(e.to_string())
        }
    }
}

impl From<ConfigError> for CliFailure {
    fn from(e: ConfigError) -> Self {
        CliFailure::Input(e.0)
    }
}

impl From<std::io::Error> for CliFailure {
    fn from(e: std::io::Error) -> Self {
        CliFailure::Input(format!("i/o error: {e}"))
    }
}
