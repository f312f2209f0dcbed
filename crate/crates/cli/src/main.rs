//! `so4`: batch front-end for the so(4) rigid body library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

mod commands;
mod config;
mod output;

use config::{CliFailure, Command, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    /// Spectral verdicts for the twelve Cartan points of an orbit.
    Classify,
    /// Lyapunov certificates for the twelve Cartan points of an orbit.
    Certify,
    /// Integrate a trajectory and report conservation drift.
    Simulate,
    /// Bifurcating point across a grid of r = b²/a².
    Sweep,
    /// Run the self-check suites.
    Verify,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Classify => Command::Classify,
            CommandArg::Certify => Command::Certify,
            CommandArg::Simulate => Command::Simulate,
            CommandArg::Sweep => Command::Sweep,
            CommandArg::Verify => Command::Verify,
        }
    }
}

/// Every option can also be set in the config file under the same name
/// with `_` in place of `-`. Flags override the file.
#[derive(Debug, Parser)]
#[command(name = "so4", version, about = "Stability analysis for the free rigid body on so(4)")]
#[command(allow_negative_numbers = true)]
struct Cli {
    /// Command to run; may instead come from the config file.
    command: Option<CommandArg>,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inertia spectrum λ1 > λ2 > λ3 > λ4, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    lam: Option<String>,
    /// Orbit as `c1,c2`.
    #[arg(long, allow_hyphen_values = true)]
    orbit: Option<String>,
    /// Orbit through the Cartan point `(a,b)`, |a| > |b|.
    #[arg(long, allow_hyphen_values = true)]
    ab: Option<String>,
    /// Orbit with ratio r = b²/a², together with --c1.
    #[arg(long)]
    r: Option<String>,
    /// Orbit size used with --r [default: 1].
    #[arg(long)]
    c1: Option<String>,
    /// `a` of the sweep rows [default: 1].
    #[arg(long)]
    a: Option<String>,
    /// Sweep grid start [default: 0].
    #[arg(long)]
    r_min: Option<String>,
    /// Sweep grid end, below 1 [default: 0.99].
    #[arg(long)]
    r_max: Option<String>,
    /// Number of sweep grid points [default: 100].
    #[arg(long)]
    steps: Option<String>,
    /// Integrator step [default: 0.01].
    #[arg(long)]
    step: Option<String>,
    /// Integration horizon [default: 100].
    #[arg(long)]
    horizon: Option<String>,
    /// Keep every n-th integrator step in the trajectory [default: 1].
    #[arg(long)]
    sample_every: Option<String>,
    /// Initial state `x1,x2,x3,y1,y2,y3`, or `random`.
    #[arg(long, allow_hyphen_values = true)]
    state: Option<String>,
    /// Start the simulation at a Cartan point such as `M1(b,a)`.
    #[arg(long)]
    point: Option<String>,
    /// RNG seed [default: 2024].
    #[arg(long)]
    seed: Option<String>,
    /// Samples per verify suite [default: 200].
    #[arg(long)]
    samples: Option<String>,
    /// Explicit p for the bifurcating-point certificate.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Add perturbation probes to certify output (`true` / `false`).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    probe: Option<String>,
    /// Test mode for verify: scale μ2 of G_k by 1 + rel, given as `k:rel`.
    #[arg(long, allow_hyphen_values = true)]
    inject_fault: Option<String>,
    /// Output format: json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Output file [default: $SO4_OUTPUT_DIR/so4-<command>.<ext>, else stdout].
    #[arg(long)]
    output: Option<String>,
}

impl Cli {
    fn flags(&self) -> Vec<(&'static str, &str)> {
        let pairs: [(&'static str, &Option<String>); 21] = [
            ("lam", &self.lam),
            ("orbit", &self.orbit),
            ("ab", &self.ab),
            ("r", &self.r),
            ("c1", &self.c1),
            ("a", &self.a),
            ("r_min", &self.r_min),
            ("r_max", &self.r_max),
            ("steps", &self.steps),
            ("step", &self.step),
            ("horizon", &self.horizon),
            ("sample_every", &self.sample_every),
            ("state", &self.state),
            ("point", &self.point),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("p", &self.p),
            ("probe", &self.probe),
            ("inject_fault", &self.inject_fault),
            ("format", &self.format),
            ("output", &self.output),
        ];
        pairs.iter().filter_map(|(k, v)| v.as_deref().map(|v| (*k, v))).collect()
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliFailure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    for (key, value) in cli.flags() {
        cfg.set(key, value)?;
    }
    if let Some(c) = cli.command {
        cfg.command = Some(c.into());
    }
    Ok(cfg)
}

fn execute(cfg: &RunConfig) -> Result<(), CliFailure> {
    let command = cfg.command.ok_or_else(|| CliFailure::input("no command given (on the command line or as `command` in the config)"))?;
    let format = cfg.format.unwrap_or_else(|| commands::default_format(command));
    let outcome = commands::run(command, cfg, format)?;
    let dest = output::destination(&cfg.output, command, format);
    let mut out = output::open(&dest)?;
    commands::write(&mut *out, &outcome.body)?;
    if let Some(path) = &dest {
        eprintln!("wrote {}", path.display());
    }
    outcome.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match build_config(&cli).and_then(|cfg| execute(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
