use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use so4_core::dynamics::{
    escape_horizon, integrate_sampled, probe_stability, write_trajectory_csv, Drift, PerturbationProbe, ProbeConfig,
    MONITORED,
};
use so4_core::lyapunov::{certify_bifurcation_with, certify_equilibrium, BifurcationOptions, StabilityCertificate};
use so4_core::nalgebra::Complex;
use so4_core::spectral::{
    classify_equilibrium, classify_spectral_with, f_tilde, BoundaryHint, Eigenstructure, EquilibriumSpectrum,
    RatioRegion, Stability,
};
use so4_core::verify::{random_state, run_all, VerifyOptions, VerifyReport};
use so4_core::{ab_from_orbit, cartan_equilibria, Equilibrium, EquilibriumFamily, InertiaSpectrum, So4State, WeylImage};

use crate::config::{CliFailure, Command, Format, InitialState, RunConfig};
use crate::output::{float, to_json};

/// A finished command: the document to write and whether checks failed.
pub struct Outcome {
    pub body: String,
    pub failure: Option<CliFailure>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, failure: None }
    }
}

pub fn default_format(command: Command) -> Format {
    match command {
        Command::Simulate | Command::Sweep => Format::Csv,
        _ => Format::Json,
    }
}

pub fn run(command: Command, cfg: &RunConfig, format: Format) -> Result<Outcome, CliFailure> {
    let lam = cfg.spectrum()?;
    match command {
        Command::Classify => classify(cfg, &lam, format),
        Command::Certify => certify(cfg, &lam, format),
        Command::Simulate => simulate(cfg, &lam, format),
        Command::Sweep => sweep(cfg, &lam, format),
        Command::Verify => verify(cfg, &lam, format),
    }
}

fn max_re(eigs: &[Complex<f64>]) -> f64 {
    eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Serialize)]
struct OrbitSummary {
    c1: f64,
    c2: f64,
    a: f64,
    b: f64,
    /// `b² / a²`.
    r: f64,
    alpha1: f64,
    alpha2: f64,
}

fn orbit_summary(cfg: &RunConfig, lam: &InertiaSpectrum) -> Result<(so4_core::OrbitParams, OrbitSummary), CliFailure> {
    let orbit = cfg.orbit_params()?;
    let (a, b) = ab_from_orbit(&orbit);
    let ft = f_tilde(lam);
    let summary =
        OrbitSummary { c1: orbit.c1(), c2: orbit.c2(), a, b, r: b * b / (a * a), alpha1: ft.alpha1, alpha2: ft.alpha2 };
    Ok((orbit, summary))
}

#[derive(Serialize)]
struct ClassifyReport {
    command: &'static str,
    lam: [f64; 4],
    orbit: OrbitSummary,
    equilibria: Vec<EquilibriumSpectrum>,
}

fn is_bifurcating(eq: &Equilibrium) -> bool {
    eq.family == EquilibriumFamily::T1 && !eq.is_slot_major()
}

fn classify(cfg: &RunConfig, lam: &InertiaSpectrum, format: Format) -> Result<Outcome, CliFailure> {
    let (orbit, summary) = orbit_summary(cfg, lam)?;
    let points = cartan_equilibria(&orbit).iter().map(|eq| classify_equilibrium(eq, lam)).collect::<Result<Vec<_>, _>>()?;
    let body = match format {
        Format::Json => {
            to_json(&ClassifyReport { command: "classify", lam: lam.as_array(), orbit: summary, equilibria: points })
        }
        Format::Csv => {
            let mut s = String::from("label,family,eigenstructure,stability,max_real_part");
            for k in 1..=4 {
                s.push_str(&format!(",re{k},im{k}"));
            }
            s.push('\n');
            for p in &points {
                let kind = p.eigenstructure.map(|e| format!("{e:?}")).unwrap_or_default();
                s.push_str(&format!("{},{:?},{kind},{:?},{}", p.label, p.family, p.stability, float(p.max_real_part)));
                for z in &p.eigenvalues {
                    s.push_str(&format!(",{},{}", float(z.re), float(z.im)));
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct ProbeSummary {
    epsilon: f64,
    samples: usize,
    horizon: f64,
    escape_threshold: f64,
    escapes: usize,
    max_excursion: f64,
}

impl From<&PerturbationProbe> for ProbeSummary {
    fn from(p: &PerturbationProbe) -> Self {
        ProbeSummary {
            epsilon: p.config.epsilon,
            samples: p.config.samples,
            horizon: p.config.horizon,
            escape_threshold: p.escape_threshold(),
            escapes: p.escape_count(),
            max_excursion: p.max_excursion,
        }
    }
}

#[derive(Serialize)]
struct CertifiedPoint {
    weyl: Option<WeylImage>,
    #[serde(flatten)]
    certificate: StabilityCertificate,
    probe: Option<ProbeSummary>,
}

#[derive(Serialize)]
struct CertifyReport {
    command: &'static str,
    lam: [f64; 4],
    orbit: OrbitSummary,
    certificates: Vec<CertifiedPoint>,
}

fn certify(cfg: &RunConfig, lam: &InertiaSpectrum, format: Format) -> Result<Outcome, CliFailure> {
    let (orbit, summary) = orbit_summary(cfg, lam)?;
    let opts = BifurcationOptions { p_override: cfg.p, boundary: None };
    let mut points = Vec::with_capacity(12);
    for (i, eq) in cartan_equilibria(&orbit).iter().enumerate() {
        // An explicit p only makes sense for the bifurcating points.
        let opts = if is_bifurcating(eq) { opts } else { BifurcationOptions::default() };
        let certificate = certify_equilibrium(eq, lam, &opts)?;
        let probe = if cfg.probe {
            let mut pc = ProbeConfig::for_equilibrium(eq, cfg.seed.wrapping_add(i as u64));
            if let Some(w) = &certificate.witness {
                pc = pc.with_confinement(w.hessian.confinement_factor());
            }
            let rate = max_re(&certificate.eigenvalues);
            if rate > 0.0 {
                pc.horizon = pc.horizon.min(escape_horizon(rate));
            }
            Some(ProbeSummary::from(&probe_stability(eq, lam, &pc)?))
        } else {
            None
        };
        points.push(CertifiedPoint { weyl: eq.weyl, certificate, probe });
    }
    let body = match format {
        Format::Json => {
            to_json(&CertifyReport { command: "certify", lam: lam.as_array(), orbit: summary, certificates: points })
        }
        Format::Csv => {
            let mut s = String::from("label,family,verdict,eigenstructure,base,m,n,p,definiteness,min_hessian_eigenvalue,probe_escapes,note\n");
            for pt in &points {
                let c = &pt.certificate;
                let kind = c.eigenstructure.map(|e| format!("{e:?}")).unwrap_or_default();
                let (base, m, n, p, def, min_eig) = match &c.witness {
                    Some(w) => (
                        w.base.to_string(),
                        float(w.m),
                        float(w.n),
                        w.p.map(float).unwrap_or_default(),
                        format!("{:?}", w.hessian.definiteness),
                        float(w.hessian.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)),
                    ),
                    None => Default::default(),
                };
                let escapes = pt.probe.as_ref().map(|p| p.escapes.to_string()).unwrap_or_default();
                let note = csv_field(c.note.as_deref().unwrap_or_default());
                s.push_str(&format!(
                    "{},{:?},{:?},{kind},{base},{m},{n},{p},{def},{min_eig},{escapes},{note}\n",
                    c.equilibrium, c.family, c.verdict
                ));
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct SamplePoint {
    t: f64,
    state: So4State,
    h: f64,
    c1: f64,
    c2: f64,
    i: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    command: &'static str,
    lam: [f64; 4],
    step: f64,
    horizon: f64,
    steps: usize,
    initial_state: So4State,
    final_state: So4State,
    /// Largest relative change of each conserved quantity over the run.
    drift: Drift,
    samples: Vec<SamplePoint>,
}

fn initial_state(cfg: &RunConfig) -> Result<So4State, CliFailure> {
    match (&cfg.state, &cfg.point) {
        (Some(_), Some(_)) => Err(CliFailure::input("give only one of state or point")),
        (Some(InitialState::Explicit(m)), None) => Ok(*m),
        (Some(InitialState::Random), None) => Ok(random_state(&mut ChaCha8Rng::seed_from_u64(cfg.seed))),
        (None, Some(label)) => {
            let orbit = cfg.orbit_params()?;
            cartan_equilibria(&orbit)
                .into_iter()
                .find(|eq| eq.label() == *label)
                .map(|eq| eq.state)
                .ok_or_else(|| CliFailure::input(format!("no Cartan point labelled `{label}`, expected e.g. M1(a,b)")))
        }
        (None, None) => Err(CliFailure::input("simulate needs state (six values or `random`) or point")),
    }
}

fn simulate(cfg: &RunConfig, lam: &InertiaSpectrum, format: Format) -> Result<Outcome, CliFailure> {
    let m0 = initial_state(cfg)?;
    let rep = integrate_sampled(&m0, lam, cfg.step, cfg.horizon, cfg.sample_every.max(1))?;
    let d = rep.drift;
    eprintln!(
        "drift over {} steps: H {:.3e}, C1 {:.3e}, C2 {:.3e}, I {:.3e}",
        rep.steps, d.h, d.c1, d.c2, d.i
    );
    let body = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_trajectory_csv(&rep, lam, &mut buf)?;
            String::from_utf8(buf).expect("CSV is ASCII")
        }
        Format::Json => {
            let forms: Vec<_> = MONITORED.iter().map(|id| id.form(lam)).collect();
            let samples = rep
                .times
                .iter()
                .zip(&rep.trajectory)
                .map(|(&t, m)| SamplePoint {
                    t,
                    state: *m,
                    h: forms[0].value(m),
                    c1: forms[1].value(m),
                    c2: forms[2].value(m),
                    i: forms[3].value(m),
                })
                .collect();
            to_json(&SimulateReport {
                command: "simulate",
                lam: lam.as_array(),
                step: rep.step,
                horizon: rep.horizon,
                steps: rep.steps,
                initial_state: m0,
                final_state: *rep.trajectory.last().expect("at least the initial state"),
                drift: d,
                samples,
            })
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Grid,
    Alpha1,
    Alpha2,
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    r: f64,
    kind: RowKind,
    region: RatioRegion,
    verdict: Stability,
    eigenstructure: Eigenstructure,
    max_re_closed_form: f64,
    max_re_numeric: f64,
    certificate: String,
    p: Option<f64>,
}

#[derive(Serialize)]
struct SweepReport {
    command: &'static str,
    lam: [f64; 4],
    a: f64,
    alpha1: f64,
    alpha2: f64,
    rows: Vec<SweepRow>,
}

/// Header of the sweep CSV.
pub const SWEEP_HEADER: &str =
    "r,kind,region,verdict,eigenstructure,max_re_closed_form,max_re_numeric,certificate,p";

fn sweep_row(lam: &InertiaSpectrum, a: f64, r: f64, kind: RowKind) -> Result<SweepRow, CliFailure> {
    let hint = match kind {
        RowKind::Grid => None,
        RowKind::Alpha1 => Some(BoundaryHint::Alpha1),
        RowKind::Alpha2 => Some(BoundaryHint::Alpha2),
    };
    let b = a * r.sqrt();
    let v = classify_spectral_with(lam, a, b, hint)?;
    let (certificate, p) = match certify_bifurcation_with(lam, a, b, &BifurcationOptions { p_override: None, boundary: hint }) {
        Ok(c) => (format!("{:?}", c.verdict), c.witness.and_then(|w| w.p)),
        Err(e) if e.is_numerical() => ("Failed".to_string(), None),
        Err(e) => return Err(e.into()),
    };
    Ok(SweepRow {
        r,
        kind,
        region: v.region,
        verdict: v.verdict,
        eigenstructure: v.eigenstructure,
        max_re_closed_form: v.max_real_part(),
        max_re_numeric: v.numeric_max_real_part(),
        certificate,
        p,
    })
}

fn sweep(cfg: &RunConfig, lam: &InertiaSpectrum, format: Format) -> Result<Outcome, CliFailure> {
    if cfg.steps == 0 {
        return Err(CliFailure::input("empty grid: steps must be at least 1"));
    }
    let (lo, hi) = (cfg.r_min, cfg.r_max);
    if !(0.0 <= lo && lo <= hi && hi < 1.0) {
        return Err(CliFailure::input(format!("grid [{lo}, {hi}] must satisfy 0 <= r_min <= r_max < 1")));
    }
    if !(cfg.a > 0.0) {
        return Err(CliFailure::input(format!("a = {} must be positive", cfg.a)));
    }
    let ft = f_tilde(lam);
    let mut grid: Vec<(f64, RowKind)> = (0..cfg.steps)
        .map(|i| {
            let r = if cfg.steps == 1 { lo } else { lo + (hi - lo) * i as f64 / (cfg.steps - 1) as f64 };
            (r, RowKind::Grid)
        })
        .collect();
    for (alpha, kind) in [(ft.alpha1, RowKind::Alpha1), (ft.alpha2, RowKind::Alpha2)] {
        if alpha.is_finite() && alpha >= lo && alpha <= hi {
            grid.push((alpha, kind));
        }
    }
    // Stable sort: a boundary row that equals a grid value comes after it.
    grid.sort_by(|x, y| x.0.total_cmp(&y.0));
    let rows = grid
        .par_iter()
        .map(|&(r, kind)| sweep_row(lam, cfg.a, r, kind))
        .collect::<Result<Vec<_>, _>>()?;
    let body = match format {
        Format::Json => to_json(&SweepReport {
            command: "sweep",
            lam: lam.as_array(),
            a: cfg.a,
            alpha1: ft.alpha1,
            alpha2: ft.alpha2,
            rows,
        }),
        Format::Csv => {
            let mut s = format!("{SWEEP_HEADER}\n");
            for row in &rows {
                let kind = serde_json::to_value(row.kind).expect("plain enum");
                s.push_str(&format!(
                    "{},{},{:?},{:?},{:?},{},{},{},{}\n",
                    float(row.r),
                    kind.as_str().unwrap_or_default(),
                    row.region,
                    row.verdict,
                    row.eigenstructure,
                    float(row.max_re_closed_form),
                    float(row.max_re_numeric),
                    row.certificate,
                    row.p.map(float).unwrap_or_default()
                ));
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct VerifyDocument<'a> {
    command: &'static str,
    passed: bool,
    #[serde(flatten)]
    report: &'a VerifyReport,
}

fn verify(cfg: &RunConfig, lam: &InertiaSpectrum, format: Format) -> Result<Outcome, CliFailure> {
    if cfg.samples == 0 {
        return Err(CliFailure::input("samples must be at least 1"));
    }
    let opts = VerifyOptions { samples: cfg.samples, seed: cfg.seed, fault: cfg.fault };
    let report = run_all(lam, &opts)?;
    for s in &report.suites {
        let status = if s.passed() { "pass" } else { "FAIL" };
        eprintln!("{status} {:<22} {:>6} checks, max error {:.2e}", s.name, s.checks, s.max_error);
        for f in &s.failures {
            eprintln!("     {f}");
        }
    }
    let body = match format {
        Format::Json => to_json(&VerifyDocument { command: "verify", passed: report.passed(), report: &report }),
        Format::Csv => {
            let mut s = String::from("suite,checks,failures,max_error,passed\n");
            for r in &report.suites {
                s.push_str(&format!("{},{},{},{},{}\n", r.name, r.checks, r.failures.len(), float(r.max_error), r.passed()));
            }
            s
        }
    };
    let failure = (!report.passed()).then(|| {
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect();
        CliFailure::Verification(format!("verification failed: {}", failed.join(", ")))
    });
    Ok(Outcome { body, failure })
}

/// Quotes a CSV field when it contains a separator or a quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write(out: &mut dyn Write, body: &str) -> std::io::Result<()> {
    out.write_all(body.as_bytes())?;
    out.flush()
}
