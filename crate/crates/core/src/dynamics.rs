//! Fixed-step RK4 integration with conservation monitoring, and Monte-Carlo
//! perturbation probes around equilibria.
//!
//! Probe randomness: sample `i` draws from `ChaCha8Rng::seed_from_u64(seed)`
//! switched to stream `i`, so each sample is reproducible on its own and the
//! report does not depend on thread scheduling.

use std::io::{self, Write};

use nalgebra::Matrix2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::body::FieldCoefficients;
use crate::equilibria::Equilibrium;
use crate::error::{Error, Result};
use crate::inertia::InertiaSpectrum;
use crate::integrals::IntegralId;
use crate::linalg::orbit_tangent_basis;
use crate::state::{So4State, COORDINATE_NAMES};

/// Integrals whose drift is monitored.
pub const MONITORED: [IntegralId; 4] = [IntegralId::H, IntegralId::C1, IntegralId::C2, IntegralId::I];

/// Norm above which a trajectory counts as blown up.
const BLOW_UP_NORM: f64 = 1e150;

/// Maximum over the run of `|F(M(t)) - F(M0)| / scale(F, M0)` for each
/// monitored integral (see [`drift_scale`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub h: f64,
    pub c1: f64,
    pub c2: f64,
    pub i: f64,
}

impl Drift {
    pub fn max(&self) -> f64 {
        self.h.max(self.c1).max(self.c2).max(self.i)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.h, self.c1, self.c2, self.i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrationReport {
    pub times: Vec<f64>,
    pub trajectory: Vec<So4State>,
    pub drift: Drift,
    /// Step actually used: `horizon / round(horizon / requested step)`.
    pub step: f64,
    pub horizon: f64,
    pub steps: usize,
}

/// `Σ |terms of F(M0)|`, or `(largest coefficient) · ‖M0‖²` when the terms
/// all vanish, so the drift of an integral that starts at zero is still
/// measured against the size of the state.
pub fn drift_scale(id: IntegralId, m0: &So4State, lam: &InertiaSpectrum) -> f64 {
    let form = id.form(lam);
    let coef = form.diag.iter().fold(form.cross.abs(), |acc, d| acc.max(d.abs()));
    let fallback = coef * m0.norm_squared();
    let magnitude = form.magnitude(m0);
    if magnitude > 1e-12 * fallback {
        magnitude
    } else {
        fallback
    }
}

fn rk4_step(field: &FieldCoefficients, m: &So4State, h: f64) -> So4State {
    let k1 = field.eval(m);
    let k2 = field.eval(&(*m + k1 * (0.5 * h)));
    let k3 = field.eval(&(*m + k2 * (0.5 * h)));
    let k4 = field.eval(&(*m + k3 * h));
    *m + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

fn step_count(step: f64, horizon: f64) -> Result<usize> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(horizon.is_finite() && horizon > step) {
        return Err(Error::InvalidArgument(format!("horizon {horizon} must exceed the step {step}")));
    }
    Ok((horizon / step).round().max(1.0) as usize)
}

/// Integrates from `m0` and records every state.
pub fn integrate(m0: &So4State, lam: &InertiaSpectrum, step: f64, horizon: f64) -> Result<IntegrationReport> {
    integrate_sampled(m0, lam, step, horizon, 1)
}

/// Integrates from `m0`, recording every `sample_every`-th state (and the
/// last one). Drift is measured at every step regardless.
pub fn integrate_sampled(
    m0: &So4State,
    lam: &InertiaSpectrum,
    step: f64,
    horizon: f64,
    sample_every: usize,
) -> Result<IntegrationReport> {
    if !m0.is_finite() {
        return Err(Error::InvalidArgument("initial state is not finite".to_string()));
    }
    let n = step_count(step, horizon)?;
    let h = horizon / n as f64;
    let every = sample_every.max(1);
    let field = FieldCoefficients::new(lam);
    let forms = MONITORED.map(|id| id.form(lam));
    let initial = forms.map(|f| f.value(m0));
    let scales = MONITORED.map(|id| drift_scale(id, m0, lam));

    let mut drift = [0.0f64; 4];
    let mut times = vec![0.0];
    let mut trajectory = vec![*m0];
    let mut m = *m0;
    for k in 1..=n {
        m = rk4_step(&field, &m, h);
        let t = k as f64 * h;
        if !m.is_finite() || m.norm() > BLOW_UP_NORM {
            return Err(Error::BlowUp { time: t });
        }
        for j in 0..4 {
            let d = (forms[j].value(&m) - initial[j]).abs();
            drift[j] = drift[j].max(if scales[j] > 0.0 { d / scales[j] } else { d });
        }
        if k % every == 0 || k == n {
            times.push(t);
            trajectory.push(m);
        }
    }
    Ok(IntegrationReport {
        times,
        trajectory,
        drift: Drift { h: drift[0], c1: drift[1], c2: drift[2], i: drift[3] },
        step: h,
        horizon,
        steps: n,
    })
}

pub const CSV_HEADER: &str = "t,x1,x2,x3,y1,y2,y3,H,C1,C2,I";

/// Writes the trajectory as CSV with [`CSV_HEADER`], 17 significant digits.
pub fn write_trajectory_csv<W: Write>(report: &IntegrationReport, lam: &InertiaSpectrum, mut out: W) -> io::Result<()> {
    debug_assert_eq!(CSV_HEADER.split(',').nth(1), Some(COORDINATE_NAMES[0]));
    writeln!(out, "{CSV_HEADER}")?;
    let forms = MONITORED.map(|id| id.form(lam));
    for (t, m) in report.times.iter().zip(&report.trajectory) {
        write!(out, "{t:.16e}")?;
        for v in m.as_array() {
            write!(out, ",{v:.16e}")?;
        }
        for f in &forms {
            write!(out, ",{:.16e}", f.value(m))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub epsilon: f64,
    pub samples: usize,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
    /// A sample escapes when it strays farther than `escape_factor · epsilon`.
    pub escape_factor: f64,
}

impl ProbeConfig {
    /// Escape factor when nothing is known about the equilibrium.
    pub const DEFAULT_ESCAPE_FACTOR: f64 = 10.0;

    /// `epsilon = 1e-3 · ‖eq‖`, 64 samples, horizon 200, step 0.01, escape
    /// factor 10.
    pub fn for_equilibrium(eq: &Equilibrium, seed: u64) -> Self {
        ProbeConfig {
            epsilon: 1e-3 * eq.state.norm(),
            samples: 64,
            horizon: 200.0,
            step: 0.01,
            seed,
            escape_factor: Self::DEFAULT_ESCAPE_FACTOR,
        }
    }

    /// Widens the escape factor to twice `confinement`, the factor by which a
    /// definite Lyapunov function can stretch an initial offset.
    pub fn with_confinement(mut self, confinement: f64) -> Self {
        self.escape_factor = self.escape_factor.max(2.0 * confinement);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationProbe {
    pub config: ProbeConfig,
    /// Per sample, the largest `‖M(t) - M_eq‖` over the horizon.
    pub excursions: Vec<f64>,
    /// Per sample, whether the excursion exceeded the escape threshold.
    pub escaped: Vec<bool>,
    pub max_excursion: f64,
    /// Largest `|C1 - c1|`, `|C2 - c2|` of the perturbed initial states.
    pub orbit_residual: f64,
}

impl PerturbationProbe {
    pub fn escape_threshold(&self) -> f64 {
        self.config.escape_factor * self.config.epsilon
    }

    pub fn any_escaped(&self) -> bool {
        self.escaped.iter().any(|&e| e)
    }

    pub fn escape_count(&self) -> usize {
        self.escaped.iter().filter(|&&e| e).count()
    }
}

/// Horizon long enough for an instability with growth rate `rate` to be
/// visible: `10 / rate`.
pub fn escape_horizon(rate: f64) -> f64 {
    10.0 / rate
}

/// Pulls `m` back onto `C1 = c1`, `C2 = c2` by Newton steps along the
/// Casimir gradients.
pub fn project_to_orbit(m: &So4State, c1: f64, c2: f64) -> Result<So4State> {
    const MAX_ITER: usize = 50;
    let tol = 1e-14 * c1.abs().max(c2.abs()).max(1.0);
    let mut m = *m;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let r1 = 0.5 * m.norm_squared() - c1;
        let r2 = m.x().iter().zip(m.y()).map(|(x, y)| x * y).sum::<f64>() - c2;
        residual = r1.abs().max(r2.abs());
        if residual <= tol {
            return Ok(m);
        }
        let g1 = m;
        let g2 = m.swapped();
        let jac = Matrix2::new(g1.dot(&g1), g1.dot(&g2), g2.dot(&g1), g2.dot(&g2));
        let Some(inv) = jac.try_inverse() else { break };
        let delta = inv * nalgebra::Vector2::new(r1, r2);
        m = m - g1 * delta[0] - g2 * delta[1];
    }
    Err(Error::ProjectionFailed { iterations: MAX_ITER, residual })
}

fn perturbed_start(eq: &So4State, cfg: &ProbeConfig, index: usize, c1: f64, c2: f64) -> Result<So4State> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let raw = So4State(std::array::from_fn(|_| StandardNormal.sample(&mut rng)));
    if cfg.epsilon == 0.0 {
        return Ok(*eq);
    }
    let q = orbit_tangent_basis(eq)?;
    let v = raw.to_vector();
    let tangent = &q * (q.transpose() * v);
    let dir = So4State::from_vector(&tangent.normalize());
    project_to_orbit(&(*eq + dir * cfg.epsilon), c1, c2)
}

/// Launches `samples` on-orbit perturbations of size `epsilon` and records
/// how far each strays from the equilibrium.
pub fn probe_stability(eq: &Equilibrium, lam: &InertiaSpectrum, cfg: &ProbeConfig) -> Result<PerturbationProbe> {
    if !(cfg.epsilon.is_finite() && cfg.epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be non-negative, got {}", cfg.epsilon)));
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".to_string()));
    }
    let n = step_count(cfg.step, cfg.horizon)?;
    let h = cfg.horizon / n as f64;
    let center = eq.state;
    let c1 = IntegralId::C1.form(lam).value(&center);
    let c2 = IntegralId::C2.form(lam).value(&center);
    let field = FieldCoefficients::new(lam);
    let threshold = cfg.escape_factor * cfg.epsilon;

    let runs: Vec<(f64, f64)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let start = perturbed_start(&center, cfg, i, c1, c2)?;
            let residual = (0.5 * start.norm_squared() - c1)
                .abs()
                .max((start.x().iter().zip(start.y()).map(|(x, y)| x * y).sum::<f64>() - c2).abs());
            let mut m = start;
            let mut excursion = (m - center).norm();
            for k in 1..=n {
                m = rk4_step(&field, &m, h);
                if !m.is_finite() {
                    return Err(Error::BlowUp { time: k as f64 * h });
                }
                excursion = excursion.max((m - center).norm());
            }
            Ok((excursion, residual))
        })
        .collect::<Result<_>>()?;

    let excursions: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let escaped = excursions.iter().map(|&e| e > threshold).collect();
    Ok(PerturbationProbe {
        config: *cfg,
        max_excursion: excursions.iter().cloned().fold(0.0, f64::max),
        orbit_residual: runs.iter().map(|r| r.1).fold(0.0, f64::max),
        excursions,
        escaped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{cartan_point, EquilibriumFamily, OrbitParams, WeylImage};

    fn reference_eq(family: EquilibriumFamily, weyl: WeylImage) -> Equilibrium {
        cartan_point(&OrbitParams::new(5.0, 3.0).unwrap(), family, weyl).unwrap()
    }

    #[test]
    fn equilibrium_stays_put() {
        let lam = InertiaSpectrum::reference();
        let eq = reference_eq(EquilibriumFamily::T2, WeylImage::Identity);
        let rep = integrate(&eq.state, &lam, 0.01, 5.0).unwrap();
        assert!(rep.trajectory.iter().all(|m| (*m - eq.state).max_abs() == 0.0));
        assert!(rep.drift.max() <= 1e-13);
    }

    #[test]
    fn short_run_conserves() {
        let lam = InertiaSpectrum::reference();
        let m0 = So4State::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        let rep = integrate_sampled(&m0, &lam, 1e-3, 5.0, 100).unwrap();
        assert!(rep.drift.max() <= 1e-10, "{:?}", rep.drift);
        assert_eq!(rep.steps, 5000);
        assert_eq!(rep.trajectory.len(), 51);
    }

    #[test]
    fn rejects_bad_steps() {
        let lam = InertiaSpectrum::reference();
        assert!(integrate(&So4State::ZERO, &lam, 0.0, 1.0).is_err());
        assert!(integrate(&So4State::ZERO, &lam, -1.0, 1.0).is_err());
        assert!(integrate(&So4State::ZERO, &lam, 1.0, 0.5).is_err());
    }

    #[test]
    fn csv_layout() {
        let lam = InertiaSpectrum::reference();
        let rep = integrate(&So4State::new(1.0, 0.0, 0.0, 0.5, 0.0, 0.0), &lam, 0.1, 0.3).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&rep, &lam, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 4);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 11));
    }

    #[test]
    fn projection_lands_on_orbit() {
        let m = So4State::new(3.01, 0.02, -0.01, 1.0, 0.005, 0.01);
        let p = project_to_orbit(&m, 5.0, 3.0).unwrap();
        assert!((0.5 * p.norm_squared() - 5.0).abs() <= 1e-12);
        assert!((p.dot(&p.swapped()) * 0.5 - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_epsilon_gives_zero_excursion() {
        let lam = InertiaSpectrum::reference();
        let eq = reference_eq(EquilibriumFamily::T1, WeylImage::Identity);
        let cfg = ProbeConfig { epsilon: 0.0, samples: 4, horizon: 1.0, step: 0.01, seed: 1, escape_factor: 10.0 };
        let probe = probe_stability(&eq, &lam, &cfg).unwrap();
        assert_eq!(probe.max_excursion, 0.0);
        assert!(!probe.any_escaped());
    }

    #[test]
    fn probes_are_deterministic() {
        let lam = InertiaSpectrum::reference();
        let eq = reference_eq(EquilibriumFamily::T2, WeylImage::Identity);
        let cfg = ProbeConfig { epsilon: 1e-3, samples: 8, horizon: 5.0, step: 0.01, seed: 42, escape_factor: 10.0 };
        let a = probe_stability(&eq, &lam, &cfg).unwrap();
        let b = probe_stability(&eq, &lam, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.orbit_residual <= 1e-10);
    }
}
