//! Self-check suites: the algebraic identities and closed forms, evaluated on
//! random data for one spectrum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::body::vector_field;
use crate::dynamics::integrate_sampled;
use crate::equilibria::{Equilibrium, EquilibriumFamily};
use crate::error::Result;
use crate::inertia::InertiaSpectrum;
use crate::linalg::spectrum_distance;
use crate::integrals::{bracket_of_gradients, bracket_scale, popov_decomposition, popov_id, IntegralId};
use crate::lyapunov::{closed_forms, critical_candidate, p_interval, restricted_hessian, CandidateBase};
use crate::spectral::{bifurcating_state, char_quartic, f_tilde, numeric_spectrum};
use crate::state::So4State;
use crate::tolerance::IDENTITY_REL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Suite {
    Conservation,
    Bracket,
    Decomposition,
    ClosedFormVsNumeric,
    Ordering,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Conservation, Suite::Bracket, Suite::Decomposition, Suite::ClosedFormVsNumeric, Suite::Ordering];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Conservation => "conservation",
            Suite::Bracket => "bracket",
            Suite::Decomposition => "decomposition",
            Suite::ClosedFormVsNumeric => "closed_form_vs_numeric",
            Suite::Ordering => "ordering",
        }
    }
}

/// Deliberate corruption for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Fault {
    /// Multiply `μ2` of `G_k` by `1 + rel`.
    PerturbMu2 { k: u8, rel: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 200, seed: 2024, fault: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    /// Largest scaled error seen, for the suites that measure one.
    pub max_error: f64,
    pub note: Option<String>,
}

impl SuiteResult {
    fn new(suite: Suite) -> Self {
        SuiteResult { suite, name: suite.name(), checks: 0, failures: Vec::new(), max_error: 0.0, note: None }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records `err <= tol`; keeps at most 10 failure messages.
    fn check(&mut self, err: f64, tol: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if err.is_finite() {
            self.max_error = self.max_error.max(err);
        }
        if !(err <= tol) && self.failures.len() < 10 {
            self.failures.push(format!("{} (error {err:e} > {tol:e})", what()));
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 10 {
            self.failures.push(what());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub lam: InertiaSpectrum,
    pub options: VerifyOptions,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

/// Uniform random state with entries in `[-2, 2]`.
pub fn random_state<R: Rng>(rng: &mut R) -> So4State {
    So4State(std::array::from_fn(|_| rng.random_range(-2.0..2.0)))
}

/// Random valid spectrum: four values in `[-1, 6]`, sorted, with gaps of at
/// least 0.05 and `λ3 + λ4 >= 0.1`.
pub fn random_spectrum<R: Rng>(rng: &mut R) -> InertiaSpectrum {
    loop {
        let mut l: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..6.0));
        l.sort_by(|a, b| b.total_cmp(a));
        let gaps_ok = l.windows(2).all(|w| w[0] - w[1] >= 0.05);
        if gaps_ok && l[2] + l[3] >= 0.1 {
            if let Ok(lam) = InertiaSpectrum::from_array(l) {
                return lam;
            }
        }
    }
}

/// `(a, b)` with `a ∈ [0.5, 3]` and `b²/a²` uniform in `[lo, hi)`, random sign of `b`.
pub fn random_ab<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> (f64, f64) {
    let a = rng.random_range(0.5..3.0);
    let r: f64 = rng.random_range(lo..hi);
    let b = a * r.sqrt() * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    (a, b)
}

pub fn run_all(lam: &InertiaSpectrum, opts: &VerifyOptions) -> Result<VerifyReport> {
    let suites = Suite::ALL.iter().map(|&s| run_suite(s, lam, opts)).collect::<Result<_>>()?;
    Ok(VerifyReport { lam: *lam, options: *opts, suites })
}

pub fn run_suite(suite: Suite, lam: &InertiaSpectrum, opts: &VerifyOptions) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(suite as u64);
    match suite {
        Suite::Conservation => conservation(lam, opts, &mut rng),
        Suite::Bracket => Ok(bracket(lam, opts, &mut rng)),
        Suite::Decomposition => decomposition(lam, opts, &mut rng),
        Suite::ClosedFormVsNumeric => closed_form_vs_numeric(lam, opts, &mut rng),
        Suite::Ordering => ordering(lam, opts, &mut rng),
    }
}

fn conservation(lam: &InertiaSpectrum, opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut res = SuiteResult::new(Suite::Conservation);
    for _ in 0..opts.samples {
        let m = random_state(rng);
        let x = vector_field(&m, lam);
        for id in IntegralId::ALL {
            let g = id.form(lam).gradient(&m);
            let scale: f64 = (0..6).map(|k| (g[k] * x[k]).abs()).sum();
            let err = g.dot(&x).abs() / scale.max(f64::MIN_POSITIVE);
            res.check(err, IDENTITY_REL, || format!("<grad {id}, X> at {m:?}"));
        }
    }
    let m0 = random_state(rng);
    let run = integrate_sampled(&m0, lam, 1e-3, 10.0, usize::MAX)?;
    res.check(run.drift.max(), 1e-8, || format!("RK4 drift from {m0:?}"));
    Ok(res)
}

fn bracket(lam: &InertiaSpectrum, opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut res = SuiteResult::new(Suite::Bracket);
    let mut pairs = vec![(IntegralId::H, IntegralId::I)];
    pairs.extend([IntegralId::G1, IntegralId::G2, IntegralId::G3, IntegralId::G4].map(|g| (IntegralId::H, g)));
    for c in [IntegralId::C1, IntegralId::C2] {
        pairs.extend(IntegralId::ALL.map(|f| (c, f)));
    }
    for _ in 0..opts.samples {
        let m = random_state(rng);
        for &(f, g) in &pairs {
            let (gf, gg) = (f.form(lam).gradient(&m), g.form(lam).gradient(&m));
            let scale = bracket_scale(&m, &gf, &gg);
            let err = bracket_of_gradients(&m, &gf, &gg).abs() / scale.max(f64::MIN_POSITIVE);
            res.check(err, IDENTITY_REL, || format!("{{{f}, {g}}} at {m:?}"));
        }
    }
    res
}

fn decomposition(lam: &InertiaSpectrum, opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut res = SuiteResult::new(Suite::Decomposition);
    let mut decomps = Vec::with_capacity(4);
    for k in 1..=4u8 {
        let mut d = popov_decomposition(k, lam)?;
        if let Some(Fault::PerturbMu2 { k: fk, rel }) = opts.fault {
            if fk == k {
                d.mu2 *= 1.0 + rel;
            }
        }
        decomps.push((popov_id(k)?.form(lam), d.form(lam)));
    }
    let g_sum = decomps.iter().fold(crate::integrals::QuadraticForm::default(), |acc, (g, _)| acc + *g);
    for _ in 0..opts.samples {
        let m = random_state(rng);
        for (k, (g, combo)) in decomps.iter().enumerate() {
            let scale = g.magnitude(&m) + combo.magnitude(&m);
            let err = (g.value(&m) - combo.value(&m)).abs() / scale.max(f64::MIN_POSITIVE);
            res.check(err, IDENTITY_REL, || format!("G{} decomposition at {m:?}", k + 1));
        }
        // The sum of the four Popov integrals has vanishing bracket with H.
        let gs = g_sum.gradient(&m);
        let gh = IntegralId::H.form(lam).gradient(&m);
        let scale = decomps.iter().map(|(g, _)| g.gradient(&m).norm()).sum::<f64>() * gh.norm() * m.norm();
        let err = bracket_of_gradients(&m, &gh, &gs).abs() / scale.max(f64::MIN_POSITIVE);
        res.check(err, IDENTITY_REL, || format!("{{H, G1+G2+G3+G4}} at {m:?}"));
    }
    Ok(res)
}

fn closed_form_vs_numeric(lam: &InertiaSpectrum, opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut res = SuiteResult::new(Suite::ClosedFormVsNumeric);
    for _ in 0..opts.samples {
        let (a, b) = random_ab(rng, 0.0, 0.98);
        let q = char_quartic(lam, a, b)?;
        let closed = q.roots();
        let numeric = numeric_spectrum(&bifurcating_state(a, b), lam)?;
        let size = closed.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = spectrum_distance(&closed, &numeric) / size;
        res.check(err, 1e-7, || format!("quartic roots vs eigenvalues at (a, b) = ({a}, {b})"));
        let direct = q.delta_from_coefficients();
        let scale = q.v * q.v + (4.0 * q.u * q.w).abs();
        res.check((direct - q.delta).abs() / scale, 1e-9, || format!("Δ identity at ({a}, {b})"));

        // G3 minors at M1(a,b), a > |b|.
        let eq = Equilibrium::cartan(EquilibriumFamily::T1, a, b)?;
        let cand = critical_candidate(CandidateBase::G3, &eq, lam)?;
        let cert = restricted_hessian(&cand, &eq, lam)?;
        let printed = closed_forms::g3_minors(lam, a, b);
        for (k, (n, c)) in cert.minors.iter().zip(printed).enumerate() {
            res.check((n - c).abs() / c.abs(), 1e-9, || format!("G3 minor D{} at ({a}, {b})", k + 1));
        }
        res.require(cert.sylvester_agrees, || format!("Sylvester disagreement for G3 at ({a}, {b})"));

        // F^p minors at M1(b,a) for a random p.
        let p = rng.random_range(-3.0..3.0);
        let eq = Equilibrium::cartan(EquilibriumFamily::T1, b, a)?;
        let cand = critical_candidate(CandidateBase::HPlusScaledI { p }, &eq, lam)?;
        let cert = restricted_hessian(&cand, &eq, lam)?;
        let printed = closed_forms::bifurcation_minors(lam, a, b, p);
        for (k, (n, c)) in cert.minors.iter().zip(printed).enumerate() {
            // D_k is a product of k eigenvalue-sized factors, so compare on
            // that scale rather than against a possibly tiny value.
            let size = cert.eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max).powi(k as i32 + 1);
            res.check((n - c).abs() / size, 1e-9, || format!("F^p minor D{} at ({a}, {b}), p = {p}", k + 1));
        }
    }
    Ok(res)
}

fn ordering(lam: &InertiaSpectrum, opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut res = SuiteResult::new(Suite::Ordering);
    let ft = f_tilde(lam);
    res.require(ft.s_tilde > 0.0 && ft.u_tilde > 0.0 && ft.t_tilde < 0.0, || "f̃ coefficient signs".to_string());
    res.require(0.0 < ft.alpha1 && ft.alpha1 < ft.alpha2 && ft.alpha2 <= 1.0 + 1e-12, || {
        format!("0 < α1 < α2 <= 1 fails: ({}, {})", ft.alpha1, ft.alpha2)
    });
    let q = char_quartic(lam, 1.0, 0.5)?;
    res.require(q.t > 0.0, || format!("T = {} is not positive", q.t));
    let st = q.s_over_t();
    let tol = 1e-12;
    res.require(ft.alpha1 - tol <= st && st <= ft.alpha2 + tol, || format!("S/T = {st} outside [α1, α2]"));
    res.require(ft.eval(st) <= tol * ft.s_tilde, || format!("f̃(S/T) = {} > 0", ft.eval(st)));

    if lam.square_sum_gap() == 0.0 {
        res.note = Some("λ1² + λ4² = λ2² + λ3²: α2 = 1, no p-interval to check".to_string());
        return Ok(res);
    }
    for _ in 0..opts.samples {
        let lo = ft.alpha2 + 1e-6 * (1.0 - ft.alpha2);
        let (a, b) = random_ab(rng, lo, 1.0 - 1e-6 * (1.0 - ft.alpha2));
        let rep = p_interval(lam, a, b)?;
        let tag = || format!("(a, b) = ({a}, {b}), {:?}", rep.case);
        res.require(rep.ordering_holds, || format!("root ordering fails at {}", tag()));
        res.require(rep.vertex_bound_holds, || format!("vertex bound fails at {}", tag()));
        res.require(rep.g_p1 > 0.0 && rep.g_p2 > 0.0, || format!("g(p1) or g(p2) not positive at {}", tag()));
        let gp1 = closed_forms::g_at_p1(lam, a, b);
        let gp2 = closed_forms::g_at_p2(lam, a, b);
        res.check((rep.g_p1 - gp1).abs() / gp1.abs(), 1e-8, || format!("g(p1) closed form at {}", tag()));
        res.check((rep.g_p2 - gp2).abs() / gp2.abs(), 1e-8, || format!("g(p2) closed form at {}", tag()));
    }
    Ok(res)
}
