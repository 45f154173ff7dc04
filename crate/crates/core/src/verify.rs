//! Reference checks: every published number the library reproduces, with
//! the tolerance it is held to.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{c, max_abs_real, pauli_coefficients, CMat2};
use crate::nlbreak::{
    amplitude_damping, breaks_mes_nonlocality, crossing_from_rows, extremal_channel, family_sweep,
    genuine_hidden_family, is_strongly_nlb, linspace, nonunital_strong_breaker, output_t_matrix,
    product_eigenvalue_bound_holds, saturating_counterexample, schmidt_counterexample,
    verify_mesbreak_implies_maxmixed_local, Family, PureInputSpec, SweepGrid,
};
use crate::random;
use crate::state::{
    apply_filter, c_spectrum, c_spectrum_of_pauli, chsh_bruteforce, hidden_nonlocality, horodecki_m, lorentz_of_filter,
    m_of_correlation, AngleGrid, Filter,
};
use crate::volume::{estimate_volumes, Mode, VolumeReport};

/// Seed of every randomized check.
pub const SEED: u64 = 42;

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Full-mode volumes with 10⁶ instead of 10⁷ samples and ±0.02.
    pub fast: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
    /// Informational lines never fail a criterion.
    pub gating: bool,
}

impl Check {
    fn new(name: impl Into<String>, expected: impl Into<String>, computed: impl Into<String>, passed: bool) -> Self {
        Self { name: name.into(), expected: expected.into(), computed: computed.into(), passed, gating: true }
    }

    fn close(name: impl Into<String>, expected: f64, computed: f64, tol: f64) -> Self {
        Self::new(
            name,
            format!("{expected:.6} ± {tol:.0e}"),
            format!("{computed:.8}"),
            (computed - expected).abs() <= tol,
        )
    }

    fn info(name: impl Into<String>, computed: impl Into<String>) -> Self {
        Self { name: name.into(), expected: "-".into(), computed: computed.into(), passed: true, gating: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub time_limit: Option<f64>,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.gating) && self.time_limit.is_none_or(|t| self.seconds <= t)
    }

    /// `PASS`/`FAIL` line followed by one indented line per check.
    pub fn render(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let limit = self.time_limit.map_or(String::new(), |t| format!(" (limit {t:.0} s)"));
        let mut s = format!("{verdict} [{:>2}] {} in {:.2} s{limit}\n", self.id, self.title, self.seconds);
        for ch in &self.checks {
            let mark = match (ch.gating, ch.passed) {
                (false, _) => "info",
                (true, true) => "ok",
                (true, false) => "FAIL",
            };
            s += &format!("      {mark:<4} {:<44} expected {:<24} got {}\n", ch.name, ch.expected, ch.computed);
        }
        s
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "saturating channel, partially entangled input"),
    (2, "MES-breaking channel, Schmidt input"),
    (3, "amplitude damping pure-input sweep"),
    (4, "Choi C-spectra"),
    (5, "filtered CHSH optimum"),
    (6, "quasi-distillation of amplitude damping"),
    (7, "non-unital strong breaker"),
    (8, "q-family violation point and crossing"),
    (9, "Monte Carlo class volumes"),
    (10, "property suites"),
];

pub fn run_criterion(id: u8, opts: VerifyOptions) -> Result<CriterionOutcome> {
    let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let (checks, time_limit) = match id {
        1 => (criterion_1()?, Some(1.0)),
        2 => (criterion_2()?, Some(1.0)),
        3 => (criterion_3()?, Some(120.0)),
        4 => (criterion_4()?, Some(1.0)),
        5 => (criterion_5()?, None),
        6 => (criterion_6()?, None),
        7 => (criterion_7()?, None),
        8 => (criterion_8()?, None),
        9 => (criterion_9(opts)?, Some(600.0)),
        10 => (criterion_10()?, None),
        _ => (vec![Check::new("criterion id", "1..=10", id.to_string(), false)], None),
    };
    Ok(CriterionOutcome { id, title, checks, seconds: start.elapsed().as_secs_f64(), time_limit })
}

pub fn run_all(opts: VerifyOptions) -> Result<Vec<CriterionOutcome>> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, opts)).collect()
}

fn criterion_1() -> Result<Vec<Check>> {
    let spec = PureInputSpec::new(0.4, [1.2, 1.4, 3.5])?;
    let m = m_of_correlation(&output_t_matrix(&saturating_counterexample(), &spec)?);
    let mes = horodecki_m(&saturating_counterexample().choi_state()?);
    Ok(vec![
        Check::close("M at λ = 0.4, Euler (1.2, 1.4, 3.5)", 1.01094, m, 1e-4),
        Check::close("M of the Choi state (saturation)", 1.0, mes, 1e-12),
    ])
}

fn criterion_2() -> Result<Vec<Check>> {
    let spec = PureInputSpec::new(0.45, [0.0; 3])?;
    let ch = schmidt_counterexample();
    let m = m_of_correlation(&output_t_matrix(&ch, &spec)?);
    Ok(vec![
        Check::close("M at λ = 0.45, R = I", 1.0159, m, 1e-4),
        Check::new(
            "Choi state satisfies CHSH",
            "true",
            breaks_mes_nonlocality(&ch)?.to_string(),
            breaks_mes_nonlocality(&ch)?,
        ),
    ])
}

fn criterion_3() -> Result<Vec<Check>> {
    let sweep = SweepGrid::default().prepare()?;
    let ps = linspace(0.0, 1.0, 0.05);
    let rows = family_sweep(&sweep, Family::AmpDamp, &ps, 0.0)?;
    Ok(rows
        .iter()
        .map(|r| {
            let p = r.param;
            if p <= 0.5 + 1e-9 {
                Check::close(format!("best M, p = {p:.2}"), 2.0 * (1.0 - p), r.best_m, 0.02)
            } else {
                Check::close(format!("best M, p = {p:.2}"), 1.0, r.best_m, 1e-6)
            }
        })
        .collect())
}

fn spectrum_check(name: String, got: [f64; 4], want: [f64; 4], tol: f64) -> Check {
    let err = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    Check::new(name, format!("{want:.6?} ± {tol:.0e}"), format!("{got:.10?}"), err <= tol)
}

fn criterion_4() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9] {
        let s = c_spectrum(&amplitude_damping(p)?.choi_state()?)?;
        out.push(spectrum_check(format!("amplitude damping p = {p}"), s.values, [1.0 - p; 4], 1e-10));
    }
    for q in [0.1, 0.3, 0.5, 0.6236, 0.9] {
        let s = c_spectrum(&genuine_hidden_family(q)?.choi_state()?)?;
        out.push(spectrum_check(format!("q-family q = {q}"), s.values, [q, q, q * q, q * q], 1e-10));
    }
    for (u, v) in [(0.3, 0.9), (0.4, 1.0), (1.0, 1.2), (0.2, 2.5)] {
        let s = c_spectrum(&extremal_channel(u, v)?.choi_state()?)?;
        let (a, b) = (f64::cos(u).powi(2), f64::cos(v).powi(2));
        out.push(spectrum_check(format!("extremal (u, v) = ({u}, {v})"), s.values, [a, a, b, b], 1e-10));
    }
    Ok(out)
}

fn criterion_5() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [0.0, 0.2, 0.5, 0.8, 0.95] {
        let h = hidden_nonlocality(&amplitude_damping(p)?.choi_state()?)?;
        out.push(Check::close(format!("amplitude damping p = {p}"), 2.0 * SQRT_2, h.optimal_violation, 1e-9));
    }
    for q in [0.2, 0.5, 0.8] {
        let h = hidden_nonlocality(&genuine_hidden_family(q)?.choi_state()?)?;
        out.push(Check::close(format!("q-family q = {q}"), 2.0 * (1.0 + q).sqrt(), h.optimal_violation, 1e-9));
    }
    for (u, v) in [(0.3, 0.9), (0.4, 1.0), (1.0, 1.2)] {
        let h = hidden_nonlocality(&extremal_channel(u, v)?.choi_state()?)?;
        let want = 1.0 + (f64::cos(v) / f64::cos(u)).powi(2);
        out.push(Check::close(format!("extremal ratio (u, v) = ({u}, {v})"), want, h.ratio, 1e-9));
    }
    Ok(out)
}

fn diag(a: f64, b: f64) -> CMat2 {
    CMat2::new(c(a, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(b, 0.0))
}

fn criterion_6() -> Result<Vec<Check>> {
    let (p, n): (f64, f64) = (0.5, 1e3);
    let rho = amplitude_damping(p)?.choi_state()?;
    let b = diag(1.0 / n, 1.0);
    let m = horodecki_m(&apply_filter(&rho, &Filter::new(diag((1.0 - p).sqrt(), 1.0 / n), b))?);
    let literal = horodecki_m(&apply_filter(&rho, &Filter::new(diag((1.0 - p) / (2.0 - p), 1.0 / n), b))?);
    Ok(vec![
        Check::new("M after A = diag(√(1−p), 1/n), B = diag(1/n, 1)", "≥ 1.999", format!("{m:.8}"), m >= 2.0 - 1e-3),
        Check::info("M with first entry (1−p)/(2−p) instead", format!("{literal:.6}")),
    ])
}

fn criterion_7() -> Result<Vec<Check>> {
    let ch = nonunital_strong_breaker();
    let ratio = c_spectrum(&ch.choi_state()?)?.ratio;
    let snlb = is_strongly_nlb(&ch)?;
    Ok(vec![
        Check::close("C-spectrum ratio of the Choi state", 0.887, ratio, 5e-4),
        Check::new("strongly nonlocality breaking", "true", snlb.to_string(), snlb),
    ])
}

fn criterion_8() -> Result<Vec<Check>> {
    // λ = 0.95 with R = R_y(π) is the same output as λ = 0.05 with R = I.
    let spec = PureInputSpec::new(0.95, [0.0, PI, 0.0])?;
    let m = m_of_correlation(&output_t_matrix(&genuine_hidden_family(0.6236)?, &spec)?);
    let sweep = SweepGrid::default().prepare()?;
    let qs = linspace(0.5, 0.75, 0.01);
    let rows = family_sweep(&sweep, Family::QFamily, &qs, 0.0)?;
    let crossing = crossing_from_rows(&sweep, Family::QFamily, 0.0, &rows, 1e-3)?;
    let mut out = vec![Check::new(
        "M − 1 at q = 0.6236, λ = 0.95",
        "2.339e-5 ± 1e-6",
        format!("{:.4e}", m - 1.0),
        (m - 1.0 - 2.339e-5).abs() <= 1e-6,
    )];
    out.push(match crossing {
        Some(q) => Check::new(
            "q where best M first exceeds 1",
            "[0.615, 0.63]",
            format!("{q:.4}"),
            (0.615..=0.63).contains(&q),
        ),
        None => Check::new("q where best M first exceeds 1", "[0.615, 0.63]", "no crossing", false),
    });
    Ok(out)
}

fn volume_checks(report: &VolumeReport, want: &[(&str, Option<f64>, f64)], tol: f64) -> Vec<Check> {
    want.iter()
        .map(|&(name, got, expected)| {
            let label = format!("{} {name} fraction (n = {:.0e})", report.mode, report.samples_drawn as f64);
            match got {
                Some(f) => Check::close(label, expected, f, tol),
                None => Check::new(label, format!("{expected}"), "undefined", false),
            }
        })
        .collect()
}

fn criterion_9(opts: VerifyOptions) -> Result<Vec<Check>> {
    let (n_full, tol_full) = if opts.fast { (1_000_000, 0.02) } else { (10_000_000, 0.01) };
    let full = estimate_volumes(n_full, SEED, Mode::Full)?;
    let unital = estimate_volumes(1_000_000, SEED, Mode::Unital)?;
    let f = full.fractions;
    let u = unital.fractions;
    let mut out =
        volume_checks(&full, &[("EB", f.eb, 0.24), ("NLB-MES", f.nlb_mes, 0.81), ("SNLB", f.snlb, 0.39)], tol_full);
    out.extend(volume_checks(&unital, &[("EB", u.eb, 0.5), ("SNLB", u.snlb, 0.92)], 0.01));
    out.push(Check::info("unital NLB-MES fraction", format!("{:.4}", u.nlb_mes.unwrap_or(f64::NAN))));
    out.push(Check::info("full-mode CP acceptance", format!("{} of {}", full.cp_accepted, full.samples_drawn)));
    for r in [&full, &unital] {
        let chain = r.eb_count <= r.snlb_count && r.snlb_count <= r.nlb_mes_count && r.nlb_mes_count <= r.cp_accepted;
        out.push(Check::new(format!("{} subset chain EB ⊆ SNLB ⊆ NLB-MES", r.mode), "holds", chain.to_string(), chain));
    }
    Ok(out)
}

fn count_check(name: &str, draws: usize, failures: usize) -> Check {
    Check::new(format!("{name} ({draws} draws)"), "0 failures", format!("{failures} failures"), failures == 0)
}

fn criterion_10() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();

    // (a) brute-force CHSH against 2√M
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rho = random::any_state(&mut rng);
        let bf = chsh_bruteforce(&rho, &AngleGrid::default())?;
        worst = worst.max((bf - 2.0 * horodecki_m(&rho).sqrt()).abs());
    }
    out.push(Check::new("(a) brute-force CHSH vs 2√M, 100 states", "≤ 1e-3", format!("{worst:.2e}"), worst <= 1e-3));

    // (b) Lorentz covariance and ratio invariance
    let (mut cov, mut ratio_err) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let rho = random::state(&mut rng);
        let f = random::full_rank_filter(&mut rng);
        let r = pauli_coefficients(rho.rho());
        let filtered = pauli_coefficients(&f.apply_unnormalized(rho.rho()));
        let scale = f.a.determinant().norm() * f.b.determinant().norm();
        let predicted = lorentz_of_filter(&f.a)? * r * lorentz_of_filter(&f.b)?.transpose() * scale;
        cov = cov.max(max_abs_real(&(filtered - predicted)) / scale);
        let before = c_spectrum_of_pauli(&r)?.values;
        let after = c_spectrum_of_pauli(&filtered)?.values;
        for i in 1..4 {
            ratio_err = ratio_err.max((after[i] / after[0] - before[i] / before[0]).abs());
        }
    }
    out.push(Check::new("(b) Lorentz covariance, 1000 filters", "≤ 1e-9", format!("{cov:.2e}"), cov <= 1e-9));
    out.push(Check::new("(b) C-spectrum ratio invariance", "≤ 1e-8", format!("{ratio_err:.2e}"), ratio_err <= 1e-8));

    // (c) eigenvalue product bound
    let mut fails = 0;
    for _ in 0..100_000 {
        let (a, b) = random::constrained_pd_pair(&mut rng);
        fails += usize::from(!product_eigenvalue_bound_holds(&a, &b)?);
    }
    out.push(count_check("(c) Λ₁ + Λ₂ ≤ 1 for AB", 100_000, fails));

    // (d) MES-breaking channels keep maximally mixed-reduction inputs local
    let mut fails = 0;
    let mut done = 0;
    while done < 10_000 {
        let ch = random::cp_channel(&mut rng);
        if !breaks_mes_nonlocality(&ch)? {
            continue;
        }
        let sigma = random::cp_channel(&mut rng).choi_state()?;
        fails += usize::from(!verify_mesbreak_implies_maxmixed_local(&ch, &sigma)?);
        done += 1;
    }
    out.push(count_check("(d) maximally mixed reduction stays local", 10_000, fails));

    // (e) subset chain
    let mut fails = 0;
    for _ in 0..10_000 {
        let ch = random::cp_channel(&mut rng);
        let eb = ch.is_entanglement_breaking(crate::channel::CP_TOL)?;
        let snlb = is_strongly_nlb(&ch)?;
        let mes = breaks_mes_nonlocality(&ch)?;
        fails += usize::from((eb && !snlb) || (snlb && !mes));
    }
    out.push(count_check("(e) EB ⊆ SNLB ⊆ NLB-MES", 10_000, fails));

    // (f) unital equivalence
    let mut fails = 0;
    for _ in 0..10_000 {
        let ch = random::unital_cp_channel(&mut rng);
        fails += usize::from(is_strongly_nlb(&ch)? != breaks_mes_nonlocality(&ch)?);
    }
    out.push(count_check("(f) unital SNLB = NLB-MES", 10_000, fails));

    // (g) closed-form output correlations against direct application
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let ch = random::canonical_cp_channel(&mut rng);
        let spec = random_spec(&mut rng)?;
        let closed = m_of_correlation(&output_t_matrix(&ch, &spec)?);
        let direct = horodecki_m(&ch.apply_one_sided(&spec.input_state())?);
        worst = worst.max((closed - direct).abs());
    }
    out.push(Check::new("(g) closed-form vs direct M, 1000 inputs", "≤ 1e-9", format!("{worst:.2e}"), worst <= 1e-9));
    Ok(out)
}

/// Uniform Schmidt weight and Euler angles.
pub fn random_spec<R: rand::Rng + ?Sized>(rng: &mut R) -> Result<PureInputSpec> {
    let tau = 2.0 * PI;
    PureInputSpec::new(
        rng.random_range(0.0..=1.0),
        [rng.random_range(0.0..tau), rng.random_range(0.0..tau), rng.random_range(0.0..tau)],
    )
}
