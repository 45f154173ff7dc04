//! Channel classifications by how much CHSH nonlocality survives them.
//!
//! * MES-breaking: the Choi state satisfies CHSH (`M ≤ 1`).
//! * Pure-input sweeps: the largest `M` over outputs of partially entangled
//!   inputs `(I ⊗ V)(√λ|00⟩ + √(1−λ)|11⟩)`.
//! * Strongly breaking: the Choi state shows no CHSH violation even after
//!   local filtering.

mod families;
mod sweep;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::channel::{axis_unitary, QubitChannel};
use crate::error::{check_range, Error, Result};
use crate::linalg::{self, c, eig_symmetric3, RMat3, RMat4};
use crate::state::{self, horodecki_m, CorrelationTensors, TwoQubitState};

pub use families::{
    amplitude_damping, extremal_channel, genuine_hidden_family, nonunital_strong_breaker, saturating_counterexample,
    schmidt_counterexample, Family,
};
pub use sweep::{max_m_over_pure_inputs, GridMeta, PreparedSweep, SweepGrid, SweepResult};

/// Slack on `M ≤ 1` when deciding MES-breaking.
pub const MES_SLACK: f64 = 1e-12;

/// Slack on `M ≤ 1` for outputs of maximally mixed reductions.
pub const MAXMIXED_SLACK: f64 = 1e-9;

/// Slack on `Λ₁ + Λ₂ ≤ 1` in the eigenvalue-product check.
pub const PRODUCT_SLACK: f64 = 1e-10;

/// A partially entangled pure input: Schmidt weight `λ` and the Z-Y-Z Euler
/// angles of the local rotation on the channel side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureInputSpec {
    pub schmidt_lambda: f64,
    pub euler: [f64; 3],
}

impl PureInputSpec {
    /// Validates `λ ∈ [0, 1]` and wraps the angles into `[0, 2π)`.
    pub fn new(schmidt_lambda: f64, euler: [f64; 3]) -> Result<Self> {
        check_range("schmidt_lambda", schmidt_lambda, 0.0, 1.0, "[0, 1]")?;
        let mut wrapped = [0.0; 3];
        for (w, a) in wrapped.iter_mut().zip(euler) {
            if !a.is_finite() {
                return Err(Error::OutOfRange { name: "euler", value: a, range: "finite" });
            }
            *w = a.rem_euclid(TAU);
            if *w >= TAU {
                *w = 0.0;
            }
        }
        Ok(Self { schmidt_lambda, euler: wrapped })
    }

    pub fn rotation(&self) -> RMat3 {
        euler_rotation(self.euler)
    }

    /// The input state itself, `(I ⊗ V)(√λ|00⟩ + √(1−λ)|11⟩)`, with `V`
    /// chosen so that the channel output has the correlation matrix of
    /// [`output_t_matrix`].
    pub fn input_state(&self) -> TwoQubitState {
        let [a, b, g] = self.euler;
        let u = axis_unitary(3, a) * axis_unitary(2, b) * axis_unitary(3, g);
        let v = u.transpose();
        let l = self.schmidt_lambda;
        let schmidt = TwoQubitState::pure([c(l.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - l).sqrt(), 0.0)]);
        schmidt.local_unitary(&linalg::CMat2::identity(), &v)
    }
}

/// `R_z(α) R_y(β) R_z(γ)`.
pub fn euler_rotation([a, b, g]: [f64; 3]) -> RMat3 {
    let rz = |x: f64| {
        let (s, c) = x.sin_cos();
        RMat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
    };
    let (sb, cb) = b.sin_cos();
    let ry = RMat3::new(cb, 0.0, sb, 0.0, 1.0, 0.0, -sb, 0.0, cb);
    rz(a) * ry * rz(g)
}

fn require_canonical(ch: &QubitChannel) -> Result<()> {
    if ch.is_canonical() {
        Ok(())
    } else {
        Err(Error::NotCanonical)
    }
}

/// Correlation matrix of the output on a pure input:
/// `diag(α′, α′, 1) · R · diag(λ₁, −λ₂, λ₃)` plus `(2λ−1) t` in the third
/// row, with `α′ = 2√(λ(1−λ))`.
pub fn output_t_matrix(ch: &QubitChannel, spec: &PureInputSpec) -> Result<RMat3> {
    require_canonical(ch)?;
    let l = spec.schmidt_lambda;
    let a = 2.0 * (l * (1.0 - l)).sqrt();
    let [l1, l2, l3] = ch.lambda;
    let mut t = RMat3::from_diagonal(&nalgebra::Vector3::new(a, a, 1.0))
        * spec.rotation()
        * RMat3::from_diagonal(&nalgebra::Vector3::new(l1, -l2, l3));
    for j in 0..3 {
        t[(2, j)] += (2.0 * l - 1.0) * ch.t[j];
    }
    Ok(t)
}

/// Full output tensors: correlation matrix from [`output_t_matrix`], the
/// untouched side's Bloch vector `(0, 0, 2λ−1)` and the channel side's
/// `t + (2λ−1)(λ₁R₃₁, −λ₂R₃₂, λ₃R₃₃)`.
pub fn output_correlations(ch: &QubitChannel, spec: &PureInputSpec) -> Result<CorrelationTensors> {
    let t = output_t_matrix(ch, spec)?;
    let r = spec.rotation();
    let z = 2.0 * spec.schmidt_lambda - 1.0;
    let signs = [ch.lambda[0], -ch.lambda[1], ch.lambda[2]];
    let mut full = RMat4::zeros();
    full[(0, 0)] = 1.0;
    full[(3, 0)] = z;
    for j in 0..3 {
        full[(0, j + 1)] = ch.t[j] + z * signs[j] * r[(2, j)];
        for i in 0..3 {
            full[(i + 1, j + 1)] = t[(i, j)];
        }
    }
    Ok(CorrelationTensors::from_pauli(full))
}

/// The output state on a pure input, assembled from [`output_correlations`].
pub fn output_state(ch: &QubitChannel, spec: &PureInputSpec) -> Result<TwoQubitState> {
    ch.ensure_completely_positive()?;
    TwoQubitState::from_pauli(&output_correlations(ch, spec)?.full)
}

/// `M` of the Choi state is at most 1.
pub fn breaks_mes_nonlocality(ch: &QubitChannel) -> Result<bool> {
    Ok(horodecki_m(&ch.choi_state()?) <= 1.0 + MES_SLACK)
}

/// No local filtering of the Choi state yields a CHSH violation.
pub fn is_strongly_nlb(ch: &QubitChannel) -> Result<bool> {
    Ok(!state::hidden_nonlocality(&ch.choi_state()?)?.violates)
}

/// For an MES-breaking channel and a state whose untouched-side reduction is
/// maximally mixed, checks that the output still satisfies CHSH.
pub fn verify_mesbreak_implies_maxmixed_local(ch: &QubitChannel, sigma: &TwoQubitState) -> Result<bool> {
    if !breaks_mes_nonlocality(ch)? {
        return Err(Error::Precondition("channel does not break maximally entangled nonlocality".into()));
    }
    let red = sigma.reduced_first();
    let dev = linalg::max_abs(&(red - linalg::CMat2::identity().scale(0.5)));
    if dev > 1e-9 {
        return Err(Error::Precondition(format!("reduced state deviates from I/2 by {dev:e}")));
    }
    Ok(horodecki_m(&ch.apply_one_sided(sigma)?) <= 1.0 + MAXMIXED_SLACK)
}

/// For symmetric positive definite `A` with `λ₁(A) + λ₂(A) ≤ 1` and `B`
/// with every eigenvalue at most 1, checks that the two largest eigenvalues
/// of `AB` also sum to at most 1.
pub fn product_eigenvalue_bound_holds(a: &RMat3, b: &RMat3) -> Result<bool> {
    for (name, m) in [("A", a), ("B", b)] {
        if linalg::max_abs_real(&(m - m.transpose())) > 1e-12 {
            return Err(Error::Precondition(format!("{name} is not symmetric")));
        }
        if eig_symmetric3(m)[2] <= 0.0 {
            return Err(Error::Precondition(format!("{name} is not positive definite")));
        }
    }
    let ea = eig_symmetric3(a);
    if ea[0] + ea[1] > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!("λ₁(A) + λ₂(A) = {} exceeds 1", ea[0] + ea[1])));
    }
    if eig_symmetric3(b)[0] > 1.0 + 1e-12 {
        return Err(Error::Precondition("B has an eigenvalue above 1".into()));
    }
    // AB is similar to the symmetric A^{1/2} B A^{1/2}.
    let sa = a.symmetric_eigen();
    let root = sa.eigenvectors * RMat3::from_diagonal(&sa.eigenvalues.map(f64::sqrt)) * sa.eigenvectors.transpose();
    let e = eig_symmetric3(&(root * b * root));
    Ok(e[0] + e[1] <= 1.0 + PRODUCT_SLACK)
}

/// Best pure-input `M` along a family at parameter `x`.
pub fn family_best_m(sweep: &PreparedSweep, family: Family, x: f64, v: f64) -> Result<f64> {
    Ok(sweep.max_m(&family.channel(x, v)?)?.best_m)
}

/// Threshold above which a sweep value counts as a CHSH violation.
pub const CROSSING_THRESHOLD: f64 = 1e-9;

/// Bisects `[lo, hi]` for the parameter where the family's best pure-input
/// `M` first exceeds `1 + CROSSING_THRESHOLD`. Requires no violation at `lo`
/// and a violation at `hi`.
pub fn crossing_estimate(
    sweep: &PreparedSweep,
    family: Family,
    v: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let violates = |x: f64| -> Result<bool> { Ok(family_best_m(sweep, family, x, v)? > 1.0 + CROSSING_THRESHOLD) };
    if violates(lo)? || !violates(hi)? {
        return Err(Error::Precondition(format!("[{lo}, {hi}] does not bracket a crossing")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if violates(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One row of a family sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyRow {
    pub param: f64,
    pub best_m: f64,
    pub best_spec: PureInputSpec,
}

pub fn family_sweep(sweep: &PreparedSweep, family: Family, params: &[f64], v: f64) -> Result<Vec<FamilyRow>> {
    params
        .iter()
        .map(|&x| {
            let r = sweep.max_m(&family.channel(x, v)?)?;
            Ok(FamilyRow { param: x, best_m: r.best_m, best_spec: r.best_spec })
        })
        .collect()
}

/// Refines the first non-violating → violating transition among `rows`
/// (sorted by parameter) by bisection. `None` if there is no such pair.
pub fn crossing_from_rows(
    sweep: &PreparedSweep,
    family: Family,
    v: f64,
    rows: &[FamilyRow],
    tol: f64,
) -> Result<Option<f64>> {
    let violating = |r: &FamilyRow| r.best_m > 1.0 + CROSSING_THRESHOLD;
    match rows.windows(2).find(|w| !violating(&w[0]) && violating(&w[1])) {
        Some(w) => crossing_estimate(sweep, family, v, w[0].param, w[1].param, tol).map(Some),
        None => Ok(None),
    }
}

/// `lo, lo + step, …` up to and including `hi` when it falls on the grid.
pub fn linspace(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut v: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
    if let Some(last) = v.last_mut() {
        if (*last - hi).abs() < 1e-9 {
            *last = hi;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_real;
    use crate::state::m_of_correlation;

    #[test]
    fn spec_wraps_and_validates() {
        let s = PureInputSpec::new(0.3, [-0.5, TAU, 7.0]).unwrap();
        assert!((s.euler[0] - (TAU - 0.5)).abs() < 1e-12);
        assert_eq!(s.euler[1], 0.0);
        assert!((s.euler[2] - (7.0 - TAU)).abs() < 1e-12);
        assert!(PureInputSpec::new(1.2, [0.0; 3]).is_err());
        assert!(PureInputSpec::new(0.5, [f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn euler_is_rotation() {
        let r = euler_rotation([1.2, 1.4, 3.5]);
        assert!(max_abs_real(&(r.transpose() * r - RMat3::identity())) < 1e-14);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
        let (s, c) = 0.3f64.sin_cos();
        let rz = euler_rotation([0.3, 0.0, 0.0]);
        assert!((rz[(0, 1)] + s).abs() < 1e-15 && (rz[(1, 0)] - s).abs() < 1e-15 && (rz[(0, 0)] - c).abs() < 1e-15);
        let ry = euler_rotation([0.0, 0.3, 0.0]);
        assert!((ry[(0, 2)] - s).abs() < 1e-15 && (ry[(2, 0)] + s).abs() < 1e-15);
    }

    #[test]
    fn maximally_entangled_input_gives_choi_correlations() {
        let ch = saturating_counterexample();
        let spec = PureInputSpec::new(0.5, [0.0; 3]).unwrap();
        let t = output_t_matrix(&ch, &spec).unwrap();
        let want = ch.choi_state().unwrap().correlation_tensors().correlation;
        assert!(max_abs_real(&(t - want)) < 1e-15);
    }

    #[test]
    fn amplitude_damping_diagonal() {
        let (p, l): (f64, f64) = (0.3, 0.2);
        let ch = amplitude_damping(p).unwrap();
        let t = output_t_matrix(&ch, &PureInputSpec::new(l, [0.0; 3]).unwrap()).unwrap();
        let d = 2.0 * (l * (1.0 - l) * (1.0 - p)).sqrt();
        let want = RMat3::from_diagonal(&nalgebra::Vector3::new(d, -d, l + (1.0 - l) * (1.0 - 2.0 * p)));
        assert!(max_abs_real(&(t - want)) < 1e-15);
    }

    #[test]
    fn closed_form_matches_direct_output() {
        let ch = saturating_counterexample();
        let spec = PureInputSpec::new(0.4, [1.2, 1.4, 3.5]).unwrap();
        let direct = ch.apply_one_sided(&spec.input_state()).unwrap().correlation_tensors();
        let closed = output_correlations(&ch, &spec).unwrap();
        assert!(max_abs_real(&(direct.full - closed.full)) < 1e-12);
        assert!(non_canonical_rejected());
    }

    fn non_canonical_rejected() -> bool {
        let ch = QubitChannel::identity().with_pre_unitary(axis_unitary(1, 0.3));
        matches!(output_t_matrix(&ch, &PureInputSpec::new(0.5, [0.0; 3]).unwrap()), Err(Error::NotCanonical))
    }

    #[test]
    fn counterexample_values() {
        let m1 = m_of_correlation(
            &output_t_matrix(&saturating_counterexample(), &PureInputSpec::new(0.4, [1.2, 1.4, 3.5]).unwrap()).unwrap(),
        );
        assert!((m1 - 1.01094).abs() < 1e-4, "{m1}");
        let m2 = m_of_correlation(
            &output_t_matrix(&schmidt_counterexample(), &PureInputSpec::new(0.45, [0.0; 3]).unwrap()).unwrap(),
        );
        assert!((m2 - 1.0159).abs() < 1e-4, "{m2}");
    }

    #[test]
    fn mes_breaking_examples() {
        assert!(!breaks_mes_nonlocality(&QubitChannel::identity()).unwrap());
        let sat = saturating_counterexample();
        assert!(breaks_mes_nonlocality(&sat).unwrap());
        assert!((horodecki_m(&sat.choi_state().unwrap()) - 1.0).abs() < 1e-12);
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            assert_eq!(breaks_mes_nonlocality(&amplitude_damping(p).unwrap()).unwrap(), p >= 0.5, "p = {p}");
        }
        let qc = std::f64::consts::FRAC_1_SQRT_2;
        assert!(breaks_mes_nonlocality(&genuine_hidden_family(qc - 1e-6).unwrap()).unwrap());
        assert!(!breaks_mes_nonlocality(&genuine_hidden_family(qc + 1e-6).unwrap()).unwrap());
    }

    #[test]
    fn strong_breaking_examples() {
        let ch = nonunital_strong_breaker();
        assert!(is_strongly_nlb(&ch).unwrap());
        let r = state::c_spectrum(&ch.choi_state().unwrap()).unwrap().ratio;
        assert!((r - 0.887).abs() < 5e-4, "{r}");
        for p in [0.0, 0.3, 0.7, 0.99] {
            assert!(!is_strongly_nlb(&amplitude_damping(p).unwrap()).unwrap());
        }
        let unital = QubitChannel::canonical([0.0; 3], [0.6, 0.5, 0.2]);
        assert!(is_strongly_nlb(&unital).unwrap());
        assert!(is_strongly_nlb(&QubitChannel::completely_depolarizing()).unwrap());
        assert!(is_strongly_nlb(&extremal_channel(std::f64::consts::FRAC_PI_2, 0.4).unwrap()).unwrap());
        assert!(!is_strongly_nlb(&extremal_channel(0.3, 0.9).unwrap()).unwrap());
    }

    #[test]
    fn eb_at_cos_zero() {
        let ch = extremal_channel(std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        assert!(ch.is_entanglement_breaking(1e-10).unwrap());
    }

    #[test]
    fn q_family_choi() {
        let q = 0.35;
        let ch = genuine_hidden_family(q).unwrap();
        let singlet = TwoQubitState::singlet();
        let noise = linalg::kron(
            &linalg::CMat2::identity().scale(0.5),
            &linalg::CMat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
        );
        let want = singlet.rho().scale(q) + noise.scale(1.0 - q);
        assert!(linalg::max_abs(&(ch.choi_matrix() - want)) < 1e-15);
        let zero = genuine_hidden_family(0.0).unwrap().choi_state().unwrap();
        assert!(max_abs_real(&zero.correlation_tensors().correlation) < 1e-15);
    }

    #[test]
    fn mesbreak_maxmixed_examples() {
        let sat = saturating_counterexample();
        assert!(verify_mesbreak_implies_maxmixed_local(&sat, &TwoQubitState::phi_plus()).unwrap());
        let sigma = amplitude_damping(0.3).unwrap().choi_state().unwrap();
        assert!(verify_mesbreak_implies_maxmixed_local(&sat, &sigma).unwrap());
        assert!(matches!(
            verify_mesbreak_implies_maxmixed_local(&QubitChannel::identity(), &sigma),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            verify_mesbreak_implies_maxmixed_local(&sat, &TwoQubitState::product00()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn product_bound_examples() {
        let a = RMat3::from_diagonal(&nalgebra::Vector3::new(0.5, 0.3, 0.1));
        assert!(product_eigenvalue_bound_holds(&a, &RMat3::identity()).unwrap());
        assert!(product_eigenvalue_bound_holds(&RMat3::identity().scale(0.5), &RMat3::identity()).unwrap());
        assert!(product_eigenvalue_bound_holds(&RMat3::identity(), &RMat3::identity()).is_err());
        assert!(product_eigenvalue_bound_holds(&a, &RMat3::identity().scale(1.5)).is_err());
    }
}
