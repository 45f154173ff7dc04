//! Two-qubit states and their CHSH-relevant invariants.
//!
//! * [`horodecki_m`] decides plain CHSH violation from the correlation matrix.
//! * [`c_spectrum`] / [`hidden_nonlocality`] decide violation after the best
//!   local filtering, from the spectrum of `C_ρ = M R M Rᵀ` with
//!   `M = diag(1, −1, −1, −1)` and `R_ij = Tr(ρ σ_i ⊗ σ_j)`.
//! * [`chsh_bruteforce`] maximizes the Bell expectation directly and serves
//!   as an independent check on `2√M`.

mod chsh;
mod filter;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, eig_general_real, CMat2, CMat4, RMat3, RMat4, C64, IMAG_TOL};

pub use chsh::{chsh_bruteforce, AngleGrid};
pub use filter::{apply_filter, lorentz_of_filter, Filter, NORM_FLOOR};

/// Tolerance used when validating density matrices.
pub const STATE_TOL: f64 = 1e-9;

/// Below this, the leading C-eigenvalue is treated as zero.
pub const DEGENERATE_LAMBDA0: f64 = 1e-12;

/// Relative slack in the strict inequality `λ₁ + λ₂ > λ₀`.
pub const HIDDEN_REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct TwoQubitState {
    rho: CMat4,
}

impl TwoQubitState {
    /// Validates hermiticity, unit trace and positivity (all to 1e-9).
    pub fn new(rho: CMat4) -> Result<Self> {
        let dev = linalg::max_abs(&(rho - rho.adjoint()));
        if !(dev <= STATE_TOL) {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let rho = (rho + rho.adjoint()).scale(0.5);
        let tr = rho.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = linalg::min_eigenvalue_hermitian(&rho);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { rho })
    }

    /// Normalized projector onto `psi` (amplitudes in the |00⟩,|01⟩,|10⟩,|11⟩ basis).
    pub fn pure(psi: [C64; 4]) -> Self {
        let v = nalgebra::Vector4::from(psi);
        let v = v.unscale(v.norm());
        Self { rho: v * v.adjoint() }
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> Self {
        let a = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::pure([a, c(0.0, 0.0), c(0.0, 0.0), a])
    }

    /// `(|01⟩ − |10⟩)/√2`.
    pub fn singlet() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure([c(0.0, 0.0), c(a, 0.0), c(-a, 0.0), c(0.0, 0.0)])
    }

    pub fn product00() -> Self {
        Self::pure([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
    }

    pub fn maximally_mixed() -> Self {
        Self { rho: CMat4::identity().scale(0.25) }
    }

    /// State with Pauli coefficient matrix `r` (`r[(0,0)]` must be 1).
    pub fn from_pauli(r: &RMat4) -> Result<Self> {
        Self::new(linalg::from_pauli_coefficients(r))
    }

    pub fn rho(&self) -> &CMat4 {
        &self.rho
    }

    /// Reduced state of the first factor.
    pub fn reduced_first(&self) -> CMat2 {
        linalg::partial_trace_b(&self.rho)
    }

    /// Reduced state of the second factor.
    pub fn reduced_second(&self) -> CMat2 {
        linalg::partial_trace_a(&self.rho)
    }

    /// `(U_a ⊗ U_b) ρ (U_a ⊗ U_b)†`
    pub fn local_unitary(&self, ua: &CMat2, ub: &CMat2) -> Self {
        let k = linalg::kron(ua, ub);
        Self { rho: k * self.rho * k.adjoint() }
    }

    pub fn correlation_tensors(&self) -> CorrelationTensors {
        CorrelationTensors::from_pauli(linalg::pauli_coefficients(&self.rho))
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    rho: Vec<[f64; 2]>,
}

impl From<TwoQubitState> for StateJson {
    fn from(s: TwoQubitState) -> Self {
        // nalgebra iterates column-major; emit row-major.
        let rho = (0..16).map(|k| s.rho[(k / 4, k % 4)]).map(|z| [z.re, z.im]).collect();
        Self { rho }
    }
}

impl TryFrom<StateJson> for TwoQubitState {
    type Error = Error;

    fn try_from(js: StateJson) -> Result<Self> {
        if js.rho.len() != 16 {
            return Err(Error::InvalidState(format!("expected 16 entries, got {}", js.rho.len())));
        }
        let rho = CMat4::from_fn(|r, k| {
            let [re, im] = js.rho[4 * r + k];
            c(re, im)
        });
        Self::new(rho)
    }
}

/// Bloch vectors, correlation matrix and the full 4×4 Pauli matrix
/// `R_ij = Tr(ρ σ_i ⊗ σ_j)` of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTensors {
    /// Bloch vector of the first factor, `R_i0`.
    pub r: [f64; 3],
    /// Bloch vector of the second factor, `R_0j`.
    pub s: [f64; 3],
    /// `t_nm = Tr(ρ σ_n ⊗ σ_m)`, n, m = 1..3.
    pub correlation: RMat3,
    pub full: RMat4,
}

impl CorrelationTensors {
    pub fn from_pauli(full: RMat4) -> Self {
        Self {
            r: [full[(1, 0)], full[(2, 0)], full[(3, 0)]],
            s: [full[(0, 1)], full[(0, 2)], full[(0, 3)]],
            correlation: full.fixed_view::<3, 3>(1, 1).into_owned(),
            full,
        }
    }

    /// The state these tensors describe.
    pub fn reconstruct(&self) -> CMat4 {
        linalg::from_pauli_coefficients(&self.full)
    }

    /// `U = TᵀT`, whose two largest eigenvalues sum to M.
    pub fn u_matrix(&self) -> RMat3 {
        self.correlation.transpose() * self.correlation
    }

    /// Writes `R` as CSV: header `i,R_i0,R_i1,R_i2,R_i3`, one row per `i`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "R_i0", "R_i1", "R_i2", "R_i3"])?;
        for i in 0..4 {
            let mut rec = vec![i.to_string()];
            rec.extend((0..4).map(|j| format!("{:.17e}", self.full[(i, j)])));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sum of the two largest eigenvalues of `TᵀT`.
pub fn horodecki_m(rho: &TwoQubitState) -> f64 {
    m_of_correlation(&rho.correlation_tensors().correlation)
}

pub fn m_of_correlation(t: &RMat3) -> f64 {
    let ev = linalg::eig_symmetric3(&(t.transpose() * t));
    ev[0] + ev[1]
}

/// Best CHSH value `2√M` attainable without filtering.
pub fn optimal_chsh(rho: &TwoQubitState) -> f64 {
    2.0 * horodecki_m(rho).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CSpectrum {
    /// Descending eigenvalues of `C_ρ`.
    pub values: [f64; 4],
    /// `(λ₁ + λ₂) / λ₀`, or 0 when `λ₀` vanishes.
    pub ratio: f64,
}

impl CSpectrum {
    pub fn is_degenerate(&self) -> bool {
        self.values[0] < DEGENERATE_LAMBDA0
    }
}

pub fn c_matrix(r: &RMat4) -> RMat4 {
    // Strongly filtered states have badly conditioned R and the signed sums
    // cancel; plain f64 products then cost ~1e-8 in the spectrum ratios.
    const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];
    let rows: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|k| r[(i, k)]));
    RMat4::from_fn(|i, j| {
        let signed: [f64; 4] = std::array::from_fn(|k| METRIC[k] * rows[j][k]);
        METRIC[i] * linalg::compensated_dot(&rows[i], &signed)
    })
}

/// C-spectrum of a (possibly unnormalized) Pauli coefficient matrix.
///
/// The spectrum is computed for the unit-trace state and scaled back by
/// `R₀₀²`, so the reality and degeneracy tolerances mean the same thing
/// whatever the normalization.
pub fn c_spectrum_of_pauli(r: &RMat4) -> Result<CSpectrum> {
    let trace = r[(0, 0)];
    if !(trace > DEGENERATE_LAMBDA0) {
        return Err(Error::VanishingNormalization(trace));
    }
    let mut spec = normalized_c_spectrum(&r.unscale(trace))?;
    for v in &mut spec.values {
        *v *= trace * trace;
    }
    Ok(spec)
}

fn normalized_c_spectrum(r: &RMat4) -> Result<CSpectrum> {
    let ev = eig_general_real(&c_matrix(r))?;
    let mut values = [0.0; 4];
    for (v, z) in values.iter_mut().zip(ev) {
        if z.im.abs() > IMAG_TOL {
            return Err(Error::NonRealSpectrum { re: z.re, im: z.im });
        }
        *v = if z.re < 0.0 {
            if z.re > -IMAG_TOL {
                0.0
            } else {
                return Err(Error::NegativeSpectrum(z.re));
            }
        } else {
            z.re
        };
    }
    let ratio = if values[0] < DEGENERATE_LAMBDA0 { 0.0 } else { (values[1] + values[2]) / values[0] };
    Ok(CSpectrum { values, ratio })
}

pub fn c_spectrum(rho: &TwoQubitState) -> Result<CSpectrum> {
    c_spectrum_of_pauli(&linalg::pauli_coefficients(rho.rho()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HiddenNonlocality {
    pub violates: bool,
    /// CHSH value of the optimally filtered state, `2√ratio`.
    pub optimal_violation: f64,
    pub ratio: f64,
}

/// CHSH violation after the best local filtering: `λ₁ + λ₂ > λ₀`.
pub fn hidden_nonlocality(rho: &TwoQubitState) -> Result<HiddenNonlocality> {
    Ok(hidden_from_spectrum(&c_spectrum(rho)?))
}

pub fn hidden_from_spectrum(spec: &CSpectrum) -> HiddenNonlocality {
    if spec.is_degenerate() {
        // Only product-form normal forms have a vanishing λ₀; they come from
        // separable states.
        return HiddenNonlocality { violates: false, optimal_violation: 0.0, ratio: 0.0 };
    }
    let [l0, l1, l2, _] = spec.values;
    HiddenNonlocality {
        violates: l1 + l2 > l0 * (1.0 + HIDDEN_REL_TOL),
        optimal_violation: 2.0 * spec.ratio.sqrt(),
        ratio: spec.ratio,
    }
}
