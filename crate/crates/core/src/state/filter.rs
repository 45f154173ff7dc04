use super::TwoQubitState;
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, CMat2, CMat4, RMat4};

/// Filtered states whose normalization falls below this are rejected.
pub const NORM_FLOOR: f64 = 1e-12;

/// Local filtering operation `ρ ↦ (A ⊗ B) ρ (A ⊗ B)†`, normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Filter {
    pub a: CMat2,
    pub b: CMat2,
}

impl Filter {
    pub fn new(a: CMat2, b: CMat2) -> Self {
        Self { a, b }
    }

    pub fn identity() -> Self {
        Self::new(CMat2::identity(), CMat2::identity())
    }

    /// `(A ⊗ B) ρ (A ⊗ B)†` without normalization.
    pub fn apply_unnormalized(&self, rho: &CMat4) -> CMat4 {
        let k = kron(&self.a, &self.b);
        k * rho * k.adjoint()
    }
}

pub fn apply_filter(rho: &TwoQubitState, f: &Filter) -> Result<TwoQubitState> {
    let out = f.apply_unnormalized(rho.rho());
    let norm = out.trace().re;
    if !(norm > NORM_FLOOR) {
        return Err(Error::VanishingNormalization(norm));
    }
    TwoQubitState::new(out.unscale(norm))
}

/// Proper orthochronous Lorentz matrix `L_ij = ½ Tr(σ_i A σ_j A†) / |det A|`
/// induced on Pauli coefficients by the filter `A`.
pub fn lorentz_of_filter(a: &CMat2) -> Result<RMat4> {
    let det = a.determinant().norm();
    if !(det > NORM_FLOOR) {
        return Err(Error::SingularFilter(det));
    }
    let ad = a.adjoint();
    Ok(RMat4::from_fn(|i, j| 0.5 * (pauli(i) * a * pauli(j) * ad).trace().re / det))
}
