//! Random channels, states and filters for property checks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{QubitChannel, CP_TOL};
use crate::linalg::{c, rotation_of_unitary, CMat2, CMat4, RMat3, C64};
use crate::state::{Filter, TwoQubitState};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(normal(rng), normal(rng))
}

/// Haar-random element of SU(2).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R) -> CMat2 {
    let mut q = [0.0; 4];
    for x in &mut q {
        *x = normal(rng);
    }
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    CMat2::new(c(w, -z), c(-y, -x), c(y, -x), c(w, z))
}

/// Uniformly random proper rotation.
pub fn rotation<R: Rng + ?Sized>(rng: &mut R) -> RMat3 {
    rotation_of_unitary(&unitary(rng))
}

/// Canonical CP channel, uniform over the CP part of the parameter cube.
pub fn canonical_cp_channel<R: Rng + ?Sized>(rng: &mut R) -> QubitChannel {
    loop {
        let mut draw = || rng.random_range(-1.0..=1.0);
        let ch = QubitChannel::canonical([draw(), draw(), draw()], [draw(), draw(), draw()]);
        if ch.is_completely_positive(CP_TOL) {
            return ch;
        }
    }
}

/// Unital CP channel, uniform over the CP part of the λ cube.
pub fn unital_cp_channel<R: Rng + ?Sized>(rng: &mut R) -> QubitChannel {
    loop {
        let mut draw = || rng.random_range(-1.0..=1.0);
        let ch = QubitChannel::canonical([0.0; 3], [draw(), draw(), draw()]);
        if ch.is_completely_positive(CP_TOL) {
            return ch;
        }
    }
}

/// CP channel with random pre and post unitaries.
pub fn cp_channel<R: Rng + ?Sized>(rng: &mut R) -> QubitChannel {
    let ch = canonical_cp_channel(rng);
    let (pre, post) = (unitary(rng), unitary(rng));
    ch.with_pre_unitary(pre).with_post_unitary(post)
}

/// Mixed state `G G† / Tr(G G†)` from a complex Gaussian 4×4 `G`.
pub fn state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let g = CMat4::from_fn(|_, _| complex_normal(rng));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    TwoQubitState::new(m.unscale(tr)).expect("Gaussian Wishart state is valid")
}

/// Pure state with Gaussian amplitudes.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    TwoQubitState::pure(std::array::from_fn(|_| complex_normal(rng)))
}

/// A state from either ensemble, to cover rank-1 and full-rank inputs.
pub fn any_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    if rng.random_bool(0.5) {
        state(rng)
    } else {
        pure_state(rng)
    }
}

/// Complex Gaussian 2×2 matrix with `|det| ≥ 0.05`.
pub fn full_rank_matrix<R: Rng + ?Sized>(rng: &mut R) -> CMat2 {
    loop {
        let m = CMat2::from_fn(|_, _| complex_normal(rng));
        if m.determinant().norm() >= 0.05 {
            return m;
        }
    }
}

pub fn full_rank_filter<R: Rng + ?Sized>(rng: &mut R) -> Filter {
    Filter::new(full_rank_matrix(rng), full_rank_matrix(rng))
}

/// Symmetric positive definite pair `(A, B)` with `λ₁(A) + λ₂(A) ≤ 1` and
/// every eigenvalue of `B` in `(0, 1]`.
pub fn constrained_pd_pair<R: Rng + ?Sized>(rng: &mut R) -> (RMat3, RMat3) {
    let total: f64 = rng.random_range(0.01..=1.0);
    let split: f64 = rng.random_range(0.0..=1.0);
    let a1 = total * split.max(1.0 - split);
    let a2 = total - a1;
    let a3 = a2 * rng.random_range(0.01..=1.0);
    let a2 = a2.max(1e-6);
    let b: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.01..=1.0));
    let (oa, ob) = (rotation(rng), rotation(rng));
    let da = RMat3::from_diagonal(&nalgebra::Vector3::new(a1, a2, a3.max(1e-7)));
    let db = RMat3::from_diagonal(&nalgebra::Vector3::from(b));
    let sym = |m: RMat3| (m + m.transpose()).scale(0.5);
    (sym(oa * da * oa.transpose()), sym(ob * db * ob.transpose()))
}
