//! Small dense linear algebra for qubits and qubit pairs.
//!
//! Everything is fixed-size: 2×2 and 4×4 complex matrices for operators,
//! 3×3 and 4×4 real matrices for Bloch-space objects (correlation matrices,
//! transfer matrices, Lorentz transformations). The heavy lifting is done by
//! `nalgebra`; this module adds the tensor-product plumbing and the ordering
//! and tolerance conventions the rest of the crate relies on.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;
pub type RMat3 = Matrix3<f64>;
pub type RMat4 = Matrix4<f64>;
pub type RVec3 = Vector3<f64>;

/// Max-norm tolerance on `m - m†` accepted by [`eig_hermitian`].
pub const HERM_TOL: f64 = 1e-9;

/// Largest imaginary part tolerated when declaring a C-matrix eigenvalue real.
pub const IMAG_TOL: f64 = 1e-8;

/// Relative distance under which general eigenvalues are treated as one
/// (possibly defective) cluster and replaced by the cluster mean.
pub const CLUSTER_TOL: f64 = 1e-6;

const SCHUR_MAX_ITER: usize = 10_000;

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrices, index 0 being the identity.
pub fn pauli(i: usize) -> CMat2 {
    let (o, z, j) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match i {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -j, j, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("Pauli index {i} out of range"),
    }
}

pub fn paulis() -> [CMat2; 4] {
    [pauli(0), pauli(1), pauli(2), pauli(3)]
}

/// Kronecker product `a ⊗ b`; row of `a` is the outer index.
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    CMat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

pub fn max_abs<const R: usize, const C: usize>(m: &nalgebra::SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_real<const R: usize, const C: usize>(m: &nalgebra::SMatrix<f64, R, C>) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
pub trait HermitianEigen: Sized {
    type Values;
    fn eig_hermitian(&self) -> Result<(Self::Values, Self)>;
}

macro_rules! impl_hermitian_eigen {
    ($mat:ty, $n:expr) => {
        impl HermitianEigen for $mat {
            type Values = [f64; $n];

            fn eig_hermitian(&self) -> Result<([f64; $n], $mat)> {
                let dev = max_abs(&(self - self.adjoint()));
                if !(dev <= HERM_TOL) {
                    return Err(Error::NotHermitian(dev));
                }
                let herm = (self + self.adjoint()).scale(0.5);
                let eig = herm.symmetric_eigen();
                let mut order: [usize; $n] = std::array::from_fn(|i| i);
                order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
                let values = order.map(|i| eig.eigenvalues[i]);
                let vectors = <$mat>::from_fn(|r, k| eig.eigenvectors[(r, order[k])]);
                Ok((values, vectors))
            }
        }
    };
}

impl_hermitian_eigen!(CMat2, 2);
impl_hermitian_eigen!(CMat4, 4);

/// Descending eigenvalues and orthonormal eigenvectors (as columns) of a
/// Hermitian matrix.
pub fn eig_hermitian<M: HermitianEigen>(m: &M) -> Result<(M::Values, M)> {
    m.eig_hermitian()
}

/// Smallest eigenvalue of a Hermitian 4×4 matrix; skips the eigenvector work.
pub fn min_eigenvalue_hermitian(m: &CMat4) -> f64 {
    let herm = (m + m.adjoint()).scale(0.5);
    herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of a general real 4×4 matrix, sorted by descending real part.
///
/// Eigenvalues closer than `CLUSTER_TOL` (relative to the larger of the
/// spectral radius and the Frobenius norm) are averaged. Defective
/// eigenvalues split by O(√ε·‖m‖) under rounding while their mean stays
/// accurate to O(ε); C-matrices of many physical states have exactly such
/// Jordan blocks. The tolerance scales with `m`, so the result does too.
///
/// The scalar part `Tr(m)/4` is removed before the Schur iteration: on a
/// multiple of the identity plus rounding noise (the C-matrix of any pure
/// state) the unshifted QR sweep never deflates.
pub fn eig_general_real(m: &RMat4) -> Result<[C64; 4]> {
    let shift = m.trace() / 4.0;
    let schur = nalgebra::Schur::try_new(m - RMat4::identity() * shift, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::NoConvergence)?;
    let raw = schur.complex_eigenvalues();
    let mut vals: [C64; 4] = std::array::from_fn(|i| raw[i] + shift);
    vals.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

    let scale = vals.iter().map(|z| z.norm()).fold(m.norm(), f64::max);
    let tol = CLUSTER_TOL * scale;
    let mut cluster_of = [0usize; 4];
    let mut clusters = 1;
    for i in 1..4 {
        let joined = (0..i).find(|&j| (vals[i] - vals[j]).norm() <= tol);
        cluster_of[i] = match joined {
            Some(j) => cluster_of[j],
            None => {
                clusters += 1;
                clusters - 1
            }
        };
    }
    let mut out = vals;
    for k in 0..clusters {
        let members: Vec<usize> = (0..4).filter(|&i| cluster_of[i] == k).collect();
        let mean = members.iter().map(|&i| vals[i]).sum::<C64>() / members.len() as f64;
        for &i in &members {
            out[i] = mean;
        }
    }
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(out)
}

/// Dot product evaluated in twice the working precision and rounded once.
///
/// Uses error-free transformations (FMA for products, TwoSum for the
/// running total), so heavy cancellation costs nothing.
pub fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    let (mut sum, mut err) = (0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let p_err = x.mul_add(y, -p);
        let t = sum + p;
        let z = t - sum;
        err += (sum - (t - z)) + (p - z) + p_err;
        sum = t;
    }
    sum + err
}

/// Transpose on the second tensor factor of a 2⊗2 operator.
pub fn partial_transpose_b(m: &CMat4) -> CMat4 {
    CMat4::from_fn(|r, col| {
        let (a, b) = (r / 2, r % 2);
        let (a2, b2) = (col / 2, col % 2);
        m[(2 * a + b2, 2 * a2 + b)]
    })
}

/// Partial trace over the second factor, leaving the first.
pub fn partial_trace_b(m: &CMat4) -> CMat2 {
    CMat2::from_fn(|a, a2| m[(2 * a, 2 * a2)] + m[(2 * a + 1, 2 * a2 + 1)])
}

/// Partial trace over the first factor, leaving the second.
pub fn partial_trace_a(m: &CMat4) -> CMat2 {
    CMat2::from_fn(|b, b2| m[(b, b2)] + m[(2 + b, 2 + b2)])
}

/// Singular values of a real 3×3 matrix, descending.
pub fn singular_values(m: &RMat3) -> [f64; 3] {
    let sv = m.singular_values();
    let mut out = [sv[0], sv[1], sv[2]];
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Eigenvalues of a real symmetric 3×3 matrix, descending (nalgebra route).
pub fn eig_symmetric3(m: &RMat3) -> [f64; 3] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2]];
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Closed-form eigenvalues of a real symmetric 3×3 matrix, descending.
///
/// Trigonometric solution of the characteristic cubic, several times
/// faster than the iterative solver. The trigonometric formula loses
/// accuracy on a nearly degenerate lower pair (error ~ √ε), so in that case
/// the well-separated top eigenvalue is deflated and the remaining 2×2 block
/// is solved directly. Either way the error stays at a few ulps of the norm.
pub fn eig_symmetric3_closed(m: &RMat3) -> [f64; 3] {
    let p1 = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
    if p1 == 0.0 {
        let mut d = [m[(0, 0)], m[(1, 1)], m[(2, 2)]];
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    let q = m.trace() / 3.0;
    let p2 = (m[(0, 0)] - q).powi(2) + (m[(1, 1)] - q).powi(2) + (m[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = (m - RMat3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    if r > 0.9 {
        return deflate_top(m, e1);
    }
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let e2 = 3.0 * q - e1 - e3;
    [e1, e2, e3]
}

/// Eigenvalues of symmetric `m` given its isolated top eigenvalue `e1`.
fn deflate_top(m: &RMat3, e1: f64) -> [f64; 3] {
    let a = m - RMat3::identity() * e1;
    let (r0, r1, r2) = (a.row(0).transpose(), a.row(1).transpose(), a.row(2).transpose());
    let v = [r0.cross(&r1), r0.cross(&r2), r1.cross(&r2)]
        .into_iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .expect("three candidates");
    let v = v.normalize();
    let axis = (0..3).min_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())).expect("three axes");
    let u = v.cross(&RVec3::ith(axis, 1.0)).normalize();
    let w = v.cross(&u);
    let (aa, bb, dd) = ((m * u).dot(&u), (m * w).dot(&u), (m * w).dot(&w));
    let mid = 0.5 * (aa + dd);
    let half = (0.5 * (aa - dd)).hypot(bb);
    let mut out = [e1, mid + half, mid - half];
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

/// Pauli coefficients `R_ij = Tr(m σ_i ⊗ σ_j)` of a 2⊗2 operator (real part).
pub fn pauli_coefficients(m: &CMat4) -> RMat4 {
    let p = paulis();
    RMat4::from_fn(|i, j| (m * kron(&p[i], &p[j])).trace().re)
}

/// Inverse of [`pauli_coefficients`]: `¼ Σ R_ij σ_i ⊗ σ_j`.
pub fn from_pauli_coefficients(r: &RMat4) -> CMat4 {
    let p = paulis();
    let mut out = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            if r[(i, j)] != 0.0 {
                out += kron(&p[i], &p[j]).scale(r[(i, j)]);
            }
        }
    }
    out.scale(0.25)
}

/// Rotation `O_ij = ½ Tr(σ_i U σ_j U†)` induced by a 2×2 unitary on the
/// Bloch sphere.
pub fn rotation_of_unitary(u: &CMat2) -> RMat3 {
    let p = paulis();
    let ud = u.adjoint();
    RMat3::from_fn(|i, j| 0.5 * (p[i + 1] * u * p[j + 1] * ud).trace().re)
}

/// Special-unitary lift of a proper rotation: the `U ∈ SU(2)` with
/// `rotation_of_unitary(U) == o` (one of the two signs).
pub fn unitary_of_rotation(o: &RMat3) -> CMat2 {
    // Shepperd's quaternion extraction.
    let tr = o.trace();
    let (w, x, y, z);
    if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (o[(2, 1)] - o[(1, 2)]) / s;
        y = (o[(0, 2)] - o[(2, 0)]) / s;
        z = (o[(1, 0)] - o[(0, 1)]) / s;
    } else if o[(0, 0)] > o[(1, 1)] && o[(0, 0)] > o[(2, 2)] {
        let s = (1.0 + o[(0, 0)] - o[(1, 1)] - o[(2, 2)]).sqrt() * 2.0;
        w = (o[(2, 1)] - o[(1, 2)]) / s;
        x = 0.25 * s;
        y = (o[(0, 1)] + o[(1, 0)]) / s;
        z = (o[(0, 2)] + o[(2, 0)]) / s;
    } else if o[(1, 1)] > o[(2, 2)] {
        let s = (1.0 + o[(1, 1)] - o[(0, 0)] - o[(2, 2)]).sqrt() * 2.0;
        w = (o[(0, 2)] - o[(2, 0)]) / s;
        x = (o[(0, 1)] + o[(1, 0)]) / s;
        y = 0.25 * s;
        z = (o[(1, 2)] + o[(2, 1)]) / s;
    } else {
        let s = (1.0 + o[(2, 2)] - o[(0, 0)] - o[(1, 1)]).sqrt() * 2.0;
        w = (o[(1, 0)] - o[(0, 1)]) / s;
        x = (o[(0, 2)] + o[(2, 0)]) / s;
        y = (o[(1, 2)] + o[(2, 1)]) / s;
        z = 0.25 * s;
    }
    let n = (w * w + x * x + y * y + z * z).sqrt();
    let (w, x, y, z) = (w / n, x / n, y / n, z / n);
    // U = w I - i (x σ1 + y σ2 + z σ3)
    CMat2::new(c(w, -z), c(-y, -x), c(y, -x), c(w, z))
}

/// Embed a 3×3 block as the lower-right corner of a 4×4 matrix with a
/// leading 1.
pub fn affine_block(o: &RMat3) -> RMat4 {
    let mut m = RMat4::identity();
    m.fixed_view_mut::<3, 3>(1, 1).copy_from(o);
    m
}
