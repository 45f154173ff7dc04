use std::f64::consts::PI;

use nalgebra::Vector3;

use super::TwoQubitState;
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, RMat3};
use crate::optimize::nelder_mead_max;

/// Resolution of the direct CHSH search over the two second-party settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AngleGrid {
    /// Points per spherical angle (polar and azimuthal) per setting.
    pub points: usize,
    /// Local Nelder–Mead polish of the best grid points.
    pub refine: bool,
}

impl Default for AngleGrid {
    fn default() -> Self {
        Self { points: 20, refine: true }
    }
}

fn unit(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// Maximum of `Tr(ρ B_CHSH)` over the four measurement directions.
///
/// The first party's settings enter linearly, so for fixed `b, b'` the
/// optimum over `a, a'` is `|T(b + b')| + |T(b − b')|`; the search runs over
/// the four angles of `b, b'` only.
pub fn chsh_bruteforce(rho: &TwoQubitState, grid: &AngleGrid) -> Result<f64> {
    if grid.points == 0 {
        return Err(Error::EmptyGrid);
    }
    let t = RMat3::from_fn(|i, j| (rho.rho() * kron(&pauli(i + 1), &pauli(j + 1))).trace().re);
    let value = |b1: &Vector3<f64>, b2: &Vector3<f64>| (t * (b1 + b2)).norm() + (t * (b1 - b2)).norm();

    let n = grid.points;
    let thetas: Vec<f64> = if n == 1 { vec![0.0] } else { (0..n).map(|k| PI * k as f64 / (n - 1) as f64).collect() };
    let phis: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let dirs: Vec<([f64; 2], Vector3<f64>)> =
        thetas.iter().flat_map(|&th| phis.iter().map(move |&ph| ([th, ph], unit(th, ph)))).collect();

    const KEEP: usize = 4;
    let mut best: Vec<(f64, [f64; 4])> = Vec::with_capacity(KEEP + 1);
    for (a1, b1) in &dirs {
        for (a2, b2) in &dirs {
            let v = value(b1, b2);
            if best.len() < KEEP || v > best[KEEP - 1].0 {
                best.push((v, [a1[0], a1[1], a2[0], a2[1]]));
                best.sort_by(|x, y| y.0.total_cmp(&x.0));
                best.truncate(KEEP);
            }
        }
    }
    let mut out = best[0].0;
    if grid.refine {
        let f = |x: &[f64; 4]| value(&unit(x[0], x[1]), &unit(x[2], x[3]));
        let step = PI / n as f64;
        for (_, x0) in &best {
            let (_, v) = nelder_mead_max(f, *x0, step, 1e-15, 4000);
            out = out.max(v);
        }
    }
    Ok(out)
}
