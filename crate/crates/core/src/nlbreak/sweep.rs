//! Grid maximization of the CHSH value over pure two-qubit inputs.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::{euler_rotation, PureInputSpec};
use crate::channel::QubitChannel;
use crate::error::{Error, Result};
use crate::linalg::{eig_symmetric3_closed, RMat3};

/// Step sizes of the Euler-angle and Schmidt-coefficient grids.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepGrid {
    pub angle_step: f64,
    pub lambda_step: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self { angle_step: 0.1, lambda_step: 0.05 }
    }
}

/// `0, h, 2h, …` below `end`, then `end` itself.
fn inclusive_points(step: f64, end: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..).map(|k| k as f64 * step).take_while(|x| *x < end - 1e-12).collect();
    v.push(end);
    v
}

impl SweepGrid {
    pub fn angles(&self) -> Vec<f64> {
        inclusive_points(self.angle_step, TAU)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        inclusive_points(self.lambda_step, 1.0)
    }

    /// Validates the steps and tabulates every Euler rotation once.
    pub fn prepare(&self) -> Result<PreparedSweep> {
        for (name, step) in [("angle_step", self.angle_step), ("lambda_step", self.lambda_step)] {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::OutOfRange { name, value: step, range: "(0, ∞)" });
            }
        }
        let angles = self.angles();
        let lambdas = self.lambdas();
        let n = angles.len();
        let rotations =
            (0..n * n * n).map(|k| euler_rotation([angles[k / (n * n)], angles[(k / n) % n], angles[k % n]])).collect();
        Ok(PreparedSweep { grid: *self, angles, lambdas, rotations })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridMeta {
    pub angle_step: f64,
    pub lambda_step: f64,
    pub angle_points: usize,
    pub lambda_points: usize,
    pub evaluated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub best_m: f64,
    pub best_spec: PureInputSpec,
    pub grid_meta: GridMeta,
}

/// A sweep grid with its rotation table, reusable across channels.
pub struct PreparedSweep {
    grid: SweepGrid,
    angles: Vec<f64>,
    lambdas: Vec<f64>,
    rotations: Vec<RMat3>,
}

impl PreparedSweep {
    pub fn grid(&self) -> SweepGrid {
        self.grid
    }

    /// Maximum of `M` over the grid. Ties resolve to the first grid point
    /// in (α, β, γ, λ) lexicographic order.
    pub fn max_m(&self, ch: &QubitChannel) -> Result<SweepResult> {
        ch.ensure_completely_positive()?;
        // Pre/post unitaries are absorbed by the rotation and by a local
        // unitary on the output.
        let canon = if ch.is_canonical() {
            ch.clone()
        } else {
            let c = QubitChannel::from_transfer_matrix(&ch.transfer_matrix());
            QubitChannel::canonical(c.t, c.lambda)
        };
        let signs = [canon.lambda[0], -canon.lambda[1], canon.lambda[2]];
        let t = canon.t;
        let lambdas = &self.lambdas;
        let nl = lambdas.len();

        let (best_m, best_idx) = self
            .rotations
            .par_iter()
            .enumerate()
            .map(|(k, r)| {
                // g = R · diag(λ₁, −λ₂, λ₃), row by row
                let g = RMat3::from_fn(|i, j| r[(i, j)] * signs[j]);
                let mut best = (f64::NEG_INFINITY, 0usize);
                for (l, &lam) in lambdas.iter().enumerate() {
                    let a = 2.0 * (lam * (1.0 - lam)).sqrt();
                    let shift = 2.0 * lam - 1.0;
                    let mut tm = g;
                    for j in 0..3 {
                        tm[(0, j)] *= a;
                        tm[(1, j)] *= a;
                        tm[(2, j)] += shift * t[j];
                    }
                    let e = eig_symmetric3_closed(&(tm.transpose() * tm));
                    let m = e[0] + e[1];
                    if m > best.0 {
                        best = (m, k * nl + l);
                    }
                }
                best
            })
            .reduce(
                || (f64::NEG_INFINITY, usize::MAX),
                |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x },
            );

        let n = self.angles.len();
        let (k, l) = (best_idx / nl, best_idx % nl);
        let best_spec =
            PureInputSpec::new(lambdas[l], [self.angles[k / (n * n)], self.angles[(k / n) % n], self.angles[k % n]])?;
        Ok(SweepResult {
            best_m,
            best_spec,
            grid_meta: GridMeta {
                angle_step: self.grid.angle_step,
                lambda_step: self.grid.lambda_step,
                angle_points: n,
                lambda_points: nl,
                evaluated: self.rotations.len() * nl,
            },
        })
    }
}

/// `max_{λ, R} M` of the channel output over the grid.
pub fn max_m_over_pure_inputs(ch: &QubitChannel, grid: &SweepGrid) -> Result<SweepResult> {
    grid.prepare()?.max_m(ch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlbreak::{amplitude_damping, output_t_matrix};
    use crate::state::m_of_correlation;

    #[test]
    fn grid_sizes() {
        let g = SweepGrid::default();
        let a = g.angles();
        assert_eq!(a.len(), 64);
        assert!((a[62] - 6.2).abs() < 1e-12);
        assert_eq!(a[63], TAU);
        let l = g.lambdas();
        assert_eq!(l.len(), 21);
        assert_eq!(l[20], 1.0);
        assert!(SweepGrid { angle_step: 0.0, lambda_step: 0.1 }.prepare().is_err());
        assert!(SweepGrid { angle_step: 0.1, lambda_step: f64::NAN }.prepare().is_err());
    }

    #[test]
    fn identity_reaches_two() {
        let g = SweepGrid { angle_step: 0.5, lambda_step: 0.05 };
        let r = max_m_over_pure_inputs(&QubitChannel::identity(), &g).unwrap();
        assert!((r.best_m - 2.0).abs() < 1e-9);
        assert!((r.best_spec.schmidt_lambda - 0.5).abs() < 1e-12);
    }

    #[test]
    fn best_matches_closed_form_at_argmax() {
        let ch = amplitude_damping(0.35).unwrap();
        let g = SweepGrid { angle_step: 0.4, lambda_step: 0.1 };
        let r = max_m_over_pure_inputs(&ch, &g).unwrap();
        let m = m_of_correlation(&output_t_matrix(&ch, &r.best_spec).unwrap());
        assert!((m - r.best_m).abs() < 1e-12);
        assert_eq!(r.grid_meta.evaluated, r.grid_meta.angle_points.pow(3) * 11);
    }

    #[test]
    fn non_cp_rejected() {
        let bad = QubitChannel::canonical([0.0; 3], [1.0, 1.0, -1.0]);
        assert!(max_m_over_pure_inputs(&bad, &SweepGrid { angle_step: 1.0, lambda_step: 0.5 }).is_err());
    }
}
