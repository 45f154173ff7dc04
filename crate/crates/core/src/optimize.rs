//! Derivative-free local maximization.

/// Nelder–Mead maximization of `f` starting from `x0` with initial simplex
/// edge `step`. Stops when the simplex value spread falls below `ftol` or
/// after `max_iter` iterations. Returns the best point and its value.
pub(crate) fn nelder_mead_max<const N: usize>(
    f: impl Fn(&[f64; N]) -> f64,
    x0: [f64; N],
    step: f64,
    ftol: f64,
    max_iter: usize,
) -> ([f64; N], f64) {
    // minimize g = -f
    let g = |x: &[f64; N]| -f(x);
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((x0, g(&x0)));
    for i in 0..N {
        let mut x = x0;
        x[i] += step;
        simplex.push((x, g(&x)));
    }

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[N].1 - simplex[0].1 <= ftol {
            break;
        }
        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += x[k] / N as f64;
            }
        }
        let worst = simplex[N].0;
        let along = |t: f64| -> [f64; N] { std::array::from_fn(|k| centroid[k] + t * (worst[k] - centroid[k])) };

        let xr = along(-1.0);
        let fr = g(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = g(&xe);
            simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[N].1 {
                let x = along(-0.5);
                (x, g(&x))
            } else {
                let x = along(0.5);
                (x, g(&x))
            };
            if fc < simplex[N].1.min(fr) {
                simplex[N] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for (x, v) in simplex.iter_mut().skip(1) {
                    *x = std::array::from_fn(|k| best[k] + 0.5 * (x[k] - best[k]));
                    *v = g(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, -simplex[0].1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_peak() {
        let f = |x: &[f64; 3]| -(x[0] - 1.0).powi(2) - 2.0 * (x[1] + 0.5).powi(2) - (x[2] - x[0]).powi(2);
        let (x, v) = nelder_mead_max(f, [0.0; 3], 0.3, 1e-16, 5000);
        assert!(v > -1e-10);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 0.5).abs() < 1e-4 && (x[2] - 1.0).abs() < 1e-4);
    }
}
