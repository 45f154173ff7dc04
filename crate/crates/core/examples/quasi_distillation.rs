//! Local filtering drives the amplitude-damping Choi state towards a
//! maximally entangled one as the filter strength n grows.

use nlbreak::linalg::{c, CMat2};
use nlbreak::nlbreak::amplitude_damping;
use nlbreak::state::{apply_filter, horodecki_m, Filter};

fn diag(a: f64, b: f64) -> CMat2 {
    CMat2::new(c(a, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(b, 0.0))
}

fn main() -> nlbreak::Result<()> {
    for p in [0.2, 0.5, 0.9] {
        let rho = amplitude_damping(p)?.choi_state()?;
        println!("p = {p}: unfiltered M = {:.6}", horodecki_m(&rho));
        for n in [1e1, 1e2, 1e3, 1e4] {
            let f = Filter::new(diag((1.0 - p).sqrt(), 1.0 / n), diag(1.0 / n, 1.0));
            let m = horodecki_m(&apply_filter(&rho, &f)?);
            println!("  n = {n:>7.0e}  M = {m:.9}  CHSH = {:.9}", 2.0 * m.sqrt());
        }
    }
    Ok(())
}
