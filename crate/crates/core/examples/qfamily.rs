//! The q-family: Choi states with genuine hidden nonlocality for every
//! q > 0, yet pure inputs only violate CHSH above q ≈ 0.62.
//!
//! cargo run --release --example qfamily

use std::f64::consts::PI;

use nlbreak::nlbreak::{
    crossing_from_rows, family_sweep, genuine_hidden_family, linspace, output_t_matrix, Family, PureInputSpec,
    SweepGrid,
};
use nlbreak::state::m_of_correlation;

fn main() -> nlbreak::Result<()> {
    let spec = PureInputSpec::new(0.95, [0.0, PI, 0.0])?;
    let m = m_of_correlation(&output_t_matrix(&genuine_hidden_family(0.6236)?, &spec)?);
    println!("q = 0.6236, λ = 0.95, R = R_y(π): M − 1 = {:.4e}", m - 1.0);

    let sweep = SweepGrid::default().prepare()?;
    let rows = family_sweep(&sweep, Family::QFamily, &linspace(0.55, 0.7, 0.01), 0.0)?;
    for r in &rows {
        println!("q = {:.2}  best M = {:.9}", r.param, r.best_m);
    }
    match crossing_from_rows(&sweep, Family::QFamily, 0.0, &rows, 1e-4)? {
        Some(q) => println!("crossing at q ≈ {q:.4}"),
        None => println!("no crossing in range"),
    }
    Ok(())
}
