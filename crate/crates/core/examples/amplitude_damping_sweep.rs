//! Best CHSH value over pure inputs sent through amplitude damping.
//!
//! The grid sweep covers 64³ rotations × 21 Schmidt coefficients per point,
//! so expect a second or so per row in release mode.
//!
//! cargo run --release --example amplitude_damping_sweep -- [step]

use nlbreak::nlbreak::{family_sweep, linspace, Family, SweepGrid};

fn main() -> nlbreak::Result<()> {
    let step: f64 = std::env::args().nth(1).map_or(0.1, |s| s.parse().expect("step"));
    let sweep = SweepGrid::default().prepare()?;
    let ps = linspace(0.0, 1.0, step);
    println!("{:>5} {:>10} {:>10} {:>7}  euler", "p", "best M", "2(1-p)", "λ");
    for row in family_sweep(&sweep, Family::AmpDamp, &ps, 0.0)? {
        let e = row.best_spec.euler;
        println!(
            "{:>5.2} {:>10.6} {:>10.6} {:>7.2}  ({:.1}, {:.1}, {:.1})",
            row.param,
            row.best_m,
            (2.0 * (1.0 - row.param)).max(1.0),
            row.best_spec.schmidt_lambda,
            e[0],
            e[1],
            e[2]
        );
    }
    Ok(())
}
