//! Extremal qubit channels: which ones break CHSH for the maximally
//! entangled input, and how much the filtered Choi state violates.
//!
//! cargo run --release --example extremal_channels -- [v]

use std::f64::consts::PI;

use nlbreak::nlbreak::{breaks_mes_nonlocality, extremal_channel};
use nlbreak::state::{hidden_nonlocality, horodecki_m};

/// Smaller of cos²u, cos²v over the larger, plus one.
fn expected_ratio(u: f64, v: f64) -> f64 {
    let (a, b) = (u.cos().powi(2), v.cos().powi(2));
    1.0 + a.min(b) / a.max(b)
}

fn main() -> nlbreak::Result<()> {
    let v: f64 = std::env::args().nth(1).map_or(1.0, |s| s.parse().expect("v"));
    println!("v = {v}");
    println!("{:>6} {:>10} {:>6} {:>10} {:>12}", "u", "Choi M", "NLB", "ratio", "expected");
    for k in 0..16 {
        let u = k as f64 * PI / 16.0;
        let ch = extremal_channel(u, v)?;
        let h = hidden_nonlocality(&ch.choi_state()?)?;
        println!(
            "{u:>6.3} {:>10.6} {:>6} {:>10.6} {:>12.6}",
            horodecki_m(&ch.choi_state()?),
            breaks_mes_nonlocality(&ch)?,
            h.ratio,
            expected_ratio(u, v)
        );
    }
    Ok(())
}
