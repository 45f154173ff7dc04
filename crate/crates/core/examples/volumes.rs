//! Relative volumes of entanglement-breaking, MES-nonlocality-breaking and
//! strongly nonlocality-breaking channels.
//!
//! cargo run --release --example volumes -- [samples] [seed]

use nlbreak::volume::{estimate_volumes, Mode};

fn main() -> nlbreak::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples: u64 = args.next().map_or(1_000_000, |s| s.parse::<f64>().expect("sample count") as u64);
    let seed: u64 = args.next().map_or(42, |s| s.parse().expect("seed"));

    for mode in [Mode::Full, Mode::Unital] {
        let start = std::time::Instant::now();
        let report = estimate_volumes(samples, seed, mode)?;
        print!("{}", report.table());
        println!("elapsed        {:.1} s\n", start.elapsed().as_secs_f64());
    }
    Ok(())
}
