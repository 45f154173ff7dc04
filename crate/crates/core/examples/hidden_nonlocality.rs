//! Hidden nonlocality of Choi states: the best CHSH value reachable after
//! local filtering, read off the C-spectrum.

use nlbreak::nlbreak::{amplitude_damping, extremal_channel, genuine_hidden_family, nonunital_strong_breaker};
use nlbreak::state::{c_spectrum, hidden_from_spectrum, optimal_chsh};
use nlbreak::QubitChannel;

fn row(name: String, ch: QubitChannel) -> nlbreak::Result<()> {
    let choi = ch.choi_state()?;
    let spec = c_spectrum(&choi)?;
    let h = hidden_from_spectrum(&spec);
    println!(
        "{name:<24} {:>8.5} {:>10.5}  {:<5} {:.6?}",
        optimal_chsh(&choi),
        h.optimal_violation,
        h.violates,
        spec.values
    );
    Ok(())
}

fn main() -> nlbreak::Result<()> {
    println!("{:<24} {:>8} {:>10}  {:<5} C-spectrum", "Choi state of", "CHSH", "filtered", "hidden");
    for p in [0.2, 0.5, 0.8] {
        row(format!("amplitude damping {p}"), amplitude_damping(p)?)?;
    }
    for q in [0.3, 0.6236] {
        row(format!("q-family {q}"), genuine_hidden_family(q)?)?;
    }
    row("extremal (0.4, 1.0)".into(), extremal_channel(0.4, 1.0)?)?;
    row("non-unital breaker".into(), nonunital_strong_breaker())
}
