//! Two channels that leave a maximally entangled input CHSH-local but still
//! let some partially entangled input violate the inequality.

use nlbreak::nlbreak::{
    breaks_mes_nonlocality, output_state, output_t_matrix, saturating_counterexample, schmidt_counterexample,
    PureInputSpec,
};
use nlbreak::state::{chsh_bruteforce, horodecki_m, m_of_correlation, AngleGrid};
use nlbreak::QubitChannel;

fn show(name: &str, ch: &QubitChannel, spec: PureInputSpec) -> nlbreak::Result<()> {
    let m = m_of_correlation(&output_t_matrix(ch, &spec)?);
    // independent check by brute-force measurement search on the output state
    let brute = chsh_bruteforce(&output_state(ch, &spec)?, &AngleGrid::default())?;
    println!("{name}");
    println!(
        "  Choi M = {:.12}, breaks MES nonlocality: {}",
        horodecki_m(&ch.choi_state()?),
        breaks_mes_nonlocality(ch)?
    );
    println!("  input λ = {}, Euler {:?}", spec.schmidt_lambda, spec.euler);
    println!("  output M = {m:.8}, CHSH = {:.8} (brute force {brute:.8})\n", 2.0 * m.sqrt());
    Ok(())
}

fn main() -> nlbreak::Result<()> {
    show("saturating channel", &saturating_counterexample(), PureInputSpec::new(0.4, [1.2, 1.4, 3.5])?)?;
    show("Schmidt-input channel", &schmidt_counterexample(), PureInputSpec::new(0.45, [0.0; 3])?)
}
