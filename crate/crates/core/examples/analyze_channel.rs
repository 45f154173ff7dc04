//! Classify a qubit channel read from a JSON file.
//!
//! cargo run --release --example analyze_channel -- examples/channels/saturating.json

use nlbreak::nlbreak::{breaks_mes_nonlocality, is_strongly_nlb};
use nlbreak::state::{c_spectrum, hidden_from_spectrum, horodecki_m};
use nlbreak::QubitChannel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/channels/saturating.json").into());
    let ch: QubitChannel = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
    ch.ensure_completely_positive()?;

    let choi = ch.choi_state()?;
    let spec = c_spectrum(&choi)?;
    let hidden = hidden_from_spectrum(&spec);

    println!("channel             {path}");
    println!("t                   {:?}", ch.t);
    println!("lambda              {:?}", ch.lambda);
    println!("unital              {}", ch.is_unital(1e-12));
    println!("entanglement-break  {}", ch.is_entanglement_breaking(1e-12)?);
    println!("Choi M              {:.12}", horodecki_m(&choi));
    println!("breaks MES CHSH     {}", breaks_mes_nonlocality(&ch)?);
    println!("strongly NLB        {}", is_strongly_nlb(&ch)?);
    println!("C-spectrum          {:.10?}", spec.values);
    println!("filtered CHSH       {:.10} (ratio {:.10})", hidden.optimal_violation, hidden.ratio);
    Ok(())
}
