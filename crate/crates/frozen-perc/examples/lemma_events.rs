//! The six confinement events, end to end: evaluate them on a deterministic
//! witness configuration and on a batch of planted samples, then replay the
//! engine on every all-events hit and confirm the implied diameter band.
//!
//! The events, at thresholds (tau, 1/2):
//!   i   an early-open circuit between the c- and b-boxes (gamma: innermost)
//!   ii  a warm-closed dual circuit between the a- and c-boxes
//!   iii a warm-closed dual circuit between the hull and its enlargement
//!       (pi: outermost)
//!   iv  closed dual corridors connecting gamma to pi, north and south
//!   v   a warm open path from the east side of the feeder R to gamma
//!   vi  no early crossing of the neck R' inside pi
//! Together they force the origin's final cluster diameter into [aN, bN].
//!
//!     cargo run --release -p frozen-perc --example lemma_events

use frozen_perc::lattice::{build_proof_geometry, ProofParams, Window};
use frozen_perc::lemma::{
    check_events, plant_witness, run_search, verify_implication, LemmaParams, SearchStrategy,
};

fn main() -> frozen_perc::Result<()> {
    let proof = ProofParams::new(0.25, 0.5, 0.75, 0.8, 0.05);
    let n = 64;
    let geometry = build_proof_geometry(proof, n, Window::new(4 * n)?)?;
    let params = LemmaParams::new(proof, n, 0.2, 0.0)?;

    // A configuration built to satisfy everything: warm-closed background,
    // one early ring, one warm feeder path.
    let witness = plant_witness(&geometry, params.tau, 99)?;
    let report = check_events(&witness, &params, &geometry)?;
    println!("witness events (i..vi): {:?}", report.events());
    let verdict = verify_implication(&witness, &params, &geometry)?;
    println!(
        "witness implication: diameter {} in [{}, {}] -> {}\n",
        verdict.diameter,
        verdict.band_lo,
        verdict.band_hi,
        if verdict.pass { "pass" } else { "FAIL" }
    );

    // Planted search: uniform clocks with the expensive structure planted,
    // everything else left to chance. Each hit is re-verified by the engine.
    let outcome = run_search(&params, &geometry, SearchStrategy::Planted, 8, 2024)?;
    println!("planted search: {} attempts, {} hits, {} passes", outcome.attempts, outcome.hits, outcome.passes);
    for s in &outcome.samples {
        let marks: String =
            s.report.events().iter().map(|&e| if e { '+' } else { '-' }).collect();
        match s.verdict {
            Some(v) => println!(
                "  replicate {:>2}: {marks}  diameter {:>3} -> {}",
                s.replicate,
                v.diameter,
                if v.pass { "pass" } else { "FAIL" }
            ),
            None => println!("  replicate {:>2}: {marks}", s.replicate),
        }
    }
    println!("\n(+ = event holds; verdicts only exist where all six hold)");
    Ok(())
}
