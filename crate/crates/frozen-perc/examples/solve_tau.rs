//! Calibrating the early threshold: find tau < 1/2 such that the neck
//! rectangle R' crosses at tau with probability alpha/2, where alpha is the
//! chance of a warm (1/2-open) crossing of the feeder rectangle R.
//!
//! Common random numbers make the estimated crossing curve exactly monotone
//! in t — every bisection step reclassifies the same per-replicate
//! bottleneck times — so the solver needs one batch of replicates total.
//!
//!     cargo run --release -p frozen-perc --example solve_tau

use frozen_perc::lattice::{build_proof_geometry, ProofParams, Window};
use frozen_perc::lemma::{estimate_alpha, solve_tau};

fn main() -> frozen_perc::Result<()> {
    // Wide-neck parameters: the feeder R keeps a tame aspect ratio, so
    // alpha is large enough to estimate directly.
    let params = ProofParams::new(0.25, 0.6, 0.7, 0.6, 0.14);
    let n = 64;
    let geometry = build_proof_geometry(params, n, Window::new(4 * n)?)?;
    println!(
        "N={n}: feeder R = [{},{}]x[{},{}], neck R' = [{},{}]x[{},{}]",
        geometry.r.x_min, geometry.r.x_max, geometry.r.y_min, geometry.r.y_max,
        geometry.r_prime.x_min, geometry.r_prime.x_max,
        geometry.r_prime.y_min, geometry.r_prime.y_max,
    );

    let replicates = 3000;
    let (alpha, se) = estimate_alpha(&geometry, replicates, 1)?;
    println!("alpha (warm crossing of R) = {alpha:.4} +- {se:.4}");

    let solution = solve_tau(&geometry, alpha / 2.0, replicates, 0.005, 1)?;
    println!(
        "tau = {:.4} after {} bisection steps (target {:.4}, crossing at tau {:.4})",
        solution.tau, solution.steps, solution.target, solution.p_at_tau
    );
    println!(
        "sanity: crossing of R' at 1/2 is {:.4}, comfortably above the target; tau < 1/2: {}",
        solution.p_at_half,
        solution.tau < 0.5
    );
    Ok(())
}
