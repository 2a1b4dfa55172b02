//! Crossing probabilities at the critical threshold 1/2.
//!
//! An L x (L+1) rectangle — L+1 vertex columns by L vertex rows, one more
//! column than rows — is self-dual and crosses horizontally with
//! probability exactly 1/2 at t = 1/2, for every L. Fixed-aspect rectangles
//! stay inside a band bounded away from 0 and 1 at all scales. Both effects
//! are visible at desk scale.
//!
//!     cargo run --release -p frozen-perc --example crossing_probability

use frozen_perc::lattice::Rect;
use frozen_perc::lemma::{estimate_crossing_probability, exact_crossing_probability};

fn main() -> frozen_perc::Result<()> {
    // Exact enumeration where feasible: the 2x1-face rectangle has 7 edges.
    let tiny = Rect::new(0, 2, 0, 1);
    for t in [0.3, 0.5, 0.7] {
        let p = exact_crossing_probability(tiny, t)?;
        println!("exact P(t-open crossing of 2x1 faces) at t={t}: {p:.6}");
    }
    println!();

    // Self-dual shape: width L+1 vertices, height L vertices.
    println!("self-dual L x (L+1) rectangles at t = 1/2 (expect 0.5):");
    for l in [8i64, 16, 32] {
        let rect = Rect::new(0, l, 0, l - 1);
        let (p, se) = estimate_crossing_probability(rect, 0.5, 3000, 99)?;
        println!("  L={l:>2}: {p:.4} +- {se:.4}");
    }
    println!();

    // 2:1 aspect at several scales: in the critical band, never degenerate.
    println!("2:1 rectangles at t = 1/2 (bounded away from 0 and 1):");
    for l in [8i64, 16, 32] {
        let rect = Rect::new(0, 2 * l, 0, l);
        let (p, se) = estimate_crossing_probability(rect, 0.5, 3000, 100)?;
        println!("  {}x{}: {p:.4} +- {se:.4}", 2 * l, l);
    }
    Ok(())
}
