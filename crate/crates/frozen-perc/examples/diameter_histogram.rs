//! The law of diameter/N: all mass lives in [0, 2) because a cluster frozen
//! at diameter >= N can only grow for one more merge, capping it at 2N-1.
//! The histogram shows the two regimes: small clusters near 0, and frozen
//! clusters piling up between 1 and 2.
//!
//!     cargo run --release -p frozen-perc --example diameter_histogram

use frozen_perc::engine::NParam;
use frozen_perc::montecarlo::{diameter_histogram, Plan};

fn main() -> frozen_perc::Result<()> {
    let n = 32;
    let plan = Plan::single(NParam::Finite(n), 800, 2024);
    let hist = diameter_histogram(&plan)?;

    println!("diameter/N over {} replicates at N={n} (bin width 0.05):\n", hist.replicates);
    let mass = hist.mass();
    let peak = mass.iter().cloned().fold(0.0, f64::max);
    for (i, (&count, m)) in hist.counts.iter().zip(&mass).enumerate() {
        if count == 0 {
            continue;
        }
        let bar = "#".repeat((m / peak * 50.0).round() as usize);
        println!("[{:.2}, {:.2})  {:>5}  {bar}", i as f64 / 20.0, (i + 1) as f64 / 20.0, count);
    }
    let total: f64 = mass.iter().sum();
    let giant: f64 = mass[20..].iter().sum();
    println!("\ntotal mass {total:.3}; mass at ratio >= 1 (frozen clusters): {giant:.3}");
    Ok(())
}
