//! Minimal tour: run replicates at one freezing scale and read the numbers.
//!
//!     cargo run --release -p frozen-perc --example simulate

use frozen_perc::clocks::assign_times;
use frozen_perc::engine::{run_frozen, NParam};
use frozen_perc::lattice::Window;
use frozen_perc::montecarlo::{run_replicates, sweep_csv, Plan};

fn main() -> frozen_perc::Result<()> {
    // One replicate, by hand: assign clocks, run the dynamics, inspect the
    // origin's final cluster.
    let n = 32;
    let window = Window::new(8 * n)?;
    let times = assign_times(window.grid(), 42, 0);
    let state = run_frozen(window, &times, NParam::Finite(n))?;
    let origin = state.origin_stats()?;
    println!(
        "single replicate at N={n}: origin cluster size {}, diameter {}, frozen: {}",
        origin.size, origin.diameter, origin.frozen
    );
    println!(
        "window holds {} clusters, {} open edges\n",
        state.clusters.len(),
        state.open_count()
    );

    // The same thing 500 times, aggregated: how often does the origin's
    // final diameter land strictly inside (N/4, 3N/4)?
    let plan = Plan::single(NParam::Finite(n), 500, 42);
    let row = run_replicates(&plan)?;
    println!("{}", sweep_csv(std::slice::from_ref(&row)));
    println!(
        "interval estimate {:.3}, 95% Wilson [{:.3}, {:.3}]",
        row.p_interval, row.p_interval_lo, row.p_interval_hi
    );
    Ok(())
}
