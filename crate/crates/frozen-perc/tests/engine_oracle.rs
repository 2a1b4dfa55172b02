//! The engine against a from-scratch replay of the same dynamics: exact
//! agreement on every edge, across random grids, thresholds, and the
//! unbounded sentinel.

mod common;

use common::reference_frozen;
use frozen_perc::clocks::{assign_times, stream_u64, u01, EdgeTimes};
use frozen_perc::engine::{greedy_matching, run_frozen_grid, NParam};
use frozen_perc::lattice::{Grid, Rect};

fn random_grid(seed: u64, rep: u64, max_side: i64) -> Grid {
    let pick = |counter: u64, lo: i64, hi: i64| {
        lo + (stream_u64(seed, rep, counter) % (hi - lo + 1) as u64) as i64
    };
    let w = pick(0, 1, max_side);
    let h = pick(1, 1, max_side);
    let x0 = pick(2, -3, 3);
    let y0 = pick(3, -3, 3);
    Grid::new(Rect::new(x0, x0 + w, y0, y0 + h))
}

#[test]
fn final_states_match_the_reference_replay_exactly() {
    let caps = [
        NParam::Finite(1),
        NParam::Finite(2),
        NParam::Finite(3),
        NParam::Finite(5),
        NParam::Unbounded,
    ];
    for rep in 0..300u64 {
        let grid = random_grid(0xabcd_1234, rep, 8);
        let times = assign_times(grid, 0x5eed_0001, rep);
        let cap = caps[(rep % caps.len() as u64) as usize];
        let threshold = match cap {
            NParam::Finite(n) => Some(n),
            NParam::Unbounded => None,
        };
        let expected = reference_frozen(grid, &times.order(), threshold);
        let state = run_frozen_grid(&times, cap).unwrap();
        assert_eq!(state.open_edges, expected, "cap {cap:?} on grid {:?} rep {rep}", grid.rect);
    }
}

#[test]
fn threshold_one_reduces_to_greedy_matching() {
    for rep in 0..200u64 {
        let grid = random_grid(0x0a1c_4e11, rep, 10);
        let times = assign_times(grid, 0x6a7c_9b02, rep);
        let state = run_frozen_grid(&times, NParam::Finite(1)).unwrap();
        assert_eq!(state.open_edges, greedy_matching(&times));
    }
}

#[test]
fn only_the_clock_order_matters() {
    // Squashing all clocks through a monotone map keeps the final state.
    for rep in 0..60u64 {
        let grid = random_grid(0x0c0d_e5ca, rep, 7);
        let times = assign_times(grid, 0x0f0f_0003, rep);
        let squashed: Vec<f64> = times.values().iter().map(|&t| t * t * t).collect();
        let replayed = EdgeTimes::from_values(grid, squashed).unwrap();
        for cap in [NParam::Finite(2), NParam::Finite(4)] {
            let a = run_frozen_grid(&times, cap).unwrap();
            let b = run_frozen_grid(&replayed, cap).unwrap();
            assert_eq!(a.open_edges, b.open_edges);
            assert_eq!(a.cluster_of, b.cluster_of);
        }
    }
}

#[test]
fn frozen_clusters_block_growth_but_keep_their_shape() {
    // Every frozen cluster's diameter sits in [N, 2N-1]; unfrozen below N.
    for rep in 0..120u64 {
        let grid = random_grid(0xb10c_cafe, rep, 9);
        let times = assign_times(grid, 0xdead_0004, rep);
        let n = 2 + (stream_u64(0x77, rep, 0) % 3) as i64;
        let state = run_frozen_grid(&times, NParam::Finite(n)).unwrap();
        for c in &state.clusters {
            if c.frozen {
                assert!(c.diameter() >= n && c.diameter() <= 2 * n - 1);
                assert!(c.freeze_time.is_some());
            } else {
                assert!(c.diameter() < n);
                assert!(c.freeze_time.is_none());
            }
        }
    }
}

#[test]
fn reference_replay_is_insensitive_to_tie_free_perturbations() {
    // Tiny clock jitter that keeps the order fixed cannot change anything.
    for rep in 0..40u64 {
        let grid = random_grid(0x11f3_55aa, rep, 6);
        let times = assign_times(grid, 0xc0c0_0005, rep);
        let order = times.order();
        let mut ranked = vec![0.0f64; order.len()];
        for (rank, &e) in order.iter().enumerate() {
            ranked[e as usize] = (rank as f64 + 0.5 + 0.4 * u01(stream_u64(9, rep, e as u64)))
                / (order.len() as f64 + 1.0);
        }
        let jittered = EdgeTimes::from_values(grid, ranked).unwrap();
        assert_eq!(jittered.order(), order);
        let a = run_frozen_grid(&times, NParam::Finite(3)).unwrap();
        let b = run_frozen_grid(&jittered, NParam::Finite(3)).unwrap();
        assert_eq!(a.open_edges, b.open_edges);
    }
}
