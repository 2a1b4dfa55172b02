//! Frozen percolation on the square lattice.
//!
//! Every edge of Z^2 carries an independent uniform clock in (0,1). An edge
//! opens at its clock time unless one of its endpoints already belongs to a
//! cluster whose Chebyshev diameter has reached the freezing threshold N; a
//! cluster that reaches diameter >= N freezes and never grows again. This
//! crate simulates the process on finite windows, measures the law of the
//! final cluster of the origin, and mechanically checks the deterministic
//! six-event implication that pins that diameter inside (aN, bN).
//!
//! The library is organised around small modules:
//!
//! * [`lattice`] - vertices, edges, planar duals, boxes and the proof-region
//!   geometry (annuli, side rectangle R, corridors L1/L2, R').
//! * [`clocks`] - reproducible per-edge clock assignment (counter-based, keyed
//!   by master seed / replicate / edge index) plus binary dump/restore.
//! * [`engine`] - the freezing dynamics itself, via a union-find that tracks
//!   cluster bounding boxes.
//! * [`connectivity`] - crossings, open circuits, closed dual circuits, and
//!   innermost/outermost circuit extraction via interface tracing.
//! * [`lemma`] - parameter validation, the crossing-threshold solver, the
//!   six-event checker and the implication verifier.
//! * [`montecarlo`] - replicate orchestration, sweeps over N, histograms,
//!   Wilson intervals.
//! * [`cli`] - the `frozen-perc` binary (simulate / sweep / hist / crossing /
//!   solve-tau / lemma / dump-geometry).
//!
//! Runnable walkthroughs live in `examples/`; start with
//! `cargo run --release -p frozen-perc --example simulate`.

pub mod clocks;
pub mod connectivity;
pub mod engine;
mod error;
pub mod lattice;
pub mod lemma;
pub mod montecarlo;

pub mod cli;

pub use error::{Error, Result};

/// Crate version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
