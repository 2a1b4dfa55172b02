//! Edge clocks: every edge of the window grid carries an independent
//! Uniform(0,1) activation time.
//!
//! Times are produced by a counter-based generator: a 64-bit mixing function
//! applied to (master seed, replicate, edge index). Each edge's clock is a
//! pure function of those three numbers, so a replicate can be regenerated in
//! isolation, in any order, on any number of threads, with identical results.
//! Common-random-number couplings across different `N` fall out for free:
//! same seed and replicate means the same clock field.

use std::io::{Read, Write};

use crate::lattice::{Edge, Grid};
use crate::{Error, Result};

/// 64-bit finalizer (the SplitMix64 output stage). Bijective, so distinct
/// counters can never collide.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Raw 64-bit stream value for (seed, replicate, counter).
pub fn stream_u64(master_seed: u64, replicate: u64, counter: u64) -> u64 {
    mix64(mix64(mix64(master_seed) ^ replicate) ^ counter)
}

/// Map 64 random bits to the open interval (0,1): take the top 52 bits and
/// center in the cell, giving `(k + 1/2) / 2^52`. Every step is exact in f64
/// (the numerator `2k + 1` fits in 53 bits), so 0.0 and 1.0 are unreachable
/// even at the extremes of the bit range.
pub fn u01(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / 4503599627370496.0)
}

/// Identifies how a clock field was generated, when it came from the
/// counter-based generator rather than an external dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedInfo {
    pub master_seed: u64,
    pub replicate: u64,
}

/// A full assignment of activation times to the edges of a grid, in canonical
/// edge order (all horizontal edges row-major, then all vertical ones).
#[derive(Debug, Clone)]
pub struct EdgeTimes {
    pub grid: Grid,
    times: Vec<f64>,
    pub seed: Option<SeedInfo>,
}

impl EdgeTimes {
    /// Time of an edge by canonical index.
    #[inline]
    pub fn time_at(&self, idx: u32) -> f64 {
        self.times[idx as usize]
    }

    /// Time of an edge; the edge must lie in the grid.
    pub fn time(&self, e: Edge) -> Result<f64> {
        let idx = self.grid.edge_index(e).ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
        Ok(self.times[idx as usize])
    }

    /// Whether `e` has activated strictly before time `t`.
    pub fn is_open(&self, e: Edge, t: f64) -> Result<bool> {
        Ok(self.time(e)? < t)
    }

    #[inline]
    pub fn is_open_at(&self, idx: u32, t: f64) -> bool {
        self.times[idx as usize] < t
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.times
    }

    /// Replace the time of one edge. Used by planted-configuration builders;
    /// clears the seed tag since the field is no longer pure counter output.
    pub fn set_time(&mut self, e: Edge, t: f64) -> Result<()> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::BadClockValue(t));
        }
        let idx = self.grid.edge_index(e).ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
        self.times[idx as usize] = t;
        self.seed = None;
        Ok(())
    }

    /// Edge indices sorted by increasing time. Ties (absent with the
    /// generator, possible in hand-built fields) break by index.
    pub fn order(&self) -> Vec<u32> {
        let mut idx: Vec<u32> = (0..self.times.len() as u32).collect();
        idx.sort_by(|&i, &j| {
            self.times[i as usize]
                .partial_cmp(&self.times[j as usize])
                .unwrap()
                .then(i.cmp(&j))
        });
        idx
    }

    /// Write the raw times as little-endian f64, canonical edge order, no
    /// header. Length is implied by the grid.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<()> {
        let mut buf = Vec::with_capacity(self.times.len() * 8);
        for t in &self.times {
            buf.extend_from_slice(&t.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    /// Read a dump produced by [`EdgeTimes::dump`] for the same grid shape.
    pub fn restore<R: Read>(grid: Grid, mut r: R) -> Result<EdgeTimes> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let edges = grid.edge_count();
        if bytes.len() != edges * 8 {
            return Err(Error::BadTimesDump { len: bytes.len(), edges });
        }
        let times: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        EdgeTimes::from_values(grid, times)
    }

    /// Wrap an explicit vector of times; must match the grid's edge count and
    /// every value must lie strictly in (0,1).
    pub fn from_values(grid: Grid, times: Vec<f64>) -> Result<EdgeTimes> {
        if times.len() != grid.edge_count() {
            return Err(Error::TimesMismatch { expected: grid.edge_count(), got: times.len() });
        }
        for &t in &times {
            if !(t > 0.0 && t < 1.0) || !t.is_finite() {
                return Err(Error::BadClockValue(t));
            }
        }
        Ok(EdgeTimes { grid, times, seed: None })
    }
}

/// Draw the full clock field for one replicate.
pub fn assign_times(grid: Grid, master_seed: u64, replicate: u64) -> EdgeTimes {
    let base = mix64(mix64(master_seed) ^ replicate);
    let times: Vec<f64> = (0..grid.edge_count() as u64).map(|i| u01(mix64(base ^ i))).collect();
    EdgeTimes { grid, times, seed: Some(SeedInfo { master_seed, replicate }) }
}
