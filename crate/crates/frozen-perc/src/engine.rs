//! The freezing dynamics itself: replay edges in increasing clock order
//! through a diameter-tracking union-find. An edge opens at its clock unless
//! an endpoint already sits in a frozen cluster; a cluster freezes the moment
//! its Chebyshev diameter reaches the threshold `N` and never grows again.
//!
//! Consequences baked into the invariant checks:
//! * a merge joins two live clusters of diameter < N across one edge, so no
//!   final diameter can exceed `2N - 1`;
//! * a final cluster is frozen exactly when its diameter is at least `N`;
//! * with the `Unbounded` sentinel nothing freezes and the dynamics is plain
//!   Bernoulli percolation in the time coupling: at time `t` the open set is
//!   exactly `{e : tau_e < t}`.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use crate::clocks::EdgeTimes;
use crate::lattice::{Edge, Grid, Rect, Vertex, Window};
use crate::{Error, Result};

/// The freezing threshold: a finite diameter, or a sentinel that never
/// freezes (plain percolation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NParam {
    Finite(i64),
    Unbounded,
}

impl NParam {
    pub fn validate(&self) -> Result<()> {
        match self {
            NParam::Finite(n) if *n < 1 => {
                Err(Error::Config(format!("freezing threshold must be >= 1, got {n}")))
            }
            _ => Ok(()),
        }
    }

    /// Largest possible final diameter, `2N - 1`; none when unbounded.
    pub fn cap(&self) -> Option<i64> {
        match self {
            NParam::Finite(n) => Some(2 * n - 1),
            NParam::Unbounded => None,
        }
    }

    #[inline]
    fn freezes(&self, diameter: i64) -> bool {
        match self {
            NParam::Finite(n) => diameter >= *n,
            NParam::Unbounded => false,
        }
    }
}

impl std::fmt::Display for NParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NParam::Finite(n) => write!(f, "{n}"),
            NParam::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// One final cluster: a connected component of the open subgraph (isolated
/// vertices included as singletons).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterRecord {
    /// Union-find root, as a vertex index of the grid.
    pub root: u32,
    pub size: u32,
    pub bbox: Rect,
    pub frozen: bool,
    /// Clock of the merge that pushed the diameter over the threshold.
    pub freeze_time: Option<f64>,
}

impl ClusterRecord {
    pub fn diameter(&self) -> i64 {
        self.bbox.diameter()
    }
}

/// Replay log entry; recorded only when requested (memory).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Event {
    /// Edge opened; `merged` is false for cycle edges inside one cluster.
    Opened { t: f64, edge: u32, merged: bool },
    /// Edge stayed closed because an endpoint's cluster was frozen.
    Skipped { t: f64, edge: u32 },
    /// A merge reached the threshold; `root` is the surviving root.
    Froze { t: f64, root: u32, diameter: i64 },
}

/// Configuration after replaying all clocks strictly below `at_time`
/// (1.0 = the full run, since clocks live in (0,1)).
#[derive(Debug, Clone, PartialEq)]
pub struct FinalState {
    pub grid: Grid,
    pub n: NParam,
    pub at_time: f64,
    /// Open flag per canonical edge index.
    pub open_edges: Vec<bool>,
    /// Dense cluster id per vertex index, indexing into `clusters`. Ids are
    /// assigned in order of each cluster's smallest vertex index.
    pub cluster_of: Vec<u32>,
    pub clusters: Vec<ClusterRecord>,
    pub event_log: Option<Vec<Event>>,
}

/// Summary of the cluster containing the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginStats {
    pub diameter: i64,
    pub frozen: bool,
    pub size: u32,
    /// Chebyshev distance from the cluster's bounding box to the window
    /// boundary; 0 means the cluster touches it (truncation suspect).
    pub boundary_margin: i64,
}

impl FinalState {
    pub fn is_open(&self, e: Edge) -> Result<bool> {
        let idx = self.grid.edge_index(e).ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
        Ok(self.open_edges[idx as usize])
    }

    pub fn open_count(&self) -> usize {
        self.open_edges.iter().filter(|&&b| b).count()
    }

    pub fn cluster_at(&self, v: Vertex) -> Result<&ClusterRecord> {
        let idx = self
            .grid
            .vertex_index(v)
            .ok_or_else(|| Error::Config(format!("vertex ({},{}) outside grid", v.x, v.y)))?;
        Ok(&self.clusters[self.cluster_of[idx as usize] as usize])
    }

    /// All vertices of the cluster with the given dense id.
    pub fn cluster_vertices(&self, id: u32) -> Vec<Vertex> {
        (0..self.cluster_of.len() as u32)
            .filter(|&i| self.cluster_of[i as usize] == id)
            .map(|i| self.grid.vertex_at(i))
            .collect()
    }

    /// Statistics of the origin's cluster; the grid must contain (0,0).
    pub fn origin_stats(&self) -> Result<OriginStats> {
        let idx = self
            .grid
            .vertex_index(Vertex::new(0, 0))
            .ok_or(Error::OriginOutsideWindow)?;
        let rec = &self.clusters[self.cluster_of[idx as usize] as usize];
        let w = self.grid.rect;
        let b = rec.bbox;
        let boundary_margin = (b.x_min - w.x_min)
            .min(w.x_max - b.x_max)
            .min(b.y_min - w.y_min)
            .min(w.y_max - b.y_max);
        Ok(OriginStats {
            diameter: rec.diameter(),
            frozen: rec.frozen,
            size: rec.size,
            boundary_margin,
        })
    }

    /// Open/closed bitmap in canonical edge order: edge `i` is bit `i & 7`
    /// (least significant first) of byte `i >> 3`; trailing bits zero.
    pub fn write_open_bitmap<W: Write>(&self, mut w: W) -> Result<()> {
        let mut bytes = vec![0u8; self.open_edges.len().div_ceil(8)];
        for (i, &open) in self.open_edges.iter().enumerate() {
            if open {
                bytes[i >> 3] |= 1 << (i & 7);
            }
        }
        w.write_all(&bytes)?;
        Ok(())
    }

    /// Cluster summary rows: `cluster_id,size,diameter,frozen,freeze_time`,
    /// freeze_time blank for clusters that never froze.
    pub fn write_cluster_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "cluster_id,size,diameter,frozen,freeze_time")?;
        for (id, rec) in self.clusters.iter().enumerate() {
            let ft = rec.freeze_time.map(|t| t.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{},{}", id, rec.size, rec.diameter(), rec.frozen, ft)?;
        }
        Ok(())
    }
}

#[inline]
fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        let gp = parent[p as usize];
        parent[x as usize] = gp;
        x = gp;
    }
    x
}

fn run_core(times: &EdgeTimes, n: NParam, t_cut: f64, log: bool) -> Result<FinalState> {
    n.validate()?;
    let grid = times.grid;
    let nv = grid.vertex_count();

    let mut parent: Vec<u32> = (0..nv as u32).collect();
    let mut size = vec![1u32; nv];
    let mut bbox: Vec<[i32; 4]> = Vec::with_capacity(nv);
    for y in grid.rect.y_min..=grid.rect.y_max {
        for x in grid.rect.x_min..=grid.rect.x_max {
            bbox.push([x as i32, x as i32, y as i32, y as i32]);
        }
    }
    let mut frozen = vec![false; nv];
    let mut freeze_time = vec![0.0f64; nv];
    let mut open = vec![false; times.len()];
    let mut events: Option<Vec<Event>> = if log { Some(Vec::new()) } else { None };

    for ei in times.order() {
        let t = times.time_at(ei);
        if t >= t_cut {
            break;
        }
        let (u, v) = grid.edge_endpoint_indices(ei);
        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        if frozen[ru as usize] || frozen[rv as usize] {
            if let Some(ev) = &mut events {
                ev.push(Event::Skipped { t, edge: ei });
            }
            continue;
        }
        open[ei as usize] = true;
        if ru == rv {
            if let Some(ev) = &mut events {
                ev.push(Event::Opened { t, edge: ei, merged: false });
            }
            continue;
        }
        if let Some(ev) = &mut events {
            ev.push(Event::Opened { t, edge: ei, merged: true });
        }
        let (big, small) = if size[ru as usize] >= size[rv as usize] { (ru, rv) } else { (rv, ru) };
        parent[small as usize] = big;
        size[big as usize] += size[small as usize];
        let sb = bbox[small as usize];
        let bb = &mut bbox[big as usize];
        bb[0] = bb[0].min(sb[0]);
        bb[1] = bb[1].max(sb[1]);
        bb[2] = bb[2].min(sb[2]);
        bb[3] = bb[3].max(sb[3]);
        let diameter = i64::from(bb[1] - bb[0]).max(i64::from(bb[3] - bb[2]));
        if n.freezes(diameter) {
            frozen[big as usize] = true;
            freeze_time[big as usize] = t;
            if let Some(ev) = &mut events {
                ev.push(Event::Froze { t, root: big, diameter });
            }
        }
    }

    // Label components with dense ids, in order of smallest member vertex.
    let mut cluster_of = vec![u32::MAX; nv];
    let mut id_of_root = vec![u32::MAX; nv];
    let mut clusters: Vec<ClusterRecord> = Vec::new();
    for v in 0..nv as u32 {
        let r = find(&mut parent, v);
        if id_of_root[r as usize] == u32::MAX {
            id_of_root[r as usize] = clusters.len() as u32;
            let bb = bbox[r as usize];
            clusters.push(ClusterRecord {
                root: r,
                size: size[r as usize],
                bbox: Rect::new(bb[0] as i64, bb[1] as i64, bb[2] as i64, bb[3] as i64),
                frozen: frozen[r as usize],
                freeze_time: frozen[r as usize].then(|| freeze_time[r as usize]),
            });
        }
        cluster_of[v as usize] = id_of_root[r as usize];
    }

    // Hard invariants, checked on every run: the diameter cap, and
    // frozen <=> diameter over threshold.
    for rec in &clusters {
        if let Some(cap) = n.cap() {
            if rec.diameter() > cap {
                return Err(Error::Invariant(format!(
                    "cluster diameter {} exceeds cap {cap}",
                    rec.diameter()
                )));
            }
        }
        if rec.frozen != n.freezes(rec.diameter()) {
            return Err(Error::Invariant(format!(
                "cluster at root {} has diameter {} but frozen = {}",
                rec.root,
                rec.diameter(),
                rec.frozen
            )));
        }
    }

    Ok(FinalState {
        grid,
        n,
        at_time: t_cut,
        open_edges: open,
        cluster_of,
        clusters,
        event_log: events,
    })
}

fn check_window(window: Window, times: &EdgeTimes) -> Result<()> {
    if window.grid() != times.grid {
        return Err(Error::TimesMismatch {
            expected: window.grid().edge_count(),
            got: times.len(),
        });
    }
    Ok(())
}

/// Run the dynamics to time 1 on a window's clock field.
pub fn run_frozen(window: Window, times: &EdgeTimes, n: NParam) -> Result<FinalState> {
    check_window(window, times)?;
    run_core(times, n, 1.0, false)
}

/// Same, on an arbitrary grid (small test graphs, rectangles).
pub fn run_frozen_grid(times: &EdgeTimes, n: NParam) -> Result<FinalState> {
    run_core(times, n, 1.0, false)
}

/// Full run with the replay event log attached.
pub fn run_frozen_logged(times: &EdgeTimes, n: NParam) -> Result<FinalState> {
    run_core(times, n, 1.0, true)
}

/// Configuration at an intermediate time `t in [0,1]`: replays exactly the
/// clocks strictly below `t`.
pub fn state_at(times: &EdgeTimes, n: NParam, t: f64) -> Result<FinalState> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Config(format!("time {t} outside [0,1]")));
    }
    run_core(times, n, t, false)
}

/// Convenience: origin summary of a full run.
pub fn origin_stats(state: &FinalState) -> Result<OriginStats> {
    state.origin_stats()
}

/// Greedy maximal matching in increasing clock order: keep an edge iff both
/// endpoints are still unmatched. The threshold-1 dynamics must coincide
/// with this exactly, which the tests exploit as an oracle.
pub fn greedy_matching(times: &EdgeTimes) -> Vec<bool> {
    let grid = times.grid;
    let mut matched = vec![false; grid.vertex_count()];
    let mut open = vec![false; times.len()];
    for ei in times.order() {
        let (u, v) = grid.edge_endpoint_indices(ei);
        if !matched[u as usize] && !matched[v as usize] {
            matched[u as usize] = true;
            matched[v as usize] = true;
            open[ei as usize] = true;
        }
    }
    open
}

/// Partition signature of a state: for every vertex, the smallest vertex
/// index in its cluster. Two states with equal signatures have identical
/// connectivity structure regardless of id assignment.
pub fn partition_signature(state: &FinalState) -> Vec<u32> {
    let mut min_of_cluster = vec![u32::MAX; state.clusters.len()];
    for (v, &c) in state.cluster_of.iter().enumerate() {
        if min_of_cluster[c as usize] == u32::MAX {
            min_of_cluster[c as usize] = v as u32;
        }
    }
    state.cluster_of.iter().map(|&c| min_of_cluster[c as usize]).collect()
}

/// Map each cluster id to its member count, for quick distribution checks.
pub fn cluster_sizes(state: &FinalState) -> HashMap<u32, u32> {
    let mut m = HashMap::new();
    for &c in &state.cluster_of {
        *m.entry(c).or_insert(0) += 1;
    }
    m
}
