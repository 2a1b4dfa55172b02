//! Independent reference implementations the integration suites check the
//! library against: a step-by-step rebuild of the freezing dynamics, brute
//! permutation enumeration, and planar searches recoded from scratch (face
//! BFS, simple-cycle backtracking, ray-cast interiors).

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use frozen_perc::clocks::EdgeTimes;
use frozen_perc::engine::FinalState;
use frozen_perc::lattice::{DualVertex, Edge, Grid, Rect, Vertex};

// ---------------------------------------------------------------------------
// reference dynamics

/// Replay the freezing process naively: walk the edges in clock order, and
/// open one unless an endpoint sits in a cluster whose Chebyshev diameter
/// already reached `cap` (`None` = plain percolation, everything opens).
/// Clusters are recomputed from scratch by BFS at every step, so the only
/// shared assumption with the engine is the lattice itself.
pub fn reference_frozen(grid: Grid, order: &[u32], cap: Option<i64>) -> Vec<bool> {
    let nv = grid.vertex_count();
    let mut open = vec![false; grid.edge_count()];
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nv];
    for &ei in order {
        let (a, b) = grid.edge_endpoint_indices(ei);
        let blocked = match cap {
            None => false,
            Some(n) => {
                cluster_diameter(grid, &adj, a) >= n || cluster_diameter(grid, &adj, b) >= n
            }
        };
        if blocked {
            continue;
        }
        open[ei as usize] = true;
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    open
}

/// Chebyshev diameter (larger bounding-box side) of the open cluster at a
/// vertex index. A frozen cluster never grows — every edge at its boundary
/// is blocked from the freezing moment on — so recomputing the diameter now
/// gives the same verdict as remembering it at freeze time.
fn cluster_diameter(grid: Grid, adj: &[Vec<u32>], start: u32) -> i64 {
    let v0 = grid.vertex_at(start);
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (v0.x, v0.x, v0.y, v0.y);
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u as usize] {
            if seen.insert(w) {
                let v = grid.vertex_at(w);
                x_lo = x_lo.min(v.x);
                x_hi = x_hi.max(v.x);
                y_lo = y_lo.min(v.y);
                y_hi = y_hi.max(v.y);
                queue.push_back(w);
            }
        }
    }
    (x_hi - x_lo).max(y_hi - y_lo)
}

// ---------------------------------------------------------------------------
// exhaustive orderings

/// All k! orderings of the edge indices 0..k (Heap's algorithm). Guarded to
/// tiny k: 8! = 40320 rows is the most anything here asks for.
pub fn all_orderings(k: u32) -> Vec<Vec<u32>> {
    assert!(k <= 8, "{k}! orderings would be unreasonable");
    let mut a: Vec<u32> = (0..k).collect();
    let mut out = Vec::new();
    fn heap(m: usize, a: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if m <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..m {
            heap(m - 1, a, out);
            if m % 2 == 0 {
                a.swap(i, m - 1);
            } else {
                a.swap(0, m - 1);
            }
        }
    }
    heap(a.len(), &mut a, &mut out);
    out
}

/// Open-edge set as a bitmask, for grids of at most 64 edges.
pub fn open_mask(state: &FinalState) -> u64 {
    assert!(state.open_edges.len() <= 64);
    state
        .open_edges
        .iter()
        .enumerate()
        .fold(0u64, |m, (i, &o)| if o { m | (1 << i) } else { m })
}

pub fn mask_of_bools(open: &[bool]) -> u64 {
    assert!(open.len() <= 64);
    open.iter().enumerate().fold(0u64, |m, (i, &o)| if o { m | (1 << i) } else { m })
}

/// Total-variation distance between two empirical distributions given as
/// outcome counts.
pub fn tv_distance(p: &HashMap<u64, u64>, p_total: u64, q: &HashMap<u64, u64>, q_total: u64) -> f64 {
    let keys: HashSet<&u64> = p.keys().chain(q.keys()).collect();
    let mut sum = 0.0;
    for k in keys {
        let fp = *p.get(k).unwrap_or(&0) as f64 / p_total as f64;
        let fq = *q.get(k).unwrap_or(&0) as f64 / q_total as f64;
        sum += (fp - fq).abs();
    }
    sum / 2.0
}

// ---------------------------------------------------------------------------
// annulus helpers, recoded

fn in_annulus(outer: Rect, inner: Rect, v: Vertex) -> bool {
    outer.contains(v) && !inner.contains_strictly(v)
}

fn face_in(r: Rect, fx: i64, fy: i64) -> bool {
    fx >= r.x_min && fx < r.x_max && fy >= r.y_min && fy < r.y_max
}

/// The primal edge two side-by-side faces share.
fn edge_between_faces(a: (i64, i64), b: (i64, i64)) -> Edge {
    match (b.0 - a.0, b.1 - a.1) {
        (1, 0) => Edge::vertical(a.0 + 1, a.1),
        (-1, 0) => Edge::vertical(a.0, a.1),
        (0, 1) => Edge::horizontal(a.0, a.1 + 1),
        (0, -1) => Edge::horizontal(a.0, a.1),
        _ => panic!("faces {a:?} and {b:?} are not adjacent"),
    }
}

/// Face-to-face escape search: can a walk starting on the faces inside
/// `inner` leave `outer`, stepping across an edge only when it is not an
/// open annulus edge? Annulus edges are those with both endpoints in the
/// annulus; anything else never blocks.
pub fn closed_dual_crossing(outer: Rect, inner: Rect, times: &EdgeTimes, t: f64) -> bool {
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut queue: VecDeque<(i64, i64)> = VecDeque::new();
    for fy in inner.y_min..inner.y_max {
        for fx in inner.x_min..inner.x_max {
            seen.insert((fx, fy));
            queue.push_back((fx, fy));
        }
    }
    while let Some((fx, fy)) = queue.pop_front() {
        for step in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let g = (fx + step.0, fy + step.1);
            if seen.contains(&g) {
                continue;
            }
            let e = edge_between_faces((fx, fy), g);
            let (a, b) = e.endpoints();
            let blocks =
                in_annulus(outer, inner, a) && in_annulus(outer, inner, b) && times.time(e).unwrap() < t;
            if blocks {
                continue;
            }
            if !face_in(outer, g.0, g.1) {
                return true;
            }
            seen.insert(g);
            queue.push_back(g);
        }
    }
    false
}

// ---------------------------------------------------------------------------
// simple-cycle enumeration

/// Every simple cycle of an undirected graph, as vertex-id lists. Rooted
/// backtracking: a cycle is emitted exactly once, rooted at its smallest
/// vertex and walked in the direction that sees the smaller neighbor first.
/// Each expansion costs one unit of `budget`; `None` means it ran out.
fn simple_cycles(adj: &[Vec<usize>], budget: &mut i64) -> Option<Vec<Vec<usize>>> {
    let n = adj.len();
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    let mut path: Vec<usize> = Vec::new();

    fn dfs(
        u: usize,
        root: usize,
        adj: &[Vec<usize>],
        on_path: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        budget: &mut i64,
    ) -> bool {
        for &w in &adj[u] {
            *budget -= 1;
            if *budget < 0 {
                return false;
            }
            if w == root && path.len() >= 3 {
                if path[1] < path[path.len() - 1] {
                    out.push(path.clone());
                }
            } else if w > root && !on_path[w] {
                on_path[w] = true;
                path.push(w);
                let ok = dfs(w, root, adj, on_path, path, out, budget);
                path.pop();
                on_path[w] = false;
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    for root in 0..n {
        on_path[root] = true;
        path.push(root);
        let ok = dfs(root, root, adj, &mut on_path, &mut path, &mut out, budget);
        path.pop();
        on_path[root] = false;
        if !ok {
            return None;
        }
    }
    Some(out)
}

/// All simple cycles of t-open annulus edges, as vertex cycles.
pub fn open_annulus_cycles(
    outer: Rect,
    inner: Rect,
    times: &EdgeTimes,
    t: f64,
    budget: &mut i64,
) -> Option<Vec<Vec<Vertex>>> {
    let verts: Vec<Vertex> = outer.vertices().filter(|&v| in_annulus(outer, inner, v)).collect();
    let id: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for (i, &v) in verts.iter().enumerate() {
        for w in [Vertex::new(v.x + 1, v.y), Vertex::new(v.x, v.y + 1)] {
            let Some(&j) = id.get(&w) else { continue };
            let e = Edge::from_endpoints(v, w).unwrap();
            if times.time(e).unwrap() < t {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let cycles = simple_cycles(&adj, budget)?;
    Some(cycles.into_iter().map(|c| c.into_iter().map(|i| verts[i]).collect()).collect())
}

/// All simple cycles of the faces strictly between the boxes, adjacent faces
/// linked when the edge they share is t-closed.
pub fn closed_dual_annulus_cycles(
    outer: Rect,
    inner: Rect,
    times: &EdgeTimes,
    t: f64,
    budget: &mut i64,
) -> Option<Vec<Vec<DualVertex>>> {
    let mut faces: Vec<(i64, i64)> = Vec::new();
    for fy in outer.y_min..outer.y_max {
        for fx in outer.x_min..outer.x_max {
            if !face_in(inner, fx, fy) {
                faces.push((fx, fy));
            }
        }
    }
    let id: HashMap<(i64, i64), usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); faces.len()];
    for (i, &f) in faces.iter().enumerate() {
        for g in [(f.0 + 1, f.1), (f.0, f.1 + 1)] {
            let Some(&j) = id.get(&g) else { continue };
            if !(times.time(edge_between_faces(f, g)).unwrap() < t) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let cycles = simple_cycles(&adj, budget)?;
    Some(
        cycles
            .into_iter()
            .map(|c| c.into_iter().map(|i| DualVertex::new(faces[i].0, faces[i].1)).collect())
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// ray-cast interiors

/// Crossing-parity containment in doubled coordinates. The test point's
/// parity must differ from the polygon's on both axes, so no segment can
/// graze it and every comparison below is strict.
pub fn encloses(points_doubled: &[(i64, i64)], test: (i64, i64)) -> bool {
    let mut crossings = 0;
    for i in 0..points_doubled.len() {
        let (x0, y0) = points_doubled[i];
        let (x1, y1) = points_doubled[(i + 1) % points_doubled.len()];
        assert!(
            (x0 - test.0) % 2 != 0 && (y0 - test.1) % 2 != 0,
            "test point parity collides with the cycle"
        );
        if x0 == x1 && x0 > test.0 && y0.min(y1) < test.1 && test.1 < y0.max(y1) {
            crossings += 1;
        }
    }
    crossings % 2 == 1
}

/// Faces of `bound` whose centers the cycle encloses.
pub fn enclosed_faces(points_doubled: &[(i64, i64)], bound: Rect) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for fy in bound.y_min..bound.y_max {
        for fx in bound.x_min..bound.x_max {
            if encloses(points_doubled, (2 * fx + 1, 2 * fy + 1)) {
                out.insert((fx, fy));
            }
        }
    }
    out
}

/// Vertices of `bound` the cycle encloses (for face cycles; vertex parity is
/// even, face parity odd).
pub fn enclosed_vertices(points_doubled: &[(i64, i64)], bound: Rect) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for v in bound.vertices() {
        if encloses(points_doubled, (2 * v.x, 2 * v.y)) {
            out.insert((v.x, v.y));
        }
    }
    out
}

pub fn doubled_of_vertices(cycle: &[Vertex]) -> Vec<(i64, i64)> {
    cycle.iter().map(|v| (2 * v.x, 2 * v.y)).collect()
}

pub fn doubled_of_faces(cycle: &[DualVertex]) -> Vec<(i64, i64)> {
    cycle.iter().map(|f| f.doubled()).collect()
}

/// Canonical form of a vertex cycle: the sorted indices of its edges.
pub fn vertex_cycle_edges(grid: Grid, cycle: &[Vertex]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..cycle.len())
        .map(|i| {
            let e = Edge::from_endpoints(cycle[i], cycle[(i + 1) % cycle.len()]).unwrap();
            grid.edge_index(e).unwrap()
        })
        .collect();
    idx.sort_unstable();
    idx
}

/// Canonical form of a face cycle: the sorted indices of the primal edges it
/// crosses.
pub fn face_cycle_edges(grid: Grid, cycle: &[DualVertex]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..cycle.len())
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            grid.edge_index(edge_between_faces((a.fx, a.fy), (b.fx, b.fy))).unwrap()
        })
        .collect();
    idx.sort_unstable();
    idx
}
