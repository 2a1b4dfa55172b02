//! Queries on thresholded configurations: crossings, circuits around an
//! annulus, closed dual circuits around a region, connecting dual paths, and
//! extraction of the extremal (innermost / outermost) circuits.
//!
//! Everything here treats an edge as open at threshold `t` iff its clock is
//! strictly below `t`, and works on one immutable `EdgeTimes`.
//!
//! Circuit existence is decided by planar duality rather than cycle search:
//!
//! * An open circuit surrounding the inner box of an annulus exists iff no
//!   "blocking" dual path runs from the faces inside the inner box to the
//!   faces outside the outer one, where the blocker may cross annulus edges
//!   only when they are closed (edges outside the annulus graph are crossed
//!   freely).
//! * A closed dual circuit surrounding an inner region exists iff no primal
//!   path runs from deep inside the inner region to outside the outer one
//!   using edges that are open or irrelevant (an edge is irrelevant unless
//!   both flanking faces lie between the regions).
//!
//! The extremal circuits come out of the same searches: the innermost open
//! circuit is the boundary of the dual closure of the inner box, and the
//! outermost closed dual circuit is the interface in front of everything
//! reachable from outside. Boundaries are traced with interior-on-the-left
//! direction conventions, decomposed into simple cycles, and the unique
//! cycle winding around the inner seed is returned.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::clocks::EdgeTimes;
use crate::lattice::{dual_of, DualEdge, DualVertex, Edge, Grid, Rect, Region, Vertex};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// circuits

/// A simple closed cycle, on the lattice or on its dual. `edges[i]` joins
/// `vertices[i]` to `vertices[(i+1) % len]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Circuit {
    Primal { vertices: Vec<Vertex>, edges: Vec<Edge> },
    Dual { vertices: Vec<DualVertex>, edges: Vec<DualEdge> },
}

impl Circuit {
    /// Build from a vertex cycle (first vertex not repeated at the end).
    /// Rejects cycles shorter than 4, with non-adjacent consecutive
    /// vertices, or with repeated vertices.
    pub fn primal(vertices: Vec<Vertex>) -> Result<Circuit> {
        if vertices.len() < 4 {
            return Err(Error::Config(format!("cycle of length {} is degenerate", vertices.len())));
        }
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(*v) {
                return Err(Error::SelfIntersectingCircuit);
            }
        }
        let mut edges = Vec::with_capacity(vertices.len());
        for i in 0..vertices.len() {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            let e = Edge::from_endpoints(a, b).ok_or_else(|| {
                Error::Config(format!("({},{}) and ({},{}) are not neighbors", a.x, a.y, b.x, b.y))
            })?;
            edges.push(e);
        }
        Ok(Circuit::Primal { vertices, edges })
    }

    /// Build from a face cycle; same validation as [`Circuit::primal`].
    pub fn dual(vertices: Vec<DualVertex>) -> Result<Circuit> {
        if vertices.len() < 4 {
            return Err(Error::Config(format!("cycle of length {} is degenerate", vertices.len())));
        }
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(*v) {
                return Err(Error::SelfIntersectingCircuit);
            }
        }
        let mut edges = Vec::with_capacity(vertices.len());
        for i in 0..vertices.len() {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            edges.push(dual_edge_between(a, b).ok_or_else(|| {
                Error::Config(format!("faces ({},{}) and ({},{}) are not adjacent", a.fx, a.fy, b.fx, b.fy))
            })?);
        }
        Ok(Circuit::Dual { vertices, edges })
    }

    pub fn len(&self) -> usize {
        match self {
            Circuit::Primal { vertices, .. } => vertices.len(),
            Circuit::Dual { vertices, .. } => vertices.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_primal(&self) -> bool {
        matches!(self, Circuit::Primal { .. })
    }

    /// Primal edges carried by the circuit: its own edges for a primal
    /// circuit, the crossed edges for a dual one.
    pub fn primal_edges(&self) -> Vec<Edge> {
        match self {
            Circuit::Primal { edges, .. } => edges.clone(),
            Circuit::Dual { edges, .. } => edges.iter().map(|d| d.crossed).collect(),
        }
    }

    /// Cycle points in doubled coordinates (primal vertices even, face
    /// centers odd), for exact winding arithmetic.
    pub fn doubled_points(&self) -> Vec<(i64, i64)> {
        match self {
            Circuit::Primal { vertices, .. } => {
                vertices.iter().map(|v| (2 * v.x, 2 * v.y)).collect()
            }
            Circuit::Dual { vertices, .. } => vertices.iter().map(|f| f.doubled()).collect(),
        }
    }

    /// Winding number around a point given in doubled coordinates. The
    /// point's parity must differ from the cycle's so no segment hits it:
    /// pass a face center for a primal circuit and a vertex for a dual one.
    pub fn winding_around(&self, center_doubled: (i64, i64)) -> i64 {
        winding(&self.doubled_points(), center_doubled)
    }
}

impl Serialize for Circuit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Circuit", 2)?;
        match self {
            Circuit::Primal { vertices, .. } => {
                st.serialize_field("kind", "primal")?;
                let pts: Vec<[i64; 2]> = vertices.iter().map(|v| [v.x, v.y]).collect();
                st.serialize_field("vertices", &pts)?;
            }
            Circuit::Dual { vertices, .. } => {
                st.serialize_field("kind", "dual")?;
                // Face centers in doubled coordinates (both odd).
                let pts: Vec<[i64; 2]> = vertices.iter().map(|f| { let (x, y) = f.doubled(); [x, y] }).collect();
                st.serialize_field("vertices_doubled", &pts)?;
            }
        }
        st.end()
    }
}

/// The dual edge between two adjacent faces, if they are adjacent.
fn dual_edge_between(a: DualVertex, b: DualVertex) -> Option<DualEdge> {
    let (lo, hi) = if (a.fx, a.fy) <= (b.fx, b.fy) { (a, b) } else { (b, a) };
    match (hi.fx - lo.fx, hi.fy - lo.fy) {
        (1, 0) => Some(dual_of(Edge::vertical(lo.fx + 1, lo.fy))),
        (0, 1) => Some(dual_of(Edge::horizontal(lo.fx, lo.fy + 1))),
        _ => None,
    }
}

/// Winding number of a closed polyline (doubled coordinates, consecutive
/// points adjacent, wrap implied) around a point of opposite parity: signed
/// count of upward minus downward crossings of the eastward ray.
pub fn winding(points_doubled: &[(i64, i64)], center: (i64, i64)) -> i64 {
    let (cx, cy) = center;
    let mut w = 0;
    for i in 0..points_doubled.len() {
        let (px, py) = points_doubled[i];
        let (qx, qy) = points_doubled[(i + 1) % points_doubled.len()];
        if px == qx && px > cx {
            let (lo, hi) = (py.min(qy), py.max(qy));
            if lo < cy && cy < hi {
                w += if qy > py { 1 } else { -1 };
            }
        }
    }
    w
}

// ---------------------------------------------------------------------------
// crossings

/// t-open horizontal crossing of `rect`: a path of open edges, both
/// endpoints of every edge inside `rect`, joining its west side to its east
/// side. `rect` must have positive width and lie inside the clock grid.
pub fn has_horizontal_open_crossing(rect: Rect, times: &EdgeTimes, t: f64) -> Result<bool> {
    if rect.width() < 1 {
        return Err(Error::Config("crossing rectangle has zero width".into()));
    }
    if !times.grid.rect.contains_rect(&rect) {
        return Err(Error::Config("crossing rectangle pokes out of the clock grid".into()));
    }
    let cols = rect.width() + 1;
    let rows = rect.height() + 1;
    let idx = |v: Vertex| ((v.y - rect.y_min) * cols + (v.x - rect.x_min)) as usize;
    let mut visited = vec![false; (cols * rows) as usize];
    let mut queue = VecDeque::new();
    for y in rect.y_min..=rect.y_max {
        let v = Vertex::new(rect.x_min, y);
        visited[idx(v)] = true;
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        if v.x == rect.x_max {
            return Ok(true);
        }
        for (w, e) in neighbors(v) {
            if rect.contains(w) && !visited[idx(w)] && times.time(e)? < t {
                visited[idx(w)] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(false)
}

/// t-open crossing from the westmost to the eastmost column of an explicit
/// vertex set (edges must stay inside the set). An empty set has no
/// crossing; a single-column set is trivially crossed.
pub fn has_horizontal_open_crossing_among(
    vertices: &[Vertex],
    times: &EdgeTimes,
    t: f64,
) -> Result<bool> {
    if vertices.is_empty() {
        return Ok(false);
    }
    let set: HashSet<Vertex> = vertices.iter().copied().collect();
    let x_min = vertices.iter().map(|v| v.x).min().unwrap();
    let x_max = vertices.iter().map(|v| v.x).max().unwrap();
    let mut visited = HashSet::new();
    let mut queue = VecDeque::new();
    let mut starts: Vec<Vertex> = vertices.iter().copied().filter(|v| v.x == x_min).collect();
    starts.sort();
    for v in starts {
        visited.insert(v);
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        if v.x == x_max {
            return Ok(true);
        }
        for (w, e) in neighbors(v) {
            if set.contains(&w) && !visited.contains(&w) && times.time(e)? < t {
                visited.insert(w);
                queue.push_back(w);
            }
        }
    }
    Ok(false)
}

fn neighbors(v: Vertex) -> [(Vertex, Edge); 4] {
    [
        (Vertex::new(v.x + 1, v.y), Edge::horizontal(v.x, v.y)),
        (Vertex::new(v.x - 1, v.y), Edge::horizontal(v.x - 1, v.y)),
        (Vertex::new(v.x, v.y + 1), Edge::vertical(v.x, v.y)),
        (Vertex::new(v.x, v.y - 1), Edge::vertical(v.x, v.y - 1)),
    ]
}

// ---------------------------------------------------------------------------
// open circuits in an annulus (primal side)

/// Annulus vertex set: inside `outer`, not strictly inside `inner` (the
/// inner boundary ring belongs to the annulus).
fn in_annulus(outer: Rect, inner: Rect, v: Vertex) -> bool {
    outer.contains(v) && !inner.contains_strictly(v)
}

fn check_annulus(grid: Grid, outer: Rect, inner: Rect) -> Result<()> {
    if !grid.rect.contains_rect(&outer) {
        return Err(Error::MalformedAnnulus("outer box pokes out of the clock grid".into()));
    }
    if !outer.contains_rect_strictly(&inner) {
        return Err(Error::MalformedAnnulus("inner box is not strictly inside the outer box".into()));
    }
    if inner.width() < 2 || inner.height() < 2 {
        return Err(Error::MalformedAnnulus("inner box must be at least 2 wide in both directions".into()));
    }
    Ok(())
}

/// Face-set closure of the inner box: breadth-first over faces, starting
/// from the faces inside `inner`, crossing an annulus edge only when it is
/// t-closed and any non-annulus edge freely. Returns None when the closure
/// escapes `outer` (a blocking dual path exists), otherwise the visited face
/// set — all strictly between the boxes, whose boundary is the innermost
/// open circuit.
fn inner_face_closure(
    outer: Rect,
    inner: Rect,
    times: &EdgeTimes,
    t: f64,
) -> Result<Option<HashSet<(i64, i64)>>> {
    check_annulus(times.grid, outer, inner)?;
    // Face universe: one ring beyond the faces inside `outer`.
    let fx_lo = outer.x_min - 1;
    let fx_hi = outer.x_max;
    let fy_lo = outer.y_min - 1;
    let fy_hi = outer.y_max;
    let cols = fx_hi - fx_lo + 1;
    let fidx = |fx: i64, fy: i64| ((fy - fy_lo) * cols + (fx - fx_lo)) as usize;
    let inside_outer = |fx: i64, fy: i64| {
        fx >= outer.x_min && fx < outer.x_max && fy >= outer.y_min && fy < outer.y_max
    };

    let mut visited = vec![false; (cols * (fy_hi - fy_lo + 1)) as usize];
    let mut queue = VecDeque::new();
    for fy in inner.y_min..inner.y_max {
        for fx in inner.x_min..inner.x_max {
            visited[fidx(fx, fy)] = true;
            queue.push_back((fx, fy));
        }
    }
    debug_assert!(!queue.is_empty());

    while let Some((fx, fy)) = queue.pop_front() {
        let steps = [
            ((fx + 1, fy), Edge::vertical(fx + 1, fy)),
            ((fx - 1, fy), Edge::vertical(fx, fy)),
            ((fx, fy + 1), Edge::horizontal(fx, fy + 1)),
            ((fx, fy - 1), Edge::horizontal(fx, fy)),
        ];
        for ((gx, gy), crossed) in steps {
            if gx < fx_lo || gx > fx_hi || gy < fy_lo || gy > fy_hi || visited[fidx(gx, gy)] {
                continue;
            }
            let (a, b) = crossed.endpoints();
            let in_graph = in_annulus(outer, inner, a) && in_annulus(outer, inner, b);
            if in_graph && times.time(crossed)? < t {
                continue; // an open annulus edge blocks the dual step
            }
            if !inside_outer(gx, gy) {
                return Ok(None); // escaped: no open circuit surrounds inner
            }
            visited[fidx(gx, gy)] = true;
            queue.push_back((gx, gy));
        }
    }

    let mut cells = HashSet::new();
    for fy in fy_lo..=fy_hi {
        for fx in fx_lo..=fx_hi {
            if visited[fidx(fx, fy)] {
                cells.insert((fx, fy));
            }
        }
    }
    Ok(Some(cells))
}

/// Whether a t-open circuit inside the annulus `outer \ inner` surrounds the
/// inner box. Decided by duality: true iff no t-closed dual path crosses the
/// annulus from inside to outside.
pub fn has_open_circuit(outer: Rect, inner: Rect, times: &EdgeTimes, t: f64) -> Result<bool> {
    Ok(inner_face_closure(outer, inner, times, t)?.is_some())
}

/// The innermost t-open circuit of the annulus, if any: every other t-open
/// circuit surrounding the inner box encloses it.
pub fn innermost_open_circuit(
    outer: Rect,
    inner: Rect,
    times: &EdgeTimes,
    t: f64,
) -> Result<Option<Circuit>> {
    let Some(cells) = inner_face_closure(outer, inner, times, t)? else {
        return Ok(None);
    };
    let seed_center = (2 * inner.x_min + 1, 2 * inner.y_min + 1); // a face center inside inner
    let corners = trace_surrounding_cycle(&cells, seed_center)?;
    let vertices: Vec<Vertex> = corners.iter().map(|&(x, y)| Vertex::new(x, y)).collect();
    let circuit = Circuit::primal(canonical_rotation_primal(vertices))?;

    // Validity: every edge open and inside the annulus.
    if let Circuit::Primal { edges, vertices } = &circuit {
        for e in edges {
            if !(times.time(*e)? < t) {
                return Err(Error::Invariant(format!("traced circuit edge {e} is not open")));
            }
        }
        for v in vertices {
            if !in_annulus(outer, inner, *v) {
                return Err(Error::Invariant(format!(
                    "traced circuit vertex ({},{}) leaves the annulus",
                    v.x, v.y
                )));
            }
        }
    }
    Ok(Some(circuit))
}

// ---------------------------------------------------------------------------
// closed dual circuits between two regions (dual side)

fn check_region_pair(grid: Grid, outer: &Region, inner: &Region) -> Result<()> {
    let bound = outer.bounding().dilate(1);
    if !grid.rect.contains_rect(&bound) {
        return Err(Error::MalformedAnnulus(
            "outer region must lie inside the clock grid with a one-vertex margin".into(),
        ));
    }
    // Strictly inside: the one-vertex thickening of the inner region (the
    // thickening of a union is the union of the thickenings) stays in outer.
    for r in &inner.rects {
        for v in r.dilate(1).vertices() {
            if !outer.contains(v) {
                return Err(Error::MalformedAnnulus(
                    "inner region is not strictly inside the outer region".into(),
                ));
            }
        }
    }
    if deep_seeds(inner).is_empty() {
        return Err(Error::MalformedAnnulus("inner region has no deep interior vertex".into()));
    }
    Ok(())
}

fn deep_seeds(inner: &Region) -> Vec<Vertex> {
    inner.bounding().vertices().filter(|&v| inner.deep_interior(v)).collect()
}

/// A face lies between the regions when it is inside the outer one but not
/// inside the inner one.
fn face_between(outer: &Region, inner: &Region, f: DualVertex) -> bool {
    outer.face_inside(f) && !inner.face_inside(f)
}

/// Primal reachability from outside the outer region, crossing an edge when
/// it is t-open or irrelevant (not flanked by two between-region faces).
/// Returns (reached a deep-inner vertex, visited flags, universe rect).
fn outside_reach(
    outer: &Region,
    inner: &Region,
    times: &EdgeTimes,
    t: f64,
    stop_early: bool,
) -> Result<(bool, Vec<bool>, Rect)> {
    check_region_pair(times.grid, outer, inner)?;
    let uni = outer.bounding().dilate(1);
    let cols = uni.width() + 1;
    let vidx = |v: Vertex| ((v.y - uni.y_min) * cols + (v.x - uni.x_min)) as usize;
    let mut visited = vec![false; uni.vertex_count()];
    let mut queue = VecDeque::new();
    for v in uni.vertices() {
        if !outer.contains(v) {
            visited[vidx(v)] = true;
            queue.push_back(v);
        }
    }
    let mut reached = false;
    'bfs: while let Some(v) = queue.pop_front() {
        for (w, e) in neighbors(v) {
            if !uni.contains(w) || visited[vidx(w)] {
                continue;
            }
            let (fa, fb) = dual_of(e).endpoints();
            let relevant = face_between(outer, inner, fa) && face_between(outer, inner, fb);
            if relevant && !(times.time(e)? < t) {
                continue; // a closed, between-region edge blocks the walk
            }
            visited[vidx(w)] = true;
            queue.push_back(w);
            if inner.deep_interior(w) {
                reached = true;
                if stop_early {
                    break 'bfs;
                }
            }
        }
    }
    Ok((reached, visited, uni))
}

/// Whether a t-closed dual circuit between `inner` and `outer` surrounds the
/// inner region. Decided by duality: true iff no t-open primal path runs
/// from deep inside `inner` to outside `outer`.
pub fn has_closed_dual_circuit(
    outer: &Region,
    inner: &Region,
    times: &EdgeTimes,
    t: f64,
) -> Result<bool> {
    let (reached, _, _) = outside_reach(outer, inner, times, t, true)?;
    Ok(!reached)
}

/// The outermost t-closed dual circuit between the regions, if any: every
/// other t-closed dual circuit surrounding the inner region lies inside it.
pub fn outermost_closed_dual_circuit(
    outer: &Region,
    inner: &Region,
    times: &EdgeTimes,
    t: f64,
) -> Result<Option<Circuit>> {
    let (reached, visited, uni) = outside_reach(outer, inner, times, t, false)?;
    if reached {
        return Ok(None);
    }
    let cols = uni.width() + 1;
    let vidx = |v: Vertex| ((v.y - uni.y_min) * cols + (v.x - uni.x_min)) as usize;

    // Component of unreached vertices containing the deep seeds; its border
    // with the reached set carries the circuit.
    let seeds = deep_seeds(inner);
    let mut comp = vec![false; uni.vertex_count()];
    let mut queue = VecDeque::new();
    comp[vidx(seeds[0])] = true;
    queue.push_back(seeds[0]);
    while let Some(v) = queue.pop_front() {
        for (w, _) in neighbors(v) {
            if uni.contains(w) && !visited[vidx(w)] && !comp[vidx(w)] {
                comp[vidx(w)] = true;
                queue.push_back(w);
            }
        }
    }
    for s in &seeds {
        if !comp[vidx(*s)] {
            return Err(Error::Invariant(
                "deep interior of the inner region is split; no single circuit surrounds it".into(),
            ));
        }
    }

    // Trace the component as unit cells; cell corners map to faces shifted
    // one down-left.
    let mut cells = HashSet::new();
    for v in uni.vertices() {
        if comp[vidx(v)] {
            cells.insert((v.x, v.y));
        }
    }
    let s0 = seeds[0];
    let corners = trace_surrounding_cycle(&cells, (2 * s0.x + 1, 2 * s0.y + 1))?;
    let faces: Vec<DualVertex> = corners.iter().map(|&(cx, cy)| DualVertex::new(cx - 1, cy - 1)).collect();
    let circuit = Circuit::dual(canonical_rotation_dual(faces))?;

    // Validity: every crossed edge closed, every flanking face in-region.
    if let Circuit::Dual { edges, .. } = &circuit {
        for d in edges {
            if times.time(d.crossed)? < t {
                return Err(Error::Invariant(format!(
                    "traced dual circuit crosses the open edge {}",
                    d.crossed
                )));
            }
            let (fa, fb) = d.endpoints();
            if !face_between(outer, inner, fa) || !face_between(outer, inner, fb) {
                return Err(Error::Invariant("traced dual circuit leaves the region".into()));
            }
        }
    }
    Ok(Some(circuit))
}

// ---------------------------------------------------------------------------
// connecting dual paths

/// Faces flanking the circuit's primal edges (for a dual circuit these are
/// its own vertices).
fn flanking_faces(c: &Circuit) -> Vec<DualVertex> {
    match c {
        Circuit::Primal { edges, .. } => {
            let mut out = Vec::with_capacity(2 * edges.len());
            for e in edges {
                let (a, b) = dual_of(*e).endpoints();
                out.push(a);
                out.push(b);
            }
            out
        }
        Circuit::Dual { vertices, .. } => vertices.clone(),
    }
}

/// Whether a path of t-closed dual edges inside `rect` joins a face flanking
/// `from` to a face flanking `to`. All path faces must lie inside `rect`
/// (all four corners); a shared flanking face inside `rect` counts as an
/// empty path.
pub fn has_closed_dual_path_connecting(
    rect: Rect,
    from: &Circuit,
    to: &Circuit,
    times: &EdgeTimes,
    t: f64,
) -> Result<bool> {
    if !times.grid.rect.contains_rect(&rect) {
        return Err(Error::Config("corridor rectangle pokes out of the clock grid".into()));
    }
    let area = Region::from_rect(rect);
    let start: Vec<DualVertex> =
        flanking_faces(from).into_iter().filter(|&f| area.face_inside(f)).collect();
    let targets: HashSet<DualVertex> =
        flanking_faces(to).into_iter().filter(|&f| area.face_inside(f)).collect();
    if start.is_empty() || targets.is_empty() {
        return Ok(false);
    }
    let mut visited: HashSet<DualVertex> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut start_sorted = start;
    start_sorted.sort();
    for f in start_sorted {
        if visited.insert(f) {
            queue.push_back(f);
        }
    }
    while let Some(f) = queue.pop_front() {
        if targets.contains(&f) {
            return Ok(true);
        }
        let steps = [
            (DualVertex::new(f.fx + 1, f.fy), Edge::vertical(f.fx + 1, f.fy)),
            (DualVertex::new(f.fx - 1, f.fy), Edge::vertical(f.fx, f.fy)),
            (DualVertex::new(f.fx, f.fy + 1), Edge::horizontal(f.fx, f.fy + 1)),
            (DualVertex::new(f.fx, f.fy - 1), Edge::horizontal(f.fx, f.fy)),
        ];
        for (g, crossed) in steps {
            if area.face_inside(g) && !visited.contains(&g) && !(times.time(crossed)? < t) {
                visited.insert(g);
                queue.push_back(g);
            }
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// interiors

/// Primal vertices strictly enclosed by the circuit, by ray parity. Vertices
/// on a primal circuit are neither interior nor exterior to it.
pub fn interior_vertices(c: &Circuit) -> Vec<Vertex> {
    // Work in quadrupled coordinates; cast rays a quarter step above vertex
    // rows for primal circuits so no segment endpoint is ever hit.
    let pts = c.doubled_points();
    let q = if c.is_primal() { 1 } else { 0 };
    let mut segs: Vec<(i64, i64, i64)> = Vec::new(); // (x, y_lo, y_hi), quadrupled
    for i in 0..pts.len() {
        let (px, py) = pts[i];
        let (qx, qy) = pts[(i + 1) % pts.len()];
        if px == qx {
            segs.push((2 * px, 2 * py.min(qy), 2 * py.max(qy)));
        }
    }
    let on_curve: HashSet<Vertex> = match c {
        Circuit::Primal { vertices, .. } => vertices.iter().copied().collect(),
        Circuit::Dual { .. } => HashSet::new(),
    };
    let ys: Vec<i64> = pts.iter().map(|p| p.1).collect();
    let (y_lo, y_hi) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
    let mut out = Vec::new();
    let mut row = y_lo / 2 - 1;
    while row <= y_hi / 2 + 1 {
        let ray = 4 * row + q;
        let mut xs: Vec<i64> = segs
            .iter()
            .filter(|&&(_, lo, hi)| lo < ray && ray < hi)
            .map(|&(x, _, _)| x)
            .collect();
        xs.sort_unstable();
        debug_assert!(xs.len() % 2 == 0);
        for pair in xs.chunks_exact(2) {
            let (sa, sb) = (pair[0], pair[1]);
            let mut x = sa.div_euclid(4) + i64::from(sa.rem_euclid(4) != 0);
            while 4 * x < sb {
                if 4 * x >= sa {
                    let v = Vertex::new(x, row);
                    if !on_curve.contains(&v) {
                        out.push(v);
                    }
                }
                x += 1;
            }
        }
        row += 1;
    }
    out.sort();
    out
}

/// The interior as a region of horizontal runs, or None when no vertex is
/// enclosed.
pub fn interior_of(c: &Circuit) -> Option<Region> {
    let verts = interior_vertices(c);
    if verts.is_empty() {
        return None;
    }
    let mut rects: Vec<Rect> = Vec::new();
    let mut run: Option<Rect> = None;
    let mut sorted = verts;
    sorted.sort_by_key(|v| (v.y, v.x));
    for v in sorted {
        match run {
            Some(r) if r.y_min == v.y && v.x == r.x_max + 1 => {
                run = Some(Rect::new(r.x_min, v.x, v.y, v.y));
            }
            Some(r) => {
                rects.push(r);
                run = Some(Rect::new(v.x, v.x, v.y, v.y));
            }
            None => run = Some(Rect::new(v.x, v.x, v.y, v.y)),
        }
    }
    rects.push(run.unwrap());
    Some(Region::new(rects))
}

// ---------------------------------------------------------------------------
// boundary tracing

/// Directed boundary edges of a union of unit cells (cell (x,y) spans
/// [x,x+1]x[y,y+1]), interior on the left, decomposed into simple corner
/// cycles. Deterministic: iteration is in sorted cell order.
fn boundary_cycles(cells: &HashSet<(i64, i64)>) -> Vec<Vec<(i64, i64)>> {
    let mut sorted: Vec<(i64, i64)> = cells.iter().copied().collect();
    sorted.sort_unstable();
    let mut out_edges: HashMap<(i64, i64), Vec<(i64, i64)>> = HashMap::new();
    for &(x, y) in &sorted {
        if !cells.contains(&(x, y - 1)) {
            out_edges.entry((x, y)).or_default().push((x + 1, y)); // south side, east
        }
        if !cells.contains(&(x + 1, y)) {
            out_edges.entry((x + 1, y)).or_default().push((x + 1, y + 1)); // east side, north
        }
        if !cells.contains(&(x, y + 1)) {
            out_edges.entry((x + 1, y + 1)).or_default().push((x, y + 1)); // north side, west
        }
        if !cells.contains(&(x - 1, y)) {
            out_edges.entry((x, y + 1)).or_default().push((x, y)); // west side, south
        }
    }
    let mut starts: Vec<(i64, i64)> = out_edges.keys().copied().collect();
    starts.sort_unstable();

    let mut cycles = Vec::new();
    for s in starts {
        while out_edges.get(&s).is_some_and(|v| !v.is_empty()) {
            // Closed walk from s, peeled into simple cycles on the fly.
            let mut stack = vec![s];
            let mut pos: HashMap<(i64, i64), usize> = HashMap::from([(s, 0)]);
            loop {
                let cur = *stack.last().unwrap();
                match out_edges.get_mut(&cur).and_then(|v| v.pop()) {
                    Some(nxt) => {
                        if let Some(&i) = pos.get(&nxt) {
                            cycles.push(stack[i..].to_vec());
                            for p in stack.drain(i + 1..) {
                                pos.remove(&p);
                            }
                        } else {
                            pos.insert(nxt, stack.len());
                            stack.push(nxt);
                        }
                    }
                    None => {
                        debug_assert_eq!(stack.len(), 1, "walk stranded off its origin");
                        break;
                    }
                }
            }
        }
    }
    cycles
}

/// Boundary cycle of the cell union that winds around `center` (doubled
/// coordinates). Errors if zero or several such cycles exist.
fn trace_surrounding_cycle(
    cells: &HashSet<(i64, i64)>,
    center: (i64, i64),
) -> Result<Vec<(i64, i64)>> {
    let mut hits = Vec::new();
    for cyc in boundary_cycles(cells) {
        let doubled: Vec<(i64, i64)> = cyc.iter().map(|&(x, y)| (2 * x, 2 * y)).collect();
        let w = winding(&doubled, center);
        if w != 0 {
            hits.push((cyc, w));
        }
    }
    match hits.len() {
        1 => {
            let (mut cyc, w) = hits.pop().unwrap();
            if w < 0 {
                cyc[1..].reverse();
            }
            Ok(cyc)
        }
        0 => Err(Error::Invariant("no boundary cycle surrounds the seed".into())),
        _ => Err(Error::Invariant("several boundary cycles surround the seed".into())),
    }
}

/// Rotate so the lexicographically smallest vertex comes first, then orient
/// counter-clockwise; makes extracted circuits canonical.
fn canonical_rotation_primal(vertices: Vec<Vertex>) -> Vec<Vertex> {
    let k = vertices
        .iter()
        .enumerate()
        .min_by_key(|(_, v)| (v.x, v.y))
        .map(|(i, _)| i)
        .unwrap();
    let mut out: Vec<Vertex> = vertices[k..].iter().chain(&vertices[..k]).copied().collect();
    let doubled: Vec<(i64, i64)> = out.iter().map(|v| (2 * v.x, 2 * v.y)).collect();
    // A point just inside the smallest corner: the corner is on the hull, so
    // the face north-east of it is enclosed.
    let c = (2 * out[0].x + 1, 2 * out[0].y + 1);
    if winding(&doubled, c) < 0 {
        out[1..].reverse();
    }
    out
}

fn canonical_rotation_dual(vertices: Vec<DualVertex>) -> Vec<DualVertex> {
    let k = vertices
        .iter()
        .enumerate()
        .min_by_key(|(_, v)| (v.fx, v.fy))
        .map(|(i, _)| i)
        .unwrap();
    let mut out: Vec<DualVertex> = vertices[k..].iter().chain(&vertices[..k]).copied().collect();
    let doubled: Vec<(i64, i64)> = out.iter().map(|f| f.doubled()).collect();
    let c = (2 * out[0].fx + 2, 2 * out[0].fy + 2); // the corner vertex NE of the smallest face
    if winding(&doubled, c) < 0 {
        out[1..].reverse();
    }
    out
}
