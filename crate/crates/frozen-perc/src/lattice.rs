//! Square-lattice geometry: vertices, edges, planar duals, boxes, windows,
//! and the proof-region layout (nested boxes, side rectangle R, thickened
//! union Lambda', corridors L1/L2 and the short rectangle R').
//!
//! Conventions used throughout the crate:
//!
//! * `B(k)` is the box `[-k/2, k/2]^2` for even `k >= 0`; its side length
//!   (and Chebyshev diameter) is exactly `k`.
//! * Distances are Chebyshev: `|v| = max(|v.x|, |v.y|)`. The diameter of a
//!   vertex set is the larger side of its bounding box.
//! * Dual vertices sit at face centers `(x + 1/2, y + 1/2)`. To stay in
//!   integer arithmetic they are stored by the face's south-west corner and
//!   exposed in doubled coordinates `(2x + 1, 2y + 1)` when serialized.
//! * An annulus `outer \ inner` keeps the boundary vertices of `inner`:
//!   "inside the annulus" means inside `outer` and not strictly inside
//!   `inner`.

use serde::Serialize;

use crate::{Error, Result};

/// Lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub const fn new(x: i64, y: i64) -> Self {
        Vertex { x, y }
    }

    /// Chebyshev norm `max(|x|, |y|)`.
    pub fn norm(&self) -> i64 {
        self.x.abs().max(self.y.abs())
    }
}

/// Axis direction of an edge, pointing east or north from its base vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Dir {
    E,
    N,
}

/// Lattice edge, stored canonically as (base vertex, direction). The base is
/// the west endpoint of a horizontal edge or the south endpoint of a vertical
/// one, so each geometric edge has exactly one representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub base: Vertex,
    pub dir: Dir,
}

impl Edge {
    pub const fn horizontal(x: i64, y: i64) -> Self {
        Edge { base: Vertex::new(x, y), dir: Dir::E }
    }

    pub const fn vertical(x: i64, y: i64) -> Self {
        Edge { base: Vertex::new(x, y), dir: Dir::N }
    }

    /// Build from two endpoints; they must be lattice neighbors.
    pub fn from_endpoints(a: Vertex, b: Vertex) -> Option<Self> {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        match (dx, dy) {
            (1, 0) => Some(Edge { base: a, dir: Dir::E }),
            (-1, 0) => Some(Edge { base: b, dir: Dir::E }),
            (0, 1) => Some(Edge { base: a, dir: Dir::N }),
            (0, -1) => Some(Edge { base: b, dir: Dir::N }),
            _ => None,
        }
    }

    /// Ordered endpoint pair (base first).
    pub fn endpoints(&self) -> (Vertex, Vertex) {
        let o = match self.dir {
            Dir::E => Vertex::new(self.base.x + 1, self.base.y),
            Dir::N => Vertex::new(self.base.x, self.base.y + 1),
        };
        (self.base, o)
    }
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "({},{})-({},{})", a.x, a.y, b.x, b.y)
    }
}

/// Dual vertex = face of the lattice, stored by its south-west corner. The
/// geometric position is the face center `(fx + 1/2, fy + 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualVertex {
    pub fx: i64,
    pub fy: i64,
}

impl DualVertex {
    pub const fn new(fx: i64, fy: i64) -> Self {
        DualVertex { fx, fy }
    }

    /// Position in doubled coordinates: `(2 fx + 1, 2 fy + 1)`, both odd.
    pub fn doubled(&self) -> (i64, i64) {
        (2 * self.fx + 1, 2 * self.fy + 1)
    }

    /// The four primal corners of this face.
    pub fn corners(&self) -> [Vertex; 4] {
        [
            Vertex::new(self.fx, self.fy),
            Vertex::new(self.fx + 1, self.fy),
            Vertex::new(self.fx, self.fy + 1),
            Vertex::new(self.fx + 1, self.fy + 1),
        ]
    }
}

/// Dual edge, identified with the unique primal edge it crosses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DualEdge {
    pub crossed: Edge,
}

impl DualEdge {
    /// The two dual vertices (faces flanking the crossed edge). A horizontal
    /// primal edge is crossed south-to-north, a vertical one west-to-east.
    pub fn endpoints(&self) -> (DualVertex, DualVertex) {
        let Vertex { x, y } = self.crossed.base;
        match self.crossed.dir {
            Dir::E => (DualVertex::new(x, y - 1), DualVertex::new(x, y)),
            Dir::N => (DualVertex::new(x - 1, y), DualVertex::new(x, y)),
        }
    }

    /// Endpoints in doubled coordinates.
    pub fn doubled_endpoints(&self) -> ((i64, i64), (i64, i64)) {
        let (a, b) = self.endpoints();
        (a.doubled(), b.doubled())
    }
}

/// The dual edge crossing a primal edge.
pub fn dual_of(e: Edge) -> DualEdge {
    DualEdge { crossed: e }
}

/// The primal edge crossed by a dual edge (inverse of [`dual_of`]).
pub fn primal_of(d: DualEdge) -> Edge {
    d.crossed
}

/// Closed axis-aligned rectangle of lattice vertices, bounds inclusive.
/// `width`/`height` count lattice steps, so `B(k)` has width `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rect {
    pub x_min: i64,
    pub x_max: i64,
    pub y_min: i64,
    pub y_max: i64,
}

impl Rect {
    pub fn new(x_min: i64, x_max: i64, y_min: i64, y_max: i64) -> Self {
        assert!(x_min <= x_max && y_min <= y_max, "empty rect");
        Rect { x_min, x_max, y_min, y_max }
    }

    pub fn width(&self) -> i64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> i64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.x >= self.x_min && v.x <= self.x_max && v.y >= self.y_min && v.y <= self.y_max
    }

    /// Strict interior (no boundary vertices).
    pub fn contains_strictly(&self, v: Vertex) -> bool {
        v.x > self.x_min && v.x < self.x_max && v.y > self.y_min && v.y < self.y_max
    }

    pub fn contains_rect(&self, r: &Rect) -> bool {
        r.x_min >= self.x_min && r.x_max <= self.x_max && r.y_min >= self.y_min && r.y_max <= self.y_max
    }

    /// `other` fits inside with a gap of at least one vertex on every side.
    pub fn contains_rect_strictly(&self, r: &Rect) -> bool {
        r.x_min > self.x_min && r.x_max < self.x_max && r.y_min > self.y_min && r.y_max < self.y_max
    }

    /// Chebyshev dilation by `d >= 0`.
    pub fn dilate(&self, d: i64) -> Rect {
        assert!(d >= 0);
        Rect::new(self.x_min - d, self.x_max + d, self.y_min - d, self.y_max + d)
    }

    pub fn vertex_count(&self) -> usize {
        ((self.width() + 1) * (self.height() + 1)) as usize
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        let r = *self;
        (r.y_min..=r.y_max).flat_map(move |y| (r.x_min..=r.x_max).map(move |x| Vertex::new(x, y)))
    }

    /// Center point in quarter-coordinates (exact even for odd spans).
    pub fn center_q(&self) -> (i64, i64) {
        ((self.x_min + self.x_max) * 2, (self.y_min + self.y_max) * 2)
    }

    /// Largest bounding-box side: the Chebyshev diameter of the vertex set.
    pub fn diameter(&self) -> i64 {
        self.width().max(self.height())
    }
}

/// Finite union of rectangles, used for the L-shaped regions Lambda and
/// Lambda'. Overlaps between constituent rectangles are expected to be "fat"
/// (at least one lattice step in each direction); the proof-geometry builder
/// guarantees this, and face-containment tests rely on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Region {
    pub rects: Vec<Rect>,
}

impl Region {
    pub fn new(rects: Vec<Rect>) -> Self {
        assert!(!rects.is_empty());
        Region { rects }
    }

    pub fn from_rect(r: Rect) -> Self {
        Region { rects: vec![r] }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.rects.iter().any(|r| r.contains(v))
    }

    /// A face lies inside the region when all four of its corners do. With
    /// fat overlaps this is equivalent to geometric containment.
    pub fn face_inside(&self, f: DualVertex) -> bool {
        f.corners().iter().all(|&c| self.contains(c))
    }

    /// Deep interior: the whole 3x3 vertex block around `v` lies in the
    /// region, i.e. all four faces incident to `v` are inside.
    pub fn deep_interior(&self, v: Vertex) -> bool {
        (-1..=1).all(|dy| (-1..=1).all(|dx| self.contains(Vertex::new(v.x + dx, v.y + dy))))
    }

    /// Bounding rectangle of the union.
    pub fn bounding(&self) -> Rect {
        let mut b = self.rects[0];
        for r in &self.rects[1..] {
            b.x_min = b.x_min.min(r.x_min);
            b.x_max = b.x_max.max(r.x_max);
            b.y_min = b.y_min.min(r.y_min);
            b.y_max = b.y_max.max(r.y_max);
        }
        b
    }

    /// Dilate every rectangle (Chebyshev dilation distributes over unions).
    pub fn dilate(&self, d: i64) -> Region {
        Region { rects: self.rects.iter().map(|r| r.dilate(d)).collect() }
    }

    /// Total number of distinct vertices in the union.
    pub fn vertex_count(&self) -> usize {
        let b = self.bounding();
        b.vertices().filter(|&v| self.contains(v)).count()
    }
}

/// The centered box `B(k) = [-k/2, k/2]^2` for even `k >= 0`.
pub fn build_box(k: i64) -> Result<Rect> {
    if k < 0 || k % 2 != 0 {
        return Err(Error::InvalidBoxSide(k));
    }
    let h = k / 2;
    Ok(Rect::new(-h, h, -h, h))
}

/// The 4k perimeter edges of `B(k)`, forming its boundary cycle (k even,
/// >= 2).
pub fn box_ring_edges(k: i64) -> Result<Vec<Edge>> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidBoxSide(k));
    }
    let h = k / 2;
    let mut out = Vec::with_capacity(4 * k as usize);
    for x in -h..h {
        out.push(Edge::horizontal(x, -h));
        out.push(Edge::horizontal(x, h));
    }
    for y in -h..h {
        out.push(Edge::vertical(-h, y));
        out.push(Edge::vertical(h, y));
    }
    Ok(out)
}

/// Edges of `grid` with exactly one endpoint in `region`.
pub fn region_exit_edges(region: &Region, grid: Grid) -> Vec<Edge> {
    let mut out = Vec::new();
    let scan = region.bounding().dilate(1);
    for v in scan.vertices() {
        for e in [Edge::horizontal(v.x, v.y), Edge::vertical(v.x, v.y)] {
            if grid.edge_index(e).is_none() {
                continue;
            }
            let (a, b) = e.endpoints();
            if region.contains(a) != region.contains(b) {
                out.push(e);
            }
        }
    }
    out
}

/// Nearest even integer, ties rounded up. Box side lengths are discretized
/// with this rule so the box stays centered on the origin.
pub fn round_to_even(x: f64) -> i64 {
    2 * (x / 2.0 + 0.5).floor() as i64
}

/// Nearest integer, ties up, clamped to at least 1. Used for rectangle side
/// lengths, which have no parity constraint.
pub fn round_len(x: f64) -> i64 {
    ((x + 0.5).floor() as i64).max(1)
}

/// Simulation window: the centered box `B(side)` with `side` even and
/// positive. All clocks, dynamics and searches live on this grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub side: i64,
}

impl Window {
    pub fn new(side: i64) -> Result<Self> {
        if side <= 0 || side % 2 != 0 {
            return Err(Error::InvalidWindowSide(side));
        }
        Ok(Window { side })
    }

    pub fn rect(&self) -> Rect {
        Rect::new(-self.side / 2, self.side / 2, -self.side / 2, self.side / 2)
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.rect())
    }
}

/// Rectangular vertex grid with canonical dense indexing of vertices and
/// edges. Vertices are numbered row-major from the south-west corner. Edges
/// are numbered with all horizontal edges first (row-major by their west
/// endpoint), then all vertical edges (row-major by their south endpoint);
/// binary clock dumps use exactly this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub rect: Rect,
}

impl Grid {
    pub fn new(rect: Rect) -> Self {
        Grid { rect }
    }

    pub fn n_cols(&self) -> i64 {
        self.rect.width() + 1
    }

    pub fn n_rows(&self) -> i64 {
        self.rect.height() + 1
    }

    pub fn vertex_count(&self) -> usize {
        (self.n_cols() * self.n_rows()) as usize
    }

    pub fn horizontal_count(&self) -> usize {
        ((self.n_cols() - 1) * self.n_rows()) as usize
    }

    pub fn vertical_count(&self) -> usize {
        (self.n_cols() * (self.n_rows() - 1)) as usize
    }

    pub fn edge_count(&self) -> usize {
        self.horizontal_count() + self.vertical_count()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.rect.contains(v)
    }

    pub fn vertex_index(&self, v: Vertex) -> Option<u32> {
        if !self.rect.contains(v) {
            return None;
        }
        Some(((v.y - self.rect.y_min) * self.n_cols() + (v.x - self.rect.x_min)) as u32)
    }

    pub fn vertex_at(&self, idx: u32) -> Vertex {
        let cols = self.n_cols();
        let x = self.rect.x_min + (idx as i64) % cols;
        let y = self.rect.y_min + (idx as i64) / cols;
        Vertex::new(x, y)
    }

    /// Canonical index of an edge, if both endpoints lie in the grid.
    pub fn edge_index(&self, e: Edge) -> Option<u32> {
        let (a, b) = e.endpoints();
        if !self.rect.contains(a) || !self.rect.contains(b) {
            return None;
        }
        let idx = match e.dir {
            Dir::E => {
                (a.y - self.rect.y_min) * (self.n_cols() - 1) + (a.x - self.rect.x_min)
            }
            Dir::N => {
                self.horizontal_count() as i64
                    + (a.y - self.rect.y_min) * self.n_cols()
                    + (a.x - self.rect.x_min)
            }
        };
        Some(idx as u32)
    }

    pub fn edge_at(&self, idx: u32) -> Edge {
        let idx = idx as i64;
        let h = self.horizontal_count() as i64;
        if idx < h {
            let per_row = self.n_cols() - 1;
            let y = self.rect.y_min + idx / per_row;
            let x = self.rect.x_min + idx % per_row;
            Edge::horizontal(x, y)
        } else {
            let idx = idx - h;
            let per_row = self.n_cols();
            let y = self.rect.y_min + idx / per_row;
            let x = self.rect.x_min + idx % per_row;
            Edge::vertical(x, y)
        }
    }

    /// Endpoint vertex indices of an edge, by edge index. Hot path for the
    /// engine, so it avoids going through `Vertex`.
    pub fn edge_endpoint_indices(&self, idx: u32) -> (u32, u32) {
        let idx = idx as i64;
        let h = self.horizontal_count() as i64;
        let cols = self.n_cols();
        if idx < h {
            let per_row = cols - 1;
            let y = idx / per_row;
            let x = idx % per_row;
            let a = y * cols + x;
            (a as u32, (a + 1) as u32)
        } else {
            let idx = idx - h;
            let a = idx; // south endpoint index equals position in the v-block
            (a as u32, (a + cols) as u32)
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.edge_count() as u32).map(move |i| self.edge_at(i))
    }
}

/// Inequality checks on the proof parameters `(a, c, b, l, eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParamViolation {
    APositive,
    ABeforeC,
    CBeforeB,
    BBelowOne,
    EpsPositive,
    /// `l + (b - c)/2 < 1`
    ReachBelowOne,
    /// `1 < l + (b + c)/2`
    ReachAboveOne,
    /// `l + (b - c)/2 + eps < 1`
    ReachWithMarginBelowOne,
}

impl std::fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ParamViolation::APositive => "0 < a",
            ParamViolation::ABeforeC => "a < c",
            ParamViolation::CBeforeB => "c < b",
            ParamViolation::BBelowOne => "b < 1",
            ParamViolation::EpsPositive => "0 < eps",
            ParamViolation::ReachBelowOne => "l + (b - c)/2 < 1",
            ParamViolation::ReachAboveOne => "1 < l + (b + c)/2",
            ParamViolation::ReachWithMarginBelowOne => "l + (b - c)/2 + eps < 1",
        };
        f.write_str(s)
    }
}

/// The real-valued proof parameters. Validity:
/// `0 < a < c < b < 1`, `0 < eps`, and
/// `l + (b - c)/2 < 1 < l + (b + c)/2` with `l + (b - c)/2 + eps < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProofParams {
    pub a: f64,
    pub c: f64,
    pub b: f64,
    pub l: f64,
    pub eps: f64,
}

impl ProofParams {
    pub fn new(a: f64, c: f64, b: f64, l: f64, eps: f64) -> Self {
        ProofParams { a, c, b, l, eps }
    }

    /// All violated constraints, empty when the tuple is admissible.
    pub fn violations(&self) -> Vec<ParamViolation> {
        let ProofParams { a, c, b, l, eps } = *self;
        let mut out = Vec::new();
        if !(a > 0.0) {
            out.push(ParamViolation::APositive);
        }
        if !(a < c) {
            out.push(ParamViolation::ABeforeC);
        }
        if !(c < b) {
            out.push(ParamViolation::CBeforeB);
        }
        if !(b < 1.0) {
            out.push(ParamViolation::BBelowOne);
        }
        if !(eps > 0.0) {
            out.push(ParamViolation::EpsPositive);
        }
        let reach = l + (b - c) / 2.0;
        if !(reach < 1.0) {
            out.push(ParamViolation::ReachBelowOne);
        }
        if !(1.0 < l + (b + c) / 2.0) {
            out.push(ParamViolation::ReachAboveOne);
        }
        if !(reach + eps < 1.0) {
            out.push(ParamViolation::ReachWithMarginBelowOne);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::ParamViolations(v))
        }
    }
}

/// All discretized regions used by the six-event checker, for one `(params, N)`
/// pair inside one window.
///
/// * `box_a`, `box_c`, `box_b`: `B(aN)`, `B(cN)`, `B(bN)` (sides rounded to
///   even).
/// * `r`: rectangle of length `~(l + (b-c)/2) N` and width `~eps N`, grown
///   east out of the middle of `box_c`'s east side. When the rounded width is
///   odd the span is shifted down one unit.
/// * `lambda` = `box_b ∪ r`; `lambda_prime` = Chebyshev `d`-dilation of
///   `lambda`, where `d` is the rounded `eps N`. The dilation equals
///   `B(bN + 2d) ∪ protrusion` exactly; `protrusion` is the `3d`-wide piece
///   sticking out east, and `r_prime` is its westmost part of length `4d`.
/// * `l1`/`l2`: corridors over the rightmost `d`-segment of `box_c`'s north
///   (resp. south) side, reaching the boundary of `lambda_prime`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofGeometry {
    pub params: ProofParams,
    pub n: i64,
    pub window: Window,
    /// Rounded eps*N: R's width, and the dilation radius for Lambda'.
    pub d: i64,
    pub k_a: i64,
    pub k_c: i64,
    pub k_b: i64,
    pub box_a: Rect,
    pub box_c: Rect,
    pub box_b: Rect,
    /// `B(bN + 2d)`: the dilated big box inside Lambda'.
    pub box_b2e: Rect,
    pub r: Rect,
    pub r_prime: Rect,
    pub l1: Rect,
    pub l2: Rect,
    pub lambda: Region,
    pub lambda_prime: Region,
    pub protrusion: Rect,
}

/// Build the proof geometry for parameters `(a, c, b, l, eps)` at scale `n`
/// inside `window`. Fails when the inequalities are violated, when the
/// rounded widths degenerate (`eps`-width below 2), or when the window cannot
/// hold the dilated regions with a one-vertex margin.
pub fn build_proof_geometry(params: ProofParams, n: i64, window: Window) -> Result<ProofGeometry> {
    params.validate()?;
    if n < 1 {
        return Err(Error::DegenerateGeometry(format!("n must be >= 1, got {n}")));
    }
    let nf = n as f64;
    let k_a = round_to_even(params.a * nf);
    let k_c = round_to_even(params.c * nf);
    let k_b = round_to_even(params.b * nf);
    if k_a < 2 || k_c < k_a + 2 || k_b < k_c + 2 {
        return Err(Error::DegenerateGeometry(format!(
            "rounded box sides {k_a}, {k_c}, {k_b} are not strictly nested with slack"
        )));
    }
    let d = round_len(params.eps * nf);
    if d < 2 {
        return Err(Error::DegenerateGeometry(format!("rounded eps-width {d} < 2")));
    }
    let len_r = round_len((params.l + (params.b - params.c) / 2.0) * nf);

    // R: west side is the central d-subsegment of box_c's east side; odd
    // widths shift the span down one unit.
    let (ry_min, ry_max) = if d % 2 == 0 { (-d / 2, d / 2) } else { (-(d + 1) / 2, (d - 1) / 2) };
    let r = Rect::new(k_c / 2, k_c / 2 + len_r, ry_min, ry_max);
    if -ry_min > k_c / 2 || ry_max > k_c / 2 || d > k_c {
        return Err(Error::DegenerateGeometry(format!(
            "R width {d} does not fit the east side of B({k_c})"
        )));
    }

    let box_a = build_box(k_a)?;
    let box_c = build_box(k_c)?;
    let box_b = build_box(k_b)?;
    let box_b2e = build_box(k_b + 2 * d)?;

    let lambda = Region::new(vec![box_b, r]);
    let r_dilated = r.dilate(d);
    let lambda_prime = Region::new(vec![box_b2e, r_dilated]);

    // The part of r_dilated east of box_b2e, west side on its boundary.
    let protrusion = Rect::new(k_b / 2 + d, r.x_max + d, r_dilated.y_min, r_dilated.y_max);
    if protrusion.width() < 4 * d {
        return Err(Error::DegenerateGeometry(format!(
            "protrusion length {} cannot hold R' of length {}",
            protrusion.width(),
            4 * d
        )));
    }
    let r_prime = Rect::new(protrusion.x_min, protrusion.x_min + 4 * d, protrusion.y_min, protrusion.y_max);

    // Corridors: south (north) side is the rightmost d-segment of box_c's
    // north (south) side; the far side sits on the boundary of lambda_prime.
    let l1 = Rect::new(k_c / 2 - d, k_c / 2, k_c / 2, k_b / 2 + d);
    let l2 = Rect::new(k_c / 2 - d, k_c / 2, -k_b / 2 - d, -k_c / 2);

    // Everything must fit in the window with a one-vertex rim so dual-side
    // searches can step just outside the outer regions.
    let needed = (k_b / 2 + d).max(r_dilated.x_max).max(r_dilated.y_max.max(-r_dilated.y_min)) + 1;
    if window.side / 2 < needed {
        return Err(Error::WindowTooSmall { side: window.side, needed });
    }

    debug_assert!(window.rect().contains_rect(&box_b2e.dilate(1)));
    debug_assert!(box_c.contains_rect_strictly(&box_a));
    debug_assert!(box_b.contains_rect_strictly(&box_c));

    Ok(ProofGeometry {
        params,
        n,
        window,
        d,
        k_a,
        k_c,
        k_b,
        box_a,
        box_c,
        box_b,
        box_b2e,
        r,
        r_prime,
        l1,
        l2,
        lambda,
        lambda_prime,
        protrusion,
    })
}
