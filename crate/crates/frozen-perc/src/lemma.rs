//! The confinement argument, made executable.
//!
//! At scale `n` with admissible parameters `(a, c, b, l, eps)`, six events
//! about one clock configuration — an early-open circuit around the middle
//! box, closed dual circuits insulating it inside and outside, closed dual
//! corridors tying the circuits together, a warm path feeding the circuit
//! from the east, and an empty throat in the feeder's neck — together force
//! a deterministic conclusion: the origin's final cluster has diameter
//! inside a fixed band around the middle scales. This module evaluates the
//! events on a configuration ([`check_events`]), replays the engine to test
//! the conclusion ([`verify_implication`]), estimates the crossing
//! probability that calibrates the early threshold ([`estimate_alpha`],
//! [`solve_tau`]), and searches for configurations where everything holds
//! ([`run_search`]), either by blind sampling or by planting the expensive
//! structure and letting the background stay random.
//!
//! Thresholds: "warm" means open at 1/2, "early" means open at `tau` for the
//! calibrated `tau` < 1/2. All six events read one immutable `EdgeTimes`.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::clocks::{assign_times, stream_u64, u01, EdgeTimes};
use crate::connectivity::{
    has_closed_dual_circuit, has_closed_dual_path_connecting, has_horizontal_open_crossing,
    has_horizontal_open_crossing_among, innermost_open_circuit, interior_vertices,
    outermost_closed_dual_circuit, Circuit,
};
use crate::engine::{run_frozen_grid, NParam};
use crate::lattice::{
    box_ring_edges, build_box, region_exit_edges, Edge, Grid, ParamViolation, ProofGeometry,
    ProofParams, Rect, Region, Vertex,
};
use crate::{Error, Result};

/// Inequality check for a candidate parameter tuple; empty means admissible.
pub fn validate_params(a: f64, c: f64, b: f64, l: f64, eps: f64) -> Vec<ParamViolation> {
    ProofParams::new(a, c, b, l, eps).violations()
}

/// Full parameter set for one event-checking run: the geometry parameters,
/// the scale, the early threshold, and the crossing estimate that produced
/// it (recorded so reports are self-describing; pass 0 when `tau` was chosen
/// by hand).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaParams {
    pub proof: ProofParams,
    pub n: i64,
    pub tau: f64,
    pub alpha_hat: f64,
}

impl LemmaParams {
    pub fn new(proof: ProofParams, n: i64, tau: f64, alpha_hat: f64) -> Result<LemmaParams> {
        proof.validate()?;
        if n < 1 {
            return Err(Error::Config(format!("scale must be positive, got {n}")));
        }
        if !(tau > 0.0 && tau < 0.5) {
            return Err(Error::Config(format!("tau must lie in (0, 1/2), got {tau}")));
        }
        if !(0.0..=1.0).contains(&alpha_hat) || alpha_hat.is_nan() {
            return Err(Error::Config(format!("alpha estimate out of [0,1]: {alpha_hat}")));
        }
        Ok(LemmaParams { proof, n, tau, alpha_hat })
    }
}

// ---------------------------------------------------------------------------
// crossing estimation and the threshold equation

/// Monte Carlo estimate of the probability of a t-open horizontal crossing
/// of `rect`, with binomial standard error. Clocks are sampled only on the
/// rectangle itself (the event reads nothing else).
pub fn estimate_crossing_probability(
    rect: Rect,
    t: f64,
    replicates: u64,
    master_seed: u64,
) -> Result<(f64, f64)> {
    if replicates < 1 {
        return Err(Error::Config("need at least one replicate".into()));
    }
    let grid = Grid::new(rect);
    let successes: u64 = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let times = assign_times(grid, master_seed, rep);
            has_horizontal_open_crossing(rect, &times, t).map(u64::from)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let p = successes as f64 / replicates as f64;
    let se = (p * (1.0 - p) / replicates as f64).sqrt();
    Ok((p, se))
}

/// The calibration constant: estimated probability of a 1/2-open horizontal
/// crossing of the feeder rectangle R.
pub fn estimate_alpha(
    geometry: &ProofGeometry,
    replicates: u64,
    master_seed: u64,
) -> Result<(f64, f64)> {
    estimate_crossing_probability(geometry.r, 0.5, replicates, master_seed)
}

/// Exact crossing probability of a tiny rectangle by enumerating every
/// open/closed pattern (capped at 24 edges; 17 suffices for 4×3 vertices).
pub fn exact_crossing_probability(rect: Rect, t: f64) -> Result<f64> {
    let grid = Grid::new(rect);
    let m = grid.edge_count();
    if m > 24 {
        return Err(Error::Config(format!("{m} edges is too many to enumerate")));
    }
    if rect.width() < 1 {
        return Err(Error::Config("crossing rectangle has zero width".into()));
    }
    let mut p = 0.0;
    for mask in 0u32..1u32 << m {
        if mask_has_crossing(grid, rect, mask) {
            let k = mask.count_ones() as i32;
            p += t.powi(k) * (1.0 - t).powi(m as i32 - k);
        }
    }
    Ok(p)
}

fn mask_has_crossing(grid: Grid, rect: Rect, mask: u32) -> bool {
    let cols = rect.width() + 1;
    let idx = |v: Vertex| ((v.y - rect.y_min) * cols + (v.x - rect.x_min)) as usize;
    let mut visited = vec![false; rect.vertex_count()];
    let mut queue = VecDeque::new();
    for y in rect.y_min..=rect.y_max {
        let v = Vertex::new(rect.x_min, y);
        visited[idx(v)] = true;
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        if v.x == rect.x_max {
            return true;
        }
        let steps = [
            (Vertex::new(v.x + 1, v.y), Edge::horizontal(v.x, v.y)),
            (Vertex::new(v.x - 1, v.y), Edge::horizontal(v.x - 1, v.y)),
            (Vertex::new(v.x, v.y + 1), Edge::vertical(v.x, v.y)),
            (Vertex::new(v.x, v.y - 1), Edge::vertical(v.x, v.y - 1)),
        ];
        for (w, e) in steps {
            if rect.contains(w) && !visited[idx(w)] {
                let open = grid.edge_index(e).is_some_and(|i| mask >> i & 1 == 1);
                if open {
                    visited[idx(w)] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    false
}

/// Outcome of solving `P(t-open crossing) = target` for `t` on one
/// rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauSolution {
    pub tau: f64,
    /// Estimated crossing probability at `tau` (same replicates, so the
    /// estimate is exactly the common-random-numbers curve).
    pub p_at_tau: f64,
    /// Estimated crossing probability at the bracket top t = 1/2.
    pub p_at_half: f64,
    pub se: f64,
    pub target: f64,
    pub replicates: u64,
    pub steps: u32,
    /// The target sat exactly on the bracket top; `tau` = 1/2 returned as a
    /// boundary answer rather than an interior solution.
    pub bracket_edge: bool,
}

/// First time at which `rect` acquires an open horizontal crossing: the
/// min-over-paths of the max clock on the path, found by replaying edges in
/// clock order through a union-find with virtual west/east terminals.
pub fn crossing_bottleneck(times: &EdgeTimes, rect: Rect) -> Result<f64> {
    if rect.width() < 1 {
        return Err(Error::Config("crossing rectangle has zero width".into()));
    }
    if !times.grid.rect.contains_rect(&rect) {
        return Err(Error::Config("crossing rectangle pokes out of the clock grid".into()));
    }
    let cols = rect.width() + 1;
    let idx = |v: Vertex| ((v.y - rect.y_min) * cols + (v.x - rect.x_min)) as u32;
    let n = rect.vertex_count() as u32;
    let (west, east) = (n, n + 1);
    let mut parent: Vec<u32> = (0..n + 2).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for y in rect.y_min..=rect.y_max {
        let w = find(&mut parent, idx(Vertex::new(rect.x_min, y)));
        parent[w as usize] = west;
        let e = find(&mut parent, idx(Vertex::new(rect.x_max, y)));
        parent[e as usize] = east;
    }
    if rect.width() == 0 {
        return Ok(0.0);
    }
    for i in times.order() {
        let (a, b) = times.grid.edge_at(i).endpoints();
        if !(rect.contains(a) && rect.contains(b)) {
            continue;
        }
        let (ra, rb) = (find(&mut parent, idx(a)), find(&mut parent, idx(b)));
        if ra != rb {
            parent[ra as usize] = rb;
            if find(&mut parent, west) == find(&mut parent, east) {
                return Ok(times.time_at(i));
            }
        }
    }
    Err(Error::Invariant("rectangle never crossed even with every edge open".into()))
}

/// Solve `P(t-open horizontal crossing of rect) = target` for t ∈ (0, 1/2)
/// by bisection against a common-random-numbers estimate: each replicate
/// contributes its crossing bottleneck time, so the estimated curve
/// `#\{bottleneck < t\}/n` is nondecreasing and every bisection step reads
/// the same sample.
pub fn solve_crossing_threshold(
    rect: Rect,
    target: f64,
    replicates: u64,
    tolerance: f64,
    master_seed: u64,
) -> Result<TauSolution> {
    if !(tolerance > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tolerance}")));
    }
    if replicates < 1 {
        return Err(Error::Config("need at least one replicate".into()));
    }
    let grid = Grid::new(rect);
    let bottlenecks: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let times = assign_times(grid, master_seed, rep);
            crossing_bottleneck(&times, rect)
        })
        .collect::<Result<Vec<f64>>>()?;
    let phat = |t: f64| {
        bottlenecks.iter().filter(|&&b| b < t).count() as f64 / replicates as f64
    };
    let p_half = phat(0.5);
    let finish = |tau: f64, steps: u32, edge: bool| {
        let p = phat(tau);
        TauSolution {
            tau,
            p_at_tau: p,
            p_at_half: p_half,
            se: (p * (1.0 - p) / replicates as f64).sqrt(),
            target,
            replicates,
            steps,
            bracket_edge: edge,
        }
    };
    if target <= 0.0 || target > p_half {
        return Err(Error::TargetOutsideBracket { target, at_half: p_half });
    }
    if target == p_half {
        return Ok(finish(0.5, 0, true));
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    let mut steps = 0;
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if phat(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    Ok(finish(hi, steps, false))
}

/// Solve for the early threshold: the t at which the neck rectangle R'
/// crosses with probability `target` (normally the estimated alpha over 2).
pub fn solve_tau(
    geometry: &ProofGeometry,
    target: f64,
    replicates: u64,
    tolerance: f64,
    master_seed: u64,
) -> Result<TauSolution> {
    solve_crossing_threshold(geometry.r_prime, target, replicates, tolerance, master_seed)
}

// ---------------------------------------------------------------------------
// the six events

/// Evaluation of the six confinement events on one configuration, with the
/// extracted circuits. The circuit fields are present exactly when their
/// events hold; `e_iv`–`e_vi` are false whenever a prerequisite circuit is
/// missing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventReport {
    pub e_i: bool,
    pub e_ii: bool,
    pub e_iii: bool,
    pub e_iv: bool,
    pub e_v: bool,
    pub e_vi: bool,
    pub gamma: Option<Circuit>,
    pub pi: Option<Circuit>,
    pub alpha_hat: f64,
    pub tau: f64,
}

impl EventReport {
    pub fn events(&self) -> [bool; 6] {
        [self.e_i, self.e_ii, self.e_iii, self.e_iv, self.e_v, self.e_vi]
    }

    pub fn all_hold(&self) -> bool {
        self.events().iter().all(|&e| e)
    }
}

fn check_inputs(times: &EdgeTimes, params: &LemmaParams, g: &ProofGeometry) -> Result<()> {
    if g.params != params.proof || g.n != params.n {
        return Err(Error::Config("geometry was built from different parameters".into()));
    }
    if times.grid != g.window.grid() {
        return Err(Error::Config("clock grid does not match the geometry window".into()));
    }
    Ok(())
}

/// Evaluate the six events at thresholds (`tau`, 1/2):
///
/// i.   a tau-open circuit in the annulus between the b- and c-boxes;
///      `gamma` is the innermost one.
/// ii.  a 1/2-closed dual circuit between the c- and a-boxes.
/// iii. a 1/2-closed dual circuit between the enlarged hull and the hull;
///      `pi` is the outermost one.
/// iv.  1/2-closed dual paths inside each corridor (north and south)
///      connecting `gamma` to `pi`.
/// v.   a 1/2-open path in the feeder R from its east column to `gamma`.
/// vi.  no tau-open horizontal crossing of the part of the neck R' enclosed
///      by `pi`.
///
/// Each report is self-checked: `gamma` must enclose the c-box and `pi` must
/// enclose the whole hull, or an invariant error is returned.
pub fn check_events(
    times: &EdgeTimes,
    params: &LemmaParams,
    geometry: &ProofGeometry,
) -> Result<EventReport> {
    check_inputs(times, params, geometry)?;
    let g = geometry;
    let tau = params.tau;

    let gamma = innermost_open_circuit(g.box_b, g.box_c, times, tau)?;
    if let Some(c) = &gamma {
        assert_encloses_box(c, g.box_c, true, "the innermost early circuit", "the middle box")?;
    }

    let e_ii = has_closed_dual_circuit(
        &Region::from_rect(g.box_c),
        &Region::from_rect(g.box_a),
        times,
        0.5,
    )?;

    let pi = outermost_closed_dual_circuit(&g.lambda_prime, &g.lambda, times, 0.5)?;
    let mut pi_interior: Option<Vec<Vertex>> = None;
    if let Some(c) = &pi {
        let interior = interior_vertices(c);
        let inside: HashSet<Vertex> = interior.iter().copied().collect();
        for r in &g.lambda.rects {
            for v in r.vertices() {
                if !inside.contains(&v) {
                    return Err(Error::Invariant(format!(
                        "the outermost closed dual circuit fails to enclose the hull at ({},{})",
                        v.x, v.y
                    )));
                }
            }
        }
        pi_interior = Some(interior);
    }

    let e_iv = match (&gamma, &pi) {
        (Some(ga), Some(p)) => {
            has_closed_dual_path_connecting(g.l1, ga, p, times, 0.5)?
                && has_closed_dual_path_connecting(g.l2, ga, p, times, 0.5)?
        }
        _ => false,
    };

    let e_v = match &gamma {
        Some(ga) => open_path_from_east_to(g.r, ga, times, 0.5)?,
        None => false,
    };

    let e_vi = match &pi_interior {
        Some(interior) => {
            let neck: Vec<Vertex> =
                interior.iter().copied().filter(|v| g.r_prime.contains(*v)).collect();
            !has_horizontal_open_crossing_among(&neck, times, tau)?
        }
        None => false,
    };

    Ok(EventReport {
        e_i: gamma.is_some(),
        e_ii,
        e_iii: pi.is_some(),
        e_iv,
        e_v,
        e_vi,
        gamma,
        pi,
        alpha_hat: params.alpha_hat,
        tau,
    })
}

/// The circuit must enclose every vertex of `target` (vertices on a primal
/// circuit itself count as enclosed when `allow_on_curve` is set).
fn assert_encloses_box(
    c: &Circuit,
    target: Rect,
    allow_on_curve: bool,
    who: &str,
    what: &str,
) -> Result<()> {
    let mut inside: HashSet<Vertex> = interior_vertices(c).into_iter().collect();
    if allow_on_curve {
        if let Circuit::Primal { vertices, .. } = c {
            inside.extend(vertices.iter().copied());
        }
    }
    for v in target.vertices() {
        if !inside.contains(&v) {
            return Err(Error::Invariant(format!(
                "{who} fails to enclose {what} at ({},{})",
                v.x, v.y
            )));
        }
    }
    Ok(())
}

/// t-open path inside `rect` from its easternmost vertex column to any
/// vertex of the (primal) circuit.
fn open_path_from_east_to(rect: Rect, circuit: &Circuit, times: &EdgeTimes, t: f64) -> Result<bool> {
    let Circuit::Primal { vertices, .. } = circuit else {
        return Err(Error::Config("expected a primal circuit as the path target".into()));
    };
    let targets: HashSet<Vertex> = vertices.iter().copied().collect();
    let cols = rect.width() + 1;
    let idx = |v: Vertex| ((v.y - rect.y_min) * cols + (v.x - rect.x_min)) as usize;
    let mut visited = vec![false; rect.vertex_count()];
    let mut queue = VecDeque::new();
    for y in rect.y_min..=rect.y_max {
        let v = Vertex::new(rect.x_max, y);
        visited[idx(v)] = true;
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        if targets.contains(&v) {
            return Ok(true);
        }
        let steps = [
            (Vertex::new(v.x + 1, v.y), Edge::horizontal(v.x, v.y)),
            (Vertex::new(v.x - 1, v.y), Edge::horizontal(v.x - 1, v.y)),
            (Vertex::new(v.x, v.y + 1), Edge::vertical(v.x, v.y)),
            (Vertex::new(v.x, v.y - 1), Edge::vertical(v.x, v.y - 1)),
        ];
        for (w, e) in steps {
            if rect.contains(w) && !visited[idx(w)] && times.time(e)? < t {
                visited[idx(w)] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// the implication

/// Engine verdict for one all-events configuration: the origin's final
/// cluster diameter against the band implied by the events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImplicationVerdict {
    pub pass: bool,
    pub diameter: i64,
    pub band_lo: i64,
    pub band_hi: i64,
    pub frozen: bool,
    pub cluster_size: u32,
}

/// Run the freezing engine on the same clocks and test the conclusion: the
/// origin's final diameter must lie in the rounded band `[k_a, k_b]`. (The
/// events actually force the tighter `[k_c - 2, k_b - 2]`: the cluster fills
/// the early circuit's interior, which contains the middle box, and can
/// never touch the circuit itself.)
pub fn verify_implication(
    times: &EdgeTimes,
    params: &LemmaParams,
    geometry: &ProofGeometry,
) -> Result<ImplicationVerdict> {
    check_inputs(times, params, geometry)?;
    let state = run_frozen_grid(times, NParam::Finite(params.n))?;
    let stats = state.origin_stats()?;
    let (band_lo, band_hi) = (geometry.k_a, geometry.k_b);
    Ok(ImplicationVerdict {
        pass: band_lo <= stats.diameter && stats.diameter <= band_hi,
        diameter: stats.diameter,
        band_lo,
        band_hi,
        frozen: stats.frozen,
        cluster_size: stats.size,
    })
}

// ---------------------------------------------------------------------------
// planting: building configurations where the events hold

const PLANT_SALT: u64 = 0x7c3a_9d11_5b6e_21f7;

/// Where the planted structure goes: the ring scale of the early circuit
/// and the feeder path's row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlantChoice {
    pub k_ring: i64,
    pub path_row: i64,
}

/// Fixed middle-of-the-annulus choice used by the deterministic witness.
pub fn witness_choice(g: &ProofGeometry) -> Result<PlantChoice> {
    if g.k_b < g.k_c + 4 {
        return Err(Error::Config("annulus too thin to hold a planted ring".into()));
    }
    let mut k_ring = (g.k_c + g.k_b) / 2;
    k_ring -= k_ring & 1;
    Ok(PlantChoice { k_ring: k_ring.clamp(g.k_c + 2, g.k_b - 2), path_row: 0 })
}

/// Randomized choice for sampled plants: ring scale uniform over the even
/// scales comfortably inside the annulus, path row uniform over the feeder
/// rows.
pub fn sampled_choice(g: &ProofGeometry, master_seed: u64, replicate: u64) -> Result<PlantChoice> {
    let (k_lo, k_hi) = (g.k_c + 4, g.k_b - 4);
    if k_lo > k_hi {
        return Err(Error::Config("annulus too thin to hold a planted ring".into()));
    }
    let count = ((k_hi - k_lo) / 2 + 1) as u64;
    let k_ring = k_lo + 2 * (stream_u64(master_seed ^ PLANT_SALT, replicate, 0) % count) as i64;
    let rows = (g.r.height() + 1) as u64;
    let path_row =
        g.r.y_min + (stream_u64(master_seed ^ PLANT_SALT, replicate, 1) % rows) as i64;
    Ok(PlantChoice { k_ring, path_row })
}

/// Overwrite the clocks that build the event structure:
///
/// * an early-open ring at the chosen scale (values well below `tau`);
/// * a warm feeder path along the chosen row from just east of the middle
///   box to the east end of R (values strictly between `tau` and 1/2, so
///   the path feeds the ring before 1/2 but never crosses the neck early);
/// * optionally, cold guards (values above 1/2): a dual ring between the a-
///   and c-boxes, the exit shell one step off the hull, and both corridors
///   filled — the structures the closed-side events need, left to luck
///   otherwise.
///
/// Plant order matters: guards first, ring and path last, so the open
/// structure punches through the corridors rather than the other way round.
fn apply_plants(
    times: &mut EdgeTimes,
    g: &ProofGeometry,
    tau: f64,
    choice: PlantChoice,
    cold_guards: bool,
    mut next: impl FnMut() -> f64,
) -> Result<()> {
    if !(tau > 0.0 && tau < 0.5) {
        return Err(Error::Config(format!("tau must lie in (0, 1/2), got {tau}")));
    }
    let grid = times.grid;
    if cold_guards {
        let mut k_mid = (g.k_a + g.k_c) / 2;
        k_mid -= k_mid & 1;
        let k_mid = k_mid.clamp(g.k_a, g.k_c - 2);
        let mut cold = Vec::new();
        cold.extend(region_exit_edges(&Region::from_rect(build_box(k_mid)?), grid));
        cold.extend(region_exit_edges(&g.lambda.dilate(1), grid));
        for corridor in [g.l1, g.l2] {
            cold.extend(rect_internal_edges(corridor));
        }
        for e in cold {
            times.set_time(e, 0.5 + 0.4999 * next())?;
        }
    }
    for e in box_ring_edges(choice.k_ring)? {
        times.set_time(e, tau * (0.05 + 0.9 * next()))?;
    }
    let (path_lo, path_span) = (tau + 0.1 * (0.5 - tau), 0.8 * (0.5 - tau));
    for x in (g.k_c / 2 + 1)..g.r.x_max {
        times.set_time(Edge::horizontal(x, choice.path_row), path_lo + path_span * next())?;
    }
    Ok(())
}

fn rect_internal_edges(r: Rect) -> Vec<Edge> {
    let mut out = Vec::new();
    for y in r.y_min..=r.y_max {
        for x in r.x_min..r.x_max {
            out.push(Edge::horizontal(x, y));
        }
    }
    for x in r.x_min..=r.x_max {
        for y in r.y_min..r.y_max {
            out.push(Edge::vertical(x, y));
        }
    }
    out
}

fn plant_value_stream(master_seed: u64, replicate: u64) -> impl FnMut() -> f64 {
    let mut counter = 1u64;
    move || {
        counter += 1;
        u01(stream_u64(master_seed ^ PLANT_SALT, replicate, counter))
    }
}

/// Deterministic all-events witness: every background clock pushed above
/// 1/2 (so the closed-side events hold for free), then the ring and feeder
/// planted at a fixed mid-annulus position.
pub fn plant_witness(g: &ProofGeometry, tau: f64, master_seed: u64) -> Result<EdgeTimes> {
    let grid = g.window.grid();
    let base = assign_times(grid, master_seed, 0);
    let closed: Vec<f64> = base.values().iter().map(|u| 0.5 + 0.4999 * u).collect();
    let mut times = EdgeTimes::from_values(grid, closed)?;
    apply_plants(&mut times, g, tau, witness_choice(g)?, false, plant_value_stream(master_seed, 0))?;
    Ok(times)
}

/// One biased sample: uniform background clocks with the event structure
/// planted on top (ring, feeder, cold guards). The bias only steers the
/// search; every event is still evaluated honestly on the full
/// configuration.
pub fn plant_sample(
    g: &ProofGeometry,
    tau: f64,
    master_seed: u64,
    replicate: u64,
) -> Result<EdgeTimes> {
    let mut times = assign_times(g.window.grid(), master_seed, replicate);
    let choice = sampled_choice(g, master_seed, replicate)?;
    apply_plants(&mut times, g, tau, choice, true, plant_value_stream(master_seed, replicate))?;
    Ok(times)
}

// ---------------------------------------------------------------------------
// configuration search

/// How samples are drawn when hunting for all-events configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchStrategy {
    /// Plain independent replicates. The events are rare; expect a long
    /// hunt.
    Uniform,
    /// Replicates with the event structure planted (see [`plant_sample`]).
    Planted,
}

/// One examined configuration: its event report, and the engine verdict
/// when every event held.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchSample {
    pub replicate: u64,
    pub report: EventReport,
    pub verdict: Option<ImplicationVerdict>,
}

/// Search outcome over a batch of replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub attempts: u64,
    /// Samples where all six events held.
    pub hits: u64,
    /// Hits whose engine verdict passed.
    pub passes: u64,
    pub samples: Vec<SearchSample>,
}

/// Evaluate `attempts` replicates (in parallel), reporting every sample and
/// running the engine on each all-events hit. Results are deterministic in
/// (`params`, `geometry`, `strategy`, `attempts`, `master_seed`) and
/// independent of thread count.
pub fn run_search(
    params: &LemmaParams,
    geometry: &ProofGeometry,
    strategy: SearchStrategy,
    attempts: u64,
    master_seed: u64,
) -> Result<SearchOutcome> {
    if attempts < 1 {
        return Err(Error::Config("need at least one attempt".into()));
    }
    let mut samples: Vec<SearchSample> = (0..attempts)
        .into_par_iter()
        .map(|rep| -> Result<SearchSample> {
            let times = match strategy {
                SearchStrategy::Uniform => assign_times(geometry.window.grid(), master_seed, rep),
                SearchStrategy::Planted => plant_sample(geometry, params.tau, master_seed, rep)?,
            };
            let report = check_events(&times, params, geometry)?;
            let verdict = if report.all_hold() {
                Some(verify_implication(&times, params, geometry)?)
            } else {
                None
            };
            Ok(SearchSample { replicate: rep, report, verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by_key(|s| s.replicate);
    let hits = samples.iter().filter(|s| s.report.all_hold()).count() as u64;
    let passes = samples.iter().filter(|s| s.verdict.is_some_and(|v| v.pass)).count() as u64;
    Ok(SearchOutcome { attempts, hits, passes, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Window;

    fn forced_params() -> ProofParams {
        ProofParams::new(0.25, 0.5, 0.75, 0.8, 0.05)
    }

    fn forced_geometry(n: i64) -> ProofGeometry {
        crate::lattice::build_proof_geometry(forced_params(), n, Window::new(4 * n).unwrap())
            .unwrap()
    }

    #[test]
    fn param_validation_matches_arithmetic() {
        assert!(validate_params(0.25, 0.5, 0.75, 0.8, 0.05).is_empty());
        // Raising the margin term to 0.1 tips the slack inequality:
        // 0.8 + 0.125 + 0.1 = 1.025 >= 1.
        let v = validate_params(0.25, 0.5, 0.75, 0.8, 0.1);
        assert_eq!(v, vec![ParamViolation::ReachWithMarginBelowOne]);
        // 0.5 + (0.75+0.5)/2 = 1.125 > 1: fine.
        assert!(validate_params(0.25, 0.5, 0.75, 0.5, 0.05).is_empty());
        // Dropping l to 0.3 leaves the far reach short: 0.3 + 0.625 < 1.
        let v = validate_params(0.25, 0.5, 0.75, 0.3, 0.05);
        assert_eq!(v, vec![ParamViolation::ReachAboveOne]);
    }

    #[test]
    fn wide_neck_parameters_build_at_scale_128() {
        // The neck R' is the westmost 4d of the protrusion, whose width is
        // roughly l*n, so admissible parameters additionally need l >= 4*eps
        // before the geometry discretizes. This tuple keeps the feeder R at
        // aspect ~4.6 (crossing probability still measurable) while leaving
        // a neck wide enough to exist.
        let params = ProofParams::new(0.25, 0.6, 0.7, 0.6, 0.14);
        assert!(params.violations().is_empty());
        let g =
            crate::lattice::build_proof_geometry(params, 128, Window::new(512).unwrap()).unwrap();
        assert_eq!((g.k_a, g.k_c, g.k_b, g.d), (32, 76, 90, 18));
        assert_eq!(g.r, Rect::new(38, 121, -9, 9));
        assert_eq!(g.r_prime, Rect::new(63, 135, -27, 27));

        // Same inequalities but a neck thinner than the corridor scale:
        // admissible as real-number parameters, impossible to discretize.
        let thin = ProofParams::new(0.25, 0.5, 0.75, 0.4, 0.2);
        assert!(thin.violations().is_empty());
        let err = crate::lattice::build_proof_geometry(thin, 128, Window::new(512).unwrap());
        assert!(matches!(err.unwrap_err(), Error::DegenerateGeometry(_)));
    }

    #[test]
    fn single_edge_crossing_probability_is_one_half() {
        let rect = Rect::new(0, 1, 0, 0);
        let (p, se) = estimate_crossing_probability(rect, 0.5, 4000, 11).unwrap();
        assert!(se > 0.0 && (p - 0.5).abs() <= 3.0 * se, "p={p}, se={se}");
    }

    #[test]
    fn estimate_matches_exhaustive_enumeration() {
        // 4x3 vertices, 17 edges: small enough to enumerate exactly.
        let rect = Rect::new(0, 3, 0, 2);
        let exact = exact_crossing_probability(rect, 0.5).unwrap();
        assert!(exact > 0.0 && exact < 1.0);
        let (p, se) = estimate_crossing_probability(rect, 0.5, 4000, 12).unwrap();
        assert!((p - exact).abs() <= 3.0 * se + 1e-9, "p={p}, exact={exact}, se={se}");
        // Too large to enumerate: refused.
        assert!(exact_crossing_probability(Rect::new(0, 10, 0, 10), 0.5).is_err());
    }

    #[test]
    fn two_to_one_rectangles_stay_in_the_critical_band() {
        for l in [8i64, 16] {
            let rect = Rect::new(0, 2 * l, 0, l);
            let (p, _) = estimate_crossing_probability(rect, 0.5, 600, 13).unwrap();
            assert!(p > 0.05 && p < 0.95, "L={l}: p={p}");
        }
    }

    #[test]
    fn solver_recovers_identity_on_single_edge() {
        // One edge: crossing probability at t is exactly t.
        let rect = Rect::new(0, 1, 0, 0);
        let sol = solve_crossing_threshold(rect, 0.3, 4000, 1e-3, 14).unwrap();
        assert!(!sol.bracket_edge);
        assert!(sol.tau < 0.5);
        assert!((sol.tau - 0.3).abs() < 0.03, "tau={}", sol.tau);
        assert!(sol.steps <= (0.5f64 / 1e-3).log2().ceil() as u32);
        assert!((sol.p_at_tau - 0.3).abs() <= 1e-3 + 2.0 * sol.se + 1.0 / 4000.0);
    }

    #[test]
    fn solver_is_monotone_in_target_and_respects_bracket() {
        let rect = Rect::new(0, 2, 0, 1);
        let taus: Vec<f64> = [0.15, 0.3, 0.45]
            .iter()
            .map(|&tgt| solve_crossing_threshold(rect, tgt, 3000, 1e-3, 15).unwrap().tau)
            .collect();
        assert!(taus[0] <= taus[1] && taus[1] <= taus[2], "{taus:?}");

        // Asking for more than the bracket top can deliver fails loudly.
        let err = solve_crossing_threshold(rect, 0.99, 3000, 1e-3, 15).unwrap_err();
        match err {
            Error::TargetOutsideBracket { target, at_half } => {
                assert_eq!(target, 0.99);
                assert!((at_half - 0.5).abs() < 0.1);
            }
            other => panic!("expected bracket error, got {other:?}"),
        }

        // Asking for exactly the bracket top is the boundary answer.
        let probe = solve_crossing_threshold(rect, 0.3, 3000, 1e-3, 15).unwrap();
        let edge = solve_crossing_threshold(rect, probe.p_at_half, 3000, 1e-3, 15).unwrap();
        assert!(edge.bracket_edge);
        assert_eq!(edge.tau, 0.5);
    }

    #[test]
    fn solver_matches_exact_polynomial_root() {
        // 7 edges: p(t) computable exactly, root found by deterministic
        // bisection, then compared against the Monte Carlo solver.
        let rect = Rect::new(0, 2, 0, 1);
        let target = 0.3;
        let (mut lo, mut hi) = (0.0f64, 0.5f64);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if exact_crossing_probability(rect, mid).unwrap() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        let sol = solve_crossing_threshold(rect, target, 8000, 1e-4, 16).unwrap();
        assert!((sol.tau - root).abs() <= 0.02, "tau={}, root={root}", sol.tau);
    }

    #[test]
    fn alpha_estimate_runs_on_real_geometry() {
        let g = forced_geometry(32);
        let (p, se) = estimate_alpha(&g, 400, 17).unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert!((se - (p * (1.0 - p) / 400.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn forced_thresholds_pin_the_first_three_events() {
        let g = forced_geometry(64);
        let params = LemmaParams::new(forced_params(), 64, 0.2, 0.0).unwrap();
        let grid = g.window.grid();

        // Nothing open at 1/2: no early circuit, both closed circuits free.
        let cold = EdgeTimes::from_values(grid, vec![0.9; grid.edge_count()]).unwrap();
        let report = check_events(&cold, &params, &g).unwrap();
        assert!(!report.e_i && report.e_ii && report.e_iii);
        assert!(report.gamma.is_none() && report.pi.is_some());
        assert!(!report.e_iv && !report.e_v);

        // Everything open immediately: early circuit yes, insulation no.
        let hot = EdgeTimes::from_values(grid, vec![0.01; grid.edge_count()]).unwrap();
        let report = check_events(&hot, &params, &g).unwrap();
        assert!(report.e_i && !report.e_ii && !report.e_iii);
        assert!(report.gamma.is_some() && report.pi.is_none());
    }

    #[test]
    fn witness_satisfies_all_events_and_the_implication() {
        let g = forced_geometry(64);
        let params = LemmaParams::new(forced_params(), 64, 0.2, 0.5).unwrap();
        let times = plant_witness(&g, params.tau, 99).unwrap();

        let report = check_events(&times, &params, &g).unwrap();
        assert!(report.all_hold(), "events: {:?}", report.events());

        let verdict = verify_implication(&times, &params, &g).unwrap();
        assert!(verdict.pass, "{verdict:?}");
        assert_eq!((verdict.band_lo, verdict.band_hi), (16, 48));
        // The witness is fully deterministic: the ring at scale 40 fences
        // the origin cluster into the 39x39 block just inside it, minus the
        // frozen feeder stub.
        assert_eq!(verdict.diameter, 38);
        assert!(!verdict.frozen);

        // The report serializes with the circuits inline.
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"e_i\":true"));
        assert!(json.contains("\"kind\":\"primal\""));
        assert!(json.contains("\"kind\":\"dual\""));
    }

    #[test]
    fn planted_search_finds_hits_and_they_all_pass() {
        let g = forced_geometry(64);
        let params = LemmaParams::new(forced_params(), 64, 0.2, 0.0).unwrap();
        let outcome = run_search(&params, &g, SearchStrategy::Planted, 4, 2024).unwrap();
        assert_eq!(outcome.attempts, 4);
        assert!(outcome.hits >= 3, "hits={}", outcome.hits);
        assert_eq!(outcome.passes, outcome.hits);
        for s in &outcome.samples {
            if let Some(v) = s.verdict {
                assert!(v.pass, "replicate {}: {v:?}", s.replicate);
            }
        }
    }

    #[test]
    fn search_is_deterministic() {
        let g = forced_geometry(64);
        let params = LemmaParams::new(forced_params(), 64, 0.2, 0.0).unwrap();
        let a = run_search(&params, &g, SearchStrategy::Planted, 2, 7).unwrap();
        let b = run_search(&params, &g, SearchStrategy::Planted, 2, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn input_mismatches_are_rejected() {
        let g = forced_geometry(64);
        let params = LemmaParams::new(forced_params(), 64, 0.2, 0.0).unwrap();
        let wrong_grid = Window::new(128).unwrap().grid();
        let times = assign_times(wrong_grid, 1, 0);
        assert!(matches!(check_events(&times, &params, &g).unwrap_err(), Error::Config(_)));

        let other = LemmaParams::new(forced_params(), 32, 0.2, 0.0).unwrap();
        let right = assign_times(g.window.grid(), 1, 0);
        assert!(matches!(check_events(&right, &other, &g).unwrap_err(), Error::Config(_)));

        assert!(LemmaParams::new(forced_params(), 64, 0.7, 0.0).is_err());
        assert!(LemmaParams::new(forced_params(), 0, 0.2, 0.0).is_err());
    }
}
