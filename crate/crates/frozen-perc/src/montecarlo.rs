//! Replicate orchestration: sweeps over the freezing scale, interval
//! estimators with Wilson confidence bounds, and diameter histograms.
//!
//! Every replicate is an independent clock assignment (one substream per
//! replicate id, disjoint across the scales of a sweep), and aggregation is
//! a sum of integer counts — commutative and associative — so results are
//! bit-identical no matter how many worker threads run or how the scheduler
//! interleaves them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::clocks::assign_times;
use crate::engine::{run_frozen_grid, NParam};
use crate::lattice::Window;
use crate::{Error, Result};

/// 97.5% normal quantile: Wilson intervals below are all at the 95% level.
pub const WILSON_Z: f64 = 1.959963984540054;

/// What to do with replicates whose origin cluster ends within one freezing
/// scale of the window boundary (truncation suspects: on the infinite
/// lattice they might have kept growing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPolicy {
    /// Count every replicate.
    Include,
    /// Drop the suspects from the estimators (`excluded_boundary` reports
    /// how many).
    Exclude,
    /// Emit two rows per scale: the included estimate first, the excluded
    /// one second.
    Both,
}

/// One orchestration request: which scales, how big a window, how many
/// replicates, and how to treat boundary suspects.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plan {
    pub scales: Vec<NParam>,
    /// Window side = multiplier x scale (even by construction when the
    /// scale is even; odd scales need an even product).
    pub multiplier: i64,
    /// Explicit window side, overriding the multiplier; required for the
    /// unbounded sentinel, which has no scale to multiply.
    pub window_side: Option<i64>,
    pub replicates: u64,
    pub master_seed: u64,
    /// Diameter interval (a*N, b*N) for the interval estimator.
    pub a: f64,
    pub b: f64,
    pub boundary: BoundaryPolicy,
}

impl Plan {
    /// Single-scale plan with the default window multiplier 8, interval
    /// (N/4, 3N/4), and every replicate counted.
    pub fn single(n: NParam, replicates: u64, master_seed: u64) -> Plan {
        Plan {
            scales: vec![n],
            multiplier: 8,
            window_side: None,
            replicates,
            master_seed,
            a: 0.25,
            b: 0.75,
            boundary: BoundaryPolicy::Include,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scales.is_empty() {
            return Err(Error::Config("plan needs at least one scale".into()));
        }
        for n in &self.scales {
            n.validate()?;
        }
        if self.replicates < 1 {
            return Err(Error::Config("plan needs at least one replicate".into()));
        }
        if self.multiplier < 2 {
            return Err(Error::Config(format!(
                "window multiplier must be at least 2, got {}",
                self.multiplier
            )));
        }
        if !(self.a > 0.0 && self.a < self.b) {
            return Err(Error::Config(format!(
                "diameter interval needs 0 < a < b, got a={}, b={}",
                self.a, self.b
            )));
        }
        for n in &self.scales {
            self.window_for(*n)?;
        }
        Ok(())
    }

    /// The window a given scale runs in.
    pub fn window_for(&self, n: NParam) -> Result<Window> {
        match (self.window_side, n) {
            (Some(side), _) => Window::new(side),
            (None, NParam::Finite(k)) => Window::new(self.multiplier * k),
            (None, NParam::Unbounded) => Err(Error::Config(
                "the unbounded sentinel needs an explicit window side".into(),
            )),
        }
    }
}

fn serialize_scale<S: Serializer>(n: &NParam, s: S) -> std::result::Result<S::Ok, S::Error> {
    match n {
        NParam::Finite(k) => s.serialize_i64(*k),
        NParam::Unbounded => s.serialize_str("unbounded"),
    }
}

/// Point estimates and 95% Wilson bounds for one scale (and one boundary
/// treatment). `replicates` counts what the estimators used;
/// `excluded_boundary` counts what the boundary policy dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(serialize_with = "serialize_scale")]
    pub n: NParam,
    pub window: i64,
    pub replicates: u64,
    /// P(diameter strictly inside (a*N, b*N)).
    pub p_interval: f64,
    pub p_interval_lo: f64,
    pub p_interval_hi: f64,
    /// P(diameter >= N); identically 0 for the unbounded sentinel.
    pub p_giant: f64,
    pub p_giant_lo: f64,
    pub p_giant_hi: f64,
    /// P(diameter = 2N-1), the hard cap.
    pub p_max: f64,
    pub excluded_boundary: u64,
}

/// 95% Wilson score interval; always contains the point estimate.
pub fn wilson(successes: u64, n: u64) -> (f64, f64, f64) {
    assert!(n > 0 && successes <= n);
    let (s, n) = (successes as f64, n as f64);
    let p = s / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the corners, center - half is 0 (resp. center + half is 1) in real
    // arithmetic; pin them so zero-success bounds are exactly zero.
    let lo = if p == 0.0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (center + half).min(1.0) };
    (p, lo, hi)
}

/// Per-replicate facts the estimators need.
#[derive(Debug, Clone, Copy)]
struct Outcome {
    diameter: i64,
    /// Origin bbox within one scale of the window boundary.
    suspect: bool,
}

fn replicate_outcome(plan: &Plan, n: NParam, window: Window, rep_id: u64) -> Result<Outcome> {
    let times = assign_times(window.grid(), plan.master_seed, rep_id);
    let state = run_frozen_grid(&times, n)?;
    let stats = state.origin_stats()?;
    match n {
        NParam::Finite(k) => {
            if stats.diameter >= 2 * k {
                return Err(Error::Invariant(format!(
                    "diameter {} breaches the 2N-1 cap at N={k}",
                    stats.diameter
                )));
            }
            Ok(Outcome { diameter: stats.diameter, suspect: stats.boundary_margin < k })
        }
        NParam::Unbounded => {
            if stats.diameter != window.side {
                return Err(Error::Invariant(format!(
                    "unbounded run left the origin cluster at diameter {} in a window of side {}",
                    stats.diameter, window.side
                )));
            }
            Ok(Outcome { diameter: stats.diameter, suspect: false })
        }
    }
}

/// Integer tallies; merging is plain addition, so folds commute.
#[derive(Debug, Clone, Default)]
struct Tally {
    kept: u64,
    excluded: u64,
    interval: u64,
    giant: u64,
    max_diam: u64,
    bins: Vec<u64>,
}

impl Tally {
    fn new() -> Tally {
        Tally { bins: vec![0; HIST_BINS], ..Tally::default() }
    }

    fn add(&mut self, o: Outcome, plan: &Plan, n: NParam, exclude_suspects: bool) {
        if exclude_suspects && o.suspect {
            self.excluded += 1;
            return;
        }
        self.kept += 1;
        if let NParam::Finite(k) = n {
            let d = o.diameter;
            if (d as f64) > plan.a * k as f64 && (d as f64) < plan.b * k as f64 {
                self.interval += 1;
            }
            if d >= k {
                self.giant += 1;
            }
            if d == 2 * k - 1 {
                self.max_diam += 1;
            }
            self.bins[((d * HIST_BINS as i64 / 2) / k) as usize] += 1;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.kept += other.kept;
        self.excluded += other.excluded;
        self.interval += other.interval;
        self.giant += other.giant;
        self.max_diam += other.max_diam;
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self
    }
}

fn tally_scale(
    plan: &Plan,
    n: NParam,
    exclude_suspects: bool,
    rep_offset: u64,
) -> Result<(Tally, Window)> {
    let window = plan.window_for(n)?;
    let tally = (rep_offset..rep_offset + plan.replicates)
        .into_par_iter()
        .map(|rep_id| -> Result<Tally> {
            let o = replicate_outcome(plan, n, window, rep_id)?;
            let mut t = Tally::new();
            t.add(o, plan, n, exclude_suspects);
            Ok(t)
        })
        .try_reduce(Tally::new, |a, b| Ok(a.merge(b)))?;
    Ok((tally, window))
}

fn row_from_tally(n: NParam, window: Window, t: &Tally) -> Result<SweepRow> {
    if t.kept == 0 {
        return Err(Error::Config(
            "boundary policy excluded every replicate; enlarge the window".into(),
        ));
    }
    let (p_interval, p_interval_lo, p_interval_hi) = wilson(t.interval, t.kept);
    let (p_giant, p_giant_lo, p_giant_hi) = wilson(t.giant, t.kept);
    let (p_max, _, _) = wilson(t.max_diam, t.kept);
    Ok(SweepRow {
        n,
        window: window.side,
        replicates: t.kept,
        p_interval,
        p_interval_lo,
        p_interval_hi,
        p_giant,
        p_giant_lo,
        p_giant_hi,
        p_max,
        excluded_boundary: t.excluded,
    })
}

/// All rows for one scale under the plan's boundary policy (two rows for
/// [`BoundaryPolicy::Both`]: included first, excluded second). The Both
/// case simply folds twice — outcomes are deterministic per replicate id,
/// so both passes see identical samples.
fn scale_rows(plan: &Plan, n: NParam, rep_offset: u64) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    match plan.boundary {
        BoundaryPolicy::Include => {
            let (t, w) = tally_scale(plan, n, false, rep_offset)?;
            rows.push(row_from_tally(n, w, &t)?);
        }
        BoundaryPolicy::Exclude => {
            let (t, w) = tally_scale(plan, n, true, rep_offset)?;
            rows.push(row_from_tally(n, w, &t)?);
        }
        BoundaryPolicy::Both => {
            let (ti, w) = tally_scale(plan, n, false, rep_offset)?;
            rows.push(row_from_tally(n, w, &ti)?);
            let (te, w) = tally_scale(plan, n, true, rep_offset)?;
            rows.push(row_from_tally(n, w, &te)?);
        }
    }
    Ok(rows)
}

/// Estimators for a single-scale plan.
pub fn run_replicates(plan: &Plan) -> Result<SweepRow> {
    plan.validate()?;
    if plan.scales.len() != 1 {
        return Err(Error::Config("run_replicates wants exactly one scale; use sweep".into()));
    }
    if plan.boundary == BoundaryPolicy::Both {
        return Err(Error::Config("boundary policy 'both' produces two rows; use sweep".into()));
    }
    Ok(scale_rows(plan, plan.scales[0], 0)?.remove(0))
}

/// One or two rows per scale, in plan order. All scales share the master
/// seed but consume disjoint replicate-id ranges, so extending the scale
/// list never changes earlier rows.
pub fn sweep(plan: &Plan) -> Result<Vec<SweepRow>> {
    plan.validate()?;
    let mut rows = Vec::new();
    for (i, n) in plan.scales.iter().enumerate() {
        rows.extend(scale_rows(plan, *n, i as u64 * plan.replicates)?);
    }
    Ok(rows)
}

pub const HIST_BINS: usize = 40;

/// Binned law of diameter/N over [0, 2): bin k covers [k/20, (k+1)/20).
/// The cap keeps all mass strictly below 2, so 40 bins always suffice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiameterHistogram {
    #[serde(serialize_with = "serialize_scale")]
    pub n: NParam,
    pub window: i64,
    pub replicates: u64,
    pub excluded_boundary: u64,
    pub counts: Vec<u64>,
}

impl DiameterHistogram {
    /// Normalized mass per bin; sums to 1.
    pub fn mass(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.replicates as f64).collect()
    }
}

/// Histogram of final origin diameters for a single finite scale.
pub fn diameter_histogram(plan: &Plan) -> Result<DiameterHistogram> {
    plan.validate()?;
    if plan.scales.len() != 1 {
        return Err(Error::Config("histograms take exactly one scale".into()));
    }
    let n = plan.scales[0];
    if n == NParam::Unbounded {
        return Err(Error::Config("diameter/N is undefined for the unbounded sentinel".into()));
    }
    let exclude = match plan.boundary {
        BoundaryPolicy::Include => false,
        BoundaryPolicy::Exclude => true,
        BoundaryPolicy::Both => {
            return Err(Error::Config("histograms take a single boundary treatment".into()))
        }
    };
    let (t, w) = tally_scale(plan, n, exclude, 0)?;
    if t.kept == 0 {
        return Err(Error::Config(
            "boundary policy excluded every replicate; enlarge the window".into(),
        ));
    }
    Ok(DiameterHistogram {
        n,
        window: w.side,
        replicates: t.kept,
        excluded_boundary: t.excluded,
        counts: t.bins,
    })
}

// ---------------------------------------------------------------------------
// tabular output

/// Fixed CSV header for sweep rows.
pub const SWEEP_CSV_HEADER: &str = "N,window,replicates,p_interval,p_interval_lo,p_interval_hi,\
                                    p_giant,p_giant_lo,p_giant_hi,p_max,excluded_boundary";

fn scale_label(n: NParam) -> String {
    match n {
        NParam::Finite(k) => k.to_string(),
        NParam::Unbounded => "unbounded".into(),
    }
}

/// Render rows to CSV with the fixed column order and six-decimal
/// probabilities. Byte-identical for identical rows.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}\n",
            scale_label(r.n),
            r.window,
            r.replicates,
            r.p_interval,
            r.p_interval_lo,
            r.p_interval_hi,
            r.p_giant,
            r.p_giant_lo,
            r.p_giant_hi,
            r.p_max,
            r.excluded_boundary,
        ));
    }
    out
}

/// CSV for a histogram: one row per bin with its [lo, hi) range, count, and
/// normalized mass.
pub fn histogram_csv(h: &DiameterHistogram) -> String {
    let mut out = String::from("bin,ratio_lo,ratio_hi,count,mass\n");
    let mass = h.mass();
    for (i, (&c, m)) in h.counts.iter().zip(&mass).enumerate() {
        out.push_str(&format!(
            "{},{:.6},{:.6},{},{:.6}\n",
            i,
            i as f64 / 20.0,
            (i + 1) as f64 / 20.0,
            c,
            m
        ));
    }
    out
}
