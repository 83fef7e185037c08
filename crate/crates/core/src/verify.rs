//! Theorem checks over seeded random channels, and regime atlases.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{classify, pdc_margins, s_threshold_low, CapacityRegime, ChannelParams, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::inner::{
    best_inner, scheme_a, scheme_a_point, scheme_b, scheme_c, scheme_d, scheme_d_point, scheme_e, scheme_e_point,
    tdma_value, LambdaPolicy, PointSet, Polytope,
};
use crate::io::{csv_table, fmt12};
use crate::outer::{best_outer, coop_snr, piecewise_linear_outer, point_a, strong_outer, weak_outer};
use crate::region::{additive_gap, additive_gap_at, contains, multiplicative_gap, RateRegion};
use crate::sweep::{uniform, Sweep};
use crate::cap;

type C64 = Complex64;

/// Capacity certification tolerance in bits.
pub const CAPACITY_TOL: f64 = 1e-4;
/// Inner-in-outer tolerance in bits.
pub const SOUNDNESS_TOL: f64 = 1e-6;
/// Slack on the gap theorems, in bits (or ratio for the multiplicative gap).
pub const GAP_SLACK: f64 = 1e-3;

/// `Q(alpha)`; nonnegative on `[0, 1]` exactly when the PDC conditions hold.
pub fn q_alpha(ch: &ChannelParams, alpha: f64) -> f64 {
    let (p1, p2, b) = (ch.p1, ch.p2, ch.b);
    let d = (C64::new(1.0, 0.0) - ch.a * b).norm_sqr();
    let abar = (1.0 - alpha).max(0.0);
    p2 * d * (alpha * p1 + 1.0) - (b * b - 1.0) * (p1 + ch.a_abs2() * p2 + 2.0 * ch.a.re * (abar * p1 * p2).sqrt() + 1.0)
}

/// One channel sample: log-uniform powers in [0.1, 100], Re a in [-5, 5], b in [0, 5].
pub fn sample_channel(rng: &mut ChaCha8Rng, complex: bool) -> ChannelParams {
    let logp = |rng: &mut ChaCha8Rng| 10f64.powf(rng.gen_range(-1.0..=2.0));
    let p1 = logp(rng);
    let p2 = logp(rng);
    let re = rng.gen_range(-5.0..=5.0);
    let im = if complex { rng.gen_range(-5.0..=5.0) } else { 0.0 };
    let b = rng.gen_range(0.0..=5.0);
    ChannelParams::new(C64::new(re, im), b, p1, p2).expect("valid sample")
}

pub fn random_channels(seed: u64, n: usize, complex: bool) -> Vec<ChannelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sample_channel(&mut rng, complex)).collect()
}

/// Rejection sampling of `n` channels satisfying `pred`; `map` may reshape each draw first.
pub fn random_channels_where(
    seed: u64,
    n: usize,
    complex: bool,
    map: impl Fn(ChannelParams) -> ChannelParams,
    pred: impl Fn(&ChannelParams) -> bool,
) -> Result<Vec<ChannelParams>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let limit = 10_000 * n.max(1);
    for _ in 0..limit {
        if out.len() == n {
            break;
        }
        let ch = map(sample_channel(&mut rng, complex));
        if pred(&ch) {
            out.push(ch);
        }
    }
    if out.len() < n {
        return Err(Error::InvalidArgument(format!("only {} of {n} channels satisfy the condition", out.len())));
    }
    Ok(out)
}

/// Per-channel record of a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub index: usize,
    pub channel: ChannelParams,
    /// Measured quantity (gap in bits, ratio, or excess).
    pub value: f64,
    /// Bound the value must not exceed.
    pub bound: f64,
    pub holds: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem_id: String,
    pub holds: bool,
    /// Largest `value - bound` over the channels, floored at 0.
    pub worst_violation: f64,
    pub tolerance: f64,
    pub channels_tested: usize,
    pub seed: Option<u64>,
    pub details: Vec<ChannelRecord>,
}

impl TheoremReport {
    pub fn new(theorem_id: &str, tolerance: f64, mut details: Vec<ChannelRecord>) -> Self {
        details.sort_by_key(|r| r.index);
        let mut worst = 0.0f64;
        for r in &mut details {
            let v = r.value - r.bound;
            r.holds = v <= tolerance;
            worst = worst.max(if v.is_nan() { f64::INFINITY } else { v });
        }
        TheoremReport {
            theorem_id: theorem_id.to_string(),
            holds: worst <= tolerance,
            worst_violation: worst,
            tolerance,
            channels_tested: details.len(),
            seed: None,
            details,
        }
    }

    fn single(theorem_id: &str, tolerance: f64, ch: &ChannelParams, value: f64, bound: f64, note: String) -> Self {
        let rec = ChannelRecord { index: 0, channel: *ch, value, bound, holds: true, note };
        Self::new(theorem_id, tolerance, vec![rec])
    }

    /// Reports of the same check on several channels, re-indexed in order.
    pub fn merge(theorem_id: &str, reports: Vec<TheoremReport>, seed: Option<u64>) -> Self {
        let tol = reports.first().map(|r| r.tolerance).unwrap_or(0.0);
        let details = reports
            .into_iter()
            .enumerate()
            .flat_map(|(i, r)| r.details.into_iter().map(move |mut d| {
                d.index = i;
                d
            }))
            .collect();
        let mut rep = Self::new(theorem_id, tol, details);
        rep.seed = seed;
        rep
    }

    /// Record with the largest violation.
    pub fn worst(&self) -> Option<&ChannelRecord> {
        self.details.iter().max_by(|a, b| (a.value - a.bound).total_cmp(&(b.value - b.bound)))
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {}: {} channels, worst violation {:.3e} (tol {:.1e})",
            if self.holds { "PASS" } else { "FAIL" },
            self.theorem_id,
            self.channels_tested,
            self.worst_violation,
            self.tolerance
        )
    }

    pub fn to_csv(&self) -> String {
        let header = ["index", "a_re", "a_im", "b", "p1", "p2", "value", "bound", "holds", "note"];
        csv_table(
            &header,
            self.details.iter().map(|r| {
                vec![
                    r.index.to_string(),
                    fmt12(r.channel.a.re),
                    fmt12(r.channel.a.im),
                    fmt12(r.channel.b),
                    fmt12(r.channel.p1),
                    fmt12(r.channel.p2),
                    fmt12(r.value),
                    fmt12(r.bound),
                    r.holds.to_string(),
                    r.note.replace(',', ";"),
                ]
            }),
        )
    }
}

/// Outer bound of the interference regime: weak for `b <= 1`, strong otherwise.
pub fn regime_outer(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    if ch.b <= 1.0 {
        weak_outer(ch, sweep).expect("weak regime")
    } else {
        strong_outer(ch, sweep).expect("strong regime")
    }
}

/// Scheme that achieves capacity in the reported regime, if any.
pub fn certifying_scheme(ch: &ChannelParams, regime: CapacityRegime) -> Option<&'static str> {
    match regime {
        CapacityRegime::ZTrivial | CapacityRegime::WeakTh2_1 => Some("b"),
        CapacityRegime::VeryStrongTh2_3 => Some("d"),
        CapacityRegime::PdcTh5_1 => Some("e:costa1"),
        CapacityRegime::SChannelTh5_3 => {
            if ch.b <= s_threshold_low(ch.p1, ch.p2) {
                Some("e:costa1")
            } else {
                Some("e:zero")
            }
        }
        CapacityRegime::Unknown => None,
    }
}

fn scheme_region(ch: &ChannelParams, id: &str, sweep: &Sweep) -> RateRegion {
    match id {
        "b" => scheme_b(ch, sweep),
        "d" => scheme_d(ch, sweep),
        "e:costa1" => scheme_e(ch, sweep, LambdaPolicy::Costa1),
        "e:zero" => scheme_e(ch, sweep, LambdaPolicy::Zero),
        _ => unreachable!("not a certifying scheme"),
    }
}

/// Additive gap between the best outer bound and the scheme that should achieve capacity.
pub fn check_capacity(ch: &ChannelParams, sweep: &Sweep) -> TheoremReport {
    let regime = classify(ch, DEFAULT_TOL).capacity_known;
    match certifying_scheme(ch, regime) {
        None => TheoremReport::single("capacity", CAPACITY_TOL, ch, 0.0, 0.0, "unknown regime; skipped".into()),
        Some(id) => {
            let inner = scheme_region(ch, id, sweep);
            let gap = additive_gap(&best_outer(ch, sweep), &inner);
            TheoremReport::single("capacity", CAPACITY_TOL, ch, gap, 0.0, format!("{} certified by {id}", regime.label()))
        }
    }
}

/// Scheme C with the receiver-style test channels, `sigma1^2 = 1` and `sigma2^2 = 0`.
pub fn gap_scheme_c(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    let mut s = sweep.clone();
    s.sigma_pairs = vec![(1.0, 0.0)];
    scheme_c(ch, &s)
}

/// `log2(1 + V/(1 + V))` with `V` the received power at receiver 1.
pub fn scheme_c_gap_term(ch: &ChannelParams, alpha: f64) -> f64 {
    let v = ch.p1 + ch.a_abs2() * ch.p2 + 2.0 * ch.a.re * ((1.0 - alpha).max(0.0) * ch.p1 * ch.p2).sqrt();
    (1.0 + v / (1.0 + v)).log2()
}

/// Additive gap of one bit per complex dimension.
pub fn check_additive_gap(ch: &ChannelParams, sweep: &Sweep) -> TheoremReport {
    if ch.b <= 1.0 {
        let gap = additive_gap(&regime_outer(ch, sweep), &scheme_b(ch, sweep));
        return TheoremReport::single("additive-gap", GAP_SLACK, ch, gap, 0.0, "weak: scheme b".into());
    }
    let gap = additive_gap(&regime_outer(ch, sweep), &gap_scheme_c(ch, sweep));
    let worst_term = sweep.alpha_grid(ch.p1).into_iter().map(|a| scheme_c_gap_term(ch, a)).fold(0.0, f64::max);
    TheoremReport::single(
        "additive-gap",
        GAP_SLACK,
        ch,
        gap.max(worst_term),
        1.0,
        format!("region gap {gap:.6}, max GAP(alpha) {worst_term:.6}"),
    )
}

/// Factor-two gap between the piecewise-linear outer bound and time sharing.
pub fn check_multiplicative_gap(ch: &ChannelParams, sweep: &Sweep) -> TheoremReport {
    if ch.b <= 1.0 {
        return TheoremReport::single("multiplicative-gap", GAP_SLACK, ch, 1.0, 2.0, "weak: capacity known".into());
    }
    let pl = piecewise_linear_outer(ch, sweep).expect("strong regime");
    let tdma = crate::inner::tdma_inner(ch, sweep);
    let m = multiplicative_gap(&pl, &tdma);
    // Doubled time sharing against the outer line, checked in closed form.
    let top = cap(ch.p1);
    let worst_doubling = uniform(0.0, top, sweep.r1_points)
        .into_iter()
        .map(|r| (pl.value_at(r) - 2.0 * tdma_value(ch, r / 2.0)).max(0.0))
        .fold(0.0, f64::max);
    TheoremReport::single(
        "multiplicative-gap",
        GAP_SLACK,
        ch,
        m.max(if worst_doubling > 1e-9 { f64::INFINITY } else { 0.0 }),
        2.0,
        format!("ratio {m:.6}, doubling excess {worst_doubling:.3e}"),
    )
}

/// Rows of the constant-gap table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Table3Row {
    PerfectCancellation,
    NonPerfectCancellation,
    BroadcastWeak,
    BroadcastStrong,
    InterferenceStripping,
}

impl Table3Row {
    pub const ALL: [Table3Row; 5] = [
        Table3Row::PerfectCancellation,
        Table3Row::NonPerfectCancellation,
        Table3Row::BroadcastWeak,
        Table3Row::BroadcastStrong,
        Table3Row::InterferenceStripping,
    ];

    /// Gap bound in bits per complex channel use.
    pub fn bound(&self) -> f64 {
        match self {
            Table3Row::PerfectCancellation => 1.0,
            Table3Row::NonPerfectCancellation => (40.0f64 / 3.0).log2(),
            Table3Row::BroadcastWeak => 2.0,
            Table3Row::BroadcastStrong => 3.0,
            Table3Row::InterferenceStripping => 3.0,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Table3Row::PerfectCancellation => "perfect-cancellation",
            Table3Row::NonPerfectCancellation => "non-perfect-cancellation",
            Table3Row::BroadcastWeak => "broadcast-weak",
            Table3Row::BroadcastStrong => "broadcast-strong",
            Table3Row::InterferenceStripping => "interference-stripping",
        }
    }

    pub fn applies(&self, ch: &ChannelParams) -> bool {
        let (b, b2p1) = (ch.b, ch.b * ch.b * ch.p1);
        match self {
            Table3Row::PerfectCancellation => b > 1.0 && pdc_margins(ch).0 >= 0.0,
            Table3Row::NonPerfectCancellation => b > 1.0 && b2p1 <= ch.p2,
            Table3Row::BroadcastWeak => b <= 1.0 && b2p1 > ch.p2,
            Table3Row::BroadcastStrong => b > 1.0 && b2p1 > ch.p2,
            Table3Row::InterferenceStripping => ch.a.norm() >= 1.0 && b > 1.0 && b2p1 <= ch.p2,
        }
    }
}

fn with_point_a(ch: &ChannelParams, polys: &[Polytope], sweep: &Sweep) -> RateRegion {
    let mut set = PointSet::new(&[]);
    let (x, y) = point_a(ch);
    set.push_point(x, y, &[]);
    for p in polys {
        set.push(p, &[]);
    }
    set.into_region("table3", sweep.r1_points).expect("nonempty")
}

/// Inner region of a table row under its parameter policy, time-shared with the full-cooperation point.
pub fn table3_inner(ch: &ChannelParams, row: Table3Row, sweep: &Sweep) -> RateRegion {
    match row {
        Table3Row::PerfectCancellation => scheme_e(ch, sweep, LambdaPolicy::Costa1),
        Table3Row::NonPerfectCancellation => {
            let (p1, inv_b) = (ch.p1, 1.0 / ch.b);
            let lambda = if ch.a.re <= inv_b && p1 >= 1.0 {
                Some(ch.a * ((p1 - p1.sqrt()) / (p1 + 1.0)))
            } else if ch.a.re > inv_b && p1 > 3.0 {
                Some(ch.a * ((p1 + 2.0 * p1.sqrt()) / (p1 + 1.0)))
            } else {
                None
            };
            let polys: Vec<Polytope> = lambda.map(|l| scheme_e_point(ch, 1.0, l)).into_iter().collect();
            with_point_a(ch, &polys, sweep)
        }
        Table3Row::BroadcastWeak => {
            let a = scheme_a(ch, sweep);
            crate::region::union(&[a, with_point_a(ch, &[], sweep)]).expect("same kind")
        }
        Table3Row::BroadcastStrong => {
            let alpha = (1.0 / ch.p1).min(1.0);
            with_point_a(ch, &[scheme_a_point(ch, alpha)], sweep)
        }
        Table3Row::InterferenceStripping => with_point_a(ch, &[scheme_d_point(ch, C64::new(0.0, 0.0))], sweep),
    }
}

/// Gap of every applicable table row.
pub fn check_table3(ch: &ChannelParams, sweep: &Sweep) -> TheoremReport {
    let recs = Table3Row::ALL
        .iter()
        .filter(|r| r.applies(ch))
        .map(|row| {
            let gap = additive_gap(&regime_outer(ch, sweep), &table3_inner(ch, *row, sweep));
            ChannelRecord { index: 0, channel: *ch, value: gap, bound: row.bound(), holds: true, note: row.id().into() }
        })
        .collect();
    TheoremReport::new("table3", GAP_SLACK, recs)
}

/// Best inner bound inside the best outer bound.
pub fn check_soundness(ch: &ChannelParams, sweep: &Sweep) -> TheoremReport {
    let (outer, inner) = (best_outer(ch, sweep), best_inner(ch, sweep));
    let (_, viol) = contains(&outer, &inner, SOUNDNESS_TOL);
    let excess = viol.iter().map(|v| v.1).fold(0.0, f64::max);
    let at = viol.iter().max_by(|a, b| a.1.total_cmp(&b.1)).map(|v| v.0).unwrap_or(0.0);
    TheoremReport::single("soundness", SOUNDNESS_TOL, ch, excess, 0.0, format!("worst at r1 = {at:.6}"))
}

/// Every check on `n` seeded channels, in a fixed order.
pub fn run_suite(seed: u64, n: usize, sweep: &Sweep) -> Result<Vec<TheoremReport>> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let chans = random_channels(seed, n, false);
    type Check = fn(&ChannelParams, &Sweep) -> TheoremReport;
    let checks: [(&str, Check); 5] = [
        ("soundness", check_soundness),
        ("capacity", check_capacity),
        ("additive-gap", check_additive_gap),
        ("multiplicative-gap", check_multiplicative_gap),
        ("table3", check_table3),
    ];
    let per_channel: Vec<Vec<TheoremReport>> =
        chans.par_iter().map(|ch| checks.iter().map(|(_, f)| f(ch, sweep)).collect()).collect();
    let mut out = Vec::new();
    for (k, (id, _)) in checks.iter().enumerate() {
        let reps = per_channel.iter().map(|v| v[k].clone()).collect();
        out.push(TheoremReport::merge(id, reps, Some(seed)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtlasMode {
    Regime,
    Gap,
}

impl std::str::FromStr for AtlasMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regime" => Ok(AtlasMode::Regime),
            "gap" => Ok(AtlasMode::Gap),
            _ => Err(Error::InvalidArgument(format!("unknown atlas mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtlasGrid {
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub resolution: usize,
}

impl Default for AtlasGrid {
    fn default() -> Self {
        AtlasGrid { a_min: -5.0, a_max: 5.0, b_min: 0.0, b_max: 5.0, resolution: 101 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasCell {
    pub a_re: f64,
    pub a_im: f64,
    pub b: f64,
    pub label: String,
    pub capacity_known: bool,
    pub margin_5: f64,
    pub margin_31a: f64,
    pub margin_31b: f64,
    pub gap: Option<f64>,
}

fn atlas_cell(ch: &ChannelParams, mode: AtlasMode, sweep: &Sweep) -> AtlasCell {
    let rep = classify(ch, DEFAULT_TOL);
    let gap = match mode {
        AtlasMode::Regime => None,
        AtlasMode::Gap => Some(additive_gap(&best_outer(ch, sweep), &best_inner(ch, sweep))),
    };
    AtlasCell {
        a_re: ch.a.re,
        a_im: ch.a.im,
        b: ch.b,
        label: rep.capacity_known.label().to_string(),
        capacity_known: rep.capacity_known.is_known(),
        margin_5: rep.margins["5"],
        margin_31a: rep.margins["31a"],
        margin_31b: rep.margins["31b"],
        gap,
    }
}

/// Cells over real `a` and `b`, `b` varying fastest.
pub fn atlas(grid: &AtlasGrid, p1: f64, p2: f64, mode: AtlasMode, sweep: &Sweep) -> Result<Vec<AtlasCell>> {
    if grid.resolution < 2 {
        return Err(Error::InvalidArgument("atlas resolution must be at least 2".into()));
    }
    let chans = uniform(grid.a_min, grid.a_max, grid.resolution)
        .into_iter()
        .flat_map(|a| uniform(grid.b_min, grid.b_max, grid.resolution).into_iter().map(move |b| (a, b)))
        .map(|(a, b)| ChannelParams::real(a, b, p1, p2))
        .collect::<Result<Vec<_>>>()?;
    Ok(chans.par_iter().map(|ch| atlas_cell(ch, mode, sweep)).collect())
}

/// S-channel slice with `P1 = P2 = P`: one cell per `(P, b)`.
pub fn s_channel_atlas(ps: &[f64], bs: &[f64]) -> Result<Vec<(f64, AtlasCell)>> {
    let mut out = Vec::with_capacity(ps.len() * bs.len());
    for &p in ps {
        for &b in bs {
            let ch = ChannelParams::real(0.0, b, p, p)?;
            out.push((p, atlas_cell(&ch, AtlasMode::Regime, &Sweep::fast())));
        }
    }
    Ok(out)
}

pub fn atlas_csv(cells: &[AtlasCell]) -> String {
    let header = ["a_re", "a_im", "b", "label", "margin_5", "margin_31a", "margin_31b", "gap"];
    csv_table(
        &header,
        cells.iter().map(|c| {
            vec![
                fmt12(c.a_re),
                fmt12(c.a_im),
                fmt12(c.b),
                c.label.clone(),
                fmt12(c.margin_5),
                fmt12(c.margin_31a),
                fmt12(c.margin_31b),
                c.gap.map(fmt12).unwrap_or_default(),
            ]
        }),
    )
}

/// Rate gap between the cooperative corner and the no-cooperation corner at full private power.
pub fn corner_gap(b: f64, p1: f64, p2: f64) -> f64 {
    let b2p1 = b * b * p1;
    cap(2.0 * (b2p1 * p2).sqrt() / (1.0 + b2p1 + p2))
}

/// Additive gap and its location for two regions, as used by the figure checks.
pub fn gap_at(outer: &RateRegion, inner: &RateRegion) -> (f64, f64) {
    additive_gap_at(outer, inner)
}

/// Receiver-2 SNR with full cooperation at split `alpha`, exposed for oracle tests.
pub fn cooperative_snr(ch: &ChannelParams, alpha: f64) -> f64 {
    coop_snr(ch, alpha)
}
