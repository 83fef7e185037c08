//! Outer bounds on the capacity region.
//!
//! Each bound is a [`Frontier`]: an exact boundary function `R2max(R1)`.
//! Families indexed by a power split `alpha` are evaluated at
//! `alpha*(R1) = (2^R1 - 1) / P1`, which is exact because every other
//! constraint in those families decreases in `alpha`.

pub mod bcpr;
pub mod transform;

use std::fmt;
use std::sync::Arc;

use crate::channel::{is_degraded, is_s_channel, ChannelParams, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::region::{RateRegion, RegionKind};
use crate::sweep::Sweep;
use crate::cap;

pub use bcpr::{bcpr_frontier, bcpr_outer};
pub use transform::{preset_target, transform_channel, transformed_outer, TransformPreset, TransformSpec, TransformTriple};

type Curve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Exact boundary of an outer bound on `[0, r1_max]`.
#[derive(Clone)]
pub struct Frontier {
    pub id: String,
    pub r1_max: f64,
    curve: Curve,
}

impl fmt::Debug for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Frontier").field("id", &self.id).field("r1_max", &self.r1_max).finish()
    }
}

impl Frontier {
    pub fn new(id: &str, r1_max: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Frontier { id: id.to_string(), r1_max: r1_max.max(0.0), curve: Arc::new(f) }
    }

    /// `R2max(r1)`, or `-inf` beyond the support.
    pub fn value(&self, r1: f64) -> f64 {
        if r1 > self.r1_max * (1.0 + 1e-12) + 1e-15 {
            return f64::NEG_INFINITY;
        }
        (self.curve)(r1.min(self.r1_max)).max(0.0)
    }

    pub fn region(&self, n: usize) -> RateRegion {
        RateRegion::from_fn(RegionKind::Outer, &self.id, self.r1_max, n, |x| self.value(x))
    }
}

/// Pointwise minimum of several frontiers.
pub fn intersect_frontiers(id: &str, fs: Vec<Frontier>) -> Frontier {
    let top = fs.iter().map(|f| f.r1_max).fold(f64::INFINITY, f64::min);
    Frontier::new(id, top, move |x| fs.iter().map(|f| f.value(x)).fold(f64::INFINITY, f64::min))
}

/// Power split whose private rate `C(alpha P1)` equals `r1`.
pub fn alpha_at(p1: f64, r1: f64) -> f64 {
    if p1 <= 0.0 {
        return 0.0;
    }
    ((r1.exp2() - 1.0) / p1).clamp(0.0, 1.0)
}

/// Receiver-2 SNR with correlation `sqrt(1 - alpha)`: `b^2 P1 + P2 + 2 sqrt(abar b^2 P1 P2)`.
pub fn coop_snr(ch: &ChannelParams, alpha: f64) -> f64 {
    let b2p1 = ch.b * ch.b * ch.p1;
    b2p1 + ch.p2 + 2.0 * ((1.0 - alpha).max(0.0) * b2p1 * ch.p2).sqrt()
}

/// Weak-interference corner `(C(alpha P1), C(T) - C(b^2 alpha P1))`.
pub fn weak_point(ch: &ChannelParams, alpha: f64) -> (f64, f64) {
    (cap(alpha * ch.p1), cap(coop_snr(ch, alpha)) - cap(ch.b * ch.b * alpha * ch.p1))
}

/// Strong-interference bounds `(R1, R1 + R2)`.
pub fn strong_bounds(ch: &ChannelParams, alpha: f64) -> (f64, f64) {
    (cap(alpha * ch.p1), cap(coop_snr(ch, alpha)))
}

/// Unifying bounds `[R1, R2, R1 + R2]`.
pub fn unified_bounds(ch: &ChannelParams, alpha: f64) -> [f64; 3] {
    let t = cap(coop_snr(ch, alpha));
    let extra = (cap(alpha * ch.p1) - cap(ch.b * ch.b * alpha * ch.p1)).max(0.0);
    [cap(alpha * ch.p1), t, t + extra]
}

/// Degraded BC-DMS bounds `[R1, R2, R1 + R2]`.
pub fn degraded_bounds(ch: &ChannelParams, alpha: f64) -> [f64; 3] {
    let b2p1 = ch.b * ch.b * ch.p1;
    let abar = (1.0 - alpha).max(0.0);
    let r2 = cap((ch.p2 + abar * b2p1 + 2.0 * (b2p1 * ch.p2).sqrt()) / (1.0 + alpha * ch.p1));
    [cap(alpha * ch.p1), r2, cap(coop_snr(ch, alpha))]
}

/// S-channel BC-DMS bounds `[R1, R2, R1 + R2]`.
pub fn s_bounds(ch: &ChannelParams, alpha: f64) -> [f64; 3] {
    let b2p1 = ch.b * ch.b * ch.p1;
    let abar = (1.0 - alpha).max(0.0);
    let d = 1.0 + alpha * ch.p1;
    let r2 = cap(ch.p2 + b2p1 * abar / d + 2.0 * (abar * b2p1 * ch.p2 / d).sqrt());
    [cap(alpha * ch.p1), r2, cap(coop_snr(ch, alpha))]
}

/// Objective minimized over the correlation `gamma` of the receiver noises.
pub fn gamma_objective(b: f64, gamma: f64) -> f64 {
    (b * b + 1.0 - 2.0 * b * gamma) / (1.0 - gamma * gamma)
}

/// Closed-form minimizer `min(b, 1/b)`.
pub fn gamma_star(b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        b.min(1.0 / b)
    }
}

/// Smallest `b` for which the degraded BC R2-bound is the tighter one at every split.
pub fn degraded_threshold(p1: f64, p2: f64) -> f64 {
    (p2 / p1).sqrt() + (1.0 + p2 / p1).sqrt()
}

/// `b` above which the S-channel BC R2-bound is tighter at the no-cooperation corner.
pub fn s_bc_threshold(p2: f64) -> f64 {
    (p2 + 1.0).sqrt()
}

/// Full-cooperation point on the R2 axis.
pub fn point_a(ch: &ChannelParams) -> (f64, f64) {
    (0.0, cap(ch.coherent_snr2()))
}

pub fn point_b(ch: &ChannelParams) -> (f64, f64) {
    (cap(ch.p1), cap(ch.coherent_snr2()) - cap(ch.p1))
}

pub fn point_c(ch: &ChannelParams) -> (f64, f64) {
    (cap(ch.p1), cap(ch.b * ch.b * ch.p1 + ch.p2) - cap(ch.p1))
}

fn need_weak(ch: &ChannelParams, what: &str) -> Result<()> {
    if ch.b > 1.0 {
        return Err(Error::RegimeMismatch(format!("{what} requires b <= 1, got b = {}", ch.b)));
    }
    Ok(())
}

fn need_strong(ch: &ChannelParams, what: &str) -> Result<()> {
    if ch.b <= 1.0 {
        return Err(Error::RegimeMismatch(format!("{what} requires b > 1, got b = {}", ch.b)));
    }
    Ok(())
}

pub fn weak_frontier(ch: &ChannelParams) -> Result<Frontier> {
    need_weak(ch, "weak outer bound")?;
    let ch = *ch;
    Ok(Frontier::new("weak", cap(ch.p1), move |r| weak_point(&ch, alpha_at(ch.p1, r)).1))
}

pub fn strong_frontier(ch: &ChannelParams) -> Result<Frontier> {
    need_strong(ch, "strong outer bound")?;
    let ch = *ch;
    Ok(Frontier::new("strong", cap(ch.p1), move |r| strong_bounds(&ch, alpha_at(ch.p1, r)).1 - r))
}

/// Largest R2 allowed by the unifying bound at `r`, maximized over `alpha >= alpha*(r)`.
fn unified_value(ch: &ChannelParams, r: f64) -> f64 {
    let lo = alpha_at(ch.p1, r);
    let g = |alpha: f64| {
        let [_, r2, sum] = unified_bounds(ch, alpha);
        r2.min(sum - r)
    };
    if ch.b > 1.0 {
        return g(lo);
    }
    const N: usize = 129;
    let step = (1.0 - lo) / (N - 1) as f64;
    let (mut best, mut arg) = (f64::NEG_INFINITY, lo);
    for k in 0..N {
        let a = lo + step * k as f64;
        let v = g(a);
        if v > best {
            best = v;
            arg = a;
        }
    }
    // Golden-section refinement around the best sample.
    let (mut x0, mut x1) = ((arg - step).max(lo), (arg + step).min(1.0));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let c = x1 - phi * (x1 - x0);
        let d = x0 + phi * (x1 - x0);
        if g(c) >= g(d) {
            x1 = d;
        } else {
            x0 = c;
        }
    }
    best.max(g(0.5 * (x0 + x1)))
}

pub fn unified_frontier(ch: &ChannelParams) -> Frontier {
    let ch = *ch;
    Frontier::new("unified", cap(ch.p1), move |r| unified_value(&ch, r))
}

pub fn pl_si_frontier(ch: &ChannelParams) -> Result<Frontier> {
    need_strong(ch, "piecewise-linear outer bound")?;
    let top = cap(ch.coherent_snr2());
    Ok(Frontier::new("pl-si", cap(ch.p1), move |r| top - r))
}

pub fn degraded_frontier(ch: &ChannelParams) -> Result<Frontier> {
    if !is_degraded(ch, DEFAULT_TOL) || ch.b < 1.0 {
        return Err(Error::RegimeMismatch("degraded BC-DMS bound requires real a with a*b = 1 and b >= 1".into()));
    }
    let ch = *ch;
    Ok(Frontier::new("bc-dms-deg", cap(ch.p1), move |r| {
        let [_, r2, sum] = degraded_bounds(&ch, alpha_at(ch.p1, r));
        r2.min(sum - r)
    }))
}

pub fn s_frontier(ch: &ChannelParams) -> Result<Frontier> {
    if !is_s_channel(ch, DEFAULT_TOL) || ch.b < 1.0 {
        return Err(Error::RegimeMismatch("S-channel BC-DMS bound requires a = 0 and b >= 1".into()));
    }
    let ch = *ch;
    Ok(Frontier::new("bc-dms-s", cap(ch.p1), move |r| {
        let [_, r2, sum] = s_bounds(&ch, alpha_at(ch.p1, r));
        r2.min(sum - r)
    }))
}

/// Closed-form bounds that apply to `ch`, without sweeps or transformations.
pub fn basic_frontiers(ch: &ChannelParams) -> Vec<Frontier> {
    let mut fs = vec![unified_frontier(ch)];
    fs.extend(weak_frontier(ch).ok());
    fs.extend(strong_frontier(ch).ok());
    fs.extend(pl_si_frontier(ch).ok());
    fs.extend(degraded_frontier(ch).ok());
    fs.extend(s_frontier(ch).ok());
    fs
}

/// Every applicable bound, including BC-PR and the valid transformation presets.
pub fn best_frontiers(ch: &ChannelParams, sweep: &Sweep) -> Vec<Frontier> {
    let mut fs = basic_frontiers(ch);
    fs.push(bcpr_frontier(ch, sweep));
    for p in TransformPreset::ALL {
        if let Ok(f) = transform::preset_frontier(ch, p) {
            fs.push(f);
        }
    }
    fs
}

pub fn best_frontier(ch: &ChannelParams, sweep: &Sweep) -> Frontier {
    intersect_frontiers("best", best_frontiers(ch, sweep))
}

fn alpha_region(f: Frontier, p1: f64, sweep: &Sweep) -> RateRegion {
    let reg = f.region(sweep.r1_points);
    let rows = reg.r1().iter().map(|&r| vec![alpha_at(p1, r)]).collect();
    reg.with_params(&["alpha"], rows)
}

pub fn weak_outer(ch: &ChannelParams, sweep: &Sweep) -> Result<RateRegion> {
    Ok(alpha_region(weak_frontier(ch)?, ch.p1, sweep))
}

pub fn strong_outer(ch: &ChannelParams, sweep: &Sweep) -> Result<RateRegion> {
    Ok(alpha_region(strong_frontier(ch)?, ch.p1, sweep))
}

pub fn unified_outer(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    alpha_region(unified_frontier(ch), ch.p1, sweep)
}

pub fn piecewise_linear_outer(ch: &ChannelParams, sweep: &Sweep) -> Result<RateRegion> {
    Ok(pl_si_frontier(ch)?.region(sweep.r1_points))
}

pub fn bc_dms_degraded_outer(ch: &ChannelParams, sweep: &Sweep) -> Result<RateRegion> {
    Ok(alpha_region(degraded_frontier(ch)?, ch.p1, sweep))
}

pub fn bc_dms_s_outer(ch: &ChannelParams, sweep: &Sweep) -> Result<RateRegion> {
    Ok(alpha_region(s_frontier(ch)?, ch.p1, sweep))
}

pub fn best_outer(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    best_frontier(ch, sweep).region(sweep.r1_points)
}

/// Outer bound by CLI id.
pub fn outer_by_id(ch: &ChannelParams, id: &str, sweep: &Sweep) -> Result<RateRegion> {
    let reg = match id {
        "weak" => weak_outer(ch, sweep)?,
        "strong" => strong_outer(ch, sweep)?,
        "unified" => unified_outer(ch, sweep),
        "bc-pr" => bcpr_outer(ch, sweep),
        "bc-dms-deg" => bc_dms_degraded_outer(ch, sweep)?,
        "bc-dms-s" => bc_dms_s_outer(ch, sweep)?,
        "pl-si" => piecewise_linear_outer(ch, sweep)?,
        "best" => best_outer(ch, sweep),
        _ => match id.strip_prefix("transform:") {
            Some(p) => transformed_outer(ch, &TransformSpec::Preset(p.parse()?), sweep)?,
            None => return Err(Error::InvalidArgument(format!("unknown outer bound id `{id}`"))),
        },
    };
    Ok(reg.with_id(id))
}

pub const OUTER_IDS: &[&str] =
    &["weak", "strong", "unified", "bc-pr", "bc-dms-deg", "bc-dms-s", "pl-si", "best", "transform:<preset>"];
