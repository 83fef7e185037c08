//! Achievable schemes and their rate regions.
//!
//! Every scheme produces, per parameter point, a polytope
//! `{R1 <= r1, R2 <= r2, R1 + R2 <= sum, 2 R1 + R2 <= two}`; the region is the
//! time-sharing hull of all polytope vertices.

mod mi_schemes;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::outer::{alpha_at, coop_snr};
use crate::region::{grid, hull_value, upper_hull, RateRegion, RegionKind};
use crate::sweep::{aligned_alpha_grid, uniform, Sweep};
use crate::cap;

pub use mi_schemes::{scheme_c, scheme_c46, scheme_c_bounds, scheme_f, scheme_f_bounds, scheme_f_lambda_ref};

type C64 = Complex64;

/// Free parameters of the schemes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub alpha: f64,
    pub lambda: C64,
    pub rho: C64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma1pb_sq: f64,
    pub sigma2pb_sq: f64,
    pub rho_pb: C64,
}

/// DPC quantities of scheme E at one power split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpcInfo {
    pub lambda_costa1: C64,
    pub lambda_costa2: C64,
    pub f_value: f64,
}

/// Pentagon-like rate constraints of one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polytope {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
    pub two: f64,
}

impl Polytope {
    pub fn rect(r1: f64, r2: f64) -> Self {
        Polytope { r1, r2, sum: f64::INFINITY, two: f64::INFINITY }
    }

    pub fn new(r1: f64, r2: f64, sum: f64) -> Self {
        Polytope { r1, r2, sum, two: f64::INFINITY }
    }

    pub fn r1_max(&self) -> f64 {
        self.r1.min(self.sum).min(0.5 * self.two).max(0.0)
    }

    /// Largest R2 at `x`, or `-inf` past the R1 limit.
    pub fn r2_at(&self, x: f64) -> f64 {
        if x > self.r1_max() {
            return f64::NEG_INFINITY;
        }
        self.r2.min(self.sum - x).min(self.two - 2.0 * x).max(0.0)
    }

    /// Corner points of the upper boundary.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        let xm = self.r1_max();
        let (b, s, t) = (self.r2.max(0.0), self.sum.max(0.0), self.two.max(0.0));
        let mut xs = vec![0.0, xm];
        for x in [s - b, t - s, 0.5 * (t - b)] {
            if x > 0.0 && x < xm {
                xs.push(x);
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.into_iter().map(|x| (x, self.r2_at(x))).collect()
    }
}

/// Vertices of many polytopes with a flat table of their parameters.
#[derive(Debug, Clone, Default)]
pub struct PointSet {
    names: Vec<String>,
    params: Vec<f64>,
    pts: Vec<(f64, f64, u32)>,
}

impl PointSet {
    pub fn new(names: &[&str]) -> Self {
        PointSet { names: names.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    /// Adds the vertices of `poly`; polytopes with a negative bound are infeasible and skipped.
    pub fn push(&mut self, poly: &Polytope, params: &[f64]) {
        debug_assert_eq!(params.len(), self.names.len());
        if poly.r1 < 0.0 || poly.r2 < 0.0 || poly.sum < 0.0 || poly.two < 0.0 {
            return;
        }
        let tag = (self.params.len() / self.names.len().max(1)) as u32;
        self.params.extend_from_slice(params);
        for (x, y) in poly.vertices() {
            if x.is_finite() && y.is_finite() {
                self.pts.push((x, y, tag));
            }
        }
    }

    pub fn push_point(&mut self, x: f64, y: f64, params: &[f64]) {
        let tag = (self.params.len() / self.names.len().max(1)) as u32;
        self.params.extend_from_slice(params);
        self.pts.push((x.max(0.0), y.max(0.0), tag));
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.pts.iter().map(|p| (p.0, p.1)).collect()
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// Time-sharing hull sampled on `n` uniform R1 points, with the parameters of the nearest hull vertex.
    pub fn into_region(self, id: &str, n: usize) -> Result<RateRegion> {
        if self.pts.is_empty() {
            return Err(Error::EmptyInput);
        }
        let hull = upper_hull(&self.points());
        let xmax = hull.last().map(|p| p.0).unwrap_or(0.0);
        let r1 = grid(xmax, n);
        let r2: Vec<f64> = r1.iter().map(|&x| hull_value(&hull, x)).collect();
        let reg = RateRegion::from_samples(RegionKind::Inner, id, r1, r2)?;
        if self.names.is_empty() {
            return Ok(reg);
        }
        // Tag lookup for hull vertices (augmented corners fall back to the nearest real point).
        let mut tagged: Vec<(f64, f64, u32)> = self.pts.clone();
        tagged.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        let k = self.names.len();
        let vtags: Vec<(f64, u32)> = hull
            .iter()
            .map(|h| {
                let t = tagged
                    .iter()
                    .min_by(|p, q| ((p.0 - h.0).abs() + (p.1 - h.1).abs()).total_cmp(&((q.0 - h.0).abs() + (q.1 - h.1).abs())))
                    .map(|p| p.2)
                    .unwrap_or(0);
                (h.0, t)
            })
            .collect();
        let rows = reg
            .r1()
            .iter()
            .map(|&x| {
                let j = vtags.partition_point(|v| v.0 < x).min(vtags.len() - 1);
                let j = if j > 0 && (x - vtags[j - 1].0) < (vtags[j].0 - x) { j - 1 } else { j };
                let t = vtags[j].1 as usize;
                self.params[t * k..(t + 1) * k].to_vec()
            })
            .collect();
        let names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        Ok(reg.with_params(&names, rows))
    }
}

/// `alpha P1 h / (alpha P1 + sigma^2)`.
pub fn lambda_costa(h: C64, sigma_sq: f64, alpha: f64, p1: f64) -> Result<C64> {
    let d = alpha * p1 + sigma_sq;
    if !(d > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(h * (alpha * p1 / d))
}

/// `I(X1c + h X2 + sigma Z; U1c) - I(U1c; X2)` for `U1c = X1c + lambda X2`, clamped at 0.
pub fn f_dpc(h: C64, sigma_sq: f64, lambda: C64, alpha: f64, p1: f64, p2: f64) -> f64 {
    f_dpc_raw(h, sigma_sq, lambda, alpha, p1, p2).max(0.0)
}

/// Unclamped closed form; `-inf` never occurs for `sigma_sq > 0`.
pub fn f_dpc_raw(h: C64, sigma_sq: f64, lambda: C64, alpha: f64, p1: f64, p2: f64) -> f64 {
    let s = alpha * p1;
    let g = h.norm_sqr() * p2;
    if g == 0.0 {
        return ((sigma_sq + s) / sigma_sq).log2();
    }
    if s == 0.0 {
        // No private signal: U1c = lambda X2 carries no information about X1c.
        return if lambda.norm() == 0.0 { 0.0 } else { -(1.0 + g / sigma_sq).log2().min(f64::MAX) };
    }
    let lc = h * (s / (s + sigma_sq));
    let mis = (lambda / lc - 1.0).norm_sqr();
    let den = sigma_sq + s * g / (s + g + sigma_sq) * mis;
    ((sigma_sq + s) / den).log2()
}

/// Effective gains `(h1, h2)` and noise variance at receiver 2 for scheme E.
fn scheme_e_gains(ch: &ChannelParams, alpha: f64) -> (C64, C64, f64) {
    let coop = if ch.p2 > 0.0 { ((1.0 - alpha).max(0.0) * ch.p1 / ch.p2).sqrt() } else { 0.0 };
    let h1 = ch.a + coop;
    let h2 = if ch.b > 0.0 { C64::new(1.0 / ch.b + coop, 0.0) } else { C64::new(0.0, 0.0) };
    let s2 = if ch.b > 0.0 { 1.0 / (ch.b * ch.b) } else { f64::INFINITY };
    (h1, h2, s2)
}

/// Costa coefficients of scheme E and the R1 value at `lambda`.
pub fn dpc_info(ch: &ChannelParams, alpha: f64, lambda: C64) -> DpcInfo {
    let (h1, h2, s2) = scheme_e_gains(ch, alpha);
    let l1 = lambda_costa(h1, 1.0, alpha, ch.p1).unwrap_or_default();
    let l2 = if s2.is_finite() { lambda_costa(h2, s2, alpha, ch.p1).unwrap_or_default() } else { C64::new(0.0, 0.0) };
    DpcInfo { lambda_costa1: l1, lambda_costa2: l2, f_value: f_dpc(h1, 1.0, lambda, alpha, ch.p1, ch.p2) }
}

pub fn lambda_costa1(ch: &ChannelParams, alpha: f64) -> C64 {
    dpc_info(ch, alpha, C64::new(0.0, 0.0)).lambda_costa1
}

/// Scheme E bounds `(R1, R2, R1 + R2)` at one `(alpha, lambda)`.
pub fn scheme_e_point(ch: &ChannelParams, alpha: f64, lambda: C64) -> Polytope {
    let (h1, h2, s2) = scheme_e_gains(ch, alpha);
    let t = cap(coop_snr(ch, alpha));
    let f1 = f_dpc(h1, 1.0, lambda, alpha, ch.p1, ch.p2);
    let f2 = if s2.is_finite() { f_dpc(h2, s2, lambda, alpha, ch.p1, ch.p2) } else { 0.0 };
    Polytope::new(f1, t - f2, t)
}

/// Scheme A: transmitter 2 silent, superposition coding at transmitter 1.
pub fn scheme_a_point(ch: &ChannelParams, alpha: f64) -> Polytope {
    let (p1, b2) = (ch.p1, ch.b * ch.b);
    let abar = 1.0 - alpha;
    if ch.b <= 1.0 {
        Polytope::rect(cap(alpha * p1), cap(abar * b2 * p1 / (1.0 + alpha * b2 * p1)))
    } else {
        Polytope::rect(cap(abar * p1 / (1.0 + alpha * p1)), cap(b2 * alpha * p1))
    }
}

/// Scheme B: DPC at transmitter 1, interference as noise at receiver 2.
pub fn scheme_b_point(ch: &ChannelParams, alpha: f64) -> Polytope {
    Polytope::rect(cap(alpha * ch.p1), cap(coop_snr(ch, alpha)) - cap(ch.b * ch.b * alpha * ch.p1))
}

/// Scheme D: both receivers decode both messages.
pub fn scheme_d_point(ch: &ChannelParams, rho: C64) -> Polytope {
    let (p1, p2, b) = (ch.p1, ch.p2, ch.b);
    let free = (1.0 - rho.norm_sqr()).max(0.0);
    let r1 = cap(free * p1).min(cap(free * b * b * p1));
    let k = (p1 * p2).sqrt();
    let s1 = cap(p1 + ch.a_abs2() * p2 + 2.0 * (ch.a.conj() * rho).re * k);
    let s2 = cap(b * b * p1 + p2 + 2.0 * b * rho.re * k);
    Polytope { r1, r2: f64::INFINITY, sum: s1.min(s2), two: f64::INFINITY }
}

fn finish(mut set: PointSet, id: &str, sweep: &Sweep) -> RateRegion {
    if set.is_empty() {
        // Every parameter point infeasible: only the origin is achieved.
        let zeros = vec![0.0; set.names.len()];
        set.push_point(0.0, 0.0, &zeros);
    }
    set.into_region(id, sweep.r1_points).expect("nonempty sweep")
}

pub fn scheme_a(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    let mut set = PointSet::new(&["alpha"]);
    for alpha in sweep.fine_alpha_grid(ch.p1) {
        set.push(&scheme_a_point(ch, alpha), &[alpha]);
    }
    finish(set, "a", sweep)
}

pub fn scheme_b(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    let mut set = PointSet::new(&["alpha"]);
    for alpha in sweep.fine_alpha_grid(ch.p1) {
        set.push(&scheme_b_point(ch, alpha), &[alpha]);
    }
    finish(set, "b", sweep)
}

/// Correlations `sqrt(1 - alpha) e^{j phi}` over the split grid and phase set.
pub fn scheme_d_rhos(ch: &ChannelParams, sweep: &Sweep) -> Vec<C64> {
    let phases: Vec<f64> = if ch.a.im.abs() > 1e-12 {
        (0..sweep.d_phases).map(|k| 2.0 * std::f64::consts::PI * k as f64 / sweep.d_phases as f64).collect()
    } else {
        vec![0.0, std::f64::consts::PI]
    };
    let mut out = Vec::new();
    for alpha in sweep.fine_alpha_grid(ch.p1) {
        let m = (1.0 - alpha).max(0.0).sqrt();
        for &phi in &phases {
            out.push(C64::from_polar(m, phi));
            if m == 0.0 {
                break;
            }
        }
    }
    out
}

pub fn scheme_d(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    let mut set = PointSet::new(&["rho_re", "rho_im"]);
    for rho in scheme_d_rhos(ch, sweep) {
        set.push(&scheme_d_point(ch, rho), &[rho.re, rho.im]);
    }
    finish(set, "d", sweep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LambdaPolicy {
    Costa1,
    Zero,
    Sweep,
}

impl std::str::FromStr for LambdaPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "costa1" | "costa" => Ok(LambdaPolicy::Costa1),
            "zero" | "0" => Ok(LambdaPolicy::Zero),
            "sweep" => Ok(LambdaPolicy::Sweep),
            _ => Err(Error::InvalidArgument(format!("unknown lambda policy `{s}`"))),
        }
    }
}

/// Multipliers `t` of `lambda_costa1` covered by the sweep policy.
pub fn lambda_multipliers(sweep: &Sweep) -> Vec<f64> {
    let mut ts = uniform(0.0, 2.0, sweep.lambda_points);
    ts.extend([0.0, 1.0]);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

pub fn scheme_e(ch: &ChannelParams, sweep: &Sweep, policy: LambdaPolicy) -> RateRegion {
    let mut set = PointSet::new(&["alpha", "lambda_re", "lambda_im"]);
    let ts = match policy {
        LambdaPolicy::Costa1 => vec![1.0],
        LambdaPolicy::Zero => vec![0.0],
        LambdaPolicy::Sweep => lambda_multipliers(sweep),
    };
    for alpha in sweep.fine_alpha_grid(ch.p1) {
        let l1 = lambda_costa1(ch, alpha);
        for &t in &ts {
            let lambda = l1 * t;
            set.push(&scheme_e_point(ch, alpha, lambda), &[alpha, lambda.re, lambda.im]);
        }
    }
    let id = match policy {
        LambdaPolicy::Costa1 => "e:costa1",
        LambdaPolicy::Zero => "e:zero",
        LambdaPolicy::Sweep => "e:sweep",
    };
    finish(set, id, sweep)
}

/// Time sharing between `(C(P1), 0)` and the full-cooperation point.
pub fn tdma_inner(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    let mut set = PointSet::new(&[]);
    set.push_point(0.0, cap(ch.coherent_snr2()), &[]);
    set.push_point(cap(ch.p1), 0.0, &[]);
    finish(set, "tdma", sweep)
}

/// Closed-form TDMA boundary.
pub fn tdma_value(ch: &ChannelParams, r1: f64) -> f64 {
    let c1 = cap(ch.p1);
    if c1 == 0.0 {
        return cap(ch.coherent_snr2());
    }
    (1.0 - r1 / c1) * cap(ch.coherent_snr2())
}

/// Union of all schemes and TDMA, convexified.
pub fn best_inner(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    let regions = best_inner_parts(ch, sweep);
    let mut set = PointSet::new(&["scheme"]);
    for (k, r) in regions.iter().enumerate() {
        for (x, y) in r.points() {
            set.push_point(x, y, &[k as f64]);
        }
    }
    finish(set, "best", sweep)
}

/// Component regions of [`best_inner`], in scheme order a, b, c, d, e:costa1, e:zero, e:sweep, f, tdma.
pub fn best_inner_parts(ch: &ChannelParams, sweep: &Sweep) -> Vec<RateRegion> {
    vec![
        scheme_a(ch, sweep),
        scheme_b(ch, sweep),
        scheme_c(ch, sweep),
        scheme_d(ch, sweep),
        scheme_e(ch, sweep, LambdaPolicy::Costa1),
        scheme_e(ch, sweep, LambdaPolicy::Zero),
        scheme_e(ch, sweep, LambdaPolicy::Sweep),
        scheme_f(ch, sweep),
        tdma_inner(ch, sweep),
    ]
}

/// Inner bound by CLI id.
pub fn inner_by_id(ch: &ChannelParams, id: &str, sweep: &Sweep) -> Result<RateRegion> {
    let reg = match id {
        "a" => scheme_a(ch, sweep),
        "b" => scheme_b(ch, sweep),
        "c" => scheme_c(ch, sweep),
        "c46" => scheme_c46(ch, sweep),
        "d" => scheme_d(ch, sweep),
        "e" | "e:costa1" => scheme_e(ch, sweep, LambdaPolicy::Costa1),
        "f" => scheme_f(ch, sweep),
        "tdma" => tdma_inner(ch, sweep),
        "best" => best_inner(ch, sweep),
        _ => match id.strip_prefix("e:") {
            Some(p) => scheme_e(ch, sweep, p.parse()?),
            None => return Err(Error::InvalidArgument(format!("unknown inner scheme id `{id}`"))),
        },
    };
    Ok(reg.with_id(id))
}

pub const INNER_IDS: &[&str] = &["a", "b", "c", "c46", "d", "e", "e:costa1", "e:zero", "e:sweep", "f", "tdma", "best"];

/// Split grid aligned with the R1 grid but capped in size.
pub(crate) fn capped_alpha_grid(ch: &ChannelParams, n: usize) -> Vec<f64> {
    aligned_alpha_grid(ch.p1, n)
}

/// Split that puts the private rate at `r1`.
pub fn alpha_for_rate(ch: &ChannelParams, r1: f64) -> f64 {
    alpha_at(ch.p1, r1)
}
