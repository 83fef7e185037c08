//! Broadcast channel with private rates: both transmitters cooperate fully.
//!
//! Receivers have one antenna each, so rank-one message covariances suffice and
//! both antennas run at full power. Message 1 uses the beam
//! `(sqrt(P1) cos t1, sqrt(P2) cos t2 e^{j p1})`, message 2 the complementary
//! `(sqrt(P1) sin t1, sqrt(P2) sin t2 e^{j p2})`. The support function of the
//! region is estimated on a fan of directions: grid local maxima refined by
//! Nelder-Mead. The bound is the resulting halfspace polygon.

use std::f64::consts::{FRAC_PI_2, TAU};

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;

use super::Frontier;
use crate::channel::ChannelParams;
use crate::region::RateRegion;
use crate::sweep::Sweep;
use crate::cap;

type C64 = Complex64;

/// Split of the input covariance between the two messages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcprSplit {
    pub alpha1: f64,
    pub alpha2: f64,
    pub rho1: C64,
    pub rho2: C64,
}

/// Beam angles and phases of the two messages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beams {
    pub t1: f64,
    pub t2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl Beams {
    fn from_slice(v: &[f64]) -> Self {
        let (p1, p2) = if v.len() == 4 { (v[2], v[3]) } else { (0.0, 0.0) };
        Beams { t1: v[0], t2: v[1], p1, p2 }
    }

    fn to_vec(self, complex: bool) -> Vec<f64> {
        if complex {
            vec![self.t1, self.t2, self.p1, self.p2]
        } else {
            vec![self.t1, self.t2]
        }
    }

    pub fn split(&self) -> BcprSplit {
        let sign = |x: f64| if x < 0.0 { -1.0 } else { 1.0 };
        let (c1, c2, s1, s2) = (self.t1.cos(), self.t2.cos(), self.t1.sin(), self.t2.sin());
        BcprSplit {
            alpha1: c1 * c1,
            alpha2: c2 * c2,
            rho1: C64::from_polar(sign(c1 * c2), self.p1),
            rho2: C64::from_polar(sign(s1 * s2), self.p2),
        }
    }
}

fn gains(ch: &ChannelParams, s: &BcprSplit) -> (f64, f64, f64, f64) {
    let (p1, p2, b) = (ch.p1, ch.p2, ch.b);
    let (a1, a2) = (s.alpha1, s.alpha2);
    let (c1, c2) = ((1.0 - a1).max(0.0), (1.0 - a2).max(0.0));
    let a = ch.a;
    let k1 = (a1 * a2 * p1 * p2).sqrt();
    let k2 = (c1 * c2 * p1 * p2).sqrt();
    // Signal powers of each message at each receiver.
    let m1_at_1 = a1 * p1 + ch.a_abs2() * a2 * p2 + 2.0 * (a.conj() * s.rho1).re * k1;
    let m2_at_1 = c1 * p1 + ch.a_abs2() * c2 * p2 + 2.0 * (a.conj() * s.rho2).re * k2;
    let m1_at_2 = b * b * a1 * p1 + a2 * p2 + 2.0 * s.rho1.re * b * k1;
    let m2_at_2 = b * b * c1 * p1 + c2 * p2 + 2.0 * s.rho2.re * b * k2;
    (m1_at_1.max(0.0), m2_at_1.max(0.0), m1_at_2.max(0.0), m2_at_2.max(0.0))
}

/// Message 1 is pre-coded against message 2.
pub fn dpc1_rates(ch: &ChannelParams, s: &BcprSplit) -> (f64, f64) {
    let (m11, _, m12, m22) = gains(ch, s);
    (cap(m11), cap(m22 / (1.0 + m12)))
}

/// Message 2 is pre-coded against message 1.
pub fn dpc2_rates(ch: &ChannelParams, s: &BcprSplit) -> (f64, f64) {
    let (m11, m21, _, m22) = gains(ch, s);
    (cap(m11 / (1.0 + m21)), cap(m22))
}

fn rates(ch: &ChannelParams, s: &BcprSplit, order: u8) -> (f64, f64) {
    if order == 1 {
        dpc1_rates(ch, s)
    } else {
        dpc2_rates(ch, s)
    }
}

struct Weighted<'a> {
    ch: &'a ChannelParams,
    order: u8,
    theta: f64,
}

impl CostFunction for Weighted<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let (x, y) = rates(self.ch, &Beams::from_slice(p).split(), self.order);
        Ok(-(self.theta.cos() * x + self.theta.sin() * y))
    }
}

/// Nelder-Mead on `cos(theta) R1 + sin(theta) R2`, restarted from its own optimum.
fn refine(w: &Weighted, start: Vec<f64>, step: f64) -> f64 {
    let mut x0 = start;
    let mut best = -w.cost(&x0).unwrap_or(f64::INFINITY);
    for _ in 0..NM_RESTARTS {
        let mut simplex = vec![x0.clone()];
        for i in 0..x0.len() {
            let mut x = x0.clone();
            x[i] += step;
            simplex.push(x);
        }
        let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(1e-13) else { break };
        let problem = Weighted { ch: w.ch, order: w.order, theta: w.theta };
        let Ok(res) = Executor::new(problem, solver).configure(|s| s.max_iters(NM_ITERS)).run() else { break };
        let v = -res.state().get_best_cost();
        let Some(x) = res.state().get_best_param() else { break };
        if v <= best + 1e-12 {
            best = best.max(v);
            break;
        }
        best = v;
        x0 = x.clone();
    }
    best
}

const NM_ITERS: u64 = 400;
const NM_RESTARTS: usize = 3;
/// Grid local maxima refined per direction and DPC order.
const STARTS: usize = 6;

struct BeamGrid {
    n: usize,
    phases: Vec<(f64, f64)>,
    /// `[i1][i2][k]` flattened: rates of both orders.
    rates: Vec<[(f64, f64); 2]>,
}

impl BeamGrid {
    fn new(ch: &ChannelParams, sweep: &Sweep) -> Self {
        let n = sweep.bcpr_angles.max(8);
        let phases = if ch.a.im.abs() > 1e-12 {
            let m = sweep.bcpr_phases.max(2);
            let ph: Vec<f64> = (0..m).map(|k| TAU * k as f64 / m as f64).collect();
            ph.iter().flat_map(|&x| ph.iter().map(move |&y| (x, y))).collect()
        } else {
            vec![(0.0, 0.0)]
        };
        let mut rates = Vec::with_capacity(n * n * phases.len());
        for i1 in 0..n {
            for i2 in 0..n {
                for &(p1, p2) in &phases {
                    let s = Beams { t1: angle(i1, n), t2: angle(i2, n), p1, p2 }.split();
                    rates.push([dpc1_rates(ch, &s), dpc2_rates(ch, &s)]);
                }
            }
        }
        BeamGrid { n, phases, rates }
    }

    /// Best phase pair per angle cell, then toroidal 8-neighbour local maxima, best first.
    fn starts(&self, theta: f64, order: usize) -> Vec<Beams> {
        let (n, m) = (self.n, self.phases.len());
        let (c, s) = (theta.cos(), theta.sin());
        let proj: Vec<(f64, usize)> = (0..n * n)
            .map(|cell| {
                (0..m)
                    .map(|k| {
                        let r = self.rates[cell * m + k][order];
                        (c * r.0 + s * r.1, k)
                    })
                    .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
            })
            .collect();
        let mut peaks = Vec::new();
        for i1 in 0..n {
            for i2 in 0..n {
                let v = proj[i1 * n + i2].0;
                let is_peak = (0..9).filter(|&d| d != 4).all(|d| {
                    let j1 = (i1 + n + d / 3 - 1) % n;
                    let j2 = (i2 + n + d % 3 - 1) % n;
                    proj[j1 * n + j2].0 <= v
                });
                if is_peak {
                    peaks.push((v, i1, i2));
                }
            }
        }
        peaks.sort_by(|a, b| b.0.total_cmp(&a.0));
        peaks
            .into_iter()
            .take(STARTS)
            .map(|(_, i1, i2)| {
                let (p1, p2) = self.phases[proj[i1 * n + i2].1];
                Beams { t1: angle(i1, n), t2: angle(i2, n), p1, p2 }
            })
            .collect()
    }
}

fn angle(i: usize, n: usize) -> f64 {
    TAU * i as f64 / n as f64
}

/// Support values `(theta, h(theta))` on `[0, pi/2]`.
pub fn support(ch: &ChannelParams, sweep: &Sweep) -> Vec<(f64, f64)> {
    let complex = ch.a.im.abs() > 1e-12;
    let grid = BeamGrid::new(ch, sweep);
    let step = TAU / grid.n as f64;
    let n = sweep.bcpr_directions.max(3);
    // Single-user beamforming gives the axis intercepts exactly.
    let r1_max = cap((ch.p1.sqrt() + ch.a.norm() * ch.p2.sqrt()).powi(2));
    let r2_max = cap((ch.b * ch.p1.sqrt() + ch.p2.sqrt()).powi(2));
    (0..n)
        .map(|k| {
            let theta = FRAC_PI_2 * k as f64 / (n - 1) as f64;
            if k == 0 {
                return (theta, r1_max);
            }
            if k == n - 1 {
                return (theta, r2_max);
            }
            let mut best = f64::NEG_INFINITY;
            for order in [1u8, 2] {
                let w = Weighted { ch, order, theta };
                for b in grid.starts(theta, (order - 1) as usize) {
                    best = best.max(refine(&w, b.to_vec(complex), step));
                }
            }
            (theta, best)
        })
        .collect()
}

pub fn bcpr_frontier(ch: &ChannelParams, sweep: &Sweep) -> Frontier {
    let h = support(ch, sweep);
    let r1_max = h[0].1;
    Frontier::new("bc-pr", r1_max, move |r| {
        h.iter()
            .skip(1)
            .map(|&(t, v)| (v - r * t.cos()) / t.sin())
            .fold(f64::INFINITY, f64::min)
    })
}

pub fn bcpr_outer(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    bcpr_frontier(ch, sweep).region(sweep.r1_points)
}
