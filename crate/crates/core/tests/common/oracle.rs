//! Closed-form rate expressions against mutual informations of their Gaussian
//! assignments, evaluated with the covariance engine.

use cifc_core::inner::{
    f_dpc_raw, lambda_costa, scheme_a_point, scheme_b_point, scheme_c_bounds, scheme_d_point, scheme_e_point, tdma_value,
};
use cifc_core::outer::{
    coop_snr, degraded_bounds, gamma_star, pl_si_frontier, point_a, point_b, point_c, s_bounds, strong_bounds,
    unified_bounds, weak_point,
};
use cifc_core::verify::random_channels;
use cifc_core::{cap, mutual_info, ChannelParams, Complex64, GaussianSystem, SystemBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

type C64 = Complex64;

#[derive(Debug, Clone)]
pub struct OracleCase {
    pub name: &'static str,
    pub points: usize,
    pub worst: f64,
}

impl OracleCase {
    pub fn holds(&self) -> bool {
        self.points > 0 && self.worst <= TOL
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn mi(sys: &GaussianSystem, a: &[&str], b: &[&str], cond: &[&str]) -> f64 {
    mutual_info(sys, a, b, cond).expect("finite information")
}

/// `X1 = X1p + rho sqrt(P1/P2) X2` with `Var X1p = (1 - |rho|^2) P1`, plus both outputs.
/// `gamma` correlates the receiver noises.
fn channel_model(ch: &ChannelParams, rho: C64, gamma: f64) -> SystemBuilder {
    let mut s = SystemBuilder::new();
    s.source("X1p", (1.0 - rho.norm_sqr()).max(0.0) * ch.p1).unwrap();
    s.source("X2", ch.p2).unwrap();
    s.correlated(&["Z1", "Z2"], &[vec![c(1.0), c(gamma)], vec![c(gamma), c(1.0)]]).unwrap();
    s.combine("X1", &[(c(1.0), "X1p"), (rho * (ch.p1 / ch.p2).sqrt(), "X2")]).unwrap();
    s.combine("Y1", &[(c(1.0), "X1"), (ch.a, "X2"), (c(1.0), "Z1")]).unwrap();
    s.combine_real("Y2", &[(ch.b, "X1"), (1.0, "X2"), (1.0, "Z2")]).unwrap();
    s
}

fn coop(alpha: f64) -> C64 {
    c((1.0 - alpha).sqrt())
}

struct Acc {
    name: &'static str,
    points: usize,
    worst: f64,
}

impl Acc {
    fn new(name: &'static str) -> Self {
        Acc { name, points: 0, worst: 0.0 }
    }

    fn add(&mut self, pairs: &[(f64, f64)]) {
        self.points += 1;
        for &(x, y) in pairs {
            let d = if x.is_finite() && y.is_finite() { (x - y).abs() } else { f64::INFINITY };
            self.worst = self.worst.max(d);
        }
    }

    fn done(self) -> OracleCase {
        OracleCase { name: self.name, points: self.points, worst: self.worst }
    }
}

fn with_b(ch: &ChannelParams, b: f64) -> ChannelParams {
    ChannelParams::new(ch.a, b, ch.p1, ch.p2).unwrap()
}

fn weak(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("weak");
    for ch in chs {
        let ch = with_b(ch, rng.gen_range(0.0..=1.0));
        let alpha: f64 = rng.gen();
        let sys = channel_model(&ch, coop(alpha), 0.0).build();
        let (r1, r2) = weak_point(&ch, alpha);
        acc.add(&[(r1, mi(&sys, &["Y1"], &["X1"], &["X2"])), (r2, mi(&sys, &["Y2"], &["X2"], &[]))]);
    }
    acc.done()
}

fn strong(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("strong");
    for ch in chs {
        let alpha: f64 = rng.gen();
        let sys = channel_model(ch, coop(alpha), 0.0).build();
        let (r1, sum) = strong_bounds(ch, alpha);
        acc.add(&[(r1, mi(&sys, &["Y1"], &["X1"], &["X2"])), (sum, mi(&sys, &["Y2"], &["X1", "X2"], &[]))]);
    }
    acc.done()
}

fn unified(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("unified");
    for ch in chs {
        let alpha: f64 = rng.gen();
        if (ch.b - 1.0).abs() < 1e-6 {
            continue;
        }
        let sys = channel_model(ch, coop(alpha), gamma_star(ch.b)).build();
        let [r1, r2, sum] = unified_bounds(ch, alpha);
        let i2 = mi(&sys, &["Y2"], &["X1", "X2"], &[]);
        let extra = mi(&sys, &["Y1"], &["X1"], &["Y2", "X2"]);
        acc.add(&[(r1, mi(&sys, &["Y1"], &["X1"], &["X2"])), (r2, i2), (sum, i2 + extra)]);
    }
    acc.done()
}

/// Degraded channel: full cooperation is a scalar degraded broadcast channel on
/// `Xeq = b X1 + X2`, with the common-message layer matched to `C(alpha P1)`.
fn degraded(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("bc-dms-deg");
    for ch in chs {
        let b = rng.gen_range(1.0..=5.0);
        let ch = ChannelParams::real(1.0 / b, b, ch.p1, ch.p2).unwrap();
        let alpha: f64 = rng.gen();
        let peq = (b * ch.p1.sqrt() + ch.p2.sqrt()).powi(2);
        let ap = alpha * ch.p1 / (1.0 + alpha * ch.p1) * (1.0 + b * b / peq);
        let mut s = SystemBuilder::new();
        s.source("V", ap * peq).unwrap();
        s.source("W", (1.0 - ap).max(0.0) * peq).unwrap();
        s.source("Z1", 1.0).unwrap();
        s.source("Z2", 1.0).unwrap();
        s.combine_real("Y1s", &[(1.0, "V"), (1.0, "W"), (b, "Z1")]).unwrap();
        s.combine_real("Y2", &[(1.0, "V"), (1.0, "W"), (1.0, "Z2")]).unwrap();
        let bc = s.build();
        let model = channel_model(&ch, coop(alpha), 0.0).build();
        let [r1, r2, sum] = degraded_bounds(&ch, alpha);
        acc.add(&[
            (r1, mi(&bc, &["Y1s"], &["V"], &[])),
            (r2, mi(&bc, &["Y2"], &["W"], &["V"])),
            (sum, mi(&model, &["Y2"], &["X1", "X2"], &[])),
        ]);
    }
    acc.done()
}

/// S-channel: dirty-paper broadcast with the receiver-2 beam coherent across antennas.
fn s_channel(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("bc-dms-s");
    for ch in chs {
        let ch = ChannelParams::real(0.0, rng.gen_range(1.0..=5.0), ch.p1, ch.p2).unwrap();
        let alpha: f64 = rng.gen();
        let a1 = alpha * (1.0 + ch.p1) / (1.0 + alpha * ch.p1);
        let mut s = SystemBuilder::new();
        s.source("S1", 1.0).unwrap();
        s.source("S2", 1.0).unwrap();
        s.source("Z1", 1.0).unwrap();
        s.source("Z2", 1.0).unwrap();
        s.combine_real("X1", &[((a1 * ch.p1).sqrt(), "S1"), (((1.0 - a1).max(0.0) * ch.p1).sqrt(), "S2")]).unwrap();
        s.combine_real("X2", &[(ch.p2.sqrt(), "S2")]).unwrap();
        s.combine_real("Y1", &[(1.0, "X1"), (1.0, "Z1")]).unwrap();
        s.combine_real("Y2", &[(ch.b, "X1"), (1.0, "X2"), (1.0, "Z2")]).unwrap();
        let bc = s.build();
        let model = channel_model(&ch, coop(alpha), 0.0).build();
        let [r1, r2, sum] = s_bounds(&ch, alpha);
        acc.add(&[
            (r1, mi(&bc, &["Y1"], &["S1"], &[])),
            (r2, mi(&bc, &["Y2"], &["S2"], &["S1"])),
            (sum, mi(&model, &["Y2"], &["X1", "X2"], &[])),
        ]);
    }
    acc.done()
}

/// Scheme A: transmitter 2 silent, two superposed layers at transmitter 1.
fn scheme_a(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("scheme-a");
    for ch in chs {
        let alpha: f64 = rng.gen();
        let mut s = SystemBuilder::new();
        s.source("V1", alpha * ch.p1).unwrap();
        s.source("V2", (1.0 - alpha) * ch.p1).unwrap();
        s.source("Z1", 1.0).unwrap();
        s.source("Z2", 1.0).unwrap();
        s.combine_real("Y1", &[(1.0, "V1"), (1.0, "V2"), (1.0, "Z1")]).unwrap();
        s.combine_real("Y2", &[(ch.b, "V1"), (ch.b, "V2"), (1.0, "Z2")]).unwrap();
        let sys = s.build();
        let p = scheme_a_point(ch, alpha);
        let (o1, o2) = if ch.b <= 1.0 {
            // Receiver 1 is the stronger one: it strips the receiver-2 layer.
            (mi(&sys, &["Y1"], &["V1"], &["V2"]), mi(&sys, &["Y2"], &["V2"], &[]))
        } else {
            (mi(&sys, &["Y1"], &["V2"], &[]), mi(&sys, &["Y2"], &["V1"], &["V2"]))
        };
        acc.add(&[(p.r1, o1), (p.r2, o2)]);
    }
    acc.done()
}

/// Costa auxiliary `U = X1p + lambda X2` on the split `X1 = X1p + sqrt(abar P1 / P2) X2`.
fn costa_model(ch: &ChannelParams, alpha: f64, lambda: C64) -> GaussianSystem {
    let mut s = channel_model(ch, coop(alpha), 0.0);
    s.combine("U", &[(c(1.0), "X1p"), (lambda, "X2")]).unwrap();
    s.build()
}

fn scheme_b(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("scheme-b");
    for ch in chs {
        let alpha: f64 = rng.gen_range(0.01..=1.0);
        let h = ch.a + ((1.0 - alpha) * ch.p1 / ch.p2).sqrt();
        let lc = lambda_costa(h, 1.0, alpha, ch.p1).unwrap();
        let sys = costa_model(ch, alpha, lc);
        let p = scheme_b_point(ch, alpha);
        acc.add(&[
            (p.r1, mi(&sys, &["Y1"], &["U"], &[]) - mi(&sys, &["U"], &["X2"], &[])),
            (p.r2, mi(&sys, &["Y2"], &["X2"], &[])),
        ]);
    }
    acc.done()
}

/// Scheme C on its quantization-auxiliary assignment.
fn scheme_c(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("scheme-c");
    for ch in chs {
        let alpha: f64 = rng.gen();
        let s1 = rng.gen_range(0.1..=3.0);
        let s2 = rng.gen_range(0.1..=3.0);
        let poly = scheme_c_bounds(ch, alpha, ch.a, ch.b, s1, s2).unwrap();
        let rho = -(ch.b * ch.p1 * alpha / (s1 * s2).sqrt()).min(1.0);
        let k = (s1 * s2).sqrt() * rho;
        let mut s = channel_model(ch, coop(alpha), 0.0);
        s.correlated(&["Q1", "Q2"], &[vec![c(s1), c(k)], vec![c(k), c(s2)]]).unwrap();
        s.combine("U1", &[(c(1.0), "X1"), (ch.a, "X2"), (c(1.0), "Q1")]).unwrap();
        s.combine_real("U2", &[(ch.b, "X1"), (1.0, "X2"), (1.0, "Q2")]).unwrap();
        let sys = s.build();
        let i_y1u1 = mi(&sys, &["Y1"], &["U1"], &[]);
        let r1 = i_y1u1 - mi(&sys, &["U1"], &["X2"], &[]);
        let r2 = mi(&sys, &["Y2"], &["U2", "X2"], &[]);
        let sum = r2 + i_y1u1 - mi(&sys, &["U1"], &["U2", "X2"], &[]);
        if r1 < 0.0 {
            acc.add(&[(poly.r1, 0.0), (poly.r2, r2), (poly.sum, r2)]);
        } else {
            acc.add(&[(poly.r1, r1), (poly.r2, r2), (poly.sum, sum)]);
        }
    }
    acc.done()
}

fn scheme_d(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("scheme-d");
    for ch in chs {
        let rho = C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        let sys = channel_model(ch, rho, 0.0).build();
        let p = scheme_d_point(ch, rho);
        let r1 = mi(&sys, &["Y1"], &["X1"], &["X2"]).min(mi(&sys, &["Y2"], &["X1"], &["X2"]));
        let sum = mi(&sys, &["Y1"], &["X1", "X2"], &[]).min(mi(&sys, &["Y2"], &["X1", "X2"], &[]));
        acc.add(&[(p.r1, r1), (p.sum, sum)]);
    }
    acc.done()
}

fn scheme_e(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("scheme-e");
    for ch in chs {
        let alpha: f64 = rng.gen_range(0.01..=1.0);
        let ch = with_b(ch, rng.gen_range(0.05..=5.0));
        let lambda = C64::new(rng.gen_range(-3.0..=3.0), if ch.a.im != 0.0 { rng.gen_range(-3.0..=3.0) } else { 0.0 });
        let sys = costa_model(&ch, alpha, lambda);
        let leak = mi(&sys, &["U"], &["X2"], &[]);
        let f1 = mi(&sys, &["Y1"], &["U"], &[]) - leak;
        let f2 = mi(&sys, &["Y2"], &["U"], &[]) - leak;
        let t = mi(&sys, &["Y2"], &["U", "X2"], &[]);
        let h1 = ch.a + ((1.0 - alpha) * ch.p1 / ch.p2).sqrt();
        let h2 = c(1.0 / ch.b + ((1.0 - alpha) * ch.p1 / ch.p2).sqrt());
        let p = scheme_e_point(&ch, alpha, lambda);
        acc.add(&[
            (f_dpc_raw(h1, 1.0, lambda, alpha, ch.p1, ch.p2), f1),
            (f_dpc_raw(h2, 1.0 / (ch.b * ch.b), lambda, alpha, ch.p1, ch.p2), f2),
            (p.r1, f1.max(0.0)),
            (p.r2, t - f2.max(0.0)),
            (p.sum, t),
        ]);
    }
    acc.done()
}

/// Piecewise-linear bound, its corner points and the time-sharing line.
fn pl_si(chs: &[ChannelParams], rng: &mut ChaCha8Rng) -> OracleCase {
    let mut acc = Acc::new("pl-si-tdma");
    for ch in chs {
        let ch = with_b(ch, rng.gen_range(1.01..=5.0));
        let full = channel_model(&ch, c(0.0), 0.0).build();
        let beam = channel_model(&ch, c(1.0), 0.0).build();
        let c1 = mi(&full, &["Y1"], &["X1"], &["X2"]);
        let top = mi(&beam, &["Y2"], &["X1", "X2"], &[]);
        let none = mi(&full, &["Y2"], &["X1", "X2"], &[]);
        let mut solo = SystemBuilder::new();
        solo.source("X1", ch.p1).unwrap();
        solo.source("Z1", 1.0).unwrap();
        solo.combine_real("Y1", &[(1.0, "X1"), (1.0, "Z1")]).unwrap();
        let silent = mi(&solo.build(), &["Y1"], &["X1"], &[]);
        let r1 = rng.gen_range(0.0..=c1);
        let pl = pl_si_frontier(&ch).unwrap();
        let (pa, pb, pc) = (point_a(&ch), point_b(&ch), point_c(&ch));
        let theta = r1 / silent;
        acc.add(&[
            (pl.r1_max, c1),
            (pl.value(r1), top - r1),
            (pa.1, top),
            (pb.0, c1),
            (pb.1, top - c1),
            (pc.1, none - c1),
            (tdma_value(&ch, r1), (1.0 - theta) * top),
            (cap(coop_snr(&ch, 0.0)), top),
        ]);
    }
    acc.done()
}

/// Runs every oracle family on `n` random channels; complex `a` for half of them.
pub fn run_all(seed: u64, n: usize) -> Vec<OracleCase> {
    let real = random_channels(seed, n - n / 2, false);
    let complex = random_channels(seed ^ 0x9e37_79b9, n / 2, true);
    let chs: Vec<ChannelParams> = real.into_iter().chain(complex).collect();
    let families: [fn(&[ChannelParams], &mut ChaCha8Rng) -> OracleCase; 11] =
        [weak, strong, unified, degraded, s_channel, scheme_a, scheme_b, scheme_c, scheme_d, scheme_e, pl_si];
    families
        .iter()
        .enumerate()
        .map(|(k, f)| f(&chs, &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64))))
        .collect()
}
