//! Schemes evaluated through the Gaussian mutual-information engine.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{capped_alpha_grid, finish, PointSet, Polytope};
use crate::channel::ChannelParams;
use crate::gaussmi::{cov_from_rows, mi_flat};
use crate::region::RateRegion;
use crate::sweep::{uniform, Sweep};
use crate::Result;

type C64 = Complex64;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

// Variable order for scheme C.
const Y1: usize = 0;
const Y2: usize = 1;
const U1: usize = 2;
const U2: usize = 3;
const X2: usize = 4;

/// Binning scheme with Gaussian quantization auxiliaries
/// `U1 = X1p + (k + c1) X2 + Z1q` and `U2 = c2 X1p + Z2q`.
/// Returns `(R1, R2, R1 + R2)` bounds.
pub fn scheme_c_bounds(ch: &ChannelParams, alpha: f64, c1: C64, c2: f64, s1: f64, s2: f64) -> Result<Polytope> {
    let (p1, p2) = (ch.p1, ch.p2);
    let priv_amp = (alpha * p1).sqrt();
    let coop = if p2 > 0.0 { ((1.0 - alpha).max(0.0) * p1).sqrt() } else { 0.0 };
    let k = if p2 > 0.0 { coop / p2.sqrt() } else { 0.0 };
    let sp2 = p2.sqrt();
    let rho = if s1 > 0.0 && s2 > 0.0 { -(c2.abs() * p1 * alpha / (s1 * s2).sqrt()).min(1.0) } else { 0.0 };
    // Sources: X1p, X2 (unit), Z1, Z2, W1, W2.
    let rows = vec![
        vec![c(priv_amp), ch.a * sp2 + coop, c(1.0), c(0.0), c(0.0), c(0.0)],
        vec![c(ch.b * priv_amp), c(ch.b * coop + sp2), c(0.0), c(1.0), c(0.0), c(0.0)],
        vec![c(priv_amp), (c1 + k) * sp2, c(0.0), c(0.0), c(s1.sqrt()), c(0.0)],
        vec![c(c2 * priv_amp), c(0.0), c(0.0), c(0.0), c(s2.sqrt() * rho), c((s2 * (1.0 - rho * rho)).sqrt())],
        vec![c(0.0), c(sp2), c(0.0), c(0.0), c(0.0), c(0.0)],
    ];
    let cov = cov_from_rows(&rows);
    let mi = |a: &[usize], b: &[usize]| mi_flat(&cov, 5, a, b, &[]);
    let i_y1u1 = mi(&[Y1], &[U1])?;
    let r1 = i_y1u1 - mi(&[U1], &[X2])?;
    let r2 = mi(&[Y2], &[U2, X2])?;
    let sum = r2 + i_y1u1 - mi(&[U1], &[U2, X2])?;
    if r1 < 0.0 {
        // U1 constant: receiver 2 alone.
        return Ok(Polytope::new(0.0, r2, r2));
    }
    Ok(Polytope::new(r1, r2, sum))
}

fn scheme_c_set(ch: &ChannelParams, alphas: &[f64], coeffs: &[(C64, f64)], sigmas: &[(f64, f64)]) -> PointSet {
    let polys: Vec<(Polytope, [f64; 6])> = alphas
        .par_iter()
        .flat_map_iter(|&alpha| {
            let mut out = Vec::new();
            for &(c1, c2) in coeffs {
                for &(s1, s2) in sigmas {
                    if let Ok(p) = scheme_c_bounds(ch, alpha, c1, c2, s1, s2) {
                        out.push((p, [alpha, c1.re, c1.im, c2, s1, s2]));
                    }
                }
            }
            out
        })
        .collect();
    let mut set = PointSet::new(&["alpha", "c1_re", "c1_im", "c2", "sigma1_sq", "sigma2_sq"]);
    for (p, params) in &polys {
        set.push(p, params);
    }
    set
}

pub fn scheme_c(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    let alphas = capped_alpha_grid(ch, sweep.alpha_points);
    let set = scheme_c_set(ch, &alphas, &[(ch.a, ch.b)], &sweep.sigma_pairs);
    finish(set, "c", sweep)
}

/// Scheme C with the auxiliary coefficients swept around `(a, b)`.
pub fn scheme_c46(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    let alphas = capped_alpha_grid(ch, sweep.alpha_points.min(257));
    let ts = uniform(0.0, 2.0, sweep.c46_points);
    let sa = ch.a.norm().max(1.0);
    let sb = ch.b.max(1.0);
    let mut coeffs = Vec::new();
    for &t1 in &ts {
        for &t2 in &ts {
            coeffs.push((ch.a + (t1 - 1.0) * sa, ch.b + (t2 - 1.0) * sb));
        }
    }
    let set = scheme_c_set(ch, &alphas, &coeffs, &sweep.sigma_pairs);
    finish(set, "c46", sweep)
}

/// Interference seen by the private codeword at receiver 1, normalised for a Costa coefficient.
pub fn scheme_f_lambda_ref(ch: &ChannelParams, alpha: f64, beta: f64, gamma: f64) -> C64 {
    let p1 = ch.p1;
    let h = ch.a * ((1.0 - beta) * ch.p2).max(0.0).sqrt() + ((1.0 - alpha) * p1 * (1.0 - gamma)).max(0.0).sqrt();
    h * ((alpha * p1).sqrt() / (alpha * p1 + 1.0))
}

/// Rate-splitting scheme with a common layer at both transmitters and a DPC private layer.
/// `alpha` is the private power fraction at transmitter 1, `beta` the common fraction at
/// transmitter 2 and `gamma` the part of the relayed power aligned with the common layer.
pub fn scheme_f_bounds(ch: &ChannelParams, alpha: f64, beta: f64, gamma: f64, lambda: C64) -> Result<Polytope> {
    let (p1, p2) = (ch.p1, ch.p2);
    let relay = ((1.0 - alpha) * p1).max(0.0);
    let x1 = [c((alpha * p1).sqrt()), c((relay * gamma).sqrt()), c((relay * (1.0 - gamma)).max(0.0).sqrt())];
    let x2 = [c(0.0), c((beta * p2).sqrt()), c(((1.0 - beta) * p2).max(0.0).sqrt())];
    let z = c(0.0);
    // Sources: X1c, X2c, X2pa, Z1, Z2. Variables: Y1, Y2, U1c, U2c, X2, X1c.
    let y1: Vec<C64> = (0..3).map(|i| x1[i] + ch.a * x2[i]).chain([c(1.0), z]).collect();
    let y2: Vec<C64> = (0..3).map(|i| x1[i] * ch.b + x2[i]).chain([z, c(1.0)]).collect();
    let rows = vec![
        y1,
        y2,
        vec![c(1.0), z, lambda, z, z],
        vec![z, c(1.0), z, z, z],
        vec![x2[0], x2[1], x2[2], z, z],
        vec![c(1.0), z, z, z, z],
    ];
    let cov = cov_from_rows(&rows);
    let mi = |a: &[usize], b: &[usize], cond: &[usize]| mi_flat(&cov, 6, a, b, cond);
    let (y1, y2, u1, u2, x2, x1c) = (0, 1, 2, 3, 4, 5);
    let bin = mi(&[u1], &[x2], &[u2])?;
    let i_y1_u = mi(&[y1], &[u1, u2], &[])?;
    let i_y2_u1x2 = mi(&[y2], &[u1, x2], &[u2])?;
    let r1a = mi(&[y1], &[u1], &[u2])? - bin;
    let sum_c = mi(&[y2], &[u2, x2, x1c], &[])?;
    let sum_d = mi(&[y2], &[x2], &[u1, u2])? + i_y1_u;
    let two = i_y2_u1x2 + i_y1_u - bin;
    Ok(Polytope { r1: r1a.min(i_y2_u1x2), r2: f64::INFINITY, sum: sum_c.min(sum_d), two })
}

pub fn scheme_f(ch: &ChannelParams, sweep: &Sweep) -> RateRegion {
    let splits = uniform(0.0, 1.0, sweep.f_split_points);
    let ts = uniform(0.0, 2.0, sweep.f_lambda_points);
    let mut jobs = Vec::new();
    for &alpha in &splits {
        for &beta in &splits {
            // gamma only matters when transmitter 1 relays something.
            let gammas: &[f64] = if alpha < 1.0 { &splits } else { &[0.0] };
            for &gamma in gammas {
                jobs.push((alpha, beta, gamma, false));
            }
        }
    }
    // Without a common layer the scheme is plain DPC; trace that slice on the fine split grid.
    for alpha in capped_alpha_grid(ch, sweep.alpha_points) {
        jobs.push((alpha, 0.0, 0.0, true));
    }
    let polys: Vec<(Polytope, [f64; 5])> = jobs
        .par_iter()
        .flat_map_iter(|&(alpha, beta, gamma, costa_only)| {
            let lref = scheme_f_lambda_ref(ch, alpha, beta, gamma);
            let mut out = Vec::new();
            for &t in if costa_only { &[1.0][..] } else { &ts[..] } {
                let lambda = lref * t;
                if let Ok(p) = scheme_f_bounds(ch, alpha, beta, gamma, lambda) {
                    out.push((p, [alpha, beta, gamma, lambda.re, lambda.im]));
                }
                if lref.norm() == 0.0 {
                    break;
                }
            }
            out
        })
        .collect();
    let mut set = PointSet::new(&["alpha", "beta", "gamma", "lambda_re", "lambda_im"]);
    for (p, params) in &polys {
        set.push(p, params);
    }
    finish(set, "f", sweep)
}
