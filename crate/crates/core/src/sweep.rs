//! Grid resolutions shared by the bound and scheme constructors.

use serde::{Deserialize, Serialize};

use crate::cap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sweep {
    /// R1 samples of every region boundary.
    pub r1_points: usize,
    /// Power-split samples; the split grid is aligned with the R1 grid.
    pub alpha_points: usize,
    /// DPC coefficient samples for scheme E.
    pub lambda_points: usize,
    /// Beam-angle samples per antenna of the BC-PR sweep.
    pub bcpr_angles: usize,
    /// Beam phase samples of the BC-PR sweep when `a` is complex.
    pub bcpr_phases: usize,
    /// Support directions for the BC-PR hull.
    pub bcpr_directions: usize,
    /// Correlation phases of scheme D when `a` is complex.
    pub d_phases: usize,
    /// Scheme F split and DPC grids.
    pub f_split_points: usize,
    pub f_lambda_points: usize,
    /// Test-channel noise pairs of scheme C.
    pub sigma_pairs: Vec<(f64, f64)>,
    /// Per-coefficient samples of the generalized scheme C assignment.
    pub c46_points: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            r1_points: 2048,
            alpha_points: 2048,
            lambda_points: 201,
            bcpr_angles: 96,
            bcpr_phases: 12,
            bcpr_directions: 49,
            d_phases: 16,
            f_split_points: 11,
            f_lambda_points: 41,
            sigma_pairs: vec![(1.0, 0.0), (1.0, 1.0)],
            c46_points: 9,
        }
    }
}

impl Sweep {
    /// Coarser grids used for bulk soundness sweeps.
    pub fn fast() -> Self {
        Sweep {
            r1_points: 513,
            alpha_points: 257,
            lambda_points: 41,
            bcpr_angles: 48,
            bcpr_phases: 8,
            bcpr_directions: 33,
            d_phases: 8,
            f_split_points: 7,
            f_lambda_points: 21,
            sigma_pairs: vec![(1.0, 0.0), (1.0, 1.0)],
            c46_points: 5,
        }
    }

    /// Split grid on [0, 1] whose private rates `C(alpha P1)` are uniform on [0, C(P1)].
    pub fn alpha_grid(&self, p1: f64) -> Vec<f64> {
        aligned_alpha_grid(p1, self.alpha_points)
    }

    /// [`Sweep::alpha_grid`] refined near full private power.
    pub fn fine_alpha_grid(&self, p1: f64) -> Vec<f64> {
        refined_alpha_grid(p1, self.alpha_points)
    }
}

/// `alpha_k = (2^{k C(P1)/(n-1)} - 1) / P1`, falling back to a uniform grid when `P1 = 0`.
pub fn aligned_alpha_grid(p1: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    if p1 <= 0.0 {
        return uniform(0.0, 1.0, n);
    }
    let top = cap(p1);
    let mut g: Vec<f64> = (0..n)
        .map(|k| (((k as f64) * top / (n - 1) as f64).exp2() - 1.0) / p1)
        .map(|a| a.clamp(0.0, 1.0))
        .collect();
    g[0] = 0.0;
    g[n - 1] = 1.0;
    g
}

/// Aligned grid plus points uniform in `sqrt(1 - alpha)`, which resolve the
/// square-root behaviour of coherent gains near `alpha = 1`.
pub fn refined_alpha_grid(p1: f64, n: usize) -> Vec<f64> {
    let m = (n / 4).max(2);
    let mut g = aligned_alpha_grid(p1, n);
    g.extend((0..=m).map(|k| 1.0 - (k as f64 / m as f64).powi(2)));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

pub fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n).map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}
