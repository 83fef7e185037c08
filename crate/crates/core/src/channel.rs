//! Channel parameterization, standard-form reduction and regime classification.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the measure-zero regimes (Z, S, degraded).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Channel with arbitrary gains and noise variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawChannel {
    pub h11: Complex64,
    pub h12: Complex64,
    pub h21: Complex64,
    pub h22: Complex64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub p1_raw: f64,
    pub p2_raw: f64,
}

impl RawChannel {
    pub fn validate(&self) -> Result<()> {
        let gains = [self.h11, self.h12, self.h21, self.h22];
        let reals = [self.sigma1_sq, self.sigma2_sq, self.p1_raw, self.p2_raw];
        if gains.iter().any(|h| !h.re.is_finite() || !h.im.is_finite()) || reals.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidChannel("non-finite field".into()));
        }
        if self.sigma1_sq <= 0.0 || self.sigma2_sq <= 0.0 {
            return Err(Error::InvalidChannel("noise variances must be positive".into()));
        }
        if self.p1_raw < 0.0 || self.p2_raw < 0.0 {
            return Err(Error::InvalidChannel("powers must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Standard-form channel `Y1 = X1 + a X2 + Z1`, `Y2 = b X1 + X2 + Z2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "ChannelJson", try_from = "ChannelJson")]
pub struct ChannelParams {
    pub a: Complex64,
    pub b: f64,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    a_re: f64,
    #[serde(default)]
    a_im: f64,
    b: f64,
    p1: f64,
    p2: f64,
}

impl From<ChannelParams> for ChannelJson {
    fn from(c: ChannelParams) -> Self {
        ChannelJson { a_re: c.a.re, a_im: c.a.im, b: c.b, p1: c.p1, p2: c.p2 }
    }
}

impl TryFrom<ChannelJson> for ChannelParams {
    type Error = Error;
    fn try_from(j: ChannelJson) -> Result<Self> {
        ChannelParams::new(Complex64::new(j.a_re, j.a_im), j.b, j.p1, j.p2)
    }
}

impl ChannelParams {
    pub fn new(a: Complex64, b: f64, p1: f64, p2: f64) -> Result<Self> {
        let ch = ChannelParams { a, b, p1, p2 };
        ch.validate()?;
        Ok(ch)
    }

    /// Real cross gain shortcut.
    pub fn real(a: f64, b: f64, p1: f64, p2: f64) -> Result<Self> {
        Self::new(Complex64::new(a, 0.0), b, p1, p2)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a.re, self.a.im, self.b, self.p1, self.p2];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidChannel("non-finite parameter".into()));
        }
        if self.b < 0.0 {
            return Err(Error::InvalidChannel("b must be nonnegative".into()));
        }
        if self.p1 < 0.0 || self.p2 < 0.0 {
            return Err(Error::InvalidChannel("powers must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn a_abs2(&self) -> f64 {
        self.a.norm_sqr()
    }

    pub fn is_weak(&self) -> bool {
        self.b <= 1.0
    }

    /// `(sqrt(b^2 P1) + sqrt(P2))^2`, the full-cooperation SNR at receiver 2.
    pub fn coherent_snr2(&self) -> f64 {
        let s = self.b * self.p1.sqrt() + self.p2.sqrt();
        s * s
    }
}

/// Reduce a raw channel to standard form.
///
/// The phase of `a` is chosen so that `a * b = h12 h21 / (h11 h22)`, the
/// invariant of diagonal input/output rescaling.
pub fn to_standard_form(raw: &RawChannel) -> Result<ChannelParams> {
    raw.validate()?;
    if raw.h11.norm() == 0.0 || raw.h22.norm() == 0.0 {
        return Err(Error::DegenerateDirectLink);
    }
    let s1 = raw.sigma1_sq.sqrt();
    let s2 = raw.sigma2_sq.sqrt();
    let p1 = raw.h11.norm_sqr() * raw.p1_raw / raw.sigma1_sq;
    let p2 = raw.h22.norm_sqr() * raw.p2_raw / raw.sigma2_sq;
    let b = raw.h21.norm() * s1 / (s2 * raw.h11.norm());
    let rot = Complex64::from_polar(1.0, raw.h21.arg() - raw.h11.arg());
    let a = raw.h12 / s1 * s2 / raw.h22 * if raw.h21.norm() > 0.0 { rot } else { Complex64::new(1.0, 0.0) };
    ChannelParams::new(a, b, p1, p2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapacityRegime {
    ZTrivial,
    WeakTh2_1,
    VeryStrongTh2_3,
    PdcTh5_1,
    SChannelTh5_3,
    Unknown,
}

impl CapacityRegime {
    pub fn label(&self) -> &'static str {
        match self {
            CapacityRegime::ZTrivial => "z-trivial",
            CapacityRegime::WeakTh2_1 => "weak",
            CapacityRegime::VeryStrongTh2_3 => "very-strong",
            CapacityRegime::PdcTh5_1 => "pdc",
            CapacityRegime::SChannelTh5_3 => "s-channel",
            CapacityRegime::Unknown => "unknown",
        }
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, CapacityRegime::Unknown)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub weak: bool,
    pub strong: bool,
    pub very_strong: bool,
    pub pdc: bool,
    pub s_channel: bool,
    pub z_channel: bool,
    pub degraded: bool,
    pub capacity_known: CapacityRegime,
    /// Signed LHS minus RHS of conditions "5", "31a", "31b", "35", "36".
    pub margins: BTreeMap<String, f64>,
}

/// Very strong interference test; returns the flag and the LHS margin.
pub fn very_strong_condition(ch: &ChannelParams) -> (bool, f64) {
    let b = ch.b;
    let margin = (ch.a_abs2() - 1.0) * ch.p2 - (b * b - 1.0) * ch.p1
        - 2.0 * (ch.a - b).norm() * (ch.p1 * ch.p2).sqrt();
    (margin >= 0.0 && b > 1.0, margin)
}

/// Margins of the two primary-decodes-cognitive conditions `(31a, 31b)`.
pub fn pdc_margins(ch: &ChannelParams) -> (f64, f64) {
    let b2m1 = ch.b * ch.b - 1.0;
    let d = (Complex64::new(1.0, 0.0) - ch.a * ch.b).norm_sqr();
    let base = 1.0 + ch.p1 + ch.a_abs2() * ch.p2;
    let m_a = ch.p2 * d - (b2m1 * base - ch.p1 * ch.p2 * d);
    let m_b = ch.p2 * d - b2m1 * (base + 2.0 * ch.a.re * (ch.p1 * ch.p2).sqrt());
    (m_a, m_b)
}

/// Upper `b` limit of the low-`b` S-channel capacity branch.
pub fn s_threshold_low(p1: f64, p2: f64) -> f64 {
    (1.0 + p2 * (1.0 - p1 / (p1 + 1.0))).sqrt()
}

/// Lower `b` limit of the high-`b` S-channel capacity branch.
pub fn s_threshold_high(p1: f64, p2: f64) -> f64 {
    (p1 * p2 + p2 + 1.0).sqrt() + (p1 * p2).sqrt()
}

pub fn is_degraded(ch: &ChannelParams, tol: f64) -> bool {
    ch.a.im.abs() <= tol && (ch.a.re * ch.b - 1.0).abs() <= tol
}

pub fn is_s_channel(ch: &ChannelParams, tol: f64) -> bool {
    ch.a.norm() <= tol
}

pub fn classify(ch: &ChannelParams, tol: f64) -> RegimeReport {
    let b = ch.b;
    let weak = b <= 1.0;
    let strong = !weak;
    let (vs, m5) = very_strong_condition(ch);
    let (m31a, m31b) = pdc_margins(ch);
    let pdc = strong && m31a >= 0.0 && m31b >= 0.0;
    let s_channel = is_s_channel(ch, tol);
    let z_channel = b <= tol;
    let degraded = is_degraded(ch, tol);
    let m35 = s_threshold_low(ch.p1, ch.p2) - b;
    let m36 = b - s_threshold_high(ch.p1, ch.p2);
    let s_known = s_channel && strong && (m35 >= 0.0 || m36 >= 0.0);

    let capacity_known = if z_channel {
        CapacityRegime::ZTrivial
    } else if weak {
        CapacityRegime::WeakTh2_1
    } else if vs {
        CapacityRegime::VeryStrongTh2_3
    } else if pdc {
        CapacityRegime::PdcTh5_1
    } else if s_known {
        CapacityRegime::SChannelTh5_3
    } else {
        CapacityRegime::Unknown
    };

    let margins = [("5", m5), ("31a", m31a), ("31b", m31b), ("35", m35), ("36", m36)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();

    RegimeReport { weak, strong, very_strong: vs, pdc, s_channel, z_channel, degraded, capacity_known, margins }
}
