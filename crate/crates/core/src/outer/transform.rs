//! Outer bounds obtained by mapping the channel to one with a larger capacity region.
//!
//! A triple `(A, B, C)` maps the channel to a target with cross gains `a' = (aA - B)/C`,
//! `b' = bC/(A - bB)` and powers `P1' = (|A| sqrt(P1) + |B| sqrt(P2))^2`, `P2' = |C|^2 P2`.
//! It is a valid enlargement when `|A| >= 1` and `|AC/(A - bB)| >= 1`.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{basic_frontiers, intersect_frontiers, Frontier};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::region::RateRegion;
use crate::sweep::Sweep;

type C64 = Complex64;
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformTriple {
    #[serde(rename = "A")]
    pub a: C64,
    #[serde(rename = "B")]
    pub b: C64,
    #[serde(rename = "C")]
    pub c: C64,
}

impl TransformTriple {
    pub fn identity() -> Self {
        TransformTriple { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0), c: C64::new(1.0, 0.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformPreset {
    ToS,
    ToWeak,
    ToVeryStrong,
}

impl TransformPreset {
    pub const ALL: [TransformPreset; 3] = [TransformPreset::ToS, TransformPreset::ToWeak, TransformPreset::ToVeryStrong];

    pub fn id(&self) -> &'static str {
        match self {
            TransformPreset::ToS => "to-s",
            TransformPreset::ToWeak => "to-weak",
            TransformPreset::ToVeryStrong => "to-very-strong",
        }
    }
}

impl FromStr for TransformPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "to-s" | "tos" | "s" => Ok(TransformPreset::ToS),
            "to-weak" | "toweak" | "weak" => Ok(TransformPreset::ToWeak),
            "to-very-strong" | "toverystrong" | "very-strong" => Ok(TransformPreset::ToVeryStrong),
            _ => Err(Error::InvalidArgument(format!("unknown transform preset `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransformSpec {
    Triples(Vec<TransformTriple>),
    Preset(TransformPreset),
}

/// Target channel of a triple, rotated back to standard form.
pub fn transform_channel(ch: &ChannelParams, t: &TransformTriple) -> Result<ChannelParams> {
    let b = C64::new(ch.b, 0.0);
    let den = t.a - b * t.b;
    if t.c.norm() < EPS || den.norm() < EPS {
        return Err(Error::InvalidTransform("zero denominator".into()));
    }
    if t.a.norm() < 1.0 - EPS {
        return Err(Error::InvalidTransform(format!("|A| = {} < 1", t.a.norm())));
    }
    if (t.a * t.c / den).norm() < 1.0 - EPS {
        return Err(Error::InvalidTransform(format!("|AC/(A - bB)| = {} < 1", (t.a * t.c / den).norm())));
    }
    let a_new = (ch.a * t.a - t.b) / t.c;
    let b_new = b * t.c / den;
    let rot = if b_new.norm() > 0.0 { C64::from_polar(1.0, b_new.arg()) } else { C64::new(1.0, 0.0) };
    let (na, nb) = (t.a.norm(), t.b.norm());
    let p1 = na * na * ch.p1 + nb * nb * ch.p2 + 2.0 * na * nb * (ch.p1 * ch.p2).sqrt();
    ChannelParams::new(a_new * rot, b_new.norm(), p1, t.c.norm_sqr() * ch.p2)
}

/// Triple of a preset for this channel.
pub fn preset_triple(ch: &ChannelParams, p: TransformPreset) -> Result<TransformTriple> {
    let one = C64::new(1.0, 0.0);
    let a = ch.a;
    let b = C64::new(ch.b, 0.0);
    let singular = |what: &str| Err(Error::SingularPreset(format!("{}: {what}", p.id())));
    match p {
        TransformPreset::ToS => {
            let c = one - a * b;
            if c.norm() < EPS {
                return singular("a b = 1");
            }
            Ok(TransformTriple { a: one, b: a, c })
        }
        TransformPreset::ToWeak => {
            if (a - one).norm() < EPS {
                return singular("a = 1");
            }
            if (a * b - one).norm() < EPS {
                return singular("a b = 1");
            }
            Ok(TransformTriple { a: b, b: a * (one - b) / (a - one), c: (a * b - one) / (a - one) })
        }
        TransformPreset::ToVeryStrong => {
            if (ch.b - 1.0).abs() < EPS {
                return singular("b = 1");
            }
            if (a * b - one).norm() < EPS {
                return singular("a b = 1");
            }
            let d = b * b - one;
            Ok(TransformTriple { a: one, b: (b - a) / d, c: (a * b - one) / d })
        }
    }
}

/// Target channel of a preset. The very-strong preset raises `P2'` to `P1'`
/// when needed, which only enlarges the target region.
pub fn preset_target(ch: &ChannelParams, p: TransformPreset) -> Result<ChannelParams> {
    let mut t = transform_channel(ch, &preset_triple(ch, p)?)?;
    if p == TransformPreset::ToVeryStrong {
        t.p2 = t.p2.max(t.p1);
    }
    Ok(t)
}

fn target_frontier(id: &str, target: &ChannelParams) -> Frontier {
    intersect_frontiers(id, basic_frontiers(target))
}

pub fn preset_frontier(ch: &ChannelParams, p: TransformPreset) -> Result<Frontier> {
    let target = preset_target(ch, p)?;
    Ok(target_frontier(&format!("transform:{}", p.id()), &target))
}

pub fn triples_frontier(ch: &ChannelParams, ts: &[TransformTriple]) -> Result<Frontier> {
    if ts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let fs = ts.iter().map(|t| Ok(target_frontier("transform", &transform_channel(ch, t)?))).collect::<Result<Vec<_>>>()?;
    Ok(intersect_frontiers("transform", fs))
}

pub fn transformed_outer(ch: &ChannelParams, spec: &TransformSpec, sweep: &Sweep) -> Result<RateRegion> {
    let f = match spec {
        TransformSpec::Preset(p) => preset_frontier(ch, *p)?,
        TransformSpec::Triples(ts) => triples_frontier(ch, ts)?,
    };
    Ok(f.region(sweep.r1_points))
}
