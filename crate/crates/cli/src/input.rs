//! Channel specs, config files and flag merging.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use cifc_core::{to_standard_form, ChannelParams, Complex64, RawChannel, Sweep};
use serde::Deserialize;

use crate::Failure;

/// Mirror of the command-line flags; every field is optional and flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub a: Option<String>,
    pub b: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub p: Option<f64>,
    pub raw: Option<String>,
    pub ids: Option<Vec<String>>,
    pub outer: Option<String>,
    pub inner: Option<String>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub mode: Option<String>,
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub b_min: Option<f64>,
    pub b_max: Option<f64>,
    pub resolution: Option<usize>,
    pub fast: Option<bool>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub sweep: Option<Sweep>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("--config: cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("--config: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// `re`, `imj`, `re+imj` or `re-imj`; `i` is accepted in place of `j`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.replace('i', "j");
    if t.is_empty() {
        return Err("empty value".into());
    }
    let Some(body) = t.strip_suffix('j') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|e| format!("`{s}`: {e}"));
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let cut = (1..bytes.len()).rev().find(|&k| {
        (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
    });
    let (re, im) = match cut {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    let re: f64 = re.parse().map_err(|e| format!("`{s}`: {e}"))?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|e| format!("`{s}`: {e}"))?;
    Ok(Complex64::new(re, im))
}

/// `h11=..,h12=..,h21=..,h22=..,sigma1_sq=..,sigma2_sq=..,p1=..,p2=..`.
/// Cross gains default to 0 and noise variances to 1.
pub fn parse_raw(s: &str) -> Result<RawChannel, String> {
    let zero = Complex64::new(0.0, 0.0);
    let mut raw = RawChannel {
        h11: Complex64::new(1.0, 0.0),
        h12: zero,
        h21: zero,
        h22: Complex64::new(1.0, 0.0),
        sigma1_sq: 1.0,
        sigma2_sq: 1.0,
        p1_raw: f64::NAN,
        p2_raw: f64::NAN,
    };
    for item in s.split(',').filter(|x| !x.trim().is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| format!("`{item}` is not key=value"))?;
        let real = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{k}: {e}"));
        match k.trim() {
            "h11" => raw.h11 = parse_complex(v)?,
            "h12" => raw.h12 = parse_complex(v)?,
            "h21" => raw.h21 = parse_complex(v)?,
            "h22" => raw.h22 = parse_complex(v)?,
            "sigma1_sq" | "s1" => raw.sigma1_sq = real(v)?,
            "sigma2_sq" | "s2" => raw.sigma2_sq = real(v)?,
            "p1" => raw.p1_raw = real(v)?,
            "p2" => raw.p2_raw = real(v)?,
            other => return Err(format!("unknown key `{other}`")),
        }
    }
    if raw.p1_raw.is_nan() || raw.p2_raw.is_nan() {
        return Err("p1 and p2 are required".into());
    }
    Ok(raw)
}

/// Channel flags as given on the command line.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct ChannelArgs {
    /// Cross gain at receiver 1: `re` or `re+imj`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Cross gain at receiver 2 (nonnegative).
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    /// Raw channel, reduced to standard form: `h11=..,h12=..,h21=..,h22=..,sigma1_sq=..,sigma2_sq=..,p1=..,p2=..`.
    #[arg(long, conflicts_with_all = ["a", "b", "p1", "p2"])]
    pub raw: Option<String>,
}

impl ChannelArgs {
    pub fn resolve(&self, file: &FileConfig) -> Result<ChannelParams, Failure> {
        let flags_given = self.a.is_some() || self.b.is_some() || self.p1.is_some() || self.p2.is_some();
        let raw = self.raw.clone().or(if flags_given { None } else { file.raw.clone() });
        if let Some(raw) = raw {
            let raw = parse_raw(&raw).map_err(|e| Failure::usage(format!("--raw: {e}")))?;
            return to_standard_form(&raw).map_err(|e| Failure::usage(format!("--raw: {e}")));
        }
        let a = match self.a.clone().or(file.a.clone()) {
            Some(s) => parse_complex(&s).map_err(|e| Failure::usage(format!("--a: {e}")))?,
            None => return Err(Failure::usage("--a is required (or --raw)".into())),
        };
        let b = self.b.or(file.b).ok_or_else(|| Failure::usage("--b is required (or --raw)".into()))?;
        let p1 = self.p1.or(file.p1).or(file.p).ok_or_else(|| Failure::usage("--p1 is required (or --raw)".into()))?;
        let p2 = self.p2.or(file.p2).or(file.p).ok_or_else(|| Failure::usage("--p2 is required (or --raw)".into()))?;
        ChannelParams::new(a, b, p1, p2).map_err(|e| Failure::usage(format!("channel: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("-1.5+2j").unwrap(), Complex64::new(-1.5, 2.0));
        assert_eq!(parse_complex("1-0.25i").unwrap(), Complex64::new(1.0, -0.25));
        assert_eq!(parse_complex("3j").unwrap(), Complex64::new(0.0, 3.0));
        assert_eq!(parse_complex("1e-3+2e-1j").unwrap(), Complex64::new(1e-3, 0.2));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn raw_defaults_and_errors() {
        let r = parse_raw("h11=2,h21=1+1j,p1=4,p2=1").unwrap();
        assert_eq!(r.h11, Complex64::new(2.0, 0.0));
        assert_eq!(r.sigma2_sq, 1.0);
        assert!(parse_raw("h11=1").is_err());
        assert!(parse_raw("h99=1,p1=1,p2=1").is_err());
    }
}
