//! CSV and JSON encodings of regions and tables.

use crate::error::{Error, Result};
use crate::region::{RateRegion, RegionKind};

/// Number formatting with 12 significant digits, independent of locale.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.11e}", x);
    let (mant, exp) = s.split_once('e').expect("exponent");
    let e: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&e) {
        let digits = (11 - e).max(0) as usize;
        trim(format!("{:.*}", digits, x))
    } else {
        format!("{}e{}", trim(mant.to_string()), e)
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.to_string() }
}

/// Header plus rows, comma separated, `\n` line endings.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Columns `r1,r2` followed by the parameter columns.
pub fn region_to_csv(r: &RateRegion) -> String {
    let mut header = vec!["r1", "r2"];
    header.extend(r.param_names.iter().map(String::as_str));
    let rows = r.r1().iter().zip(r.r2()).enumerate().map(|(i, (&x, &y))| {
        let mut row = vec![fmt12(x), fmt12(y)];
        if let Some(p) = r.params.get(i) {
            row.extend(p.iter().map(|&v| fmt12(v)));
        }
        row
    });
    csv_table(&header, rows)
}

pub fn region_from_csv(kind: RegionKind, id: &str, text: &str) -> Result<RateRegion> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or(Error::EmptyInput)?.split(',').collect();
    if header.len() < 2 || header[0] != "r1" || header[1] != "r2" {
        return Err(Error::InvalidArgument("region CSV must start with columns r1,r2".into()));
    }
    let (mut r1, mut r2, mut params) = (vec![], vec![], vec![]);
    for line in lines {
        let vals = line
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number `{v}`"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != header.len() {
            return Err(Error::InvalidArgument("ragged CSV row".into()));
        }
        r1.push(vals[0]);
        r2.push(vals[1]);
        params.push(vals[2..].to_vec());
    }
    let reg = RateRegion::from_samples(kind, id, r1, r2)?;
    if header.len() == 2 {
        return Ok(reg);
    }
    Ok(reg.with_params(&header[2..], params))
}

pub fn region_to_json(r: &RateRegion) -> String {
    serde_json::to_string_pretty(r).expect("serializable region")
}

pub fn region_from_json(text: &str) -> Result<RateRegion> {
    let r: RateRegion = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    // Re-validate through the constructor.
    let names: Vec<&str> = r.param_names.iter().map(String::as_str).collect();
    let checked = RateRegion::from_samples(r.kind, &r.id, r.r1().to_vec(), r.r2().to_vec())?;
    Ok(if names.is_empty() { checked } else { checked.with_params(&names, r.params.clone()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(1.0), "1");
        assert_eq!(fmt12(-0.5), "-0.5");
        assert_eq!(fmt12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt12(1234.5678901234567), "1234.56789012");
        assert_eq!(fmt12(1e-7), "1e-7");
        assert_eq!(fmt12(2.5e20), "2.5e20");
        assert_eq!(fmt12(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_round_trip() {
        let r = RateRegion::from_fn(RegionKind::Inner, "x", 1.7, 65, |x| (2.0 - x).sqrt())
            .with_params(&["alpha"], (0..65).map(|k| vec![k as f64 / 7.0]).collect());
        let back = region_from_csv(RegionKind::Inner, "x", &region_to_csv(&r)).unwrap();
        for (a, b) in r.r2().iter().zip(back.r2()) {
            assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0));
        }
        assert_eq!(back.param_names, vec!["alpha"]);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = RateRegion::from_fn(RegionKind::Outer, "y", 2.0, 33, |x| 3.0 - x * x / 2.0);
        assert_eq!(region_from_json(&region_to_json(&r)).unwrap(), r);
    }
}
