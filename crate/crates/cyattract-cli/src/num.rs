//! Decimal-string rendering and parsing of numbers for the JSON documents.

use cyattract::exact::{parse_q, q_string, GaussRat, Q};
use cyattract::monodromy::CMat;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::CliError;

/// Scientific notation with `prec` fractional digits; −0 prints as 0.
pub fn dec(x: f64, prec: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.prec$e}")
}

pub fn cx(z: Complex64, prec: usize) -> Value {
    json!({ "re": dec(z.re, prec), "im": dec(z.im, prec) })
}

pub fn cvec(v: &[Complex64], prec: usize) -> Value {
    Value::Array(v.iter().map(|z| cx(*z, prec)).collect())
}

pub fn cmat(m: &CMat, prec: usize) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| cx(m[(i, j)], prec)).collect())).collect())
}

pub fn parse_f64(s: &str) -> Option<f64> {
    let s = s.trim();
    s.parse::<f64>().ok().or_else(|| parse_q(s).map(|q| cyattract::exact::q_to_f64(&q)))
}

/// Splits `a+bi` / `a-bi` / `bi` / `a` into real and imaginary text.
fn split_complex(s: &str) -> Option<(String, String)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('I')) else {
        return Some((s, "0".into()));
    };
    // The sign that starts the imaginary part is the last + or − not preceded by 'e'.
    let bytes = body.as_bytes();
    let cut = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match cut {
        Some(k) => (body[..k].to_string(), body[k..].to_string()),
        None => ("0".to_string(), body.to_string()),
    };
    let im = match im.as_str() {
        "" | "+" => "1".to_string(),
        "-" => "-1".to_string(),
        _ => im.trim_start_matches('+').to_string(),
    };
    Some((re, im))
}

pub fn parse_c64(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("cannot parse complex number {s:?}"));
    let (re, im) = split_complex(s).ok_or_else(bad)?;
    Ok(Complex64::new(parse_f64(&re).ok_or_else(bad)?, parse_f64(&im).ok_or_else(bad)?))
}

pub fn parse_rational(s: &str) -> Result<Q, CliError> {
    parse_q(s).ok_or_else(|| CliError::Usage(format!("cannot parse exact fraction {s:?}")))
}

pub fn parse_gauss(s: &str) -> Result<GaussRat, CliError> {
    let bad = || CliError::Usage(format!("cannot parse exact Gaussian rational {s:?}"));
    let (re, im) = split_complex(s).ok_or_else(bad)?;
    Ok(GaussRat::new(parse_q(&re).ok_or_else(bad)?, parse_q(&im).ok_or_else(bad)?))
}

pub fn gauss_string(g: &GaussRat) -> String {
    use num_traits::Zero;
    if g.im.is_zero() {
        q_string(&g.re)
    } else {
        let sign = if g.im < Q::zero() { "" } else { "+" };
        format!("{}{sign}{}i", q_string(&g.re), q_string(&g.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_c64("0.3+0.2i").unwrap(), Complex64::new(0.3, 0.2));
        assert_eq!(parse_c64("-1e-3-2i").unwrap(), Complex64::new(-1e-3, -2.0));
        assert_eq!(parse_c64("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_c64("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_c64("1/2-i").unwrap(), Complex64::new(0.5, -1.0));
        assert!(parse_c64("x").is_err());
    }

    #[test]
    fn gauss_round_trip() {
        let g = parse_gauss("1/2-3/4i").unwrap();
        assert_eq!(gauss_string(&g), "1/2-3/4i");
        assert_eq!(dec(-0.0, 3), "0.000e0");
    }
}
