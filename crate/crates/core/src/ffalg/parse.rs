//! Text formats: `2*t^3+t+1`, `(t+1)/(t^2+2)`, `t^-1 + 2*t + O(t^5)`.

use std::collections::BTreeMap;

use super::poly::FpPoly;
use super::prime::Prime;
use super::ratfn::FpRatFn;
use super::series::FpSeries;
use crate::error::{Error, Result};

pub fn parse_poly(prime: Prime, s: &str, var: &str) -> Result<FpPoly> {
    let s = strip_parens(&compact(s));
    let terms = parse_terms(prime, &s, var)?;
    if terms.error.is_some() {
        return Err(Error::Parse(format!("unexpected O-term in polynomial `{s}`")));
    }
    let mut coeffs = Vec::new();
    for (e, c) in terms.terms {
        if e < 0 {
            return Err(Error::Parse(format!("negative exponent in polynomial `{s}`")));
        }
        let e = e as usize;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, 0);
        }
        coeffs[e] = c;
    }
    Ok(FpPoly::new(prime, coeffs))
}

/// Parses `num` or `num/den`; the parts may be parenthesised.
pub fn parse_ratfn(prime: Prime, s: &str, var: &str) -> Result<FpRatFn> {
    let s = compact(s);
    let mut depth = 0i32;
    let mut split = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                if split.is_some() {
                    return Err(Error::Parse(format!("more than one `/` in `{s}`")));
                }
                split = Some(i);
            }
            _ => {}
        }
    }
    match split {
        None => Ok(FpRatFn::from_poly(parse_poly(prime, &s, var)?)),
        Some(i) => {
            let num = parse_poly(prime, &s[..i], var)?;
            let den = parse_poly(prime, &s[i + 1..], var)?;
            FpRatFn::new(num, den)
        }
    }
}

/// Parses a Laurent polynomial followed by a mandatory `O(t^k)` term.
pub fn parse_series(prime: Prime, s: &str, var: &str) -> Result<FpSeries> {
    let s = compact(s);
    let terms = parse_terms(prime, &s, var)?;
    let abs = terms
        .error
        .ok_or_else(|| Error::Parse(format!("series `{s}` lacks an O-term")))?;
    let low = terms.terms.keys().next().copied().unwrap_or(abs - 1).min(abs - 1);
    let coeffs = (low..abs)
        .map(|e| terms.terms.get(&e).copied().unwrap_or(0))
        .collect();
    if terms.terms.keys().any(|&e| e >= abs) {
        return Err(Error::Parse(format!("term beyond the O-term in `{s}`")));
    }
    FpSeries::new(prime, low, coeffs)
}

struct Terms {
    terms: BTreeMap<i64, u64>,
    error: Option<i64>,
}

fn compact(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn strip_parens(s: &str) -> String {
    let mut s = s;
    while s.starts_with('(') && s.ends_with(')') && balanced(&s[1..s.len() - 1]) {
        s = &s[1..s.len() - 1];
    }
    s.to_string()
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

fn parse_terms(prime: Prime, s: &str, var: &str) -> Result<Terms> {
    if s.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut pieces: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let mut negative = false;
    let bytes = s.as_bytes();
    for i in 0..bytes.len() {
        let ch = bytes[i];
        if (ch == b'+' || ch == b'-') && i > 0 && bytes[i - 1] != b'^' && bytes[i - 1] != b'(' {
            pieces.push((negative, &s[start..i]));
            negative = ch == b'-';
            start = i + 1;
        } else if i == 0 && (ch == b'+' || ch == b'-') {
            negative = ch == b'-';
            start = 1;
        }
    }
    pieces.push((negative, &s[start..]));

    let mut out = Terms {
        terms: BTreeMap::new(),
        error: None,
    };
    for (neg, piece) in pieces {
        if piece.is_empty() {
            return Err(Error::Parse(format!("empty term in `{s}`")));
        }
        if let Some(inner) = piece.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
            if neg || out.error.is_some() {
                return Err(Error::Parse(format!("malformed O-term in `{s}`")));
            }
            let (c, e) = parse_monomial(inner, var)?;
            if c != 1 {
                return Err(Error::Parse(format!("O-term must be a bare power in `{s}`")));
            }
            out.error = Some(e);
            continue;
        }
        let (c, e) = parse_monomial(piece, var)?;
        let c = prime.reduce(if neg { -c } else { c });
        let slot = out.terms.entry(e).or_insert(0);
        *slot = prime.add(*slot, c);
    }
    out.terms.retain(|_, c| *c != 0);
    Ok(out)
}

// `c`, `c*t`, `c*t^e`, `t^e`, `ct^e`
fn parse_monomial(s: &str, var: &str) -> Result<(i128, i64)> {
    let bad = || Error::Parse(format!("cannot read term `{s}`"));
    let Some(pos) = s.find(var) else {
        return Ok((s.parse::<i128>().map_err(|_| bad())?, 0));
    };
    let head = s[..pos].trim_end_matches('*');
    let coeff = if head.is_empty() {
        1
    } else {
        head.parse::<i128>().map_err(|_| bad())?
    };
    let tail = &s[pos + var.len()..];
    let exp = if tail.is_empty() {
        1
    } else {
        let e = tail.strip_prefix('^').ok_or_else(bad)?;
        let e = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(e);
        e.parse::<i64>().map_err(|_| bad())?
    };
    Ok((coeff, exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn round_trips() {
        let p = pr(7);
        for s in ["2*t^3+t+1", "t", "0", "5", "t^2+6"] {
            let f = parse_poly(p, s, "t").unwrap();
            assert_eq!(f.to_string_in("t"), s);
        }
        for s in ["1/t", "2/(t^2+t+1)", "(t+1)/(t^2+2)", "3*t/(t+4)"] {
            let h = parse_ratfn(p, s, "t").unwrap();
            assert_eq!(parse_ratfn(p, &h.to_string_in("t"), "t").unwrap(), h, "{s}");
        }
        let s = parse_series(pr(5), "t^-1 + 2*t + O(t^5)", "t").unwrap();
        assert_eq!(s.valuation(), -1);
        assert_eq!(s.abs_precision(), 5);
        assert_eq!(s.to_string_in("t"), "t^-1 + 2*t + O(t^5)");
    }

    #[test]
    fn signs_and_spacing() {
        let p = pr(5);
        let f = parse_poly(p, " -t^2 - 3 + 2 t ", "t").unwrap();
        assert_eq!(f.coeffs(), &[2, 2, 4]);
        let z = parse_ratfn(p, "-1/(z*(z-1))", "z");
        assert!(z.is_err(), "products are not part of the format");
        let z = parse_ratfn(p, "-1/(z^2-z)", "z").unwrap();
        assert_eq!(z.to_string_in("z"), "4/(z^2+4*z)");
    }

    #[test]
    fn rejects_garbage() {
        let p = pr(3);
        assert!(parse_poly(p, "t^", "t").is_err());
        assert!(parse_poly(p, "t^-1", "t").is_err());
        assert!(parse_series(p, "1 + t", "t").is_err());
        assert!(parse_ratfn(p, "1/0", "t").is_err());
        assert!(parse_ratfn(p, "", "t").is_err());
    }
}
