use std::fmt;

use super::poly::FpPoly;
use super::prime::Prime;
use super::ratfn::FpRatFn;
use crate::error::{Error, Result};
use crate::padic;

/// Truncated Laurent series `sum_{e >= valuation} c_e t^e + O(t^abs)` over
/// F_p, with `abs = valuation + precision`.
///
/// The first stored coefficient is nonzero unless the series is zero to its
/// precision.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpSeries {
    prime: Prime,
    valuation: i64,
    coeffs: Vec<u64>,
}

impl FpSeries {
    /// Series with coefficients `coeffs[i]` at exponent `start + i`.
    pub fn new(prime: Prime, start: i64, coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("series needs a positive precision".into()));
        }
        let p = prime.get();
        let coeffs = coeffs.into_iter().map(|c| c % p).collect();
        Ok(normalized(prime, start, coeffs))
    }

    /// The zero series `O(t^abs)`, stored with `precision` zero coefficients.
    pub fn zero(prime: Prime, abs_precision: i64, precision: usize) -> Self {
        let precision = precision.max(1);
        FpSeries {
            prime,
            valuation: abs_precision - precision as i64,
            coeffs: vec![0; precision],
        }
    }

    /// `c t^k + O(t^(k + precision))`.
    pub fn monomial(prime: Prime, c: u64, k: i64, precision: usize) -> Self {
        let mut coeffs = vec![0; precision.max(1)];
        coeffs[0] = c % prime.get();
        normalized(prime, k, coeffs)
    }

    /// Polynomial truncated to `O(t^abs)`.
    pub fn from_poly(f: &FpPoly, abs_precision: i64) -> Result<Self> {
        if abs_precision <= 0 {
            return Err(Error::Invalid("polynomial truncation needs abs precision >= 1".into()));
        }
        let coeffs = (0..abs_precision as usize).map(|k| f.coeff(k)).collect();
        Ok(normalized(f.prime(), 0, coeffs))
    }

    /// Laurent expansion of `h` at the finite point `c` in the local
    /// parameter `t - c`, with `precision` significant coefficients.
    pub fn expand_ratfn(h: &FpRatFn, c: u64, precision: usize) -> Result<Self> {
        expand_at_zero(&h.taylor_shift(c), precision)
    }

    /// Laurent expansion of `h` at infinity in the local parameter `1/t`.
    pub fn expand_ratfn_at_infinity(h: &FpRatFn, precision: usize) -> Result<Self> {
        expand_at_zero(&h.invert_variable(), precision)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// Exponent of the first stored coefficient.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Number of stored coefficients.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// Exponent of the error term.
    pub fn abs_precision(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Coefficient of `t^e`; fails beyond the stored precision.
    pub fn coeff(&self, e: i64) -> Result<u64> {
        if e >= self.abs_precision() {
            return Err(Error::PrecisionExhausted(format!(
                "coefficient of t^{e} requested, series known to O(t^{})",
                self.abs_precision()
            )));
        }
        if e < self.valuation {
            Ok(0)
        } else {
            Ok(self.coeffs[(e - self.valuation) as usize])
        }
    }

    /// Drops all terms of exponent `>= abs`.
    pub fn truncate(&self, abs_precision: i64) -> Self {
        if abs_precision >= self.abs_precision() {
            return self.clone();
        }
        if abs_precision <= self.valuation {
            return FpSeries::zero(self.prime, abs_precision, 1);
        }
        let len = (abs_precision - self.valuation) as usize;
        normalized(self.prime, self.valuation, self.coeffs[..len].to_vec())
    }

    /// Equality of the common known part.
    pub fn agrees_with(&self, other: &FpSeries) -> bool {
        if self.prime != other.prime {
            return false;
        }
        let top = self.abs_precision().min(other.abs_precision());
        let low = self.valuation.min(other.valuation);
        (low..top).all(|e| self.coeff(e).ok() == other.coeff(e).ok())
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.prime;
        let coeffs = self.coeffs.iter().map(|&a| p.mul(a, c % p.get())).collect();
        normalized(p, self.valuation, coeffs)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        FpSeries {
            prime: self.prime,
            valuation: self.valuation + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn add(&self, other: &FpSeries) -> Result<Self> {
        self.prime.ensure_same(other.prime)?;
        let p = self.prime;
        let top = self.abs_precision().min(other.abs_precision());
        let low = self.valuation.min(other.valuation);
        if top <= low {
            return Ok(FpSeries::zero(p, top, 1));
        }
        let coeffs = (low..top)
            .map(|e| p.add(self.coeff(e).unwrap_or(0), other.coeff(e).unwrap_or(0)))
            .collect();
        Ok(normalized(p, low, coeffs))
    }

    pub fn neg(&self) -> Self {
        let p = self.prime;
        FpSeries {
            prime: p,
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|&c| p.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &FpSeries) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FpSeries) -> Result<Self> {
        self.prime.ensure_same(other.prime)?;
        let p = self.prime;
        let len = self.coeffs.len().min(other.coeffs.len());
        let start = self.valuation + other.valuation;
        if self.is_zero() || other.is_zero() {
            // a zero factor only certifies the product below its own error term
            let abs = (self.abs_precision() + other.valuation)
                .min(other.abs_precision() + self.valuation);
            return Ok(FpSeries::zero(p, abs, len));
        }
        let pp = p.get() as u128;
        let coeffs = (0..len)
            .map(|k| {
                let mut acc: u128 = 0;
                for i in 0..=k {
                    acc += self.coeffs[i] as u128 * other.coeffs[k - i] as u128;
                }
                (acc % pp) as u64
            })
            .collect();
        Ok(normalized(p, start, coeffs))
    }

    /// Multiplicative inverse; needs a known nonzero leading coefficient.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "cannot invert a series that vanishes to O(t^{})",
                self.abs_precision()
            )));
        }
        let p = self.prime;
        let len = self.coeffs.len();
        let u0 = p.inv(self.coeffs[0])?;
        let mut out = vec![0u64; len];
        out[0] = u0;
        for k in 1..len {
            let mut acc = 0;
            for i in 1..=k {
                acc = p.add(acc, p.mul(self.coeffs[i], out[k - i]));
            }
            out[k] = p.mul(p.neg(acc), u0);
        }
        Ok(normalized(p, -self.valuation, out))
    }

    pub fn div(&self, other: &FpSeries) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn to_string_in(&self, var: &str) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = self.valuation + i as i64;
            let mono = match e {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{e}"),
            };
            terms.push(match (c, e) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        terms.push(format!("O({var}^{})", self.abs_precision()));
        terms.join(" + ")
    }
}

/// Termwise divided derivative `hasse(t^m, n) = C(m, n) t^(m-n)`, with the
/// binomial of a negative exponent taken p-adically.
pub fn hasse_series(s: &FpSeries, n: usize) -> FpSeries {
    if n == 0 {
        return s.clone();
    }
    let p = s.prime;
    let coeffs = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if c == 0 {
                return 0;
            }
            let m = s.valuation + i as i64;
            p.mul(c, padic::binom_int_mod_p(p, m, n as u64))
        })
        .collect();
    normalized(p, s.valuation - n as i64, coeffs)
}

fn expand_at_zero(h: &FpRatFn, precision: usize) -> Result<FpSeries> {
    let p = h.prime();
    let precision = precision.max(1);
    if h.is_zero() {
        return Ok(FpSeries::zero(p, precision as i64, precision));
    }
    let vn = h.num().order_at(0).expect("nonzero") as i64;
    let vd = h.den().order_at(0).expect("nonzero") as i64;
    let num = FpPoly::new(p, h.num().coeffs()[vn as usize..].to_vec());
    let den = FpPoly::new(p, h.den().coeffs()[vd as usize..].to_vec());
    let d0 = p.inv(den.coeff(0))?;
    let mut out = vec![0u64; precision];
    for k in 0..precision {
        let mut acc = num.coeff(k);
        for i in 1..=k {
            acc = p.sub(acc, p.mul(den.coeff(i), out[k - i]));
        }
        out[k] = p.mul(acc, d0);
    }
    Ok(normalized(p, vn - vd, out))
}

fn normalized(prime: Prime, start: i64, mut coeffs: Vec<u64>) -> FpSeries {
    match coeffs.iter().position(|&c| c != 0) {
        Some(0) | None => FpSeries {
            prime,
            valuation: start,
            coeffs,
        },
        Some(k) => {
            coeffs.drain(..k);
            FpSeries {
                prime,
                valuation: start + k as i64,
                coeffs,
            }
        }
    }
}

impl fmt::Debug for FpSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpSeries[{}]({})", self.prime, self.to_string_in("t"))
    }
}

impl fmt::Display for FpSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffalg::ratfn::hasse_ratfn;

    fn pr(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn hasse_of_negative_power() {
        let p = pr(3);
        let s = FpSeries::monomial(p, 1, -1, 6);
        let d = hasse_series(&s, 1);
        assert_eq!(d.valuation(), -2);
        assert_eq!(d.coeff(-2).unwrap(), 2);
        assert_eq!(d.abs_precision(), s.abs_precision() - 1);
    }

    #[test]
    fn hasse_small_examples() {
        let p = pr(2);
        let s = FpSeries::monomial(p, 1, 3, 4);
        let d = hasse_series(&s, 2);
        assert_eq!(d.valuation(), 1);
        assert_eq!(d.coeff(1).unwrap(), 1);
        assert_eq!(hasse_series(&s, 0), s);
    }

    #[test]
    fn precision_is_enforced() {
        let p = pr(5);
        let s = FpSeries::new(p, -1, vec![1, 0, 2]).unwrap();
        assert_eq!(s.abs_precision(), 2);
        assert!(s.coeff(2).is_err());
        assert_eq!(s.to_string_in("t"), "t^-1 + 2*t + O(t^2)");
        let q = s.mul(&FpSeries::new(p, 0, vec![1, 1]).unwrap()).unwrap();
        assert_eq!(q.abs_precision(), 1);
    }

    #[test]
    fn inverse_round_trip() {
        let p = pr(7);
        let s = FpSeries::new(p, -2, vec![3, 1, 4, 1, 5, 0, 2]).unwrap();
        let one = s.mul(&s.inv().unwrap()).unwrap();
        assert!(one.agrees_with(&FpSeries::monomial(p, 1, 0, 7)));
        assert!(FpSeries::zero(p, 4, 3).inv().is_err());
    }

    #[test]
    fn expansion_commutes_with_hasse() {
        let p = pr(5);
        let h = FpRatFn::new(FpPoly::from_i64(p, &[1, 2, 3]), FpPoly::from_i64(p, &[0, 0, 1, 1])).unwrap();
        for c in [0, 2, 4] {
            let s = FpSeries::expand_ratfn(&h, c, 20).unwrap();
            for n in 0..8 {
                let lhs = hasse_series(&s, n);
                let rhs = FpSeries::expand_ratfn(&hasse_ratfn(&h, n), c, 20).unwrap();
                assert!(lhs.agrees_with(&rhs), "c={c} n={n}");
            }
        }
    }

    #[test]
    fn expansion_at_infinity() {
        let p = pr(3);
        // t/(t-1) = 1 + 1/t + 1/t^2 + ...
        let h = FpRatFn::new(FpPoly::monomial(p, 1, 1), FpPoly::linear(p, 1)).unwrap();
        let s = FpSeries::expand_ratfn_at_infinity(&h, 5).unwrap();
        assert_eq!(s.coeffs(), &[1, 1, 1, 1, 1]);
        assert_eq!(s.valuation(), 0);
    }
}
