//! Rational p-adic integers with exact digit streams.

mod valuation;

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ffalg::Prime;

pub use valuation::{pochhammer_val, pochhammer_val_oracle, v_factorial, v_p_int, v_p_rational, Valuation};

/// Default number of digits shown when no precision is given.
pub const DEFAULT_PRECISION: usize = 8;

/// A rational number `num/den` with `p` not dividing `den`, viewed in Z_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdicRat {
    prime: Prime,
    num: BigInt,
    den: BigInt,
    precision_hint: usize,
}

impl PAdicRat {
    pub fn new(prime: Prime, num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / &g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if (&den % BigInt::from(prime.get())).is_zero() {
            return Err(Error::NotIntegral {
                value: format!("{num}/{den}"),
                p: prime.get(),
            });
        }
        Ok(PAdicRat {
            prime,
            num,
            den,
            precision_hint: DEFAULT_PRECISION,
        })
    }

    pub fn from_ratio(prime: Prime, num: i64, den: i64) -> Result<Self> {
        PAdicRat::new(prime, BigInt::from(num), BigInt::from(den))
    }

    pub fn from_int(prime: Prime, n: i64) -> Self {
        PAdicRat::from_bigint(prime, BigInt::from(n))
    }

    pub fn from_bigint(prime: Prime, n: BigInt) -> Self {
        PAdicRat {
            prime,
            num: n,
            den: BigInt::one(),
            precision_hint: DEFAULT_PRECISION,
        }
    }

    pub fn from_rational(prime: Prime, r: &BigRational) -> Result<Self> {
        PAdicRat::new(prime, r.numer().clone(), r.denom().clone())
    }

    pub fn zero(prime: Prime) -> Self {
        PAdicRat::from_int(prime, 0)
    }

    /// Parses `num/den@p` or `num/den@p:precision`.
    pub fn parse(s: &str) -> Result<Self> {
        let (value, rest) = s
            .split_once('@')
            .ok_or_else(|| Error::Parse(format!("expected `num/den@p`, got `{s}`")))?;
        let (p, prec) = match rest.split_once(':') {
            Some((p, k)) => (p, Some(k)),
            None => (rest, None),
        };
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad prime in `{s}`")))?;
        let mut x = PAdicRat::parse_in(Prime::new(p)?, value)?;
        if let Some(k) = prec {
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad precision in `{s}`")))?;
            if k == 0 {
                return Err(Error::Parse("precision must be positive".into()));
            }
            x.precision_hint = k;
        }
        Ok(x)
    }

    /// Parses `num/den` or an integer for a given prime.
    pub fn parse_in(prime: Prime, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed rational `{s}`"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        PAdicRat::new(prime, n, d)
    }

    pub fn with_precision(mut self, k: usize) -> Self {
        self.precision_hint = k.max(1);
        self
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn precision_hint(&self) -> usize {
        self.precision_hint
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.num.to_i64()
        } else {
            None
        }
    }

    fn build(&self, num: BigInt, den: BigInt) -> PAdicRat {
        let mut out = PAdicRat::new(self.prime, num, den).expect("denominators prime to p are closed");
        out.precision_hint = self.precision_hint;
        out
    }

    pub fn add(&self, other: &PAdicRat) -> PAdicRat {
        assert_eq!(self.prime, other.prime, "mixed primes");
        self.build(&self.num * &other.den + &other.num * &self.den, &self.den * &other.den)
    }

    pub fn sub(&self, other: &PAdicRat) -> PAdicRat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PAdicRat {
        PAdicRat {
            num: -&self.num,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &PAdicRat) -> PAdicRat {
        assert_eq!(self.prime, other.prime, "mixed primes");
        self.build(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn add_int(&self, k: i64) -> PAdicRat {
        self.build(&self.num + &self.den * k, self.den.clone())
    }

    pub fn mul_int(&self, k: i64) -> PAdicRat {
        self.build(&self.num * k, self.den.clone())
    }

    /// Residue of `x` modulo p, i.e. the zeroth digit.
    pub fn residue(&self) -> u64 {
        let p = self.prime;
        let n = big_mod(&self.num, p.get());
        let d = big_mod(&self.den, p.get());
        p.mul(n, p.inv(d).expect("den prime to p"))
    }

    /// First `k` digits `a_0, ..., a_{k-1}`.
    pub fn digits(&self, k: usize) -> Vec<u64> {
        DigitIter::new(self).take(k).collect()
    }

    pub fn digit(&self, k: usize) -> u64 {
        DigitIter::new(self).nth(k).expect("infinite stream")
    }

    /// `sum_{i<k} a_i p^i`.
    pub fn truncation(&self, k: usize) -> BigUint {
        let p = BigUint::from(self.prime.get());
        let mut acc = BigUint::zero();
        for d in self.digits(k).into_iter().rev() {
            acc = acc * &p + BigUint::from(d);
        }
        acc
    }

    /// Exact preperiod and primitive period of the digit stream.
    pub fn digit_profile(&self) -> DigitProfile {
        let mut it = DigitIter::new(self);
        let mut seen: HashMap<BigInt, usize> = HashMap::new();
        let mut digits = Vec::new();
        loop {
            if let Some(&first) = seen.get(&it.state) {
                let period = digits[first..].to_vec();
                digits.truncate(first);
                return DigitProfile {
                    preperiod: digits,
                    period,
                };
            }
            seen.insert(it.state.clone(), digits.len());
            digits.push(it.next().expect("infinite stream"));
        }
    }

    /// `x mod 1` as a reduced fraction in `[0, 1)`.
    pub fn frac(&self) -> BigRational {
        let r = self.num.mod_floor(&self.den);
        BigRational::new(r, self.den.clone())
    }

    /// Whether `self - other` is an integer.
    pub fn differs_by_integer(&self, other: &PAdicRat) -> bool {
        self.sub(other).is_integer()
    }

    pub fn to_ratio_string(&self) -> String {
        if self.den.is_one() {
            self.num.to_string()
        } else {
            format!("{}/{}", self.num, self.den)
        }
    }

    pub fn window(&self, k: usize) -> DigitWindow {
        DigitWindow {
            prime: self.prime,
            digits: self.digits(k),
        }
    }
}

impl fmt::Debug for PAdicRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PAdicRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}@{}", self.num, self.den, self.prime)?;
        if self.precision_hint != DEFAULT_PRECISION {
            write!(f, ":{}", self.precision_hint)?;
        }
        Ok(())
    }
}

/// Digit stream: `a_k = x_k mod p`, `x_{k+1} = (x_k - a_k) / p`, where
/// `x_k = state / den` and the state stays bounded.
struct DigitIter {
    prime: Prime,
    state: BigInt,
    den: BigInt,
    den_inv: u64,
    p_big: BigInt,
}

impl DigitIter {
    fn new(x: &PAdicRat) -> Self {
        let p = x.prime;
        DigitIter {
            prime: p,
            state: x.num.clone(),
            den: x.den.clone(),
            den_inv: p.inv(big_mod(&x.den, p.get())).expect("den prime to p"),
            p_big: BigInt::from(p.get()),
        }
    }
}

impl Iterator for DigitIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let p = self.prime;
        let a = p.mul(big_mod(&self.state, p.get()), self.den_inv);
        let shifted = &self.state - &self.den * a;
        self.state = shifted / &self.p_big;
        Some(a)
    }
}

fn big_mod(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits")
}

/// `C(x, n) mod p` by Lucas: product of `C(a_i, n_i)` over base-p digits.
pub fn binom_mod_p(x: &PAdicRat, n: u64) -> u64 {
    let p = x.prime;
    let nd = p.digits(n);
    let mut acc = 1;
    for (a, b) in DigitIter::new(x).zip(nd) {
        let f = p.binom_digit(a, b);
        if f == 0 {
            return 0;
        }
        acc = p.mul(acc, f);
    }
    acc
}

/// `C(m, n) mod p` for any integer `m`.
pub fn binom_int_mod_p(prime: Prime, m: i64, n: u64) -> u64 {
    if m >= 0 {
        return prime.binom(m as u64, n);
    }
    binom_mod_p(&PAdicRat::from_int(prime, m), n)
}

/// Eventually periodic digit sequence `[preperiod](period)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitProfile {
    pub preperiod: Vec<u64>,
    pub period: Vec<u64>,
}

impl DigitProfile {
    /// Builds a profile, shortening the period to a primitive block and
    /// absorbing the preperiod where possible.
    pub fn new(preperiod: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Invalid("digit period must be nonempty".into()));
        }
        let mut pre = preperiod;
        let mut per = primitive(&period);
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Ok(DigitProfile {
            preperiod: pre,
            period: per,
        })
    }

    /// Parses `[1,0,2](1)` or the compact form `[102](1)` for single-digit
    /// entries.
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("expected `[pre](period)`, got `{s}`"));
        let rest = s.strip_prefix('[').ok_or_else(bad)?;
        let (pre, rest) = rest.split_once(']').ok_or_else(bad)?;
        let per = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let digits = |block: &str| -> Result<Vec<u64>> {
            if block.contains(',') {
                block.split(',').map(|d| d.parse().map_err(|_| bad())).collect()
            } else {
                block
                    .chars()
                    .map(|c| c.to_digit(10).map(u64::from).ok_or_else(bad))
                    .collect()
            }
        };
        DigitProfile::new(digits(pre)?, digits(per)?)
    }

    pub fn digit(&self, k: usize) -> u64 {
        if k < self.preperiod.len() {
            self.preperiod[k]
        } else {
            self.period[(k - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn digits(&self, k: usize) -> Vec<u64> {
        (0..k).map(|i| self.digit(i)).collect()
    }

    pub fn check_digits(&self, prime: Prime) -> Result<()> {
        match self
            .preperiod
            .iter()
            .chain(&self.period)
            .find(|&&d| d >= prime.get())
        {
            Some(&d) => Err(Error::Invalid(format!("digit {d} out of range for p = {prime}"))),
            None => Ok(()),
        }
    }

    /// The rational number `sum a_k p^k`.
    pub fn to_padic(&self, prime: Prime) -> Result<PAdicRat> {
        self.check_digits(prime)?;
        let p = BigInt::from(prime.get());
        let horner = |block: &[u64]| {
            block
                .iter()
                .rev()
                .fold(BigInt::zero(), |acc, &d| acc * &p + BigInt::from(d))
        };
        let a = horner(&self.preperiod);
        let b = horner(&self.period);
        let pm = num_traits::pow(p.clone(), self.preperiod.len());
        let pl = num_traits::pow(p.clone(), self.period.len());
        // A + p^m B / (1 - p^L)
        let den = BigInt::one() - &pl;
        let num = &a * &den + &pm * &b;
        PAdicRat::new(prime, num, den)
    }

    pub fn is_eventually_zero(&self) -> bool {
        self.period == [0]
    }
}

impl fmt::Display for DigitProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.preperiod.iter().chain(&self.period).any(|&d| d > 9);
        let join = |v: &[u64]| {
            let parts: Vec<String> = v.iter().map(u64::to_string).collect();
            parts.join(if wide { "," } else { "" })
        };
        write!(f, "[{}]({})", join(&self.preperiod), join(&self.period))
    }
}

fn primitive(block: &[u64]) -> Vec<u64> {
    let n = block.len();
    for d in 1..=n {
        if n % d == 0 && (0..n).all(|i| block[i] == block[i % d]) {
            return block[..d].to_vec();
        }
    }
    block.to_vec()
}

/// Finitely many certified digits of a p-adic integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitWindow {
    pub prime: Prime,
    pub digits: Vec<u64>,
}

impl DigitWindow {
    pub fn new(prime: Prime, digits: Vec<u64>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d >= prime.get()) {
            return Err(Error::Invalid(format!("digit {d} out of range for p = {prime}")));
        }
        Ok(DigitWindow { prime, digits })
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn matches(&self, x: &PAdicRat) -> bool {
        x.prime() == self.prime && x.digits(self.digits.len()) == self.digits
    }

    /// Digitwise sum with carries, truncated to the shorter window.
    pub fn add(&self, other: &DigitWindow) -> DigitWindow {
        let p = self.prime.get();
        let k = self.len().min(other.len());
        let mut carry = 0;
        let digits = (0..k)
            .map(|i| {
                let s = self.digits[i] + other.digits[i] + carry;
                carry = s / p;
                s % p
            })
            .collect();
        DigitWindow {
            prime: self.prime,
            digits,
        }
    }

    /// Digits of the negative.
    pub fn neg(&self) -> DigitWindow {
        let p = self.prime.get();
        let mut borrow = 0;
        let digits = self
            .digits
            .iter()
            .map(|&d| {
                let s = p - d - borrow;
                if s == p {
                    borrow = 0;
                    0
                } else {
                    borrow = 1;
                    s
                }
            })
            .collect();
        DigitWindow {
            prime: self.prime,
            digits,
        }
    }

    /// Smallest `(preperiod, period)` with `preperiod + 2 * period <= len`
    /// explaining the window, if any.
    pub fn detect_period(&self, max_period: usize) -> Option<DigitProfile> {
        let n = self.digits.len();
        for total in 1..=n {
            for l in 1..=max_period.min(total) {
                let m = total - l;
                if m + 2 * l > n {
                    continue;
                }
                if (m..n).all(|i| self.digits[i] == self.digits[m + (i - m) % l]) {
                    return DigitProfile::new(self.digits[..m].to_vec(), self.digits[m..m + l].to_vec()).ok();
                }
            }
        }
        None
    }

    pub fn truncation(&self) -> BigUint {
        let p = BigUint::from(self.prime.get());
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &p + BigUint::from(d))
    }
}

impl fmt::Display for DigitWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(u64::to_string).collect();
        write!(f, "{}...@{}", parts.join(","), self.prime)
    }
}

/// Signed `BigInt` from a `BigUint`, for mixed arithmetic.
pub fn to_signed(x: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x.clone())
}
