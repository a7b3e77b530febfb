use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::PAdicRat;
use crate::ffalg::Prime;

/// A p-adic valuation; `Infinite` is the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }

    /// `self - other`, where an infinite subtrahend yields `None`.
    pub fn minus(self, other: Valuation) -> Option<Valuation> {
        match (self, other) {
            (_, Valuation::Infinite) => None,
            (Valuation::Infinite, _) => Some(Valuation::Infinite),
            (Valuation::Finite(a), Valuation::Finite(b)) => Some(Valuation::Finite(a - b)),
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

pub fn v_p_int(p: Prime, x: &BigInt) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let pb = BigInt::from(p.get());
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        x = q;
        v += 1;
    }
}

pub fn v_p_rational(p: Prime, x: &BigRational) -> Valuation {
    match v_p_int(p, x.numer()) {
        Valuation::Infinite => Valuation::Infinite,
        Valuation::Finite(a) => Valuation::Finite(a - v_p_int(p, x.denom()).finite().unwrap_or(0)),
    }
}

/// `v_p(n!)` by Legendre's formula.
pub fn v_factorial(p: Prime, n: u64) -> i64 {
    let p = p.get();
    let mut acc = 0;
    let mut m = n / p;
    while m > 0 {
        acc += m;
        m /= p;
    }
    acc as i64
}

/// `v_p((x)_n)` for the rising factorial `x (x+1) ... (x+n-1)`.
///
/// For a unit `x` this is `sum_{k>=1} floor((n - 1 + x_k) / p^k)` with `x_k`
/// the digit truncations; otherwise `v_p(x) + v_p((1+x)_{n-1})`.
pub fn pochhammer_val(x: &PAdicRat, n: u64) -> Valuation {
    if n == 0 {
        return Valuation::Finite(0);
    }
    if let Some(m) = x.to_i64() {
        if m <= 0 && ((-m) as u64) < n {
            return Valuation::Infinite;
        }
    }
    if x.residue() == 0 {
        let vx = v_p_int(x.prime(), x.numer());
        return vx + pochhammer_val(&x.add_int(1), n - 1);
    }
    let p = x.prime().get();
    // p^k beyond every |numerator of x + i| can no longer divide a factor
    let bound = x.numer().abs() + x.denom() * BigInt::from(n);
    let mut acc: i64 = 0;
    let mut pk = BigInt::from(p);
    let mut trunc = BigInt::zero();
    let mut pprev = BigInt::from(1u32);
    let digits = super::DigitIter::new(x);
    for d in digits {
        trunc += &pprev * BigInt::from(d);
        let term: BigInt = (BigInt::from(n - 1) + &trunc) / &pk;
        acc += term.to_i64().expect("small");
        if pk > bound {
            break;
        }
        pprev = pk.clone();
        pk *= p;
    }
    Valuation::Finite(acc)
}

/// `sum_{i<n} v_p(x + i)` by direct summation.
pub fn pochhammer_val_oracle(x: &PAdicRat, n: u64) -> Valuation {
    let p = x.prime();
    let mut acc = Valuation::Finite(0);
    let mut num = x.numer().clone();
    for _ in 0..n {
        acc = acc + v_p_int(p, &num);
        if acc.is_infinite() {
            return acc;
        }
        num += x.denom();
    }
    acc
}
