use std::fmt;

use crate::error::{Error, Result};

/// The characteristic `p` of the prime field.
///
/// Limited to `p < 2^32` so that residue products fit in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn ensure_same(self, other: Prime) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::PrimeMismatch(self.0, other.0))
        }
    }

    #[inline]
    pub fn reduce(self, x: i128) -> u64 {
        x.rem_euclid(self.0 as i128) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u64) -> Result<u64> {
        if a % self.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.0 - 2))
    }

    /// `C(a, b) mod p` for `0 <= a, b < p` (a single Lucas factor).
    pub fn binom_digit(self, a: u64, b: u64) -> u64 {
        if b > a {
            return 0;
        }
        let b = b.min(a - b);
        let mut num = 1;
        let mut den = 1;
        for i in 0..b {
            num = self.mul(num, (a - i) % self.0);
            den = self.mul(den, (i + 1) % self.0);
        }
        // den is a product of integers < p, hence a unit
        self.mul(num, self.inv(den).expect("unit"))
    }

    /// `C(n, k) mod p` for nonnegative integers, by Lucas' theorem.
    pub fn binom(self, mut n: u64, mut k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut acc = 1;
        while k > 0 {
            let f = self.binom_digit(n % self.0, k % self.0);
            if f == 0 {
                return 0;
            }
            acc = self.mul(acc, f);
            n /= self.0;
            k /= self.0;
        }
        acc
    }

    /// Base-p digits of `n`, least significant first.
    pub fn digits(self, mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        while n > 0 {
            out.push(n % self.0);
            n /= self.0;
        }
        out
    }

    /// Symmetric lift of a residue into `(-p/2, p/2]`, used for printing.
    pub fn signed(self, a: u64) -> i64 {
        if a > self.0 / 2 {
            a as i64 - self.0 as i64
        } else {
            a as i64
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
