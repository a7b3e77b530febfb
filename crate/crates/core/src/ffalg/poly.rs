use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::prime::Prime;
use crate::error::{Error, Result};

/// Univariate polynomial over F_p, coefficients in ascending degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    prime: Prime,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(prime: Prime, coeffs: Vec<u64>) -> Self {
        let p = prime.get();
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        trim(&mut coeffs);
        FpPoly { prime, coeffs }
    }

    pub fn from_i64(prime: Prime, coeffs: &[i64]) -> Self {
        let c = coeffs.iter().map(|&c| prime.reduce(c as i128)).collect();
        FpPoly::new(prime, c)
    }

    pub fn zero(prime: Prime) -> Self {
        FpPoly { prime, coeffs: Vec::new() }
    }

    pub fn one(prime: Prime) -> Self {
        FpPoly::constant(prime, 1)
    }

    pub fn constant(prime: Prime, c: u64) -> Self {
        FpPoly::new(prime, vec![c])
    }

    /// `c * t^k`
    pub fn monomial(prime: Prime, c: u64, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        FpPoly::new(prime, coeffs)
    }

    /// The linear polynomial `t - c`.
    pub fn linear(prime: Prime, c: u64) -> Self {
        FpPoly::new(prime, vec![prime.neg(c % prime.get()), 1])
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.prime;
        FpPoly::new(p, self.coeffs.iter().map(|&a| p.mul(a, c % p.get())).collect())
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.prime.inv(self.leading()).expect("nonzero leading coefficient");
        self.scale(inv)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.prime;
        self.coeffs.iter().rev().fold(0, |acc, &c| p.add(p.mul(acc, x % p.get()), c))
    }

    /// Multiply by `t^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        FpPoly { prime: self.prime, coeffs }
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut acc = FpPoly::one(self.prime);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Quotient and remainder of Euclidean division.
    pub fn divrem(&self, divisor: &FpPoly) -> Result<(FpPoly, FpPoly)> {
        check_prime(self, divisor);
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.prime;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((FpPoly::zero(p), self.clone()));
        }
        let inv = p.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = p.mul(rem[i + dd], inv);
            quot[i] = c;
            if c != 0 {
                for (j, &d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = p.sub(rem[i + j], p.mul(c, d));
                }
            }
        }
        rem.truncate(dd);
        Ok((FpPoly::new(p, quot), FpPoly::new(p, rem)))
    }

    /// Division that is known to be exact.
    pub fn exact_div(&self, divisor: &FpPoly) -> FpPoly {
        let (q, r) = self.divrem(divisor).expect("nonzero divisor");
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn rem(&self, divisor: &FpPoly) -> FpPoly {
        self.divrem(divisor).expect("nonzero divisor").1
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        check_prime(self, other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// `f(t^e)`.
    pub fn compose_power(&self, e: usize) -> FpPoly {
        if self.is_zero() || e == 1 {
            return self.clone();
        }
        let mut coeffs = vec![0; (self.coeffs.len() - 1) * e + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[k * e] = c;
        }
        FpPoly { prime: self.prime, coeffs }
    }

    /// `f(t + c)`, computed from the Taylor coefficients `hasse(f, n)(c)`.
    pub fn taylor_shift(&self, c: u64) -> FpPoly {
        let Some(d) = self.degree() else {
            return self.clone();
        };
        if c % self.prime.get() == 0 {
            return self.clone();
        }
        let coeffs = (0..=d).map(|n| hasse_poly(self, n).eval(c)).collect();
        FpPoly::new(self.prime, coeffs)
    }

    /// `t^deg * f(1/t)` padded to the given degree.
    pub fn reversed(&self, degree: usize) -> FpPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, 0);
        coeffs.reverse();
        FpPoly::new(self.prime, coeffs)
    }

    /// Order of vanishing at `c` (`None` for the zero polynomial).
    pub fn order_at(&self, c: u64) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let lin = FpPoly::linear(self.prime, c);
        let mut f = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = f.divrem(&lin).expect("nonzero");
            if !r.is_zero() {
                return Some(k);
            }
            f = q;
            k += 1;
        }
    }

    /// `f^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &FpPoly) -> FpPoly {
        let mut acc = FpPoly::one(self.prime).rem(m);
        let mut base = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base).rem(m);
            }
            e >>= 1;
            if e > 0 {
                base = (&base * &base).rem(m);
            }
        }
        acc
    }

    /// Distinct roots in F_p, sorted.
    pub fn roots(&self) -> Vec<u64> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let p = self.prime;
        let mut roots = if p.get() <= 256 {
            (0..p.get()).filter(|&c| self.eval(c) == 0).collect()
        } else {
            let f = self.make_monic();
            let x = FpPoly::monomial(p, 1, 1);
            let xp = x.pow_mod(p.get(), &f);
            let g = f.gcd(&(&xp - &x));
            let mut out = Vec::new();
            split_roots(&g, &mut out);
            out
        };
        roots.sort_unstable();
        roots
    }

    /// Factorisation `(root, multiplicity)` when the polynomial splits into
    /// linear factors over F_p; `None` otherwise.
    pub fn split_factors(&self) -> Option<Vec<(u64, usize)>> {
        let d = self.degree()?;
        let roots = self.roots();
        let mut total = 0;
        let mut out = Vec::with_capacity(roots.len());
        for r in roots {
            let m = self.order_at(r).unwrap_or(0);
            total += m;
            out.push((r, m));
        }
        (total == d).then_some(out)
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push('+');
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            match (c, k) {
                (_, 0) => out.push_str(&c.to_string()),
                (1, _) => out.push_str(&mono),
                _ => out.push_str(&format!("{c}*{mono}")),
            }
        }
        out
    }
}

/// Hasse derivative `sum_k c_k C(k, n) t^(k-n)`, binomials by Lucas.
pub fn hasse_poly(f: &FpPoly, n: usize) -> FpPoly {
    if n == 0 {
        return f.clone();
    }
    let p = f.prime;
    if f.coeffs.len() <= n {
        return FpPoly::zero(p);
    }
    let coeffs = (n..f.coeffs.len())
        .map(|k| {
            let c = f.coeffs[k];
            if c == 0 {
                0
            } else {
                p.mul(c, p.binom(k as u64, n as u64))
            }
        })
        .collect();
    FpPoly::new(p, coeffs)
}

fn split_roots(g: &FpPoly, out: &mut Vec<u64>) {
    let p = g.prime;
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let c = p.mul(g.coeff(0), p.inv(g.coeff(1)).expect("monic"));
            out.push(p.neg(c));
        }
        Some(_) => {
            let one = FpPoly::one(p);
            for a in 0..p.get() {
                let shifted = FpPoly::new(p, vec![a, 1]);
                let h = g.gcd(&(&shifted.pow_mod((p.get() - 1) / 2, g) - &one));
                let dh = h.degree().unwrap_or(0);
                if dh > 0 && dh < g.degree().unwrap() {
                    split_roots(&h, out);
                    split_roots(&g.exact_div(&h), out);
                    return;
                }
            }
            unreachable!("squarefree product of distinct linear factors always splits");
        }
    }
}

fn trim(c: &mut Vec<u64>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

fn check_prime(a: &FpPoly, b: &FpPoly) {
    assert_eq!(a.prime, b.prime, "mixed characteristics in polynomial arithmetic");
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly[{}]({})", self.prime, self.to_string_in("t"))
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("t"))
    }
}

impl Add for &FpPoly {
    type Output = FpPoly;
    fn add(self, rhs: &FpPoly) -> FpPoly {
        check_prime(self, rhs);
        let p = self.prime;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| p.add(self.coeff(k), rhs.coeff(k))).collect();
        FpPoly::new(p, coeffs)
    }
}

impl Sub for &FpPoly {
    type Output = FpPoly;
    fn sub(self, rhs: &FpPoly) -> FpPoly {
        check_prime(self, rhs);
        let p = self.prime;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| p.sub(self.coeff(k), rhs.coeff(k))).collect();
        FpPoly::new(p, coeffs)
    }
}

impl Neg for &FpPoly {
    type Output = FpPoly;
    fn neg(self) -> FpPoly {
        let p = self.prime;
        FpPoly::new(p, self.coeffs.iter().map(|&c| p.neg(c)).collect())
    }
}

impl Mul for &FpPoly {
    type Output = FpPoly;
    fn mul(self, rhs: &FpPoly) -> FpPoly {
        check_prime(self, rhs);
        let p = self.prime;
        if self.is_zero() || rhs.is_zero() {
            return FpPoly::zero(p);
        }
        let pv = p.get();
        let mut acc = vec![0u128; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                acc[i + j] += (a * b) as u128;
            }
        }
        FpPoly::new(p, acc.into_iter().map(|c| (c % pv as u128) as u64).collect())
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident :: $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { $tr::$m(&self, &rhs) }
        }
    )*};
}
forward_owned!(FpPoly, Add::add, Sub::sub, Mul::mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn hasse_examples() {
        // C(4,2) = 6 vanishes mod 3
        let f = FpPoly::monomial(p(3), 1, 4);
        assert!(hasse_poly(&f, 2).is_zero());
        // pth powers are constants for the first derivation
        let g = FpPoly::monomial(p(5), 1, 5);
        assert!(hasse_poly(&g, 1).is_zero());
        // but not for the pth divided one
        assert_eq!(hasse_poly(&g, 5), FpPoly::one(p(5)));
        let h = FpPoly::from_i64(p(7), &[1, 2, 3]);
        assert_eq!(hasse_poly(&h, 0), h);
    }

    #[test]
    fn gcd_and_division() {
        let q = p(5);
        let a = FpPoly::from_i64(q, &[-1, 0, 1]); // t^2 - 1
        let b = FpPoly::from_i64(q, &[1, 1]); // t + 1
        assert_eq!(a.gcd(&b), b);
        let (quot, rem) = a.divrem(&b).unwrap();
        assert!(rem.is_zero());
        assert_eq!(quot, FpPoly::from_i64(q, &[-1, 1]));
        assert_eq!(b.divrem(&FpPoly::zero(q)), Err(Error::DivisionByZero));
    }

    #[test]
    fn roots_small_and_large_prime() {
        for prime in [p(7), p(1_000_003)] {
            let f = &(&FpPoly::linear(prime, 3) * &FpPoly::linear(prime, 3))
                * &(&FpPoly::linear(prime, 5) * &FpPoly::from_i64(prime, &[2, 0, 1]));
            let roots = f.roots();
            assert!(roots.contains(&3) && roots.contains(&5));
            if prime.get() == 7 {
                // t^2 + 2 is irreducible over F_7
                assert_eq!(roots, vec![3, 5]);
                assert!(f.split_factors().is_none());
            }
            assert!(roots.iter().all(|&r| f.eval(r) == 0));
        }
        let q = p(11);
        let f = &FpPoly::linear(q, 0).pow(3) * &FpPoly::linear(q, 4);
        assert_eq!(f.split_factors(), Some(vec![(0, 3), (4, 1)]));
    }

    #[test]
    fn taylor_shift_matches_substitution() {
        let q = p(7);
        let f = FpPoly::from_i64(q, &[3, 0, 2, 5, 1]);
        let shifted = f.taylor_shift(4);
        for x in 0..7 {
            assert_eq!(shifted.eval(x), f.eval(x + 4));
        }
    }

    #[test]
    fn display() {
        let f = FpPoly::from_i64(p(5), &[1, 1, 0, 2]);
        assert_eq!(f.to_string_in("t"), "2*t^3+t+1");
        assert_eq!(FpPoly::zero(p(5)).to_string_in("t"), "0");
    }
}
