use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::{hasse_poly, FpPoly};
use super::prime::Prime;
use crate::error::{Error, Result};

/// Rational function over F_p in canonical form: `gcd(num, den) = 1` and
/// `den` monic, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpRatFn {
    num: FpPoly,
    den: FpPoly,
}

impl FpRatFn {
    pub fn new(num: FpPoly, den: FpPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        assert_eq!(num.prime(), den.prime(), "mixed characteristics");
        Ok(normalize(num, den))
    }

    pub fn from_poly(num: FpPoly) -> Self {
        let den = FpPoly::one(num.prime());
        FpRatFn { num, den }
    }

    pub fn zero(prime: Prime) -> Self {
        FpRatFn::from_poly(FpPoly::zero(prime))
    }

    pub fn one(prime: Prime) -> Self {
        FpRatFn::from_poly(FpPoly::one(prime))
    }

    pub fn constant(prime: Prime, c: u64) -> Self {
        FpRatFn::from_poly(FpPoly::constant(prime, c))
    }

    /// `c * (t - point)^k` for any integer `k`.
    pub fn power_at(prime: Prime, c: u64, point: u64, k: i64) -> Self {
        let lin = FpPoly::linear(prime, point);
        if k >= 0 {
            FpRatFn::from_poly(lin.pow(k as usize).scale(c))
        } else {
            normalize(FpPoly::constant(prime, c), lin.pow((-k) as usize))
        }
    }

    /// `c * t^k` for any integer `k`.
    pub fn monomial(prime: Prime, c: u64, k: i64) -> Self {
        FpRatFn::power_at(prime, c, 0, k)
    }

    pub fn prime(&self) -> Prime {
        self.num.prime()
    }

    pub fn num(&self) -> &FpPoly {
        &self.num
    }

    pub fn den(&self) -> &FpPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn scale(&self, c: u64) -> Self {
        normalize(self.num.scale(c), self.den.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        FpRatFn::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &FpRatFn) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let e = k.unsigned_abs() as usize;
        Ok(FpRatFn {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    /// Order of vanishing at the finite point `c` (negative for poles,
    /// `None` for zero).
    pub fn order_at(&self, c: u64) -> Option<i64> {
        let zn = self.num.order_at(c)? as i64;
        Some(zn - self.den.order_at(c).unwrap_or(0) as i64)
    }

    /// Order of vanishing at infinity: `deg den - deg num`.
    pub fn order_at_infinity(&self) -> Option<i64> {
        let dn = self.num.degree()? as i64;
        Some(self.den.degree().unwrap_or(0) as i64 - dn)
    }

    /// Value at a finite point, `None` at a pole.
    pub fn eval(&self, c: u64) -> Option<u64> {
        let d = self.den.eval(c);
        if d == 0 {
            return None;
        }
        let p = self.prime();
        Some(p.mul(self.num.eval(c), p.inv(d).ok()?))
    }

    /// Value at infinity, `None` at a pole.
    pub fn eval_at_infinity(&self) -> Option<u64> {
        match self.order_at_infinity() {
            None => Some(0),
            Some(o) if o > 0 => Some(0),
            Some(0) => Some(self.num.leading()),
            Some(_) => None,
        }
    }

    /// `f(t^e)`; coprimality and monicity are preserved.
    pub fn compose_power(&self, e: usize) -> Self {
        FpRatFn {
            num: self.num.compose_power(e),
            den: self.den.compose_power(e),
        }
    }

    /// `f(t + c)`.
    pub fn taylor_shift(&self, c: u64) -> Self {
        normalize(self.num.taylor_shift(c), self.den.taylor_shift(c))
    }

    /// `f(1/t)`.
    pub fn invert_variable(&self) -> Self {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let d = dn.max(dd);
        normalize(self.num.reversed(d), self.den.reversed(d))
    }

    /// Partial fraction decomposition, available when the denominator
    /// splits into linear factors over F_p.
    pub fn partial_fractions(&self) -> Option<PartialFractions> {
        let p = self.prime();
        let factors = if self.den.is_one() {
            Vec::new()
        } else {
            self.den.split_factors()?
        };
        let (poly, rem) = self.num.divrem(&self.den).expect("nonzero denominator");
        let mut parts = Vec::with_capacity(factors.len());
        for &(c, k) in &factors {
            let cofactor = self.den.exact_div(&FpPoly::linear(p, c).pow(k));
            let r = rem.taylor_shift(c);
            let q = cofactor.taylor_shift(c);
            let q0 = p.inv(q.coeff(0)).expect("cofactor is a unit at its complement's roots");
            // power series r(s)/q(s) to k terms
            let mut e = vec![0u64; k];
            for i in 0..k {
                let mut acc = r.coeff(i);
                for l in 1..=i {
                    acc = p.sub(acc, p.mul(q.coeff(l), e[i - l]));
                }
                e[i] = p.mul(acc, q0);
            }
            // coefficient of (t-c)^(-j) is e[k-j]
            let coeffs: Vec<u64> = (1..=k).map(|j| e[k - j]).collect();
            parts.push((c, coeffs));
        }
        Some(PartialFractions { prime: p, poly, parts })
    }

    pub fn to_string_in(&self, var: &str) -> String {
        let num = self.num.to_string_in(var);
        if self.den.is_one() {
            return num;
        }
        let wrap = |poly: &FpPoly, s: String| {
            let terms = poly.coeffs().iter().filter(|&&c| c != 0).count();
            let single_power = terms == 1 && poly.leading() == 1;
            if terms <= 1 && (single_power || poly.is_constant()) {
                s
            } else {
                format!("({s})")
            }
        };
        let den = self.den.to_string_in(var);
        format!("{}/{}", wrap(&self.num, num), wrap(&self.den, den))
    }
}

/// `poly + sum_c sum_j r_{c,j} (t - c)^(-j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFractions {
    prime: Prime,
    pub poly: FpPoly,
    /// `(c, [r_{c,1}, r_{c,2}, ...])`
    pub parts: Vec<(u64, Vec<u64>)>,
}

impl PartialFractions {
    /// Termwise divided derivative, using
    /// `hasse((t-c)^(-j), n) = C(-j, n) (t-c)^(-j-n)`.
    pub fn hasse(&self, n: usize) -> PartialFractions {
        if n == 0 {
            return self.clone();
        }
        let p = self.prime;
        let sign = if n % 2 == 0 { 1 } else { p.neg(1) };
        let parts = self
            .parts
            .iter()
            .map(|(c, coeffs)| {
                let mut out = vec![0u64; coeffs.len() + n];
                for (idx, &r) in coeffs.iter().enumerate() {
                    if r == 0 {
                        continue;
                    }
                    let j = idx as u64 + 1;
                    // C(-j, n) = (-1)^n C(j + n - 1, n)
                    let b = p.mul(sign, p.binom(j + n as u64 - 1, n as u64));
                    out[idx + n] = p.mul(r, b);
                }
                (*c, out)
            })
            .collect();
        PartialFractions {
            prime: p,
            poly: hasse_poly(&self.poly, n),
            parts,
        }
    }

    pub fn to_ratfn(&self) -> FpRatFn {
        let p = self.prime;
        // exact pole orders make the assembled fraction already reduced
        let orders: Vec<(u64, usize)> = self
            .parts
            .iter()
            .filter_map(|(c, coeffs)| {
                let k = coeffs.iter().rposition(|&r| r != 0)? + 1;
                Some((*c, k))
            })
            .collect();
        let factor = |c: u64, k: usize| FpPoly::linear(p, c).pow(k);
        let mut den = FpPoly::one(p);
        for &(c, k) in &orders {
            den = &den * &factor(c, k);
        }
        let mut num = &self.poly * &den;
        for &(c, k) in &orders {
            let coeffs = &self.parts.iter().find(|(d, _)| *d == c).expect("present").1;
            let lin = FpPoly::linear(p, c);
            // Horner in (t - c): sum_j r_j (t-c)^(k-j)
            let mut local = FpPoly::zero(p);
            for j in 1..=k {
                local = &(&local * &lin) + &FpPoly::constant(p, coeffs[j - 1]);
            }
            let mut term = local;
            for &(d, m) in &orders {
                if d != c {
                    term = &term * &factor(d, m);
                }
            }
            num = &num + &term;
        }
        FpRatFn { num, den }
    }
}

/// Divided derivative of a rational function.
///
/// Uses the partial fraction formula when the denominator splits over F_p
/// and the quotient recursion otherwise; both routes agree (tested).
pub fn hasse_ratfn(h: &FpRatFn, n: usize) -> FpRatFn {
    if n == 0 {
        return h.clone();
    }
    if h.den.is_one() {
        return FpRatFn::from_poly(hasse_poly(&h.num, n));
    }
    match h.partial_fractions() {
        Some(pf) => pf.hasse(n).to_ratfn(),
        None => hasse_ratfn_recursive(h, n),
    }
}

/// All divided derivatives `hasse(h, 0..=n_max)`.
pub fn hasse_ratfn_all(h: &FpRatFn, n_max: usize) -> Vec<FpRatFn> {
    if h.den.is_one() {
        return (0..=n_max)
            .map(|n| FpRatFn::from_poly(hasse_poly(&h.num, n)))
            .collect();
    }
    match h.partial_fractions() {
        Some(pf) => (0..=n_max).map(|n| pf.hasse(n).to_ratfn()).collect(),
        None => recursive_numerators(h, n_max)
            .into_iter()
            .enumerate()
            .map(|(a, q)| normalize(q, h.den.pow(a + 1)))
            .collect(),
    }
}

/// Divided derivative by the quotient recursion
/// `hasse(h, n) = (hasse(num, n) - sum_{a<n} hasse(h, a) hasse(den, n-a)) / den`.
pub fn hasse_ratfn_recursive(h: &FpRatFn, n: usize) -> FpRatFn {
    let q = recursive_numerators(h, n).pop().expect("nonempty");
    normalize(q, h.den.pow(n + 1))
}

// Q_a = hasse(h, a) * den^(a+1), kept as polynomials to avoid repeated gcds.
fn recursive_numerators(h: &FpRatFn, n_max: usize) -> Vec<FpPoly> {
    let den = &h.den;
    let den_derivs: Vec<FpPoly> = (0..=n_max).map(|a| hasse_poly(den, a)).collect();
    let mut den_pows = vec![FpPoly::one(h.prime())];
    for a in 1..=n_max {
        den_pows.push(&den_pows[a - 1] * den);
    }
    let mut q: Vec<FpPoly> = Vec::with_capacity(n_max + 1);
    for a in 0..=n_max {
        let mut acc = &den_pows[a] * &hasse_poly(&h.num, a);
        for (b, qb) in q.iter().enumerate() {
            let dd = &den_derivs[a - b];
            if dd.is_zero() || qb.is_zero() {
                continue;
            }
            acc = &acc - &(&(qb * &den_pows[a - 1 - b]) * dd);
        }
        q.push(acc);
    }
    q
}

fn normalize(num: FpPoly, den: FpPoly) -> FpRatFn {
    if num.is_zero() {
        return FpRatFn::zero(num.prime());
    }
    let g = num.gcd(&den);
    let (num, den) = if g.is_one() {
        (num, den)
    } else {
        (num.exact_div(&g), den.exact_div(&g))
    };
    let lead = den.leading();
    if lead == 1 {
        FpRatFn { num, den }
    } else {
        let inv = num.prime().inv(lead).expect("nonzero");
        FpRatFn {
            num: num.scale(inv),
            den: den.scale(inv),
        }
    }
}

fn check(a: &FpRatFn, b: &FpRatFn) {
    assert_eq!(a.prime(), b.prime(), "mixed characteristics in rational function arithmetic");
}

impl fmt::Debug for FpRatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpRatFn[{}]({})", self.prime(), self.to_string_in("t"))
    }
}

impl fmt::Display for FpRatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("t"))
    }
}

impl Add for &FpRatFn {
    type Output = FpRatFn;
    fn add(self, rhs: &FpRatFn) -> FpRatFn {
        check(self, rhs);
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return normalize(&self.num + &rhs.num, self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        let b = self.den.exact_div(&g);
        let d = rhs.den.exact_div(&g);
        let num = &(&self.num * &d) + &(&rhs.num * &b);
        normalize(num, &b * &rhs.den)
    }
}

impl Sub for &FpRatFn {
    type Output = FpRatFn;
    fn sub(self, rhs: &FpRatFn) -> FpRatFn {
        self + &(-rhs)
    }
}

impl Neg for &FpRatFn {
    type Output = FpRatFn;
    fn neg(self) -> FpRatFn {
        FpRatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &FpRatFn {
    type Output = FpRatFn;
    fn mul(self, rhs: &FpRatFn) -> FpRatFn {
        check(self, rhs);
        if self.is_zero() || rhs.is_zero() {
            return FpRatFn::zero(self.prime());
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let num = &self.num.exact_div(&g1) * &rhs.num.exact_div(&g2);
        let den = &self.den.exact_div(&g2) * &rhs.den.exact_div(&g1);
        let lead = den.leading();
        if lead == 1 {
            FpRatFn { num, den }
        } else {
            let inv = num.prime().inv(lead).expect("nonzero");
            FpRatFn {
                num: num.scale(inv),
                den: den.scale(inv),
            }
        }
    }
}

impl Add for FpRatFn {
    type Output = FpRatFn;
    fn add(self, rhs: FpRatFn) -> FpRatFn {
        &self + &rhs
    }
}

impl Sub for FpRatFn {
    type Output = FpRatFn;
    fn sub(self, rhs: FpRatFn) -> FpRatFn {
        &self - &rhs
    }
}

impl Mul for FpRatFn {
    type Output = FpRatFn;
    fn mul(self, rhs: FpRatFn) -> FpRatFn {
        &self * &rhs
    }
}

impl From<FpPoly> for FpRatFn {
    fn from(p: FpPoly) -> Self {
        FpRatFn::from_poly(p)
    }
}
