use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ffalg::{FpPoly, FpRatFn, Prime};
use crate::matrix::Ring;
use crate::padic::{v_p_rational, Valuation};

/// Polynomial over Q, ascending coefficients, trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::new(vec![c])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        QPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        if c.is_zero() {
            return QPoly::zero();
        }
        QPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Multiplies by `z - c`.
    fn mul_linear(&self, c: &BigRational) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i + 1] += a;
            out[i] -= a * c;
        }
        QPoly::new(out)
    }

    /// Exact division by `z - c`, assuming `c` is a root.
    fn div_linear(&self, c: &BigRational) -> QPoly {
        let n = self.coeffs.len();
        let mut out = vec![BigRational::zero(); n - 1];
        let mut carry = BigRational::zero();
        for i in (1..n).rev() {
            carry = &self.coeffs[i] + carry * c;
            out[i - 1] = carry.clone();
        }
        QPoly::new(out)
    }

    /// Minimum p-adic valuation of the coefficients.
    pub fn min_valuation(&self, p: Prime) -> Valuation {
        self.coeffs
            .iter()
            .map(|c| v_p_rational(p, c))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    pub fn reduce(&self, p: Prime) -> Result<FpPoly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| reduce_rational(p, c))
            .collect::<Result<_>>()?;
        Ok(FpPoly::new(p, coeffs))
    }
}

/// Residue of a p-integral rational.
pub fn reduce_rational(p: Prime, c: &BigRational) -> Result<u64> {
    let pb = BigInt::from(p.get());
    let d = c.denom().mod_floor_u64(&pb);
    if d == 0 {
        return Err(Error::NotIntegral {
            value: c.to_string(),
            p: p.get(),
        });
    }
    let n = c.numer().mod_floor_u64(&pb);
    Ok(p.mul(n, p.inv(d)?))
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, m: &BigInt) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, m: &BigInt) -> u64 {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        self.mod_floor(m).to_u64().expect("residue fits")
    }
}

/// `num / (z^a (z-1)^b)` over Q, with `num` prime to `z (z - 1)` wherever
/// the corresponding exponent is positive.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QRatFn {
    num: QPoly,
    a: u32,
    b: u32,
}

impl QRatFn {
    pub fn new(num: QPoly, a: u32, b: u32) -> Self {
        let mut f = QRatFn { num, a, b };
        f.normalize();
        f
    }

    pub fn zero() -> Self {
        QRatFn::new(QPoly::zero(), 0, 0)
    }

    pub fn one() -> Self {
        QRatFn::new(QPoly::from_ints(&[1]), 0, 0)
    }

    pub fn constant(c: BigRational) -> Self {
        QRatFn::new(QPoly::constant(c), 0, 0)
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    /// Exponents of `z` and `z - 1` in the denominator.
    pub fn pole_orders(&self) -> (u32, u32) {
        (self.a, self.b)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.a = 0;
            self.b = 0;
            return;
        }
        let zero = BigRational::zero();
        let one = BigRational::one();
        while self.a > 0 && self.num.coeffs[0].is_zero() {
            self.num = self.num.div_linear(&zero);
            self.a -= 1;
        }
        while self.b > 0 && self.num.eval(&one).is_zero() {
            self.num = self.num.div_linear(&one);
            self.b -= 1;
        }
    }

    fn lift(&self, a: u32, b: u32) -> QPoly {
        let mut num = self.num.clone();
        let zero = BigRational::zero();
        let one = BigRational::one();
        for _ in self.a..a {
            num = num.mul_linear(&zero);
        }
        for _ in self.b..b {
            num = num.mul_linear(&one);
        }
        num
    }

    pub fn scale(&self, c: &BigRational) -> QRatFn {
        QRatFn::new(self.num.scale(c), self.a, self.b)
    }

    /// `d/dz`.
    pub fn derivative(&self) -> QRatFn {
        if self.num.is_zero() {
            return QRatFn::zero();
        }
        // (num' z (z-1) - a num (z-1) - b num z) / (z^(a+1) (z-1)^(b+1))
        let z = QPoly::from_ints(&[0, 1]);
        let zm1 = QPoly::from_ints(&[-1, 1]);
        let zz = z.mul(&zm1);
        let a = BigRational::from_integer(self.a.into());
        let b = BigRational::from_integer(self.b.into());
        let num = self
            .num
            .derivative()
            .mul(&zz)
            .add(&self.num.mul(&zm1).scale(&-a))
            .add(&self.num.mul(&z).scale(&-b));
        QRatFn::new(num, self.a + 1, self.b + 1)
    }

    /// Divided derivative `(d/dz)^n / n!`.
    pub fn divided_derivative(&self, n: usize) -> QRatFn {
        let mut f = self.clone();
        for k in 1..=n {
            f = f.derivative().scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
        }
        f
    }

    pub fn min_valuation(&self, p: Prime) -> Valuation {
        self.num.min_valuation(p)
    }

    /// Reduction modulo p, when all coefficients are p-integral.
    pub fn reduce(&self, p: Prime) -> Result<FpRatFn> {
        let num = self.num.reduce(p)?;
        let den = &FpPoly::linear(p, 0).pow(self.a as usize) * &FpPoly::linear(p, 1).pow(self.b as usize);
        FpRatFn::new(num, den)
    }

    pub fn to_string_in(&self, var: &str) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.num.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let coef = if c.is_integer() { c.numer().to_string() } else { format!("({c})") };
            terms.push(match (k, c.is_one()) {
                (0, _) => coef,
                (_, true) => mono,
                _ if c == &-BigRational::one() => format!("-{mono}"),
                _ => format!("{coef}*{mono}"),
            });
        }
        let num = if terms.is_empty() { "0".to_string() } else { terms.join("+").replace("+-", "-") };
        let mut den = Vec::new();
        if self.a > 0 {
            den.push(if self.a == 1 { var.to_string() } else { format!("{var}^{}", self.a) });
        }
        if self.b > 0 {
            den.push(if self.b == 1 { format!("({var}-1)") } else { format!("({var}-1)^{}", self.b) });
        }
        if den.is_empty() {
            num
        } else if terms.len() > 1 {
            format!("({num})/({})", den.join("*"))
        } else {
            format!("{num}/({})", den.join("*"))
        }
    }
}

impl Ring for QRatFn {
    fn zero_like(&self) -> Self {
        QRatFn::zero()
    }
    fn one_like(&self) -> Self {
        QRatFn::one()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        if self.num.is_zero() {
            return other.clone();
        }
        if other.num.is_zero() {
            return self.clone();
        }
        let (a, b) = (self.a.max(other.a), self.b.max(other.b));
        QRatFn::new(self.lift(a, b).add(&other.lift(a, b)), a, b)
    }
    fn sub(&self, other: &Self) -> Self {
        Ring::add(self, &Ring::neg(other))
    }
    fn mul(&self, other: &Self) -> Self {
        if self.num.is_zero() || other.num.is_zero() {
            return QRatFn::zero();
        }
        QRatFn::new(self.num.mul(&other.num), self.a + other.a, self.b + other.b)
    }
    fn neg(&self) -> Self {
        QRatFn {
            num: self.num.neg(),
            a: self.a,
            b: self.b,
        }
    }
}

impl fmt::Debug for QRatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("z"))
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}
