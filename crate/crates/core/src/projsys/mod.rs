//! Rank-one projective systems `R e_0 ⊃ R^p e_1 ⊃ R^{p^2} e_2 ⊃ ...` on the
//! punctured line, with `e_n = (t^{p^n})^{b_n} e_{n+1}` and `b_n ∈ {0, 1}`,
//! and the groups `Diag(X)` of diagonal regular singular modules.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ffalg::{hasse_ratfn, FpRatFn, Prime};
use crate::padic::{DigitProfile, DigitWindow, PAdicRat};
use crate::stratmod::{e_alpha, Point, StratModule};

/// Bit stream `b_0, b_1, ...` given by an eventually periodic profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneProjSys {
    prime: Prime,
    bits: DigitProfile,
}

impl RankOneProjSys {
    pub fn new(prime: Prime, bits: DigitProfile) -> Result<Self> {
        if let Some(&digit) = bits.preperiod.iter().chain(&bits.period).find(|&&d| d > 1) {
            return Err(Error::InvalidBit { digit });
        }
        Ok(RankOneProjSys { prime, bits })
    }

    /// Parses `"[101](0)"`.
    pub fn parse(prime: Prime, s: &str) -> Result<Self> {
        RankOneProjSys::new(prime, DigitProfile::parse(s)?)
    }

    /// A finite bit vector followed by zeros.
    pub fn finite(prime: Prime, bits: &[u64]) -> Result<Self> {
        RankOneProjSys::new(prime, DigitProfile::new(bits.to_vec(), vec![0])?)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn bits(&self) -> &DigitProfile {
        &self.bits
    }

    /// `alpha = sum b_k p^k` as a rational p-adic integer.
    pub fn alpha(&self) -> PAdicRat {
        self.bits.to_padic(self.prime).expect("bits are digits")
    }

    /// The system with `z` zero bits prepended.
    pub fn with_gap(&self, z: usize) -> RankOneProjSys {
        let mut pre = vec![0; z];
        pre.extend_from_slice(&self.bits.preperiod);
        RankOneProjSys {
            prime: self.prime,
            bits: DigitProfile::new(pre, self.bits.period.clone()).expect("nonempty period"),
        }
    }
}

impl fmt::Display for RankOneProjSys {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.bits, self.prime)
    }
}

/// The module of the system: `E(-alpha)` with `alpha = sum b_k p^k`.
pub fn compile(sys: &RankOneProjSys, order_bound: usize) -> Result<StratModule> {
    e_alpha(&sys.alpha().neg(), order_bound)
}

/// The same module from a finite truncation: with `p^n > N` and
/// `u = prod_{k<n} (t^{p^k})^{b_k}`, the section `e_0 = u^{-1} e_n` has
/// `hasse(e_0, m) = hasse(u^{-1}, m) u e_0` for `m < p^n`.
pub fn compile_oracle(sys: &RankOneProjSys, order_bound: usize) -> Result<StratModule> {
    if order_bound == 0 {
        return Err(Error::EmptyOrderBound);
    }
    let p = sys.prime;
    let pu = p.get() as u128;
    let mut n = 0usize;
    let mut pn: u128 = 1;
    while pn <= order_bound as u128 {
        pn *= pu;
        n += 1;
    }
    let mut exponent: i64 = 0;
    let mut pk: i64 = 1;
    for k in 0..n {
        exponent += sys.bits.digit(k) as i64 * pk;
        if k + 1 < n {
            pk *= p.get() as i64;
        }
    }
    let u_inv = FpRatFn::monomial(p, 1, -exponent);
    let u = FpRatFn::monomial(p, 1, exponent);
    let coeffs = (1..=order_bound).map(|m| &hasse_ratfn(&u_inv, m) * &u).collect();
    let sing: BTreeSet<Point> = [Point::Finite(0), Point::Infinity].into_iter().collect();
    StratModule::rank_one(p, "t", coeffs, sing)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Trivial,
    FiniteDiag,
    GmDetected,
    Undetermined,
}

impl GroupKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupKind::Trivial => "trivial",
            GroupKind::FiniteDiag => "finite-diag",
            GroupKind::GmDetected => "Gm-detected",
            GroupKind::Undetermined => "undetermined",
        }
    }
}

/// `Diag(X)` for the subgroup `X` of `Z_p / Z` generated by the exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescription {
    pub kind: GroupKind,
    /// Distinct nonzero exponents mod 1, in `(0, 1)`, ascending.
    pub generators: Vec<BigRational>,
    /// `|X|` for a finite group, the lcm of the generator denominators.
    pub order: Option<u64>,
    pub precision_note: String,
}

impl GroupDescription {
    /// `mu_n` for a finite cyclic group of order `n`, `1` when trivial.
    pub fn name(&self) -> String {
        match (self.kind, self.order) {
            (GroupKind::Trivial, _) => "1".into(),
            (GroupKind::FiniteDiag, Some(n)) => format!("mu_{n}"),
            (GroupKind::GmDetected, _) => "Gm".into(),
            _ => "?".into(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.as_str(),
            "order": self.order,
            "generators": self
                .generators
                .iter()
                .map(|g| format!("{}/{}", g.numer(), g.denom()))
                .collect::<Vec<_>>(),
            "name": self.name(),
            "precision_note": self.precision_note,
        })
    }
}

/// Exact mode: the exponents are rational.
pub fn group_of_diagonal(exponents: &[PAdicRat]) -> GroupDescription {
    let gens: BTreeSet<BigRational> = exponents
        .iter()
        .map(PAdicRat::frac)
        .filter(|f| !f.is_zero())
        .collect();
    let generators: Vec<BigRational> = gens.into_iter().collect();
    if generators.is_empty() {
        return GroupDescription {
            kind: GroupKind::Trivial,
            generators,
            order: Some(1),
            precision_note: "exact".into(),
        };
    }
    let order = generators
        .iter()
        .fold(BigInt::one(), |acc, g| acc.lcm(g.denom()))
        .to_u64()
        .expect("order fits in u64");
    GroupDescription {
        kind: GroupKind::FiniteDiag,
        generators,
        order: Some(order),
        precision_note: "exact".into(),
    }
}

// periodic with period <= max_period on at least the second half, repeating
// at least twice
fn fits_period(w: &DigitWindow, max_period: usize) -> bool {
    let d = &w.digits;
    let n = d.len();
    (0..=n / 2).any(|m| {
        (1..=max_period.min((n - m) / 2)).any(|l| (m + l..n).all(|i| d[i] == d[i - l]))
    })
}

/// Precision mode: only digit windows are known. A window that is not
/// periodic with period at most `max_period` over its second half is a
/// diagnostic for an irrational exponent.
pub fn group_of_windows(windows: &[DigitWindow], max_period: usize) -> GroupDescription {
    let unexplained = windows.iter().filter(|w| !fits_period(w, max_period)).count();
    let digits = windows.iter().map(DigitWindow::len).min().unwrap_or(0);
    if unexplained > 0 {
        GroupDescription {
            kind: GroupKind::GmDetected,
            generators: Vec::new(),
            order: None,
            precision_note: format!(
                "{unexplained} of {} windows fit no period <= {max_period} over the second half of {digits} digits",
                windows.len()
            ),
        }
    } else {
        GroupDescription {
            kind: GroupKind::Undetermined,
            generators: Vec::new(),
            order: None,
            precision_note: format!("every window fits a period <= {max_period} over the second half of {digits} digits"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn compile_examples() {
        let p = prime(2);
        let zero = RankOneProjSys::parse(p, "[](0)").unwrap();
        assert!(compile(&zero, 8).unwrap().matrices().iter().all(|a| a.is_zero()));
        let five = RankOneProjSys::parse(p, "[101](0)").unwrap();
        assert_eq!(five.alpha(), PAdicRat::from_int(p, 5));
        let third = RankOneProjSys::parse(p, "[](10)").unwrap();
        assert_eq!(third.alpha(), PAdicRat::from_ratio(p, -1, 3).unwrap());
        let m = compile(&third, 8).unwrap();
        let rep = m.local_exponents(Point::Finite(0)).unwrap();
        assert!(rep.matches(&[PAdicRat::from_ratio(p, 1, 3).unwrap()]));
        assert_eq!(
            RankOneProjSys::parse(p, "[12](0)").unwrap_err(),
            Error::InvalidBit { digit: 2 }
        );
    }

    #[test]
    fn oracle_examples() {
        let p = prime(3);
        let one = RankOneProjSys::finite(p, &[1]).unwrap();
        let m = compile_oracle(&one, 9).unwrap();
        assert_eq!(m.matrix(1).unwrap().get(0, 0), &FpRatFn::monomial(p, 2, -1));
        assert!(m.same_matrices(&compile(&one, 9).unwrap()));
        let periodic = RankOneProjSys::parse(p, "[1](01)").unwrap();
        assert!(compile_oracle(&periodic, 27).unwrap().same_matrices(&compile(&periodic, 27).unwrap()));
    }

    #[test]
    fn groups() {
        let p = prime(5);
        let ex = |n, d| PAdicRat::from_ratio(p, n, d).unwrap();
        let g = group_of_diagonal(&[ex(1, 2), ex(1, 3)]);
        assert_eq!(g.kind, GroupKind::FiniteDiag);
        assert_eq!(g.order, Some(6));
        assert_eq!(g.name(), "mu_6");
        assert_eq!(group_of_diagonal(&[ex(3, 1), ex(-7, 1)]).kind, GroupKind::Trivial);
        assert_eq!(group_of_diagonal(&[ex(-1, 3), ex(7, 2)]), group_of_diagonal(&[ex(1, 2), ex(2, 3)]));
        assert_eq!(
            g.to_json()["generators"],
            json!(["1/3", "1/2"])
        );
    }

    #[test]
    fn window_mode() {
        let p = prime(2);
        // bits at the triangular numbers: gaps grow without bound
        let digits: Vec<u64> = (0..60).map(|k| u64::from((0..12).any(|j| j * (j + 1) / 2 == k))).collect();
        let w = DigitWindow::new(p, digits).unwrap();
        assert_eq!(group_of_windows(&[w], 12).kind, GroupKind::GmDetected);
        let third = PAdicRat::from_ratio(p, 1, 3).unwrap().window(40);
        assert_eq!(group_of_windows(&[third], 12).kind, GroupKind::Undetermined);
    }
}
