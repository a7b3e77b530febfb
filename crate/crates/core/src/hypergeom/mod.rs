//! Reduction modulo p of the Gauss hypergeometric equation
//! `z(z-1)F'' + ((a+b+1)z - c)F' + abF = 0` with rational p-adic
//! parameters.

mod divided;
pub mod qratfn;
mod verify;

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde_json::{json, Value};

use crate::error::Result;
use crate::ffalg::Prime;
use crate::padic::{pochhammer_val, v_factorial, v_p_int, PAdicRat, Valuation};

pub use divided::{check_iterative_q, companion_matrix, divided_matrices, reduce_mod_p, QMatrix};
pub use qratfn::{QPoly, QRatFn};
pub use verify::{
    expected_exponents, hg_exponents, reduced_solution_check, theta_gauge, CheckStatus, SolutionReport,
};

/// Parameters `(alpha, beta, gamma)` of `2F1`, all p-adic integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HGParams {
    pub prime: Prime,
    pub alpha: PAdicRat,
    pub beta: PAdicRat,
    pub gamma: PAdicRat,
}

impl HGParams {
    pub fn new(alpha: PAdicRat, beta: PAdicRat, gamma: PAdicRat) -> Result<Self> {
        let prime = alpha.prime();
        prime.ensure_same(beta.prime())?;
        prime.ensure_same(gamma.prime())?;
        Ok(HGParams {
            prime,
            alpha,
            beta,
            gamma,
        })
    }

    /// Parameters from strings like `"1/2"`.
    pub fn parse(prime: Prime, alpha: &str, beta: &str, gamma: &str) -> Result<Self> {
        HGParams::new(
            PAdicRat::parse_in(prime, alpha)?,
            PAdicRat::parse_in(prime, beta)?,
            PAdicRat::parse_in(prime, gamma)?,
        )
    }

    /// Parameters `(1 - alpha, 1 - beta, 2 - gamma)` of the series in the
    /// second standard solution.
    pub fn second(&self) -> HGParams {
        HGParams {
            prime: self.prime,
            alpha: self.alpha.neg().add_int(1),
            beta: self.beta.neg().add_int(1),
            gamma: self.gamma.neg().add_int(2),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.prime.get(),
            "alpha": self.alpha.to_ratio_string(),
            "beta": self.beta.to_ratio_string(),
            "gamma": self.gamma.to_ratio_string(),
        })
    }
}

/// The digit levels `k >= start` with `k mod period` in `residues` are
/// exactly the failing levels from `start` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub start: usize,
    pub period: usize,
    pub residues: Vec<usize>,
}

impl Witness {
    pub fn contains(&self, k: usize) -> bool {
        k >= self.start && self.residues.contains(&(k % self.period))
    }

    /// Whether every level from `start` on fails.
    pub fn is_total(&self) -> bool {
        self.residues.len() == self.period
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriterionDecision {
    /// `max(alpha_k, beta_k) >= gamma_k` for every `k >= k0`, with `k0 >= 1`
    /// least.
    Holds { k0: usize },
    Fails { witness: Witness },
}

/// Exact decision of `max(alpha_k, beta_k) >= gamma_k` for `k >> 0`, with
/// `x_k` the truncation of `x` to its first `k` digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Criterion {
    pub decision: CriterionDecision,
    /// Levels `k >= tail_start` repeat with period `period`.
    pub tail_start: usize,
    pub period: usize,
    /// Failing levels below `tail_start`.
    pub early_failures: Vec<usize>,
}

impl Criterion {
    pub fn holds(&self) -> bool {
        matches!(self.decision, CriterionDecision::Holds { .. })
    }

    pub fn k0(&self) -> Option<usize> {
        match self.decision {
            CriterionDecision::Holds { k0 } => Some(k0),
            CriterionDecision::Fails { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let witness = match &self.decision {
            CriterionDecision::Holds { .. } => Value::Null,
            CriterionDecision::Fails { witness } => json!({
                "start": witness.start,
                "period": witness.period,
                "residues": witness.residues,
            }),
        };
        json!({
            "holds": self.holds(),
            "k0": self.k0(),
            "witness": witness,
            "tail_start": self.tail_start,
            "period": self.period,
        })
    }
}

/// Truth of the criterion at every level `1..=k_max`.
pub fn criterion_levels(h: &HGParams, k_max: usize) -> Vec<bool> {
    let a = h.alpha.digit_profile();
    let b = h.beta.digit_profile();
    let g = h.gamma.digit_profile();
    let step = |cmp: Ordering, x: u64, y: u64| if x == y { cmp } else { x.cmp(&y) };
    let (mut ca, mut cb) = (Ordering::Equal, Ordering::Equal);
    (0..k_max)
        .map(|i| {
            let gi = g.digit(i);
            ca = step(ca, a.digit(i), gi);
            cb = step(cb, b.digit(i), gi);
            ca != Ordering::Less || cb != Ordering::Less
        })
        .collect()
}

pub fn digit_criterion(h: &HGParams) -> Criterion {
    let profiles = [
        h.alpha.digit_profile(),
        h.beta.digit_profile(),
        h.gamma.digit_profile(),
    ];
    let pre = profiles.iter().map(|d| d.preperiod.len()).max().unwrap_or(0);
    let period = profiles.iter().fold(1usize, |l, d| l.lcm(&d.period.len()));
    let tail_start = pre + period;
    // levels[k - 1] is level k
    let levels = criterion_levels(h, tail_start + 2 * period);
    let ok = |k: usize| levels[k - 1];
    let tail_fail: Vec<usize> = (tail_start..tail_start + period)
        .filter(|&k| !ok(k))
        .map(|k| k % period)
        .collect();
    let early_failures: Vec<usize> = (1..tail_start).filter(|&k| !ok(k)).collect();
    let decision = if tail_fail.is_empty() {
        CriterionDecision::Holds {
            k0: early_failures.last().map_or(1, |k| k + 1),
        }
    } else {
        let mut start = tail_start;
        while start > 1 && ok(start - 1) == ok(start - 1 + period) {
            start -= 1;
        }
        let mut residues = tail_fail;
        residues.sort_unstable();
        CriterionDecision::Fails {
            witness: Witness {
                start,
                period,
                residues,
            },
        }
    };
    Criterion {
        decision,
        tail_start,
        period,
        early_failures,
    }
}

/// Minimum over real `x` of
/// `[x + a/P] + [x + b/P] - [x + c/P] - [x + 1/P]`, `P = p^k`, with
/// `a, b, c` the level-k truncations. Returns the value and a minimizing
/// breakpoint `x = -num/P` as `(num, P)`.
pub fn floor_minimum(h: &HGParams, k: usize) -> (i64, (BigUint, BigUint)) {
    let pk = BigUint::from(h.prime.get()).pow(k as u32);
    let one = BigUint::one() % &pk;
    let (a, b, c) = (h.alpha.truncation(k), h.beta.truncation(k), h.gamma.truncation(k));
    // at x = -s/P each term [x + t/P] is -1 when t < s and 0 otherwise
    let f = |s: &BigUint| -> i64 {
        let below = |t: &BigUint| i64::from(t < s);
        below(&c) + below(&one) - below(&a) - below(&b)
    };
    let mut best: Option<(i64, &BigUint)> = None;
    for s in [&a, &b, &c, &one] {
        let v = f(s);
        if best.map_or(true, |(bv, _)| v < bv) {
            best = Some((v, s));
        }
    }
    let (v, x) = best.expect("four breakpoints");
    (v, (x.clone(), pk))
}

/// The floor inequality at level `k`, over all real `x`.
pub fn floor_inequality_check(h: &HGParams, k: usize) -> bool {
    floor_minimum(h, k).0 >= 0
}

/// Lower bound `-B` for `v_p(c_n)` when the criterion holds: the floor
/// deficits at the levels before the periodic tail, plus `v_p(gamma)` when
/// `gamma` is a nonunit.
pub fn correction_bound(h: &HGParams) -> i64 {
    let crit = digit_criterion(h);
    let deficits: i64 = (1..crit.tail_start)
        .map(|k| (-floor_minimum(h, k).0).max(0))
        .sum();
    let gamma_val = if h.gamma.residue() == 0 && !h.gamma.is_zero() {
        v_p_int(h.prime, h.gamma.numer()).finite().unwrap_or(0)
    } else {
        0
    };
    deficits + gamma_val
}

/// `v_p` of a hypergeometric coefficient `(a)_n (b)_n / ((c)_n n!)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefVal {
    Finite(i64),
    /// The series has terminated: the numerator vanishes.
    Zero,
    /// The denominator vanishes while the numerator does not.
    Pole,
}

impl CoefVal {
    fn from_parts(num: Valuation, den: Valuation) -> CoefVal {
        match (num, den) {
            (Valuation::Infinite, _) => CoefVal::Zero,
            (_, Valuation::Infinite) => CoefVal::Pole,
            (Valuation::Finite(a), Valuation::Finite(b)) => CoefVal::Finite(a - b),
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            CoefVal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_json(self) -> Value {
        match self {
            CoefVal::Finite(v) => json!(v),
            CoefVal::Zero => json!("inf"),
            CoefVal::Pole => json!("pole"),
        }
    }
}

/// `v_p(c_n)` for `n = 0..=n_max` for the series of both standard
/// solutions: `F_1 = 2F1(a, b; c)` and `2F1(1-a, 1-b; 2-c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationTable {
    pub first: Vec<CoefVal>,
    pub second: Vec<CoefVal>,
}

impl ValuationTable {
    /// Least finite valuation of the first series and where it occurs.
    pub fn min_first(&self) -> Option<(usize, i64)> {
        min_finite(&self.first)
    }

    pub fn min_second(&self) -> Option<(usize, i64)> {
        min_finite(&self.second)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "first": self.first.iter().enumerate().map(|(n, v)| json!([n, v.to_json()])).collect::<Vec<_>>(),
            "second": self.second.iter().enumerate().map(|(n, v)| json!([n, v.to_json()])).collect::<Vec<_>>(),
        })
    }
}

fn min_finite(vals: &[CoefVal]) -> Option<(usize, i64)> {
    vals.iter()
        .enumerate()
        .filter_map(|(n, v)| v.finite().map(|x| (n, x)))
        .min_by_key(|&(n, v)| (v, n))
}

fn series_valuations(h: &HGParams, n_max: u64) -> Vec<CoefVal> {
    (0..=n_max)
        .map(|n| {
            let num = pochhammer_val(&h.alpha, n) + pochhammer_val(&h.beta, n);
            let den = pochhammer_val(&h.gamma, n) + Valuation::Finite(v_factorial(h.prime, n));
            CoefVal::from_parts(num, den)
        })
        .collect()
}

pub fn coefficient_valuations(h: &HGParams, n_max: u64) -> ValuationTable {
    ValuationTable {
        first: series_valuations(h, n_max),
        second: series_valuations(&h.second(), n_max),
    }
}

// running sums of v_p over the factors, one factor per step
fn series_valuations_oracle(h: &HGParams, n_max: u64) -> Vec<CoefVal> {
    let p = h.prime;
    let mut out = vec![CoefVal::Finite(0)];
    let (mut va, mut vb, mut vc, mut vf) = (Valuation::Finite(0), Valuation::Finite(0), Valuation::Finite(0), 0i64);
    let (mut a, mut b, mut c) = (h.alpha.clone(), h.beta.clone(), h.gamma.clone());
    for n in 1..=n_max {
        va = va + v_p_int(p, a.numer());
        vb = vb + v_p_int(p, b.numer());
        vc = vc + v_p_int(p, c.numer());
        vf += v_p_int(p, &n.into()).finite().expect("n > 0");
        out.push(CoefVal::from_parts(va + vb, vc + Valuation::Finite(vf)));
        a = a.add_int(1);
        b = b.add_int(1);
        c = c.add_int(1);
    }
    out
}

/// The same table by accumulating `v_p` of each factor.
pub fn coefficient_valuations_oracle(h: &HGParams, n_max: u64) -> ValuationTable {
    ValuationTable {
        first: series_valuations_oracle(h, n_max),
        second: series_valuations_oracle(&h.second(), n_max),
    }
}
