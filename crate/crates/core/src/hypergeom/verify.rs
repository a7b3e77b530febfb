use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::qratfn::reduce_rational;
use super::HGParams;
use crate::error::Result;
use crate::ffalg::{hasse_series, FpPoly, FpRatFn, FpSeries, Prime};
use crate::matrix::Matrix;
use crate::padic::{binom_mod_p, PAdicRat};
use crate::stratmod::{e_alpha, ExponentReport, Point, StratModule};

/// Outcome of checking that a vector of series solves a module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Pass { orders: usize },
    /// `hasse(Y, n)` and `A_n Y` first differ in row `row` at `z^coefficient`.
    Fail { n: usize, row: usize, coefficient: i64 },
    /// The series coefficient of index `n` is not p-integral.
    NotIntegral { n: usize },
    Skipped { reason: String },
}

impl CheckStatus {
    pub fn is_pass(&self) -> bool {
        matches!(self, CheckStatus::Pass { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            CheckStatus::Pass { orders } => json!({"status": "pass", "orders": orders}),
            CheckStatus::Fail { n, row, coefficient } => {
                json!({"status": "fail", "n": n, "row": row, "coefficient": coefficient})
            }
            CheckStatus::NotIntegral { n } => json!({"status": "not-integral", "n": n}),
            CheckStatus::Skipped { reason } => json!({"status": "skipped", "reason": reason}),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub precision: usize,
    /// `(F_1, F_1')` against the reduced module.
    pub first: CheckStatus,
    /// The second solution, with its `z^(1-gamma)` factor split off into a
    /// twist of the module.
    pub second: CheckStatus,
    pub exponents_at_zero: Option<ExponentReport>,
    pub exponents_match: bool,
    pub exponent_error: Option<String>,
}

impl SolutionReport {
    pub fn is_pass(&self) -> bool {
        self.first.is_pass()
            && matches!(self.second, CheckStatus::Pass { .. } | CheckStatus::Skipped { .. })
            && self.exponents_match
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.is_pass(),
            "precision": self.precision,
            "first": self.first.to_json(),
            "second": self.second.to_json(),
            "exponents_at_0": self.exponents_at_zero.as_ref().map(ExponentReport::to_json),
            "exponents_match": self.exponents_match,
            "exponent_error": self.exponent_error,
        })
    }
}

/// Base change to `(y, t y')` with `t` the local parameter at `pt`.
pub fn theta_gauge(m: &StratModule, pt: Point) -> Result<StratModule> {
    let p = m.prime();
    let t = match pt {
        Point::Finite(c) => FpRatFn::from_poly(FpPoly::linear(p, c)),
        Point::Infinity => FpRatFn::monomial(p, 1, 1),
    };
    let g = Matrix::diagonal(vec![FpRatFn::one(p), t.inv()?]);
    m.gauge(&g)
}

/// Exponents of a reduced hypergeometric module at `0`, `1` or `inf`, read
/// in the basis `(y, t y')`.
pub fn hg_exponents(m: &StratModule, pt: Point) -> Result<ExponentReport> {
    theta_gauge(m, pt)?.local_exponents(pt)
}

/// `{0, 1-c}`, `{0, c-a-b}`, `{a, b}` at `0`, `1`, `inf`.
pub fn expected_exponents(h: &HGParams, pt: Point) -> Vec<PAdicRat> {
    let zero = PAdicRat::zero(h.prime);
    match pt {
        Point::Finite(0) => vec![zero, h.gamma.neg().add_int(1)],
        Point::Finite(1) => vec![zero, h.gamma.sub(&h.alpha).sub(&h.beta)],
        Point::Infinity => vec![h.alpha.clone(), h.beta.clone()],
        Point::Finite(_) => vec![zero.clone(), zero],
    }
}

/// `2F1(a, b; c; z) mod p` to `O(z^precision)`, or the first index whose
/// coefficient is not p-integral.
pub fn hypergeometric_series_mod_p(
    h: &HGParams,
    precision: usize,
) -> std::result::Result<FpSeries, usize> {
    let p = h.prime;
    let (a, b, c) = (h.alpha.to_rational(), h.beta.to_rational(), h.gamma.to_rational());
    let mut coef = BigRational::one();
    let mut out = Vec::with_capacity(precision);
    for n in 0..precision {
        if n > 0 && !coef.is_zero() {
            let k = BigRational::from_integer((n as i64 - 1).into());
            let den = (&c + &k) * (&k + BigRational::one());
            if den.is_zero() {
                return Err(n);
            }
            coef = coef * (&a + &k) * (&b + &k) / den;
        }
        out.push(reduce_rational(p, &coef).map_err(|_| n)?);
    }
    Ok(FpSeries::new(p, 0, out).expect("positive precision"))
}

fn first_disagreement(a: &FpSeries, b: &FpSeries) -> Option<i64> {
    let top = a.abs_precision().min(b.abs_precision());
    let low = a.valuation().min(b.valuation());
    (low..top).find(|&e| a.coeff(e).ok() != b.coeff(e).ok())
}

/// Checks `hasse(Y, n) = A_n Y` entrywise at `z = 0` for every stored `n`.
pub fn check_series_solution(m: &StratModule, y: &[FpSeries], precision: usize) -> Result<CheckStatus> {
    for n in 1..=m.order_bound() {
        let a = m.matrix(n)?;
        for (row, yi) in y.iter().enumerate() {
            let lhs = hasse_series(yi, n);
            let mut rhs: Option<FpSeries> = None;
            for (col, yj) in y.iter().enumerate() {
                let f = a.get(row, col);
                if f.is_zero() {
                    continue;
                }
                let term = FpSeries::expand_ratfn(f, 0, precision + 2 * n)?.mul(yj)?;
                rhs = Some(match rhs {
                    None => term,
                    Some(acc) => acc.add(&term)?,
                });
            }
            let rhs = rhs.unwrap_or_else(|| FpSeries::zero(m.prime(), lhs.abs_precision(), 1));
            if let Some(e) = first_disagreement(&lhs, &rhs) {
                return Ok(CheckStatus::Fail { n, row, coefficient: e });
            }
        }
    }
    Ok(CheckStatus::Pass { orders: m.order_bound() })
}

fn euler_factor(p: Prime, exponent: &PAdicRat, precision: usize) -> FpSeries {
    let coeffs = (0..precision as u64)
        .map(|n| {
            let c = binom_mod_p(exponent, n);
            if n % 2 == 1 {
                p.neg(c)
            } else {
                c
            }
        })
        .collect();
    FpSeries::new(p, 0, coeffs).expect("positive precision")
}

/// Series verification of the reduced module `m` to `O(z^precision)`.
pub fn reduced_solution_check(h: &HGParams, m: &StratModule, precision: usize) -> Result<SolutionReport> {
    let p = h.prime;
    let first = match hypergeometric_series_mod_p(h, precision) {
        Ok(f) => {
            let df = hasse_series(&f, 1);
            check_series_solution(m, &[f, df], precision)?
        }
        Err(n) => CheckStatus::NotIntegral { n },
    };

    let second = if h.gamma.is_integer() && h.gamma.to_i64().is_some_and(|g| g >= 2) {
        CheckStatus::Skipped {
            reason: "2 - gamma is a nonpositive integer".into(),
        }
    } else {
        match hypergeometric_series_mod_p(&h.second(), precision) {
            Err(n) => CheckStatus::NotIntegral { n },
            Ok(core) => {
                let shift = h.gamma.sub(&h.alpha).sub(&h.beta);
                let g2 = euler_factor(p, &shift, precision).mul(&core)?;
                let c = h.gamma.neg().add_int(1);
                let w2 = g2.shift(-1).scale(c.residue()).add(&hasse_series(&g2, 1))?;
                let twist = e_alpha(&c, m.order_bound())?.with_coordinate(m.coordinate())?.dual();
                check_series_solution(&m.tensor(&twist)?, &[g2, w2], precision)?
            }
        }
    };

    let (exponents_at_zero, exponents_match, exponent_error) = match hg_exponents(m, Point::Finite(0)) {
        Ok(rep) => {
            let ok = rep.matches(&expected_exponents(h, Point::Finite(0)));
            (Some(rep), ok, None)
        }
        Err(e) => (None, false, Some(e.to_string())),
    };
    Ok(SolutionReport {
        precision,
        first,
        second,
        exponents_at_zero,
        exponents_match,
        exponent_error,
    })
}
