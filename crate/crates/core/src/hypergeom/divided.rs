use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::qratfn::{QPoly, QRatFn};
use super::HGParams;
use crate::error::{Error, Result};
use crate::ffalg::{FpRatFn, Prime};
use crate::matrix::Matrix;
use crate::padic::Valuation;
use crate::stratmod::{Point, StratModule};

pub type QMatrix = Matrix<QRatFn>;

/// `[[0, 1], [-ab / (z(z-1)), -((a+b+1)z - c) / (z(z-1))]]`.
pub fn companion_matrix(h: &HGParams) -> QMatrix {
    let a = h.alpha.to_rational();
    let b = h.beta.to_rational();
    let c = h.gamma.to_rational();
    let one = BigRational::one();
    let q21 = QRatFn::new(QPoly::constant(-(&a * &b)), 1, 1);
    let q22 = QRatFn::new(QPoly::new(vec![c, -(a + b + &one)]), 1, 1);
    Matrix::from_rows(vec![vec![QRatFn::zero(), QRatFn::one()], vec![q21, q22]]).expect("2x2")
}

/// `A_1, ..., A_N` with `(d/dz)^n y / n! = A_n y`, from
/// `A_(n+1) = (A_n' + A_n A_1) / (n+1)`.
pub fn divided_matrices(h: &HGParams, order_bound: usize) -> Vec<QMatrix> {
    let a1 = companion_matrix(h);
    let mut out = Vec::with_capacity(order_bound);
    if order_bound == 0 {
        return out;
    }
    out.push(a1.clone());
    for n in 1..order_bound {
        let prev = &out[n - 1];
        let inv = QRatFn::constant(BigRational::new(BigInt::one(), BigInt::from(n + 1)));
        let next = prev.map(QRatFn::derivative).add(&prev.mul(&a1)).scale(&inv);
        out.push(next);
    }
    out
}

/// First `(n, m)` with `n + m <= N` where
/// `sum_{a+b=n} D^(a)(A_m) A_b = C(n+m, n) A_(n+m)` fails over Q, with
/// `D^(a)` the divided derivative in characteristic zero.
pub fn check_iterative_q(mats: &[QMatrix]) -> Option<(usize, usize)> {
    let big_n = mats.len();
    let Some(first) = mats.first() else {
        return None;
    };
    let id = Matrix::identity_like(first.sample(), first.rows());
    let a = |k: usize| if k == 0 { id.clone() } else { mats[k - 1].clone() };
    for total in 2..=big_n {
        for n in 1..total {
            let m = total - n;
            let mut lhs = a(m).mul(&a(n));
            for k in 1..=n {
                let d = a(m).map(|f| f.divided_derivative(k));
                lhs = lhs.add(&d.mul(&a(n - k)));
            }
            let c = BigRational::from_integer(binomial(total, n));
            if lhs != a(total).scale(&QRatFn::constant(c)) {
                return Some((n, m));
            }
        }
    }
    None
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Entrywise reduction modulo p, as a module on the `z`-line singular at
/// `0, 1, inf`. Fails on the first `(n, entry)` carrying a coefficient of
/// negative valuation.
pub fn reduce_mod_p(prime: Prime, mats: &[QMatrix]) -> Result<StratModule> {
    if mats.is_empty() {
        return Err(Error::EmptyOrderBound);
    }
    let mut reduced: Vec<Matrix<FpRatFn>> = Vec::with_capacity(mats.len());
    for (i, a) in mats.iter().enumerate() {
        for row in 0..a.rows() {
            for col in 0..a.cols() {
                if let Valuation::Finite(v) = a.get(row, col).min_valuation(prime) {
                    if v < 0 {
                        return Err(Error::NonIntegralCoefficient {
                            n: i + 1,
                            row,
                            col,
                            valuation: v,
                        });
                    }
                }
            }
        }
        reduced.push(a.try_map(|f| f.reduce(prime))?);
    }
    let sing: BTreeSet<Point> = [Point::Finite(0), Point::Finite(1), Point::Infinity].into_iter().collect();
    StratModule::new(prime, "z", reduced, sing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Ring;

    fn params(p: u64, a: &str, b: &str, c: &str) -> HGParams {
        HGParams::parse(Prime::new(p).unwrap(), a, b, c).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn companion_entries() {
        let h = params(3, "1/2", "1/2", "1");
        let a1 = companion_matrix(&h);
        assert_eq!(a1.get(1, 0), &QRatFn::new(QPoly::constant(r(-1, 4)), 1, 1));
        let h0 = params(5, "0", "2/3", "1/2");
        assert!(companion_matrix(&h0).get(1, 0).num().is_zero());
    }

    #[test]
    fn second_matrix_against_direct_derivative() {
        let h = params(7, "2/3", "-5/4", "3/5");
        let mats = divided_matrices(&h, 3);
        let a1 = companion_matrix(&h);
        let (q21, q22) = (a1.get(1, 0).clone(), a1.get(1, 1).clone());
        // y'' = q21 y + q22 y'
        // y''' = q21' y + (q21 + q22') y' + q22 y''
        let half = QRatFn::constant(r(1, 2));
        let r2 = [q21.clone(), q22.clone()];
        let r3 = [
            Ring::add(&q21.derivative(), &Ring::mul(&q22, &q21)),
            Ring::add(&Ring::add(&q21, &q22.derivative()), &Ring::mul(&q22, &q22)),
        ];
        for j in 0..2 {
            assert_eq!(mats[1].get(0, j), &Ring::mul(&r2[j], &half));
            assert_eq!(mats[1].get(1, j), &Ring::mul(&r3[j], &half));
        }
    }

    #[test]
    fn iterative_over_q() {
        let h = params(5, "1/3", "2/3", "1/2");
        let mats = divided_matrices(&h, 6);
        assert_eq!(check_iterative_q(&mats), None);
        let mut bad = mats.clone();
        let shifted = Ring::add(bad[3].get(0, 1), &QRatFn::one());
        bad[3].set(0, 1, shifted);
        assert!(check_iterative_q(&bad).is_some());
    }

    #[test]
    fn reduction_of_a1() {
        let h = params(3, "1/2", "1/2", "1");
        let m = reduce_mod_p(h.prime, &divided_matrices(&h, 2)).unwrap();
        let a1 = m.matrix(1).unwrap();
        assert_eq!(a1.get(1, 0).to_string_in("z"), "2/(z^2+2*z)");
        // -(2z - 1)/(z(z-1)) = (z + 1)/(z^2 - z) mod 3
        assert_eq!(a1.get(1, 1).to_string_in("z"), "(z+1)/(z^2+2*z)");
        assert!(m.check_iterative().is_pass());
    }

    #[test]
    fn resonant_triple_has_denominators() {
        let h = params(3, "1/2", "1/2", "1");
        match reduce_mod_p(h.prime, &divided_matrices(&h, 9)) {
            Err(Error::NonIntegralCoefficient { n, valuation, .. }) => {
                assert_eq!(n, 3);
                assert_eq!(valuation, -1);
            }
            other => panic!("expected a non-integral coefficient, got {other:?}"),
        }
    }
}
