use serde_json::{json, Value};

use super::{Point, StratModule};
use crate::error::{Error, Result};
use crate::ffalg::{FpPoly, FpRatFn, Prime};
use crate::padic::{DigitWindow, PAdicRat};

/// Exponent digits at a point, one window per eigenline (with multiplicity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentReport {
    pub point: Point,
    pub exponents: Vec<DigitWindow>,
    pub certified_digits: usize,
}

impl ExponentReport {
    /// Multiset comparison against exact exponents on the certified digits.
    pub fn matches(&self, expected: &[PAdicRat]) -> bool {
        if expected.len() != self.exponents.len() {
            return false;
        }
        let mut want: Vec<Vec<u64>> = expected.iter().map(|x| x.digits(self.certified_digits)).collect();
        want.sort();
        let got: Vec<Vec<u64>> = self.exponents.iter().map(|w| w.digits.clone()).collect();
        want == got
    }

    /// Rational candidates for each window: the shortest eventually periodic
    /// expansion explaining it, when one exists. Not certified.
    pub fn candidates(&self, max_period: usize) -> Vec<Option<PAdicRat>> {
        self.exponents
            .iter()
            .map(|w| {
                let prof = w.detect_period(max_period)?;
                prof.to_padic(w.prime).ok()
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let candidates = self.candidates(self.certified_digits / 2);
        json!({
            "point": self.point.to_string(),
            "certified_digits": self.certified_digits,
            "exponents": self
                .exponents
                .iter()
                .zip(candidates)
                .map(|(w, c)| json!({
                    "digits": w.digits,
                    "candidate": c.map(|x| x.to_ratio_string()),
                }))
                .collect::<Vec<_>>(),
        })
    }
}

pub(super) fn local_exponents(m: &StratModule, pt: Point) -> Result<ExponentReport> {
    if !m.is_regular_singular_at(pt)? {
        return Err(Error::NotRegularSingular(pt.to_string()));
    }
    let local = m.localize(pt)?;
    let p = m.prime();
    let big_n = m.order_bound();
    let mut residues = Vec::new();
    let mut pk = 1usize;
    while pk <= big_n {
        let a = local.matrix(pk)?;
        let r: Vec<Vec<u64>> = (0..m.rank())
            .map(|i| (0..m.rank()).map(|j| residue(a.get(i, j), pk)).collect())
            .collect();
        residues.push(r);
        match pk.checked_mul(p.get() as usize) {
            Some(next) => pk = next,
            None => break,
        }
    }
    let lines = joint_eigenlines(p, &residues).map_err(|reason| Error::NotSplit {
        point: pt.to_string(),
        reason,
    })?;
    let mut exponents: Vec<DigitWindow> = lines
        .into_iter()
        .map(|digits| DigitWindow { prime: p, digits })
        .collect();
    exponents.sort_by(|a, b| a.digits.cmp(&b.digits));
    Ok(ExponentReport {
        point: pt,
        exponents,
        certified_digits: residues.len(),
    })
}

// value of t^k f at t = 0, given that it has no pole there
fn residue(f: &FpRatFn, k: usize) -> u64 {
    let Some(ord) = f.order_at(0) else {
        return 0;
    };
    if ord > -(k as i64) {
        return 0;
    }
    let g = f * &FpRatFn::monomial(f.prime(), 1, k as i64);
    g.eval(0).expect("pole excluded by regularity")
}

/// Simultaneous eigenvalue sequences of commuting matrices over F_p, one
/// per basis vector of a joint eigenbasis. Fails when the matrices do not
/// commute or are not simultaneously diagonalizable over F_p.
pub fn joint_eigenlines(p: Prime, mats: &[Vec<Vec<u64>>]) -> std::result::Result<Vec<Vec<u64>>, String> {
    let Some(first) = mats.first() else {
        return Err("no residue matrices".into());
    };
    let d = first.len();
    for (a, ma) in mats.iter().enumerate() {
        for (b, mb) in mats.iter().enumerate().skip(a + 1) {
            if mat_mul(p, ma, mb) != mat_mul(p, mb, ma) {
                return Err(format!("residues at levels {a} and {b} do not commute"));
            }
        }
    }
    let identity: Vec<Vec<u64>> = (0..d).map(|i| (0..d).map(|j| u64::from(i == j)).collect()).collect();
    // (basis as columns, digits so far)
    let mut spaces: Vec<(Vec<Vec<u64>>, Vec<u64>)> = vec![(identity, Vec::new())];
    for (level, r) in mats.iter().enumerate() {
        let eig = charpoly(p, r).roots();
        let mut next = Vec::new();
        for (basis, digits) in spaces {
            let dim = basis.len();
            let mut found = 0;
            for &lam in &eig {
                // (R - lam) V x = 0
                let shifted: Vec<Vec<u64>> = (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| if i == j { p.sub(r[i][j], lam) } else { r[i][j] })
                            .collect()
                    })
                    .collect();
                let image: Vec<Vec<u64>> = (0..d)
                    .map(|i| {
                        (0..dim)
                            .map(|c| (0..d).fold(0, |acc, k| p.add(acc, p.mul(shifted[i][k], basis[c][k]))))
                            .collect()
                    })
                    .collect();
                let kernel = nullspace(p, &image, dim);
                if kernel.is_empty() {
                    continue;
                }
                found += kernel.len();
                let vectors: Vec<Vec<u64>> = kernel
                    .iter()
                    .map(|x| {
                        (0..d)
                            .map(|k| (0..dim).fold(0, |acc, c| p.add(acc, p.mul(x[c], basis[c][k]))))
                            .collect()
                    })
                    .collect();
                let mut digs = digits.clone();
                digs.push(lam);
                next.push((vectors, digs));
            }
            if found != dim {
                return Err(format!("residue at level {level} is not diagonalizable over F_{p}"));
            }
        }
        spaces = next;
    }
    let mut out = Vec::with_capacity(d);
    for (basis, digits) in spaces {
        for _ in 0..basis.len() {
            out.push(digits.clone());
        }
    }
    Ok(out)
}

fn mat_mul(p: Prime, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(0, |acc, k| p.add(acc, p.mul(a[i][k], b[k][j]))))
                .collect()
        })
        .collect()
}

// Basis of {x : A x = 0} for an `rows x cols` matrix.
fn nullspace(p: Prime, a: &[Vec<u64>], cols: usize) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = a.to_vec();
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = p.inv(m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = p.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = p.sub(m[i][j], p.mul(f, m[r][j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0; cols];
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = p.neg(m[row][f]);
            }
            v
        })
        .collect()
}

/// Characteristic polynomial via reduction to Hessenberg form.
pub(crate) fn charpoly(p: Prime, a: &[Vec<u64>]) -> FpPoly {
    let n = a.len();
    let mut h: Vec<Vec<u64>> = a.to_vec();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| h[i][m - 1] != 0) else {
            continue;
        };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let t = p.inv(h[m][m - 1]).expect("nonzero");
        for i in m + 1..n {
            let u = p.mul(h[i][m - 1], t);
            if u == 0 {
                continue;
            }
            for j in 0..n {
                h[i][j] = p.sub(h[i][j], p.mul(u, h[m][j]));
            }
            for row in h.iter_mut() {
                row[m] = p.add(row[m], p.mul(u, row[i]));
            }
        }
    }
    let x = FpPoly::monomial(p, 1, 1);
    let mut polys = vec![FpPoly::one(p)];
    for m in 0..n {
        let mut next = &(&x - &FpPoly::constant(p, h[m][m])) * &polys[m];
        let mut prod = 1;
        for i in (0..m).rev() {
            prod = p.mul(prod, h[i + 1][i]);
            if prod == 0 {
                break;
            }
            let c = p.mul(prod, h[i][m]);
            next = &next - &polys[i].scale(c);
        }
        polys.push(next);
    }
    polys.pop().expect("nonempty")
}
