//! Stratified modules over F_p(z), presented by the matrices `A_n` of the
//! divided equations `hasse(y, n) = A_n y`.

mod json;
mod local;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::ffalg::{hasse_ratfn_all, FpPoly, FpRatFn, Prime};
use crate::matrix::Matrix;
use crate::padic::{binom_mod_p, PAdicRat};

pub use local::{joint_eigenlines, ExponentReport};

/// A point of the projective line over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Finite(u64),
    Infinity,
}

impl Point {
    pub fn parse(prime: Prime, s: &str) -> Result<Point> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(Point::Infinity);
        }
        let c: i128 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad point `{s}`")))?;
        Ok(Point::Finite(prime.reduce(c)))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(c) => write!(f, "{c}"),
            Point::Infinity => f.write_str("inf"),
        }
    }
}

/// Result of the iterativity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IterativityReport {
    Pass { checked_up_to: usize },
    Fail {
        n: usize,
        m: usize,
        discrepancy: Matrix<FpRatFn>,
    },
}

impl IterativityReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, IterativityReport::Pass { .. })
    }
}

/// Rank `d` module with divided matrices `A_1, ..., A_N` (`A_0 = 1` implicit).
#[derive(Clone, PartialEq, Eq)]
pub struct StratModule {
    prime: Prime,
    coordinate: String,
    rank: usize,
    matrices: Vec<Matrix<FpRatFn>>,
    singularities: BTreeSet<Point>,
}

impl StratModule {
    /// Builds a module from `A_1..A_N`, checking shapes and that every
    /// finite pole is a declared singularity.
    pub fn new(
        prime: Prime,
        coordinate: &str,
        matrices: Vec<Matrix<FpRatFn>>,
        singularities: BTreeSet<Point>,
    ) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::EmptyOrderBound);
        };
        let rank = first.rows();
        for a in &matrices {
            if !a.is_square() || a.rows() != rank {
                return Err(Error::RankMismatch(rank, a.rows().max(a.cols())));
            }
            for x in a.entries() {
                prime.ensure_same(x.prime())?;
            }
        }
        if coordinate.is_empty() || !coordinate.chars().all(char::is_alphabetic) {
            return Err(Error::Invalid(format!("bad coordinate name `{coordinate}`")));
        }
        let poles = finite_poles(&matrices)?;
        if let Some(pt) = poles.iter().find(|pt| !singularities.contains(pt)) {
            return Err(Error::Invalid(format!("pole at undeclared point {pt}")));
        }
        Ok(StratModule {
            prime,
            coordinate: coordinate.to_string(),
            rank,
            matrices,
            singularities,
        })
    }

    pub fn trivial(prime: Prime, rank: usize, order_bound: usize) -> Result<Self> {
        if order_bound == 0 {
            return Err(Error::EmptyOrderBound);
        }
        let zero = Matrix::zeros_like(&FpRatFn::zero(prime), rank, rank);
        StratModule::new(prime, "t", vec![zero; order_bound], BTreeSet::new())
    }

    /// Rank one module with the given coefficients `A_1..A_N`.
    pub fn rank_one(prime: Prime, coordinate: &str, coeffs: Vec<FpRatFn>, singularities: BTreeSet<Point>) -> Result<Self> {
        let matrices = coeffs.into_iter().map(Matrix::scalar).collect();
        StratModule::new(prime, coordinate, matrices, singularities)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn coordinate(&self) -> &str {
        &self.coordinate
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order_bound(&self) -> usize {
        self.matrices.len()
    }

    pub fn singularities(&self) -> &BTreeSet<Point> {
        &self.singularities
    }

    /// `A_n` for `1 <= n <= N`.
    pub fn matrix(&self, n: usize) -> Result<&Matrix<FpRatFn>> {
        if n == 0 || n > self.order_bound() {
            return Err(Error::OrderOutOfRange {
                requested: n,
                bound: self.order_bound(),
            });
        }
        Ok(&self.matrices[n - 1])
    }

    pub fn matrices(&self) -> &[Matrix<FpRatFn>] {
        &self.matrices
    }

    /// `A_n` for `0 <= n <= N`, with `A_0` the identity.
    pub fn matrix_or_identity(&self, n: usize) -> Matrix<FpRatFn> {
        if n == 0 {
            self.identity()
        } else {
            self.matrices[n - 1].clone()
        }
    }

    pub fn with_coordinate(mut self, name: &str) -> Result<Self> {
        if name.is_empty() || !name.chars().all(char::is_alphabetic) {
            return Err(Error::Invalid(format!("bad coordinate name `{name}`")));
        }
        self.coordinate = name.to_string();
        Ok(self)
    }

    /// Keeps `A_1..A_n`.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyOrderBound);
        }
        if n > self.order_bound() {
            return Err(Error::OrderOutOfRange {
                requested: n,
                bound: self.order_bound(),
            });
        }
        let mut out = self.clone();
        out.matrices.truncate(n);
        Ok(out)
    }

    /// Same module with `A_n[i][j]` replaced; the result may fail the
    /// iterativity check.
    pub fn with_entry(&self, n: usize, i: usize, j: usize, value: FpRatFn) -> Result<Self> {
        self.matrix(n)?;
        if i >= self.rank || j >= self.rank {
            return Err(Error::Invalid(format!("entry ({i}, {j}) outside rank {}", self.rank)));
        }
        let mut matrices = self.matrices.clone();
        matrices[n - 1].set(i, j, value);
        let mut sing = self.singularities.clone();
        sing.extend(finite_poles(&matrices)?);
        StratModule::new(self.prime, &self.coordinate, matrices, sing)
    }

    /// Compares the matrices, ignoring coordinate names and declarations.
    pub fn same_matrices(&self, other: &StratModule) -> bool {
        self.prime == other.prime && self.matrices == other.matrices
    }

    fn identity(&self) -> Matrix<FpRatFn> {
        Matrix::identity_like(&FpRatFn::zero(self.prime), self.rank)
    }

    fn ensure_compatible(&self, other: &StratModule) -> Result<()> {
        self.prime.ensure_same(other.prime)?;
        if self.coordinate != other.coordinate {
            return Err(Error::CoordinateMismatch(self.coordinate.clone(), other.coordinate.clone()));
        }
        Ok(())
    }

    /// Checks `sum_{a+b=n} hasse(A_m, a) A_b = C(n+m, n) A_{n+m}` for all
    /// `n, m >= 1` with `n + m <= N`, in order of increasing `n + m`.
    pub fn check_iterative(&self) -> IterativityReport {
        let big_n = self.order_bound();
        let p = self.prime;
        // derivs[m][a] = hasse(A_m, a) for a <= N - m
        let derivs: Vec<Vec<Matrix<FpRatFn>>> = (0..=big_n)
            .map(|m| {
                if m == 0 {
                    return Vec::new();
                }
                hasse_matrix_all(&self.matrices[m - 1], big_n - m)
            })
            .collect();
        for total in 2..=big_n {
            for n in 1..total {
                let m = total - n;
                let mut lhs = self.matrices[m - 1].mul(&self.matrix_or_identity(n));
                for a in 1..=n {
                    let d = &derivs[m][a];
                    if d.is_zero() {
                        continue;
                    }
                    lhs = lhs.add(&d.mul(&self.matrix_or_identity(n - a)));
                }
                let c = p.binom(total as u64, n as u64);
                let rhs = self.matrices[total - 1].scale(&FpRatFn::constant(p, c));
                if lhs != rhs {
                    return IterativityReport::Fail {
                        n,
                        m,
                        discrepancy: lhs.sub(&rhs),
                    };
                }
            }
        }
        IterativityReport::Pass { checked_up_to: big_n }
    }

    /// Tensor product: `A_n = sum_{a+b=n} A_a (x) B_b`.
    pub fn tensor(&self, other: &StratModule) -> Result<StratModule> {
        self.ensure_compatible(other)?;
        let big_n = self.order_bound().min(other.order_bound());
        let matrices = (1..=big_n)
            .map(|n| {
                let mut acc = self.matrix_or_identity(n).kron(&other.identity());
                for a in 0..n {
                    acc = acc.add(&self.matrix_or_identity(a).kron(&other.matrix_or_identity(n - a)));
                }
                acc
            })
            .collect();
        let sing = self.singularities.union(&other.singularities).copied().collect();
        StratModule::new(self.prime, &self.coordinate, matrices, sing)
    }

    /// Dual module, from `sum_{a+b=n} (A*_a)^T A_b = 0`.
    pub fn dual(&self) -> StratModule {
        let big_n = self.order_bound();
        let mut duals: Vec<Matrix<FpRatFn>> = vec![self.identity()];
        for n in 1..=big_n {
            let mut acc = self.matrices[n - 1].transpose();
            for a in 1..n {
                acc = acc.add(&self.matrices[n - a - 1].transpose().mul(&duals[a]));
            }
            duals.push(acc.neg());
        }
        duals.remove(0);
        StratModule {
            prime: self.prime,
            coordinate: self.coordinate.clone(),
            rank: self.rank,
            matrices: duals,
            singularities: self.singularities.clone(),
        }
    }

    pub fn direct_sum(&self, other: &StratModule) -> Result<StratModule> {
        self.ensure_compatible(other)?;
        let big_n = self.order_bound().min(other.order_bound());
        let matrices = (1..=big_n)
            .map(|n| self.matrices[n - 1].block_diag(&other.matrices[n - 1]))
            .collect();
        let sing = self.singularities.union(&other.singularities).copied().collect();
        StratModule::new(self.prime, &self.coordinate, matrices, sing)
    }

    /// Base change `y = G w`:
    /// `W_n = G^-1 (A_n G - sum_{a=1..n} hasse(G, a) W_{n-a})`.
    pub fn gauge(&self, g: &Matrix<FpRatFn>) -> Result<StratModule> {
        if !g.is_square() || g.rows() != self.rank {
            return Err(Error::RankMismatch(self.rank, g.rows()));
        }
        let big_n = self.order_bound();
        let ginv = g.inverse()?;
        let gd = hasse_matrix_all(g, big_n);
        let mut w: Vec<Matrix<FpRatFn>> = vec![self.identity()];
        for n in 1..=big_n {
            let mut acc = self.matrices[n - 1].mul(g);
            for (a, d) in gd.iter().enumerate().take(n + 1).skip(1) {
                if d.is_zero() {
                    continue;
                }
                acc = acc.sub(&d.mul(&w[n - a]));
            }
            w.push(ginv.mul(&acc));
        }
        w.remove(0);
        let mut sing = self.singularities.clone();
        sing.extend(finite_poles(&w)?);
        StratModule::new(self.prime, &self.coordinate, w, sing)
    }

    /// Pullback along `z = t^e` for `e` prime to `p`; the new coordinate
    /// keeps the old name.
    pub fn kummer_pullback(&self, e: u64) -> Result<StratModule> {
        let p = self.prime;
        if e == 0 {
            return Err(Error::Invalid("covering degree must be positive".into()));
        }
        if e % p.get() == 0 {
            return Err(Error::WildCovering { e, p: p.get() });
        }
        if e == 1 {
            return Ok(self.clone());
        }
        let e = e as usize;
        let big_n = self.order_bound();
        // u(T) = (t + T)^e - t^e = sum_{j=1..e} C(e, j) t^(e-j) T^j
        let u: Vec<FpPoly> = (0..=e.min(big_n))
            .map(|j| {
                if j == 0 {
                    FpPoly::zero(p)
                } else {
                    FpPoly::monomial(p, p.binom(e as u64, j as u64), e - j)
                }
            })
            .collect();
        let subst = |f: &FpRatFn| f.compose_power(e);
        let matrices = pullback_matrices(self, subst, |upow, next| series_mul(upow, &u, next, big_n))?;
        let mut sing = BTreeSet::new();
        for pt in &self.singularities {
            match *pt {
                Point::Infinity => {
                    sing.insert(Point::Infinity);
                }
                Point::Finite(0) => {
                    sing.insert(Point::Finite(0));
                }
                Point::Finite(c) => {
                    let fiber = &FpPoly::monomial(p, 1, e) - &FpPoly::constant(p, c);
                    let roots = fiber.split_factors().ok_or_else(|| {
                        Error::UnsupportedSingularity(format!("preimages of {c} under t^{e} lie outside F_{p}"))
                    })?;
                    sing.extend(roots.into_iter().map(|(r, _)| Point::Finite(r)));
                }
            }
        }
        sing.extend(finite_poles(&matrices)?);
        StratModule::new(p, &self.coordinate, matrices, sing)
    }

    /// The same module in the local parameter at `pt`, moved to the origin:
    /// `t - c` at a finite point, `1/t` at infinity.
    pub fn localize(&self, pt: Point) -> Result<StratModule> {
        let p = self.prime;
        match pt {
            Point::Finite(c) => {
                let c = c % p.get();
                if c == 0 {
                    return Ok(self.clone());
                }
                let matrices = self.matrices.iter().map(|a| a.map(|f| f.taylor_shift(c))).collect();
                let sing = self
                    .singularities
                    .iter()
                    .map(|q| match q {
                        Point::Finite(d) => Point::Finite(p.sub(*d, c)),
                        Point::Infinity => Point::Infinity,
                    })
                    .collect();
                StratModule::new(p, &self.coordinate, matrices, sing)
            }
            Point::Infinity => {
                // A^s_n = sum_{m=1..n} (-1)^n C(n-1, m-1) s^(-n-m) A_m(1/s)
                let inverted: Vec<Matrix<FpRatFn>> =
                    self.matrices.iter().map(|a| a.map(FpRatFn::invert_variable)).collect();
                let big_n = self.order_bound();
                let zero = Matrix::zeros_like(&FpRatFn::zero(p), self.rank, self.rank);
                let mut matrices = Vec::with_capacity(big_n);
                for n in 1..=big_n {
                    let mut acc = zero.clone();
                    for m in 1..=n {
                        let c = p.binom(n as u64 - 1, m as u64 - 1);
                        if c == 0 {
                            continue;
                        }
                        let c = if n % 2 == 1 { p.neg(c) } else { c };
                        let w = FpRatFn::monomial(p, c, -((n + m) as i64));
                        acc = acc.add(&inverted[m - 1].scale(&w));
                    }
                    matrices.push(acc);
                }
                let sing = self
                    .singularities
                    .iter()
                    .map(|q| match q {
                        Point::Finite(0) => Point::Infinity,
                        Point::Finite(d) => Point::Finite(p.inv(*d).expect("nonzero")),
                        Point::Infinity => Point::Finite(0),
                    })
                    .collect();
                StratModule::new(p, &self.coordinate, matrices, sing)
            }
        }
    }

    /// Whether `t^n A_n` has no pole at `pt` for every stored `n`, with `t`
    /// the local parameter there.
    pub fn is_regular_singular_at(&self, pt: Point) -> Result<bool> {
        let local = self.localize(pt)?;
        Ok(local.matrices.iter().enumerate().all(|(i, a)| {
            let n = i as i64 + 1;
            a.entries().all(|f| f.order_at(0).map_or(true, |o| o >= -n))
        }))
    }

    /// Local exponents at `pt`, read off digitwise from the residues of
    /// `t^(p^k) A_(p^k)` in the presented basis.
    pub fn local_exponents(&self, pt: Point) -> Result<ExponentReport> {
        local::local_exponents(self, pt)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json::to_json(self)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        json::from_json(value)
    }
}

impl fmt::Debug for StratModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// `E(alpha)`: rank one, `A_n = C(alpha, n) t^-n`.
pub fn e_alpha(alpha: &PAdicRat, order_bound: usize) -> Result<StratModule> {
    if order_bound == 0 {
        return Err(Error::EmptyOrderBound);
    }
    let p = alpha.prime();
    let coeffs = (1..=order_bound)
        .map(|n| FpRatFn::monomial(p, binom_mod_p(alpha, n as u64), -(n as i64)))
        .collect();
    let sing = [Point::Finite(0), Point::Infinity].into_iter().collect();
    StratModule::rank_one(p, "t", coeffs, sing)
}

/// Formal product `prod_i (z - c_i)^(alpha_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneSymbol {
    prime: Prime,
    factors: Vec<(u64, PAdicRat)>,
}

impl RankOneSymbol {
    pub fn new(prime: Prime, factors: Vec<(u64, PAdicRat)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(factors.len());
        for (c, a) in factors {
            prime.ensure_same(a.prime())?;
            let c = c % prime.get();
            if !seen.insert(c) {
                return Err(Error::Invalid(format!("point {c} repeated in symbol")));
            }
            out.push((c, a));
        }
        Ok(RankOneSymbol { prime, factors: out })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn factors(&self) -> &[(u64, PAdicRat)] {
        &self.factors
    }

    /// Exponent at infinity, `-sum alpha_i`.
    pub fn exponent_at_infinity(&self) -> PAdicRat {
        self.factors
            .iter()
            .fold(PAdicRat::zero(self.prime), |acc, (_, a)| acc.sub(a))
    }
}

/// Rank one module of a symbol, with `A_n` the full Leibniz convolution
/// `sum_{n_1+...+n_r=n} prod_i C(alpha_i, n_i) (z - c_i)^(-n_i)`.
pub fn from_symbol(s: &RankOneSymbol, order_bound: usize) -> Result<StratModule> {
    if order_bound == 0 {
        return Err(Error::EmptyOrderBound);
    }
    let p = s.prime;
    let mut acc: Vec<FpRatFn> = (0..=order_bound)
        .map(|n| if n == 0 { FpRatFn::one(p) } else { FpRatFn::zero(p) })
        .collect();
    for (c, alpha) in &s.factors {
        let g: Vec<FpRatFn> = (0..=order_bound)
            .map(|b| FpRatFn::power_at(p, binom_mod_p(alpha, b as u64), *c, -(b as i64)))
            .collect();
        acc = (0..=order_bound)
            .map(|n| {
                let mut sum = FpRatFn::zero(p);
                for a in 0..=n {
                    if acc[a].is_zero() || g[n - a].is_zero() {
                        continue;
                    }
                    sum = &sum + &(&acc[a] * &g[n - a]);
                }
                sum
            })
            .collect();
    }
    acc.remove(0);
    let mut sing: BTreeSet<Point> = s.factors.iter().map(|(c, _)| Point::Finite(*c)).collect();
    if !s.exponent_at_infinity().is_zero() {
        sing.insert(Point::Infinity);
    }
    StratModule::rank_one(p, "z", acc, sing)
}

/// `hasse(M, a)` entrywise for `a = 0..=n_max`.
pub fn hasse_matrix_all(m: &Matrix<FpRatFn>, n_max: usize) -> Vec<Matrix<FpRatFn>> {
    let per_entry: Vec<Vec<FpRatFn>> = m.entries().map(|f| hasse_ratfn_all(f, n_max)).collect();
    let cols = m.cols();
    (0..=n_max)
        .map(|a| Matrix::from_fn(m.rows(), cols, |i, j| per_entry[i * cols + j][a].clone()))
        .collect()
}

/// Finite points where some entry has a pole.
pub(crate) fn finite_poles(matrices: &[Matrix<FpRatFn>]) -> Result<BTreeSet<Point>> {
    let mut dens: Vec<FpPoly> = Vec::new();
    let mut out = BTreeSet::new();
    for a in matrices {
        for f in a.entries() {
            if f.den().is_one() || dens.contains(f.den()) {
                continue;
            }
            dens.push(f.den().clone());
            let factors = f.den().split_factors().ok_or_else(|| {
                Error::UnsupportedSingularity(format!("denominator {} does not split over F_{}", f.den(), f.prime()))
            })?;
            out.extend(factors.into_iter().map(|(c, _)| Point::Finite(c)));
        }
    }
    Ok(out)
}

// Coefficients of T^n in sum_m A_m(phi) u(T)^m, for a substitution phi and a
// series u with zero constant term.
fn pullback_matrices(
    m: &StratModule,
    subst: impl Fn(&FpRatFn) -> FpRatFn,
    mut step: impl FnMut(&[FpPoly], &mut Vec<FpPoly>),
) -> Result<Vec<Matrix<FpRatFn>>> {
    let p = m.prime;
    let big_n = m.order_bound();
    let d = m.rank;
    let mut out_entries: Vec<Vec<FpRatFn>> = Vec::with_capacity(d * d);
    for idx in 0..d * d {
        let (i, j) = (idx / d, idx % d);
        let fs: Vec<FpRatFn> = m.matrices.iter().map(|a| subst(a.get(i, j))).collect();
        // common denominator over all orders
        let mut den = FpPoly::one(p);
        for f in &fs {
            if f.is_zero() {
                continue;
            }
            let g = den.gcd(f.den());
            den = &den * &f.den().exact_div(&g);
        }
        let nums: Vec<FpPoly> = fs
            .iter()
            .map(|f| if f.is_zero() { FpPoly::zero(p) } else { f.num() * &den.exact_div(f.den()) })
            .collect();
        let mut acc = vec![FpPoly::zero(p); big_n + 1];
        let mut upow: Vec<FpPoly> = vec![FpPoly::one(p)];
        for mm in 1..=big_n {
            let mut next = Vec::new();
            step(&upow, &mut next);
            upow = next;
            if nums[mm - 1].is_zero() {
                continue;
            }
            for (n, c) in upow.iter().enumerate().skip(mm) {
                if !c.is_zero() {
                    acc[n] = &acc[n] + &(&nums[mm - 1] * c);
                }
            }
        }
        out_entries.push(
            acc.into_iter()
                .skip(1)
                .map(|num| FpRatFn::new(num, den.clone()))
                .collect::<Result<_>>()?,
        );
    }
    Ok((0..big_n)
        .map(|n| Matrix::from_fn(d, d, |i, j| out_entries[i * d + j][n].clone()))
        .collect())
}

// next = a * u truncated at T-degree n_max, for T-series with poly coefficients
fn series_mul(a: &[FpPoly], u: &[FpPoly], next: &mut Vec<FpPoly>, n_max: usize) {
    let p = a[0].prime();
    next.clear();
    next.resize((a.len() + u.len() - 1).min(n_max + 1), FpPoly::zero(p));
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in u.iter().enumerate() {
            if i + j > n_max || y.is_zero() {
                continue;
            }
            next[i + j] = &next[i + j] + &(x * y);
        }
    }
}
