use proptest::prelude::*;

use stratus::ffalg::{hasse_poly, hasse_ratfn, hasse_ratfn_all, hasse_series, FpPoly, FpRatFn, FpSeries, Prime};
use stratus::hypergeom::{
    check_iterative_q, coefficient_valuations, correction_bound, digit_criterion, divided_matrices,
    expected_exponents, floor_inequality_check, hg_exponents, reduce_mod_p, CriterionDecision, HGParams,
};
use stratus::matrix::Matrix;
use stratus::padic::{binom_mod_p, PAdicRat};
use stratus::projsys::{compile, compile_oracle, group_of_diagonal, RankOneProjSys};
use stratus::stratmod::{e_alpha, from_symbol, Point, RankOneSymbol, StratModule};

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn poly(p: Prime, max_deg: usize) -> impl Strategy<Value = FpPoly> {
    prop::collection::vec(0..p.get(), 1..=max_deg + 1).prop_map(move |c| FpPoly::new(p, c))
}

fn ratfn(p: Prime) -> impl Strategy<Value = FpRatFn> {
    (poly(p, 4), poly(p, 3))
        .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
        .prop_map(|(n, d)| FpRatFn::new(n, d).unwrap())
}

fn rational(p: Prime) -> impl Strategy<Value = PAdicRat> {
    (-60i64..=60, 1i64..=30)
        .prop_filter("p-integral", move |(_, d)| d % p.get() as i64 != 0)
        .prop_map(move |(n, d)| PAdicRat::from_ratio(p, n, d).unwrap())
}

fn nonzero_rational(p: Prime) -> impl Strategy<Value = PAdicRat> {
    rational(p).prop_filter("nonzero", |x| !x.is_zero())
}

/// Not a nonpositive integer, so neither series terminates nor has poles.
fn generic_rational(p: Prime) -> impl Strategy<Value = PAdicRat> {
    rational(p).prop_filter("not a nonpositive integer", |x| x.to_i64().map_or(true, |m| m > 0))
}

fn with_prime<T: std::fmt::Debug, S: Strategy<Value = T>>(
    primes: Vec<u64>,
    f: impl Fn(Prime) -> S + Clone + 'static,
) -> impl Strategy<Value = (Prime, T)> {
    prop::sample::select(primes).prop_flat_map(move |p| {
        let p = prime(p);
        (Just(p), f(p))
    })
}

fn triple(p: Prime) -> impl Strategy<Value = HGParams> {
    (rational(p), rational(p), rational(p)).prop_map(|(a, b, c)| HGParams::new(a, b, c).unwrap())
}

fn binom_u(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz_for_rational_functions((p, (f, g)) in with_prime(vec![2, 3, 5, 7], |p| (ratfn(p), ratfn(p)))) {
        let (df, dg) = (hasse_ratfn_all(&f, 12), hasse_ratfn_all(&g, 12));
        let dfg = hasse_ratfn_all(&(&f * &g), 12);
        for n in 0..=12 {
            let mut sum = FpRatFn::zero(p);
            for a in 0..=n {
                sum = &sum + &(&df[a] * &dg[n - a]);
            }
            prop_assert_eq!(&sum, &dfg[n], "n = {}", n);
        }
    }

    #[test]
    fn leibniz_for_polynomials((p, (f, g)) in with_prime(vec![2, 3, 5, 7], |p| (poly(p, 8), poly(p, 8)))) {
        let fg = &f * &g;
        for n in 0..=12 {
            let mut sum = FpRatFn::zero(p);
            for a in 0..=n {
                sum = &sum + &FpRatFn::from_poly(&hasse_poly(&f, a) * &hasse_poly(&g, n - a));
            }
            prop_assert_eq!(sum, FpRatFn::from_poly(hasse_poly(&fg, n)));
        }
    }

    #[test]
    fn leibniz_for_series((p, (f, g)) in with_prime(vec![2, 3, 5, 7], |p| (poly(p, 6), poly(p, 6)))) {
        let s = FpSeries::from_poly(&f, 30).unwrap().shift(-2);
        let t = FpSeries::from_poly(&g, 30).unwrap();
        let st = s.mul(&t).unwrap();
        for n in 0..=12 {
            let mut sum = FpSeries::zero(p, 40, 40);
            for a in 0..=n {
                sum = sum.add(&hasse_series(&s, a).mul(&hasse_series(&t, n - a)).unwrap()).unwrap();
            }
            prop_assert!(sum.agrees_with(&hasse_series(&st, n)), "n = {}", n);
        }
    }

    #[test]
    fn composition_rule((p, f) in with_prime(vec![2, 3, 5, 7], ratfn)) {
        let df = hasse_ratfn_all(&f, 12);
        for m in 0..=12 {
            let dd = hasse_ratfn_all(&df[m], 12 - m);
            for n in 0..=12 - m {
                let c = binom_u(n + m, n) % p.get();
                prop_assert_eq!(&dd[n], &df[n + m].scale(c), "n = {}, m = {}", n, m);
            }
        }
    }

    #[test]
    fn hasse_of_frobenius_power((p, (g, k)) in with_prime(vec![2, 3, 5], |p| (ratfn(p), 1usize..=2))) {
        let q = (p.get() as usize).pow(k as u32);
        let f = g.compose_power(q);
        for n in 1..q {
            prop_assert!(hasse_ratfn(&f, n).is_zero(), "n = {}", n);
        }
        prop_assert_eq!(hasse_ratfn(&f, q), hasse_ratfn(&g, 1).compose_power(q));
    }

    #[test]
    fn series_and_rational_hasse_agree((_p, (f, c, n)) in with_prime(vec![3, 5, 7], |p| (ratfn(p), 0..p.get(), 0usize..=8))) {
        prop_assume!(f.eval(c).is_some());
        let prec = 24;
        let s = FpSeries::expand_ratfn(&f, c, prec).unwrap();
        let direct = FpSeries::expand_ratfn(&hasse_ratfn(&f, n), c, prec).unwrap();
        prop_assert!(hasse_series(&s, n).agrees_with(&direct));
    }

    #[test]
    fn pascal_rule((p, (x, n)) in with_prime(vec![2, 3, 5, 7], |p| (rational(p), 1u64..=200))) {
        let y = x.add_int(-1);
        prop_assert_eq!(binom_mod_p(&x, n), (binom_mod_p(&y, n) + binom_mod_p(&y, n - 1)) % p.get());
    }

    #[test]
    fn digit_profile_round_trip((_p, x) in with_prime(vec![2, 3, 5, 7], rational)) {
        let prof = x.digit_profile();
        let span = 4 * (prof.preperiod.len() + prof.period.len());
        for k in 0..span {
            prop_assert_eq!(prof.digit(k), x.digit(k));
        }
        prop_assert_eq!(prof.to_padic(x.prime()).unwrap(), x);
    }
}

fn exponent_digits(m: &StratModule, pt: Point) -> Vec<Vec<u64>> {
    m.local_exponents(pt).unwrap().exponents.iter().map(|w| w.digits.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn constructors_are_iterative((p, (a, b, e)) in with_prime(vec![3, 5, 7], |p| (rational(p), rational(p), 2u64..=4))) {
        prop_assume!(e % p.get() != 0);
        let n = 2 * p.get() as usize + 3;
        let ea = e_alpha(&a, n).unwrap();
        let eb = e_alpha(&b, n).unwrap();
        let sym = from_symbol(&RankOneSymbol::new(p, vec![(0, a.clone()), (1, b.clone())]).unwrap(), n).unwrap();
        for m in [
            ea.clone(),
            sym.clone(),
            ea.tensor(&eb).unwrap(),
            ea.dual(),
            ea.kummer_pullback(e).unwrap(),
            ea.direct_sum(&eb).unwrap(),
            sym.tensor(&sym.dual()).unwrap(),
        ] {
            prop_assert!(m.check_iterative().is_pass());
        }
    }

    #[test]
    fn functor_coherence((p, (a, b)) in with_prime(vec![3, 5, 7], |p| (rational(p), rational(p)))) {
        let n = (p.get() as usize).pow(2);
        let m = e_alpha(&a, n).unwrap().direct_sum(&e_alpha(&b, n).unwrap()).unwrap();
        prop_assert!(m.dual().dual().same_matrices(&m));
        let one = StratModule::trivial(p, 1, n).unwrap();
        prop_assert!(m.tensor(&one).unwrap().same_matrices(&m));
    }

    #[test]
    fn exponents_add_under_tensor((p, (a, b)) in with_prime(vec![3, 5, 7], |p| (rational(p), rational(p)))) {
        let n = (p.get() as usize).pow(3);
        let (ea, eb) = (e_alpha(&a, n).unwrap(), e_alpha(&b, n).unwrap());
        let ra = ea.local_exponents(Point::Finite(0)).unwrap();
        let rb = eb.local_exponents(Point::Finite(0)).unwrap();
        let sum = ea.tensor(&eb).unwrap().local_exponents(Point::Finite(0)).unwrap();
        prop_assert_eq!(&sum.exponents[0].digits, &ra.exponents[0].add(&rb.exponents[0]).digits);
    }

    #[test]
    fn kummer_multiplies_exponents((p, (a, e)) in with_prime(vec![3, 5, 7], |p| (rational(p), 2u64..=6))) {
        prop_assume!(e % p.get() != 0);
        let n = (p.get() as usize).pow(3);
        let pulled = e_alpha(&a, n).unwrap().kummer_pullback(e).unwrap();
        let rep = pulled.local_exponents(Point::Finite(0)).unwrap();
        prop_assert!(rep.matches(&[a.mul_int(e as i64)]));
    }

    #[test]
    fn integer_shifts_are_isomorphisms((p, (a, k)) in with_prime(vec![3, 5, 7], |p| (rational(p), -6i64..=6))) {
        let n = (p.get() as usize).pow(2);
        let g = Matrix::scalar(FpRatFn::monomial(p, 1, k));
        let shifted = e_alpha(&a, n).unwrap().gauge(&g).unwrap();
        prop_assert!(shifted.same_matrices(&e_alpha(&a.add_int(-k), n).unwrap()));
        prop_assert!(a.differs_by_integer(&a.add_int(-k)));
    }

    #[test]
    fn constant_conjugation_is_invisible(
        (p, (a, b, entries)) in with_prime(vec![3, 5, 7], |p| (rational(p), rational(p), prop::collection::vec(0..p.get(), 4)))
    ) {
        let det = p.sub(p.mul(entries[0], entries[3]), p.mul(entries[1], entries[2]));
        prop_assume!(det != 0);
        let n = (p.get() as usize).pow(2);
        let m = e_alpha(&a, n).unwrap().direct_sum(&e_alpha(&b, n).unwrap()).unwrap();
        let c = |x| FpRatFn::constant(p, x);
        let g = Matrix::from_rows(vec![vec![c(entries[0]), c(entries[1])], vec![c(entries[2]), c(entries[3])]]).unwrap();
        let conj = m.gauge(&g).unwrap();
        prop_assert!(conj.check_iterative().is_pass());
        prop_assert_eq!(exponent_digits(&conj, Point::Finite(0)), exponent_digits(&m, Point::Finite(0)));
    }

    #[test]
    fn floor_inequality_matches_tail((_p, h) in with_prime(vec![2, 3, 5, 7], |p| {
        (nonzero_rational(p), nonzero_rational(p), rational(p)).prop_map(|(a, b, c)| HGParams::new(a, b, c).unwrap())
    })) {
        let crit = digit_criterion(&h);
        let floor = (crit.tail_start..crit.tail_start + crit.period).all(|k| floor_inequality_check(&h, k));
        prop_assert_eq!(floor, crit.holds());
    }

    #[test]
    fn divided_matrices_are_iterative_over_q((_p, h) in with_prime(vec![2, 3, 5, 7], triple)) {
        prop_assert_eq!(check_iterative_q(&divided_matrices(&h, 10)), None);
    }

    #[test]
    fn reductions_are_iterative((p, h) in with_prime(vec![3, 5, 7], triple)) {
        if let Ok(m) = reduce_mod_p(p, &divided_matrices(&h, (p.get() as usize).pow(2))) {
            prop_assert!(m.check_iterative().is_pass());
        }
    }

    #[test]
    fn compile_matches_oracle_at_five((bits, n) in (prop::collection::vec(0u64..=1, 0..=10), 1usize..=125)) {
        let sys = RankOneProjSys::finite(prime(5), &bits).unwrap();
        prop_assert!(compile(&sys, n).unwrap().same_matrices(&compile_oracle(&sys, n).unwrap()));
    }

    #[test]
    fn compiled_exponent_round_trip(
        (p, (pre, per, gap)) in with_prime(vec![2, 3, 5], |_| (
            prop::collection::vec(0u64..=1, 0..=4),
            prop::collection::vec(0u64..=1, 1..=3),
            0usize..=3,
        ))
    ) {
        let profile = stratus::padic::DigitProfile::new(pre, per).unwrap();
        let sys = RankOneProjSys::new(p, profile).unwrap();
        let n = (p.get() as usize).pow(4);
        let rep = compile(&sys, n).unwrap().local_exponents(Point::Finite(0)).unwrap();
        prop_assert!(rep.matches(&[sys.alpha().neg()]));
        let gapped = sys.with_gap(gap);
        let shift = (p.get() as i64).pow(gap as u32);
        prop_assert_eq!(gapped.alpha(), sys.alpha().mul_int(shift));
        let rep = compile(&gapped, n).unwrap().local_exponents(Point::Finite(0)).unwrap();
        prop_assert!(rep.matches(&[sys.alpha().neg().mul_int(shift)]));
    }

    #[test]
    fn group_is_invariant_under_shifts_and_order(
        (_p, (xs, shifts, rot)) in with_prime(vec![2, 3, 5, 7], |p| (
            prop::collection::vec(rational(p), 1..=4),
            prop::collection::vec(-5i64..=5, 4),
            0usize..4,
        ))
    ) {
        let g = group_of_diagonal(&xs);
        let mut moved: Vec<PAdicRat> = xs.iter().zip(&shifts).map(|(x, &k)| x.add_int(k)).collect();
        moved.rotate_left(rot % xs.len());
        moved.reverse();
        prop_assert_eq!(group_of_diagonal(&moved), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exponents_survive_reduction((p, h) in with_prime(vec![3, 5, 7], triple)) {
        prop_assume!(digit_criterion(&h).holds());
        let n = (p.get() as usize).pow(2);
        let Ok(m) = reduce_mod_p(p, &divided_matrices(&h, n)) else {
            return Ok(());
        };
        for pt in [Point::Finite(0), Point::Finite(1), Point::Infinity] {
            let rep = hg_exponents(&m, pt).unwrap();
            prop_assert!(rep.matches(&expected_exponents(&h, pt)), "at {}", pt);
        }
    }

    #[test]
    fn criterion_bounds_denominators((p, h) in with_prime(vec![2, 3, 5], |p| {
        (generic_rational(p), generic_rational(p), generic_rational(p)).prop_map(|(a, b, c)| HGParams::new(a, b, c).unwrap())
    })) {
        let crit = digit_criterion(&h);
        prop_assume!(crit.holds());
        let b = correction_bound(&h);
        let table = coefficient_valuations(&h, p.get().pow(6));
        if let Some((n, v)) = table.min_first() {
            prop_assert!(v >= -b, "v(c_{}) = {} below -{}", n, v, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn failing_criterion_shows_denominators((p, h) in with_prime(vec![2, 3], |p| {
        (generic_rational(p), generic_rational(p), generic_rational(p)).prop_map(|(a, b, c)| HGParams::new(a, b, c).unwrap())
    })) {
        let CriterionDecision::Fails { witness } = digit_criterion(&h).decision else {
            return Ok(());
        };
        // a failing level k is visible among n <= p^(k+1)
        prop_assume!((1..=7).any(|k| witness.contains(k)));
        let table = coefficient_valuations(&h, p.get().pow(8));
        let least = [table.min_first(), table.min_second()]
            .into_iter()
            .flatten()
            .map(|(_, v)| v)
            .min()
            .unwrap_or(0);
        prop_assert!(least < 0, "no denominator for n <= p^8, witness {:?}", witness);
    }
}

#[test]
fn criterion_examples_from_both_sides() {
    let p = prime(5);
    let bad = HGParams::parse(p, "-1/2", "-1/2", "1/2").unwrap();
    assert!(matches!(digit_criterion(&bad).decision, CriterionDecision::Fails { .. }));
    let good = HGParams::parse(p, "1/3", "2/3", "1/2").unwrap();
    assert_eq!(digit_criterion(&good).decision, CriterionDecision::Holds { k0: 1 });
}
