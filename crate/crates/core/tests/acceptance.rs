//! Quantitative acceptance suite. Runs every criterion, prints one PASS/FAIL
//! line each, and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stratus::ffalg::{hasse_ratfn_all, FpPoly, FpRatFn, Prime};
use stratus::hypergeom::{
    coefficient_valuations, digit_criterion, divided_matrices, floor_inequality_check,
    hg_exponents, reduce_mod_p, CriterionDecision, HGParams,
};
use stratus::padic::{binom_mod_p, pochhammer_val, pochhammer_val_oracle, PAdicRat};
use stratus::projsys::{compile, compile_oracle, group_of_diagonal, RankOneProjSys};
use stratus::stratmod::{e_alpha, from_symbol, Point, RankOneSymbol, StratModule};
use stratus::Error;

type Outcome = Result<String, String>;

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_poly(r: &mut ChaCha8Rng, p: Prime, max_deg: usize) -> FpPoly {
    let deg = r.gen_range(0..=max_deg);
    FpPoly::new(p, (0..=deg).map(|_| r.gen_range(0..p.get())).collect())
}

fn random_ratfn(r: &mut ChaCha8Rng, p: Prime) -> FpRatFn {
    let num = random_poly(r, p, 4);
    let mut den = random_poly(r, p, 3);
    while den.is_zero() {
        den = random_poly(r, p, 3);
    }
    FpRatFn::new(num, den).unwrap()
}

/// Random rational with denominator prime to `p`, optionally nonzero.
fn random_rational(r: &mut ChaCha8Rng, p: Prime, nonzero: bool) -> PAdicRat {
    loop {
        let den: i64 = r.gen_range(1..=24);
        if den % p.get() as i64 == 0 {
            continue;
        }
        let num: i64 = r.gen_range(-40..=40);
        if nonzero && num == 0 {
            continue;
        }
        return PAdicRat::from_ratio(p, num, den).unwrap();
    }
}

fn binom_u(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn hasse_axioms() -> Outcome {
    let mut checked = 0usize;
    for (seed, p) in [2u64, 3, 5, 7].into_iter().enumerate() {
        let p = prime(p);
        let mut r = rng(100 + seed as u64);
        let fs: Vec<FpRatFn> = (0..500).map(|_| random_ratfn(&mut r, p)).collect();
        let ders: Vec<Vec<FpRatFn>> = fs.iter().map(|f| hasse_ratfn_all(f, 12)).collect();
        for i in 0..fs.len() {
            let (f, g) = (&fs[i], &fs[(i + 1) % fs.len()]);
            let (df, dg) = (&ders[i], &ders[(i + 1) % fs.len()]);
            let dfg = hasse_ratfn_all(&(f * g), 12);
            for n in 0..=12 {
                let mut sum = FpRatFn::zero(p);
                for a in 0..=n {
                    sum = &sum + &(&df[a] * &dg[n - a]);
                }
                if sum != dfg[n] {
                    return Err(format!("Leibniz fails at p={p}, n={n}, f={f}, g={g}"));
                }
            }
            for m in 0..=12 {
                let dd = hasse_ratfn_all(&df[m], 12 - m);
                for n in 0..=12 - m {
                    let c = (binom_u((n + m) as u64, n as u64) % p.get()) as u64;
                    if dd[n] != df[n + m].scale(c) {
                        return Err(format!("composition fails at p={p}, n={n}, m={m}, f={f}"));
                    }
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} functions over p in {{2,3,5,7}}, n+m <= 12"))
}

fn lucas_oracle() -> Outcome {
    let primes = [2u64, 3, 5];
    let mut count = 0usize;
    for x in -200i64..=200 {
        let mut c = BigInt::one();
        for n in 0u64..=500 {
            if n > 0 {
                c = c * BigInt::from(x - n as i64 + 1) / BigInt::from(n);
            }
            for &p in &primes {
                let want = c.mod_floor(&BigInt::from(p)).to_u64().unwrap();
                let got = binom_mod_p(&PAdicRat::from_int(prime(p), x), n);
                if got != want {
                    return Err(format!("C({x},{n}) mod {p}: got {got}, want {want}"));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} (alpha, n, p) triples"))
}

fn pochhammer_formulas() -> Outcome {
    for (seed, p) in [2u64, 3, 5, 7].into_iter().enumerate() {
        let p = prime(p);
        let mut r = rng(300 + seed as u64);
        for _ in 0..1000 {
            let x = random_rational(&mut r, p, false);
            let n = r.gen_range(0..=10_000u64);
            let (a, b) = (pochhammer_val(&x, n), pochhammer_val_oracle(&x, n));
            if a != b {
                return Err(format!("p={p}, x={x}, n={n}: formula {a:?}, oracle {b:?}"));
            }
        }
    }
    Ok("1000 pairs per prime in {2,3,5,7}, n <= 10^4".into())
}

fn positive_case() -> Outcome {
    let p = prime(3);
    let h = HGParams::parse(p, "1/2", "1/2", "1").unwrap();
    let crit = digit_criterion(&h);
    if crit.decision != (CriterionDecision::Holds { k0: 1 }) {
        return Err(format!("criterion: {:?}", crit.decision));
    }
    let table = coefficient_valuations(&h, 729);
    if let Some((n, v)) = table.min_first().filter(|&(_, v)| v < 0) {
        return Err(format!("v_3(c_{n}) = {v}"));
    }
    let order = 27;
    let m = match reduce_mod_p(p, &divided_matrices(&h, order)) {
        Ok(m) => m,
        Err(e) => {
            return Err(format!(
                "criterion holds with k0=1 and v_3(c_n) >= 0 for n <= 729, but reduce_mod_p fails: {e}"
            ))
        }
    };
    if !m.check_iterative().is_pass() {
        return Err("reduced module is not iterative".into());
    }
    let half = PAdicRat::from_ratio(p, 1, 2).unwrap();
    let at0 = hg_exponents(&m, Point::Finite(0)).map_err(|e| e.to_string())?;
    let inf = hg_exponents(&m, Point::Infinity).map_err(|e| e.to_string())?;
    if at0.certified_digits < 3 || !at0.matches(&[PAdicRat::zero(p), PAdicRat::zero(p)]) {
        return Err(format!("exponents at 0: {:?}", at0.exponents));
    }
    if !inf.matches(&[half.clone(), half]) {
        return Err(format!("exponents at inf: {:?}", inf.exponents));
    }
    Ok("criterion, valuations, reduction, iterativity and exponents".into())
}

fn negative_case() -> Outcome {
    let p = prime(5);
    let h = HGParams::parse(p, "-1/2", "-1/2", "1/2").unwrap();
    match digit_criterion(&h).decision {
        CriterionDecision::Fails { witness } if witness.start == 1 && witness.is_total() => {}
        other => return Err(format!("criterion: {other:?}")),
    }
    let table = coefficient_valuations(&h, 625);
    let (n, v) = table.min_first().ok_or("empty valuation table")?;
    if v > -1 {
        return Err(format!("min valuation {v} for n <= 625"));
    }
    match reduce_mod_p(p, &divided_matrices(&h, 25)) {
        Err(Error::NonIntegralCoefficient { n: wn, valuation, .. }) => Ok(format!(
            "fails for every k >= 1; v_5(c_{n}) = {v}; reduction witness A_{wn} with valuation {valuation}"
        )),
        Err(e) => Err(format!("unexpected reduction error: {e}")),
        Ok(_) => Err("reduction succeeded".into()),
    }
}

fn criterion_vs_floor() -> Outcome {
    let mut holds = 0usize;
    let mut total = 0usize;
    for (seed, p) in [2u64, 3, 5, 7].into_iter().enumerate() {
        let p = prime(p);
        let mut r = rng(600 + seed as u64);
        for _ in 0..200 {
            let h = HGParams::new(
                random_rational(&mut r, p, true),
                random_rational(&mut r, p, true),
                random_rational(&mut r, p, false),
            )
            .unwrap();
            let crit = digit_criterion(&h);
            let floor = (crit.tail_start..crit.tail_start + crit.period).all(|k| floor_inequality_check(&h, k));
            if floor != crit.holds() {
                return Err(format!(
                    "p={p}, ({}, {}, {}): criterion {}, floor {floor}",
                    h.alpha,
                    h.beta,
                    h.gamma,
                    crit.holds()
                ));
            }
            holds += usize::from(floor);
            total += 1;
        }
    }
    Ok(format!("{total} triples agree ({holds} hold)"))
}

fn functor_identities() -> Outcome {
    let mut count = 0usize;
    for (seed, p) in [3u64, 5].into_iter().enumerate() {
        let p = prime(p);
        let n = (p.get() as usize).pow(3);
        let mut r = rng(700 + seed as u64);
        let es: Vec<u64> = [2u64, 3, 4].into_iter().filter(|e| e % p.get() != 0).collect();
        for _ in 0..100 {
            let a = random_rational(&mut r, p, false);
            let b = random_rational(&mut r, p, false);
            let e = es[r.gen_range(0..es.len())];
            let ea = e_alpha(&a, n).unwrap();
            let eb = e_alpha(&b, n).unwrap();
            if !ea.tensor(&eb).unwrap().same_matrices(&e_alpha(&a.add(&b), n).unwrap()) {
                return Err(format!("tensor E({a}) E({b}) at p={p}"));
            }
            if !ea.dual().same_matrices(&e_alpha(&a.neg(), n).unwrap()) {
                return Err(format!("dual E({a}) at p={p}"));
            }
            if !ea
                .kummer_pullback(e)
                .unwrap()
                .same_matrices(&e_alpha(&a.mul_int(e as i64), n).unwrap())
            {
                return Err(format!("pullback of E({a}) by {e} at p={p}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} random (alpha, beta, e), order bound p^3, p in {{3,5}}"))
}

fn symbol_exponents() -> Outcome {
    let mut count = 0usize;
    for (seed, p) in [3u64, 5].into_iter().enumerate() {
        let p = prime(p);
        let n = (p.get() as usize).pow(3);
        let mut r = rng(800 + seed as u64);
        for _ in 0..100 {
            let a0 = random_rational(&mut r, p, false);
            let a1 = random_rational(&mut r, p, false);
            let sym = RankOneSymbol::new(p, vec![(0, a0.clone()), (1, a1.clone())]).unwrap();
            let m = from_symbol(&sym, n).unwrap();
            for (pt, want) in [
                (Point::Finite(0), a0.clone()),
                (Point::Finite(1), a1.clone()),
                (Point::Infinity, sym.exponent_at_infinity()),
            ] {
                let rep = m.local_exponents(pt).map_err(|e| format!("{pt}: {e}"))?;
                if rep.certified_digits < 3 || !rep.matches(&[want.clone()]) {
                    return Err(format!("p={p}, ({a0}, {a1}) at {pt}: got {:?}, want {want}", rep.exponents));
                }
            }
            count += 1;
        }
    }
    Ok(format!("{count} random pairs at 0, 1, inf with 3 certified digits"))
}

fn projective_systems() -> Outcome {
    let mut count = 0usize;
    for p in [2u64, 3] {
        let p = prime(p);
        let n = (p.get() as usize).pow(3);
        for len in 0..=10usize {
            for mask in 0u32..(1 << len) {
                let bits: Vec<u64> = (0..len).map(|k| u64::from(mask >> k & 1)).collect();
                let sys = RankOneProjSys::finite(p, &bits).unwrap();
                if !compile(&sys, n).unwrap().same_matrices(&compile_oracle(&sys, n).unwrap()) {
                    return Err(format!("compile and oracle differ on {sys}"));
                }
                count += 1;
            }
        }
    }
    let p = prime(2);
    let sys = RankOneProjSys::parse(p, "[](10)").unwrap();
    let m = compile(&sys, 64).unwrap();
    let rep = m.local_exponents(Point::Finite(0)).map_err(|e| e.to_string())?;
    let third = PAdicRat::from_ratio(p, 1, 3).unwrap();
    if !rep.matches(&[third.clone()]) && !rep.matches(&[third.neg()]) {
        return Err(format!("exponent of (10): {:?}", rep.exponents));
    }
    let cands: Vec<PAdicRat> = rep.candidates(4).into_iter().flatten().collect();
    let g = group_of_diagonal(&cands);
    if cands.len() != 1 || g.name() != "mu_3" {
        return Err(format!("group of (10): {}", g.name()));
    }
    Ok(format!("{count} bit vectors agree; (10) has exponent 1/3 and group mu_3"))
}

fn perturb(r: &mut ChaCha8Rng, m: &StratModule) -> StratModule {
    let p = m.prime();
    let n = r.gen_range(1..=m.order_bound());
    let i = r.gen_range(0..m.rank());
    let j = r.gen_range(0..m.rank());
    // c (z - a)^k with k of either sign keeps every pole in F_p
    let c = r.gen_range(1..p.get());
    let a = r.gen_range(0..p.get());
    let k = r.gen_range(-3i64..=3);
    let delta = FpRatFn::power_at(p, c, a, k);
    let old = m.matrix(n).unwrap().get(i, j).clone();
    m.with_entry(n, i, j, &old + &delta).unwrap()
}

fn mutation_sensitivity() -> Outcome {
    let p3 = prime(3);
    let p5 = prime(5);
    let q = |p, a, b| PAdicRat::from_ratio(p, a, b).unwrap();
    let hg = HGParams::parse(p5, "1/3", "2/3", "1/2").unwrap();
    let bases = vec![
        e_alpha(&q(p3, 1, 2), 10).unwrap(),
        from_symbol(&RankOneSymbol::new(p5, vec![(0, q(p5, 1, 3)), (2, q(p5, -3, 4))]).unwrap(), 20).unwrap(),
        e_alpha(&q(p3, 2, 7), 10)
            .unwrap()
            .direct_sum(&e_alpha(&q(p3, -1, 4), 10).unwrap())
            .unwrap(),
        reduce_mod_p(p5, &divided_matrices(&hg, 20)).unwrap(),
    ];
    for b in &bases {
        if !b.check_iterative().is_pass() {
            return Err("unperturbed module fails".into());
        }
    }
    let mut r = rng(1000);
    let mut detected = 0;
    for k in 0..100 {
        let m = perturb(&mut r, &bases[k % bases.len()]);
        if !m.check_iterative().is_pass() {
            detected += 1;
        }
    }
    if detected >= 95 {
        Ok(format!("{detected}/100 perturbations detected"))
    } else {
        Err(format!("only {detected}/100 perturbations detected"))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("Hasse axioms", hasse_axioms, 60),
        ("Lucas oracle", lucas_oracle, 30),
        ("Pochhammer formulas", pochhammer_formulas, 0),
        ("hypergeometric positive case (3; 1/2, 1/2, 1)", positive_case, 120),
        ("hypergeometric negative case (5; -1/2, -1/2, 1/2)", negative_case, 0),
        ("criterion vs floor inequality", criterion_vs_floor, 0),
        ("functor identities", functor_identities, 0),
        ("symbol exponents", symbol_exponents, 0),
        ("projective systems", projective_systems, 0),
        ("mutation sensitivity", mutation_sensitivity, 0),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        if budget > 0 && elapsed > Duration::from_secs(budget) {
            outcome = outcome.and_then(|msg| Err(format!("{msg}, but took {elapsed:.1?} (budget {budget} s)")));
        }
        match outcome {
            Ok(msg) => println!("PASS criterion {}: {name}: {msg} [{elapsed:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {msg} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

