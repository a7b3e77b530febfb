use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::{json, Map, Value};
use stratus::ffalg::Prime;
use stratus::hypergeom::{
    coefficient_valuations, coefficient_valuations_oracle, correction_bound, digit_criterion, divided_matrices,
    expected_exponents, hg_exponents, reduce_mod_p, reduced_solution_check, HGParams,
};
use stratus::padic::{binom_mod_p, PAdicRat, DEFAULT_PRECISION};
use stratus::projsys::{compile, group_of_diagonal, group_of_windows, RankOneProjSys};
use stratus::stratmod::{e_alpha, from_symbol, IterativityReport, Point, RankOneSymbol, StratModule};
use stratus::Error;

use crate::report::{assemble, digest, CmdError, CmdResult, Outcome};

pub const ORDER_ENV: &str = "STRATUS_DEFAULT_ORDER";

pub const COMMANDS: &[&str] = &[
    "lucas",
    "digits",
    "hg",
    "module e-alpha",
    "module symbol",
    "module tensor",
    "module dual",
    "module pullback",
    "module exponents",
    "module check",
    "projsys",
];

/// Runs one command on its JSON payload.
pub fn run(command: &str, input: &Value) -> Outcome {
    let result = catch_unwind(AssertUnwindSafe(|| dispatch(command, input)))
        .unwrap_or_else(|_| Err(CmdError::internal(format!("`{command}` panicked"))));
    assemble(command, input, result)
}

fn dispatch(command: &str, input: &Value) -> CmdResult {
    if !input.is_object() {
        return Err(CmdError::input("payload must be a JSON object"));
    }
    match command {
        "lucas" => lucas(input),
        "digits" => digits(input),
        "hg" => hg(input),
        "module e-alpha" => module_e_alpha(input),
        "module symbol" => module_symbol(input),
        "module tensor" => module_tensor(input),
        "module dual" => module_dual(input),
        "module pullback" => module_pullback(input),
        "module exponents" => module_exponents(input),
        "module check" => module_check(input),
        "projsys" => projsys(input),
        other => Err(CmdError::input(format!("unknown command `{other}`; expected one of: {}", COMMANDS.join(", ")))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CmdError> {
    v.get(key)
        .filter(|x| !x.is_null())
        .ok_or_else(|| CmdError::input(format!("missing field `{key}`")))
}

fn get_u64(v: &Value, key: &str) -> Result<u64, CmdError> {
    field(v, key)?
        .as_u64()
        .ok_or_else(|| CmdError::input(format!("`{key}` must be a nonnegative integer")))
}

fn opt_u64(v: &Value, key: &str) -> Result<Option<u64>, CmdError> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => get_u64(v, key).map(Some),
    }
}

fn get_str<'a>(v: &'a Value, key: &str) -> Result<&'a str, CmdError> {
    field(v, key)?
        .as_str()
        .ok_or_else(|| CmdError::input(format!("`{key}` must be a string")))
}

fn get_prime(v: &Value) -> Result<Prime, CmdError> {
    Ok(Prime::new(get_u64(v, "p")?)?)
}

fn get_rat(v: &Value, prime: Prime, key: &str) -> Result<PAdicRat, CmdError> {
    let x = field(v, key)?;
    let s = match x {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() => n.to_string(),
        _ => return Err(CmdError::input(format!("`{key}` must be a rational string like \"1/2\""))),
    };
    Ok(PAdicRat::parse_in(prime, &s)?)
}

/// `$STRATUS_DEFAULT_ORDER` when set, else `p^2`.
pub fn default_order(p: Prime) -> Result<usize, CmdError> {
    match std::env::var(ORDER_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CmdError::input(format!("{ORDER_ENV} must be a positive integer, got `{s}`"))),
        Err(_) => Ok((p.get() * p.get()) as usize),
    }
}

fn get_order(v: &Value, p: Prime) -> Result<usize, CmdError> {
    match opt_u64(v, "order")? {
        Some(0) => Err(Error::EmptyOrderBound.into()),
        Some(n) => Ok(n as usize),
        None => default_order(p),
    }
}

fn lucas(v: &Value) -> CmdResult {
    let p = get_prime(v)?;
    let alpha = get_rat(v, p, "alpha")?;
    let n = get_u64(v, "n")?;
    Ok(json!({"residue": binom_mod_p(&alpha, n)}))
}

fn digits(v: &Value) -> CmdResult {
    let p = get_prime(v)?;
    let alpha = get_rat(v, p, "alpha")?;
    let k = opt_u64(v, "k")?.map_or(DEFAULT_PRECISION, |k| k as usize);
    Ok(json!({
        "digits": alpha.digits(k),
        "truncation": alpha.truncation(k).to_string(),
        "profile": alpha.digit_profile().to_string(),
    }))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Stage {
    Criterion,
    Valuations,
    Reduce,
    Verify,
}

fn hg(v: &Value) -> CmdResult {
    let p = get_prime(v)?;
    let h = HGParams::new(get_rat(v, p, "alpha")?, get_rat(v, p, "beta")?, get_rat(v, p, "gamma")?)?;
    let stage = match v.get("stage").and_then(Value::as_str).unwrap_or("verify") {
        "criterion" => Stage::Criterion,
        "valuations" => Stage::Valuations,
        "reduce" => Stage::Reduce,
        "verify" => Stage::Verify,
        other => return Err(CmdError::input(format!("unknown stage `{other}`"))),
    };
    let order = get_order(v, p)?;
    let precision = opt_u64(v, "precision")?.map_or((p.get().pow(3)) as usize, |k| k as usize);
    let n_max = opt_u64(v, "n_max")?.unwrap_or(p.get().pow(4));

    let mut out = Map::new();
    let crit = digit_criterion(&h);
    let mut crit_json = crit.to_json();
    if crit.holds() {
        crit_json["correction_bound"] = json!(correction_bound(&h));
    }
    out.insert("criterion".into(), crit_json);
    let mut failure: Option<CmdError> = None;
    if !crit.holds() {
        failure = Some(CmdError::negative(
            "criterion-fails",
            "max(alpha_k, beta_k) >= gamma_k fails for infinitely many k",
            out["criterion"]["witness"].clone(),
        ));
    }

    if stage >= Stage::Valuations {
        let table = coefficient_valuations(&h, n_max);
        if table != coefficient_valuations_oracle(&h, n_max) {
            return Err(CmdError::internal("digit-formula valuations disagree with the direct sum"));
        }
        out.insert(
            "valuations".into(),
            json!(table.first.iter().enumerate().map(|(n, x)| json!([n, x.to_json()])).collect::<Vec<_>>()),
        );
        out.insert(
            "valuations_second".into(),
            json!(table.second.iter().enumerate().map(|(n, x)| json!([n, x.to_json()])).collect::<Vec<_>>()),
        );
        out.insert(
            "min_valuation".into(),
            match table.min_first() {
                Some((n, val)) => json!({"n": n, "v": val}),
                None => Value::Null,
            },
        );
    }

    if stage >= Stage::Reduce {
        match reduce_mod_p(p, &divided_matrices(&h, order)) {
            Ok(m) => {
                if let IterativityReport::Fail { n, m: mm, .. } = m.check_iterative() {
                    return Err(CmdError::internal(format!(
                        "reduced module fails iterativity at (n, m) = ({n}, {mm})"
                    )));
                }
                let mj = m.to_json();
                out.insert(
                    "reduction".into(),
                    json!({"ok": true, "order": order, "module_ref": digest(&mj), "module": mj}),
                );
                if stage >= Stage::Verify {
                    let mut exps = Map::new();
                    let mut all_match = true;
                    for pt in [Point::Finite(0), Point::Finite(1), Point::Infinity] {
                        let expected: Vec<String> =
                            expected_exponents(&h, pt).iter().map(PAdicRat::to_ratio_string).collect();
                        let entry = match hg_exponents(&m, pt) {
                            Ok(rep) => {
                                let ok = rep.matches(&expected_exponents(&h, pt));
                                all_match &= ok;
                                let mut j = rep.to_json();
                                j["expected"] = json!(expected);
                                j["match"] = json!(ok);
                                j
                            }
                            Err(e) => {
                                all_match = false;
                                json!({"error": e.to_string(), "expected": expected})
                            }
                        };
                        exps.insert(pt.to_string(), entry);
                    }
                    out.insert("exponents".into(), Value::Object(exps));
                    let sol = reduced_solution_check(&h, &m, precision)?;
                    out.insert("solutions".into(), sol.to_json());
                    if failure.is_none() && !(all_match && sol.is_pass()) {
                        failure = Some(CmdError::negative(
                            "verification-failed",
                            "reduced solutions or exponents do not match",
                            out["solutions"].clone(),
                        ));
                    }
                }
            }
            Err(e @ Error::NonIntegralCoefficient { .. }) => {
                let err = CmdError::from(e);
                out.insert(
                    "reduction".into(),
                    json!({"ok": false, "order": order, "witness": err.details.clone()}),
                );
                if failure.is_none() {
                    failure = Some(err);
                }
            }
            Err(e) => return Err(e.into()),
        }
        if !crit.holds() && out["reduction"]["ok"] == json!(true) {
            out.insert("necessity_candidate".into(), json!(true));
        }
    }

    let out = Value::Object(out);
    match failure {
        Some(f) => Err(f.with_partial(out)),
        None => Ok(out),
    }
}

fn module_arg(v: &Value, key: &str) -> Result<StratModule, CmdError> {
    let raw = field(v, key)?;
    // a full report from an earlier run is accepted as well
    let m = raw.pointer("/result/module").unwrap_or(raw);
    Ok(StratModule::from_json(m)?)
}

/// Exponents at 0 with rational candidates and the group they generate,
/// when the module is regular singular there.
fn summary(m: &StratModule) -> Value {
    let Ok(rep) = m.local_exponents(Point::Finite(0)) else {
        return Value::Null;
    };
    let max_period = (rep.certified_digits / 2).max(1);
    let candidates = rep.candidates(max_period);
    let group = if candidates.iter().all(Option::is_some) {
        let exps: Vec<PAdicRat> = candidates.into_iter().flatten().collect();
        let mut g = group_of_diagonal(&exps).to_json();
        g["precision_note"] = json!(format!(
            "from rational candidates fitted to {} certified digits",
            rep.certified_digits
        ));
        g
    } else {
        group_of_windows(&rep.exponents, max_period).to_json()
    };
    json!({"exponents_at_0": rep.to_json(), "group": group})
}

fn module_result(m: &StratModule) -> Value {
    json!({"module": m.to_json(), "summary": summary(m)})
}

fn module_e_alpha(v: &Value) -> CmdResult {
    let p = get_prime(v)?;
    let alpha = get_rat(v, p, "alpha")?;
    Ok(module_result(&e_alpha(&alpha, get_order(v, p)?)?))
}

fn module_symbol(v: &Value) -> CmdResult {
    let p = get_prime(v)?;
    let factors = field(v, "factors")?
        .as_array()
        .ok_or_else(|| CmdError::input("`factors` must be an array of \"point:exponent\" strings"))?;
    let mut parsed = Vec::with_capacity(factors.len());
    for f in factors {
        let s = f
            .as_str()
            .ok_or_else(|| CmdError::input("factors must be strings like \"0:1/2\""))?;
        let (c, a) = s
            .split_once(':')
            .ok_or_else(|| CmdError::input(format!("factor `{s}` is not of the form point:exponent")))?;
        let c: u64 = c
            .trim()
            .parse()
            .map_err(|_| CmdError::input(format!("factor point `{c}` is not a nonnegative integer")))?;
        parsed.push((c, PAdicRat::parse_in(p, a.trim())?));
    }
    let sym = RankOneSymbol::new(p, parsed)?;
    Ok(module_result(&from_symbol(&sym, get_order(v, p)?)?))
}

fn module_tensor(v: &Value) -> CmdResult {
    let a = module_arg(v, "module")?;
    let b = module_arg(v, "other")?;
    Ok(module_result(&a.tensor(&b)?))
}

fn module_dual(v: &Value) -> CmdResult {
    Ok(module_result(&module_arg(v, "module")?.dual()))
}

fn module_pullback(v: &Value) -> CmdResult {
    let m = module_arg(v, "module")?;
    let e = get_u64(v, "e")?;
    Ok(module_result(&m.kummer_pullback(e)?))
}

fn module_exponents(v: &Value) -> CmdResult {
    let m = module_arg(v, "module")?;
    let pt = Point::parse(m.prime(), v.get("point").and_then(Value::as_str).unwrap_or("0"))?;
    let rep = m.local_exponents(pt)?;
    let max_period = (rep.certified_digits / 2).max(1);
    Ok(json!({
        "exponents": rep.to_json(),
        "group_from_windows": group_of_windows(&rep.exponents, max_period).to_json(),
    }))
}

fn module_check(v: &Value) -> CmdResult {
    let m = module_arg(v, "module")?;
    match m.check_iterative() {
        IterativityReport::Pass { checked_up_to } => Ok(json!({"iterative": true, "checked_up_to": checked_up_to})),
        IterativityReport::Fail { n, m: mm, discrepancy } => {
            let partial = json!({"iterative": false});
            let var = m.coordinate().to_string();
            let rows: Vec<Vec<String>> = discrepancy
                .to_rows()
                .iter()
                .map(|r| r.iter().map(|f| f.to_string_in(&var)).collect())
                .collect();
            Err(CmdError::negative(
                "not-iterative",
                format!("iterativity fails at (n, m) = ({n}, {mm})"),
                json!({"n": n, "m": mm, "discrepancy": rows}),
            )
            .with_partial(partial))
        }
    }
}

fn projsys(v: &Value) -> CmdResult {
    let p = get_prime(v)?;
    let sys = RankOneProjSys::parse(p, get_str(v, "bits")?)?;
    let mode = v.get("mode").and_then(Value::as_str).unwrap_or("compile");
    let alpha = sys.alpha();
    let exponent = alpha.neg();
    let group = group_of_diagonal(std::slice::from_ref(&exponent)).to_json();
    match mode {
        "group" => Ok(json!({
            "alpha": alpha.to_ratio_string(),
            "exponent": exponent.to_ratio_string(),
            "group": group,
        })),
        "compile" => {
            let m = compile(&sys, get_order(v, p)?)?;
            let rep = m.local_exponents(Point::Finite(0))?;
            Ok(json!({
                "alpha": alpha.to_ratio_string(),
                "exponent": exponent.to_ratio_string(),
                "exponent_digits_match": rep.matches(std::slice::from_ref(&exponent)),
                "group": group,
                "module": m.to_json(),
            }))
        }
        other => Err(CmdError::input(format!("unknown projsys mode `{other}`"))),
    }
}
