use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use super::{Point, StratModule};
use crate::error::{Error, Result};
use crate::ffalg::{parse_ratfn, FpRatFn, Prime};
use crate::matrix::Matrix;

pub(super) fn to_json(m: &StratModule) -> Value {
    let var = m.coordinate();
    let mut matrices = Map::new();
    for (i, a) in m.matrices().iter().enumerate() {
        let rows: Vec<Vec<String>> = a
            .to_rows()
            .iter()
            .map(|row| row.iter().map(|f| f.to_string_in(var)).collect())
            .collect();
        matrices.insert((i + 1).to_string(), json!(rows));
    }
    json!({
        "p": m.prime().get(),
        "coordinate": var,
        "rank": m.rank(),
        "order_bound": m.order_bound(),
        "matrices": matrices,
        "singularities": m.singularities().iter().map(Point::to_string).collect::<Vec<_>>(),
    })
}

pub(super) fn from_json(v: &Value) -> Result<StratModule> {
    let bad = |what: &str| Error::Parse(format!("module JSON: {what}"));
    let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
    let p = obj.get("p").and_then(Value::as_u64).ok_or_else(|| bad("missing integer `p`"))?;
    let prime = Prime::new(p)?;
    let var = obj
        .get("coordinate")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing string `coordinate`"))?;
    let rank = obj
        .get("rank")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing integer `rank`"))? as usize;
    let order_bound = obj
        .get("order_bound")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing integer `order_bound`"))? as usize;
    if order_bound == 0 {
        return Err(Error::EmptyOrderBound);
    }
    let mats = obj
        .get("matrices")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("missing object `matrices`"))?;
    let mut matrices = Vec::with_capacity(order_bound);
    for n in 1..=order_bound {
        let rows = mats
            .get(&n.to_string())
            .and_then(Value::as_array)
            .ok_or_else(|| bad(&format!("missing matrix for order {n}")))?;
        let parsed: Vec<Vec<FpRatFn>> = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("matrix rows must be arrays"))?
                    .iter()
                    .map(|x| {
                        let s = x.as_str().ok_or_else(|| bad("matrix entries must be strings"))?;
                        parse_ratfn(prime, s, var)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let a = Matrix::from_rows(parsed)?;
        if a.rows() != rank || a.cols() != rank {
            return Err(Error::RankMismatch(rank, a.rows().max(a.cols())));
        }
        matrices.push(a);
    }
    if mats.len() != order_bound {
        return Err(bad("matrix keys must be exactly 1..order_bound"));
    }
    let sing: BTreeSet<Point> = obj
        .get("singularities")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing array `singularities`"))?
        .iter()
        .map(|x| {
            let s = x.as_str().ok_or_else(|| bad("singularities must be strings"))?;
            Point::parse(prime, s)
        })
        .collect::<Result<_>>()?;
    StratModule::new(prime, var, matrices, sing)
}
