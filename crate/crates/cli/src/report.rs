use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use stratus::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NEGATIVE: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

/// A failed command: machine-readable code, message, exit status, and any
/// partial result computed before the failure.
#[derive(Debug)]
pub struct CmdError {
    pub code: &'static str,
    pub message: String,
    pub exit: u8,
    pub details: Value,
    pub partial: Option<Value>,
}

impl CmdError {
    pub fn input(message: impl Into<String>) -> Self {
        CmdError {
            code: "input",
            message: message.into(),
            exit: EXIT_INPUT,
            details: Value::Null,
            partial: None,
        }
    }

    pub fn negative(code: &'static str, message: impl Into<String>, details: Value) -> Self {
        CmdError {
            code,
            message: message.into(),
            exit: EXIT_NEGATIVE,
            details,
            partial: None,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CmdError {
            code: "invariant-violation",
            message: message.into(),
            exit: EXIT_INTERNAL,
            details: Value::Null,
            partial: None,
        }
    }

    pub fn with_partial(mut self, partial: Value) -> Self {
        self.partial = Some(partial);
        self
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let (code, exit, details) = match &e {
            Error::NotPrime(_) => ("not-prime", EXIT_INPUT, Value::Null),
            Error::PrimeMismatch(..) => ("prime-mismatch", EXIT_INPUT, Value::Null),
            Error::CoordinateMismatch(..) => ("coordinate-mismatch", EXIT_INPUT, Value::Null),
            Error::RankMismatch(..) => ("rank-mismatch", EXIT_INPUT, Value::Null),
            Error::Parse(_) => ("parse", EXIT_INPUT, Value::Null),
            Error::NotIntegral { .. } => ("not-integral", EXIT_INPUT, Value::Null),
            Error::EmptyOrderBound => ("empty-order-bound", EXIT_INPUT, Value::Null),
            Error::OrderOutOfRange { .. } => ("order-out-of-range", EXIT_INPUT, Value::Null),
            Error::WildCovering { .. } => ("wild-covering", EXIT_INPUT, Value::Null),
            Error::UnsupportedSingularity(_) => ("unsupported-singularity", EXIT_INPUT, Value::Null),
            Error::InvalidBit { digit } => ("invalid-bit", EXIT_INPUT, json!({"digit": digit})),
            Error::Invalid(_) => ("invalid", EXIT_INPUT, Value::Null),
            Error::NotRegularSingular(pt) => ("not-regular-singular", EXIT_NEGATIVE, json!({"point": pt})),
            Error::NotSplit { point, reason } => {
                ("not-split", EXIT_NEGATIVE, json!({"point": point, "reason": reason}))
            }
            Error::NonIntegralCoefficient { n, row, col, valuation } => (
                "non-integral-coefficient",
                EXIT_NEGATIVE,
                json!({"n": n, "row": row, "col": col, "valuation": valuation}),
            ),
            Error::PrecisionExhausted(_) => ("precision-exhausted", EXIT_INTERNAL, Value::Null),
            Error::DivisionByZero => ("division-by-zero", EXIT_INTERNAL, Value::Null),
        };
        CmdError {
            code,
            message: e.to_string(),
            exit,
            details,
            partial: None,
        }
    }
}

pub type CmdResult = std::result::Result<Value, CmdError>;

pub struct Outcome {
    pub report: Value,
    pub exit: u8,
}

pub fn assemble(command: &str, input: &Value, result: CmdResult) -> Outcome {
    let mut report = Map::new();
    report.insert("command".into(), json!(command));
    report.insert("input".into(), input.clone());
    match result {
        Ok(v) => {
            report.insert("result".into(), v);
            Outcome {
                report: Value::Object(report),
                exit: EXIT_OK,
            }
        }
        Err(e) => {
            if let Some(partial) = e.partial {
                report.insert("result".into(), partial);
            }
            report.insert(
                "error".into(),
                json!({"code": e.code, "message": e.message, "details": e.details}),
            );
            Outcome {
                report: Value::Object(report),
                exit: e.exit,
            }
        }
    }
}

/// Hex SHA-256 of the compact serialization.
pub fn digest(v: &Value) -> String {
    hex::encode(Sha256::digest(v.to_string().as_bytes()))
}

/// Indented `key: value` rendering for terminals.
pub fn pretty(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(a.iter().map(|x| scalar(x).unwrap_or_default()).collect::<Vec<_>>().join(" "))
        }
        Value::Array(a) if a.iter().all(|x| x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))) => {
            let rows: Vec<String> = a
                .iter()
                .map(|r| format!("[{}]", scalar(r).unwrap_or_default()))
                .collect();
            Some(rows.join(" "))
        }
        _ => None,
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
