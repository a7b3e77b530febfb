use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::commands::run;
use crate::report::{digest, Outcome, EXIT_INPUT};

const MAX_WORKERS: usize = 8;

/// Runs every parameter set of a JSON array file. Each entry names its
/// `command` (default `hg`); results are keyed by the SHA-256 of the entry.
pub fn sweep(path: &Path) -> Outcome {
    let items = match read_items(path) {
        Ok(items) => items,
        Err(message) => {
            return Outcome {
                report: json!({
                    "command": "sweep",
                    "input": path.display().to_string(),
                    "error": {"code": "input", "message": message, "details": null},
                }),
                exit: EXIT_INPUT,
            }
        }
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(MAX_WORKERS);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let outcomes: Vec<(String, Outcome)> = pool.install(|| {
        items
            .par_iter()
            .map(|item| {
                let mut payload = item.clone();
                let command = payload
                    .as_object_mut()
                    .and_then(|o| o.remove("command"))
                    .and_then(|c| c.as_str().map(str::to_string))
                    .unwrap_or_else(|| "hg".to_string());
                (digest(item), run(&command, &payload))
            })
            .collect()
    });
    let exit = outcomes.iter().map(|(_, o)| o.exit).max().unwrap_or(0);
    let mut results = Map::new();
    for (key, o) in outcomes {
        results.insert(key, o.report);
    }
    Outcome {
        report: json!({
            "command": "sweep",
            "input": path.display().to_string(),
            "count": results.len(),
            "results": results,
        }),
        exit,
    }
}

fn read_items(path: &Path) -> Result<Vec<Value>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("invalid JSON in {}: {e}", path.display()))?;
    match v {
        Value::Array(items) if items.iter().all(Value::is_object) => Ok(items),
        _ => Err("sweep file must hold a JSON array of objects".into()),
    }
}
