mod commands;
mod report;
mod sweep;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use report::{CmdError, Outcome};

/// Iterative differential modules in characteristic p.
#[derive(Parser)]
#[command(name = "stratus", version, about)]
struct Cli {
    /// Compact JSON on stdout (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Indented human-readable output instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pretty: bool,
    /// Run every parameter set in a JSON array file.
    #[arg(long, value_name = "FILE")]
    sweep: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct PrimeArg {
    /// The prime p.
    #[arg(long = "p", value_name = "P")]
    p: u64,
}

#[derive(Args)]
struct OrderArg {
    /// Order bound N (defaults to p^2).
    #[arg(long, value_name = "N", env = commands::ORDER_ENV)]
    order: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Binomial coefficient C(alpha, n) mod p.
    Lucas {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        n: u64,
    },
    /// Leading p-adic digits of a rational.
    Digits {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Number of digits.
        #[arg(long, value_name = "K")]
        precision: Option<u64>,
    },
    /// Reduction of the hypergeometric equation with parameters alpha, beta, gamma.
    Hg {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        /// Last pipeline stage to run.
        #[arg(long, value_enum, default_value_t = Stage::Verify)]
        stage: Stage,
        #[command(flatten)]
        order: OrderArg,
        /// Series precision for solution checks (defaults to p^3).
        #[arg(long, value_name = "K")]
        precision: Option<u64>,
        /// Largest n in the valuation table (defaults to p^4).
        #[arg(long, value_name = "N")]
        n_max: Option<u64>,
    },
    /// Constructions and checks on modules.
    #[command(subcommand)]
    Module(ModuleCommand),
    /// Rank-one projective systems given by a bit profile like "[101](0)".
    Projsys {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long)]
        bits: String,
        #[arg(long, value_enum, default_value_t = ProjMode::Compile)]
        mode: ProjMode,
        #[command(flatten)]
        order: OrderArg,
    },
}

#[derive(Subcommand)]
enum ModuleCommand {
    /// The rank-one module E(alpha).
    EAlpha {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[command(flatten)]
        order: OrderArg,
    },
    /// The rank-one module of prod (z - c)^a, factors given as "c:a".
    Symbol {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long = "factor", value_name = "C:A", required = true, allow_hyphen_values = true)]
        factors: Vec<String>,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Tensor product of two modules.
    Tensor {
        /// Module JSON file, or "-" for stdin.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    /// Dual module.
    Dual {
        #[arg(long)]
        input: PathBuf,
    },
    /// Pullback along z = t^e.
    Pullback {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        e: u64,
    },
    /// Local exponents at a point ("0", "1", ..., or "inf").
    Exponents {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "0")]
        point: String,
    },
    /// Iterativity check.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    Criterion,
    Valuations,
    Reduce,
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjMode {
    Compile,
    Group,
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("named").get_name().to_string()
}

fn read_json(path: &PathBuf) -> Result<Value, CmdError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CmdError::input(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CmdError::input(format!("cannot read {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| CmdError::input(format!("invalid JSON in {}: {e}", path.display())))
}

fn insert_opt(map: &mut Map<String, Value>, key: &str, v: Option<u64>) {
    if let Some(x) = v {
        map.insert(key.into(), json!(x));
    }
}

/// Command name and JSON payload for a parsed invocation.
fn request(cmd: Command) -> Result<(String, Value), (String, CmdError)> {
    let mut m = Map::new();
    let name = match cmd {
        Command::Lucas { prime, alpha, n } => {
            m.insert("p".into(), json!(prime.p));
            m.insert("alpha".into(), json!(alpha));
            m.insert("n".into(), json!(n));
            "lucas"
        }
        Command::Digits { prime, alpha, precision } => {
            m.insert("p".into(), json!(prime.p));
            m.insert("alpha".into(), json!(alpha));
            insert_opt(&mut m, "k", precision);
            "digits"
        }
        Command::Hg {
            prime,
            alpha,
            beta,
            gamma,
            stage,
            order,
            precision,
            n_max,
        } => {
            m.insert("p".into(), json!(prime.p));
            m.insert("alpha".into(), json!(alpha));
            m.insert("beta".into(), json!(beta));
            m.insert("gamma".into(), json!(gamma));
            m.insert("stage".into(), json!(value_name(stage)));
            insert_opt(&mut m, "order", order.order);
            insert_opt(&mut m, "precision", precision);
            insert_opt(&mut m, "n_max", n_max);
            "hg"
        }
        Command::Projsys { prime, bits, mode, order } => {
            m.insert("p".into(), json!(prime.p));
            m.insert("bits".into(), json!(bits));
            m.insert("mode".into(), json!(value_name(mode)));
            insert_opt(&mut m, "order", order.order);
            "projsys"
        }
        Command::Module(sub) => {
            let (name, files): (&str, Vec<(&str, PathBuf)>) = match sub {
                ModuleCommand::EAlpha { prime, alpha, order } => {
                    m.insert("p".into(), json!(prime.p));
                    m.insert("alpha".into(), json!(alpha));
                    insert_opt(&mut m, "order", order.order);
                    ("module e-alpha", vec![])
                }
                ModuleCommand::Symbol { prime, factors, order } => {
                    m.insert("p".into(), json!(prime.p));
                    m.insert("factors".into(), json!(factors));
                    insert_opt(&mut m, "order", order.order);
                    ("module symbol", vec![])
                }
                ModuleCommand::Tensor { input, other } => {
                    ("module tensor", vec![("module", input), ("other", other)])
                }
                ModuleCommand::Dual { input } => ("module dual", vec![("module", input)]),
                ModuleCommand::Pullback { input, e } => {
                    m.insert("e".into(), json!(e));
                    ("module pullback", vec![("module", input)])
                }
                ModuleCommand::Exponents { input, point } => {
                    m.insert("point".into(), json!(point));
                    ("module exponents", vec![("module", input)])
                }
                ModuleCommand::Check { input } => ("module check", vec![("module", input)]),
            };
            for (key, path) in files {
                let v = read_json(&path).map_err(|e| (name.to_string(), e))?;
                m.insert(key.into(), v);
            }
            name
        }
    };
    Ok((name.to_string(), Value::Object(m)))
}

fn emit(outcome: &Outcome, pretty: bool) {
    if pretty {
        print!("{}", report::pretty(&outcome.report));
    } else {
        println!("{}", outcome.report);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match (cli.sweep, cli.command) {
        (Some(_), Some(_)) => {
            eprintln!("stratus: --sweep cannot be combined with a subcommand");
            return ExitCode::from(report::EXIT_INPUT);
        }
        (Some(path), None) => sweep::sweep(&path),
        (None, Some(cmd)) => match request(cmd) {
            Ok((name, payload)) => commands::run(&name, &payload),
            Err((name, err)) => report::assemble(&name, &Value::Null, Err(err)),
        },
        (None, None) => {
            eprintln!("stratus: a subcommand or --sweep FILE is required (see --help)");
            return ExitCode::from(report::EXIT_INPUT);
        }
    };
    emit(&outcome, cli.pretty);
    ExitCode::from(outcome.exit)
}
