use std::io::{self, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use lambda_arith::cli::eval::EvalOptions;
use lambda_arith::cli::{render_error, repl, run_batch, BatchOptions, EXIT_EVAL, EXIT_OK};
use lambda_arith::scenarios::{run_all, run_scenario, ScenarioParams};

/// Calculator for expressions in the infinite number `lam`.
#[derive(Parser, Debug)]
#[command(name = "lamcalc", version)]
struct Args {
    /// Batch file, one statement per line; `-` reads stdin. Without it, starts the REPL.
    file: Option<PathBuf>,
    /// Emit JSON (schema 1).
    #[arg(long)]
    json: bool,
    /// Number of series terms kept before an O(...) bound.
    #[arg(long, default_value_t = 8)]
    trunc_order: usize,
    /// Bit cap for sign and ordering decisions.
    #[arg(long, default_value_t = 4096)]
    precision: u32,
    /// Check each result by substituting lam = N, e.g. 12,120,1200.
    #[arg(long, value_delimiter = ',')]
    oracle: Vec<u64>,
    /// Run one scenario by name, or `all`.
    #[arg(long)]
    scenario: Option<String>,
}

fn scenarios(name: &str, opts: &EvalOptions, as_json: bool) -> i32 {
    let params = ScenarioParams {
        trunc: opts.trunc,
        ..ScenarioParams::default()
    };
    let reports = if name == "all" {
        run_all(&params)
    } else {
        run_scenario(name, &params).map(|r| vec![r])
    };
    match reports {
        Ok(rs) => {
            let ok = rs.iter().all(|r| r.passed());
            if as_json {
                let v = json!({
                    "schema": 1,
                    "results": rs.iter().map(|r| json!({
                        "input": format!("scenario({})", r.name),
                        "status": if r.passed() { "ok" } else { "fail" },
                        "result": r.to_json(),
                    })).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            } else {
                for r in &rs {
                    println!("{r}");
                }
            }
            if ok {
                EXIT_OK
            } else {
                EXIT_EVAL
            }
        }
        Err(e) => {
            eprintln!("{}", render_error(&e));
            EXIT_EVAL
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = EvalOptions {
        trunc: args.trunc_order,
        precision: args.precision,
    };
    let code = if let Some(name) = &args.scenario {
        scenarios(name, &opts, args.json)
    } else if let Some(path) = &args.file {
        let text = if path.as_os_str() == "-" {
            io::read_to_string(io::stdin())
        } else {
            std::fs::read_to_string(path)
        };
        let text = match text {
            Ok(t) => t,
            Err(e) => {
                eprintln!("lamcalc: {}: {e}", path.display());
                return ExitCode::from(EXIT_EVAL as u8);
            }
        };
        let report = run_batch(
            &text,
            &BatchOptions {
                eval: opts,
                oracle_ns: args.oracle.clone(),
            },
        );
        if args.json {
            println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json"));
        } else {
            print!("{}", report.to_text());
        }
        report.exit_code
    } else {
        let stdin = io::stdin();
        let prompt = stdin.is_terminal();
        if let Err(e) = repl(stdin.lock(), io::stdout(), &opts, prompt) {
            eprintln!("lamcalc: {e}");
        }
        EXIT_OK
    };
    ExitCode::from(code as u8)
}
