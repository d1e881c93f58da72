//! The classical arguments and their λ-corrected counterparts.

use lambda_arith::scenarios::{run_scenario, ScenarioParams, SCENARIOS};

fn main() {
    let which: Vec<String> = std::env::args().skip(1).collect();
    let names: Vec<&str> = if which.is_empty() {
        SCENARIOS.to_vec()
    } else {
        which.iter().map(String::as_str).collect()
    };
    let params = ScenarioParams::default();
    for name in names {
        match run_scenario(name, &params) {
            Ok(r) => {
                println!("{r}");
                println!("{}\n", if r.passed() { "all evidence passes" } else { "EVIDENCE FAILED" });
            }
            Err(e) => println!("{name}: {e}\n"),
        }
    }
}
