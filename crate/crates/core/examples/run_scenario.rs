//! Run a bundled scenario through the library API and print its report.
//!
//! cargo run --release --example run_scenario -- fig5_efficiency_compare

use std::path::Path;

use qmemsim::scenario::{list_scenarios, run, RunOptions};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "certify_tv".into());
    if list_scenarios().iter().all(|e| e.name != name) {
        eprintln!("unknown scenario {name}; bundled:");
        for e in list_scenarios() {
            eprintln!("  {:<26} {}", e.name, e.description);
        }
        std::process::exit(2);
    }
    let out = std::env::temp_dir().join("qmemsim").join(&name);
    match run(Path::new(&name), &RunOptions { out: Some(out), ..Default::default() }) {
        Ok(summary) => {
            let outcome = summary.outcome.expect("artifacts were written");
            println!("{}", serde_json::to_string_pretty(&outcome.report).unwrap());
            println!("artifacts in {}", summary.out_dir.unwrap().display());
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
