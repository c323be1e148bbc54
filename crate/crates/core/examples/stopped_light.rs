//! Full storage-and-retrieval runs of the stopped-light memories.
//!
//! The spectral-hole memory takes a few minutes; pass `--all` to include it.
//!
//! cargo run --release --example stopped_light [-- --all]

use qmemsim::slowlight::{run_slowlight, SlowLightScenario};

fn main() -> qmemsim::Result<()> {
    let mut runs = vec![SlowLightScenario::fid(), SlowLightScenario::eit(), SlowLightScenario::raman()];
    if std::env::args().any(|a| a == "--all") {
        runs.insert(0, SlowLightScenario::shome());
    }
    for s in runs {
        let r = run_slowlight(&s)?;
        println!(
            "{:<6} efficiency {:.4}  frequency-domain estimate {:.4}  echo centroid {:.3}",
            s.protocol.name(),
            r.numeric,
            r.analytic,
            r.echo_time
        );
        for w in &r.warnings {
            println!("       warning: {w}");
        }
    }
    Ok(())
}
