//! Points of the T–V diagram for CRIB, two-pulse echo and a gain/loss medium.
//!
//! cargo run --release --example tv_diagram

use qmemsim::certify::{tv_criterion, TvProtocol};

fn main() -> qmemsim::Result<()> {
    println!("{:>5} {:>8} {:>8} {:>9} {:>9}", "d", "T crib", "V crib", "T 2pe", "V 2pe");
    for d in [0.1, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let c = tv_criterion(&TvProtocol::Crib { d })?;
        let e = tv_criterion(&TvProtocol::TwoPulseEcho { d })?;
        println!(
            "{d:>5.1} {:>8.4} {:>8.4} {:>9.4} {:>9.3}",
            c.value,
            c.secondary.unwrap_or(f64::NAN),
            e.value,
            e.secondary.unwrap_or(f64::NAN)
        );
    }
    let s = tv_criterion(&TvProtocol::SlowLight { alpha: 0.5, beta: 1.0, length: 2.0 })?;
    println!("slow light α=0.5 β=1 L=2: T={:.4} V={:.4} flags {:?}", s.value, s.secondary.unwrap_or(f64::NAN), s.flags);
    Ok(())
}
