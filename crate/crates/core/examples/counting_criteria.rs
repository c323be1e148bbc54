//! Photon-counting certification: autocorrelation of a retrieved photon,
//! Cauchy–Schwarz ratio and Bell visibility of stored pairs.
//!
//! cargo run --release --example counting_criteria

use qmemsim::certify::*;

fn main() -> qmemsim::Result<()> {
    for p_dc in [0.0, 1e-3, 1e-2, 0.1] {
        let r = g2_memory(&DetectorModel::new(0.5, p_dc, 0.5)?)?;
        println!("g2 with p_dc={p_dc:<6}: {:.4} (non-classical: {})", r.value, r.passes_quantum);
    }
    println!("g2 of a 2PE echo at d=1: {:.4}", g2_2pe(1.0, 0.5)?);

    let a = DetectorModel::new(0.6, 1e-3, 0.5)?;
    let b = DetectorModel::new(0.6, 1e-3, 1.0)?;
    for p in [0.01, 0.05, 0.1] {
        let r = cauchy_schwarz(&a, &b, p)?;
        let v = bell_visibility(&a, &b, p)?;
        println!("p={p:<5} R={:>9.3} ({})  V={:.4} ({})", r.value, r.passes_quantum, v.value, v.passes_quantum);
    }
    Ok(())
}
