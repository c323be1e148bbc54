//! A photon passing a chain of N atoms: storage, retrieval and amplification
//! against the continuous-medium limits.
//!
//! cargo run --release --example atomic_chain

use qmemsim::certify::*;

fn main() -> qmemsim::Result<()> {
    for d in [0.5, 2.0] {
        println!("d = {d}");
        for n in [10, 50, 200] {
            let m = ChainModel::new(n, d)?;
            let fwd = chain_efficiency(&m, ChainDirection::Forward)?;
            let bwd = chain_efficiency(&m, ChainDirection::Backward)?;
            let inv = inverted_emission_exact(&m, n)?;
            println!(
                "  N={n:>3}  absorbed {:.4}/{:.4}  forward {:.4}/{:.4}  backward {:.4}/{:.4}  emitted {:.3}/{:.3}",
                fwd.absorption, fwd.absorption_limit, fwd.exact, fwd.limit, bwd.exact, bwd.limit, inv.exact, inv.limit
            );
            for w in m.warnings() {
                println!("         {w}");
            }
        }
    }
    Ok(())
}
