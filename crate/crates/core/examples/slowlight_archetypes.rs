//! Group delay and shaded-area readings of the four linear slow-light media.
//!
//! cargo run --release --example slowlight_archetypes

use qmemsim::numcore::{PulseShape, TransferFunction};
use qmemsim::slowlight::run_transfer_archetype;

fn main() -> qmemsim::Result<()> {
    let wide = PulseShape::gaussian(0.0, 10.0, 0.01);
    let short = PulseShape::gaussian(0.0, 0.05, 0.01);
    let media = [
        ("transparency hole", TransferFunction::inverted_lorentzian(20.0, 1.0), wide, 5.0),
        ("absorption line", TransferFunction::lorentzian(20.0, 1.0), short, 0.05),
        ("EIT", TransferFunction::eit(20.0, 4.0, 4.0), wide, 5.0),
        ("Raman", TransferFunction::raman(20.0, 10.0, 200.0 * 10f64.sqrt(), 1000.0, 100.0), short, 0.05),
    ];
    for (name, tf, signal, cut) in media {
        let r = run_transfer_archetype(&tf, &signal, cut, 20.0)?;
        println!(
            "{name:<18} delay {:>8.4} (predicted {:>8.4})  transmission {:.3}  energy after t={cut}: {:.3}",
            r.group_delay, r.predicted_delay, r.transmission, r.shaded_area
        );
    }
    Ok(())
}
